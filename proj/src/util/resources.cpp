#include "fedlibre/util/resources.hpp"

#include "fedlibre/util/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace fedlibre {

namespace detail {
struct EmbeddedFile {
    const char* name;
    const char* data;
    std::size_t size;
};
extern const EmbeddedFile kEmbeddedFiles[];
extern const std::size_t kEmbeddedFileCount;
} // namespace detail

std::optional<std::string_view> bundled_resource(std::string_view relative_path)
{
    for (std::size_t i = 0; i < detail::kEmbeddedFileCount; ++i) {
        const auto& f = detail::kEmbeddedFiles[i];
        if (relative_path == f.name)
            return std::string_view(f.data, f.size);
    }
    return std::nullopt;
}

std::vector<std::string_view> bundled_resource_names()
{
    std::vector<std::string_view> names;
    for (std::size_t i = 0; i < detail::kEmbeddedFileCount; ++i)
        names.emplace_back(detail::kEmbeddedFiles[i].name);
    return names;
}

std::string load_resource(const std::optional<std::filesystem::path>& override_dir, std::string_view relative_path)
{
    if (override_dir) {
        const auto candidate = *override_dir / std::filesystem::path(relative_path);
        if (std::filesystem::exists(candidate))
            return read_file(candidate);
    }
    if (auto bundled = bundled_resource(relative_path))
        return std::string(*bundled);
    throw Error(Errc::Config, "missing resource " + std::string(relative_path));
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::StorageFailure, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents)
{
    const auto tmp = path.string() + ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0)
        throw Error(Errc::StorageFailure, "cannot write " + tmp);
    std::size_t written = 0;
    while (written < contents.size()) {
        const auto n = ::write(fd, contents.data() + written, contents.size() - written);
        if (n <= 0) {
            ::close(fd);
            throw Error(Errc::StorageFailure, "short write to " + tmp);
        }
        written += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error(Errc::StorageFailure, "cannot rename " + tmp + ": " + ec.message());
}

} // namespace fedlibre
