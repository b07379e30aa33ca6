#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fedlibre {

/// Data files compiled into the binary from the project's data/ directory,
/// addressed by their path relative to it (e.g. "facets/format.json").
std::optional<std::string_view> bundled_resource(std::string_view relative_path);
std::vector<std::string_view> bundled_resource_names();

/// Reads `relative_path` from `override_dir` when given and the file exists
/// there, else from the bundled copy. Throws Error(Config) when neither exists.
std::string load_resource(const std::optional<std::filesystem::path>& override_dir, std::string_view relative_path);

std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename, so readers never observe a
/// partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace fedlibre
