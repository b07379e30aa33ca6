#include "fedlibre/store/checkpoint.hpp"

#include "fedlibre/util/error.hpp"
#include "fedlibre/util/resources.hpp"

#include <json.hpp>

namespace fedlibre::store {

namespace {

nlohmann::json load_all(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        return nlohmann::json::object();
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::StorageFailure, "checkpoints.json: " + std::string(e.what()));
    }
}

RunStatus parse_status(std::string_view s)
{
    if (s == "PARTIAL")
        return RunStatus::Partial;
    if (s == "FAILED")
        return RunStatus::Failed;
    return RunStatus::Ok;
}

} // namespace

std::string_view to_string(RunStatus s) noexcept
{
    switch (s) {
    case RunStatus::Ok: return "OK";
    case RunStatus::Partial: return "PARTIAL";
    case RunStatus::Failed: return "FAILED";
    }
    return "OK";
}

CheckpointStore::CheckpointStore(std::filesystem::path dir)
{
    std::filesystem::create_directories(dir);
    path_ = dir / "checkpoints.json";
}

std::optional<HarvestCheckpoint> CheckpointStore::get(std::string_view source_id) const
{
    std::lock_guard lock(mutex_);
    const auto all = load_all(path_);
    const auto it = all.find(std::string(source_id));
    if (it == all.end())
        return std::nullopt;
    HarvestCheckpoint c;
    c.source_id = std::string(source_id);
    if (it->contains("lastSuccessfulUntil") && !(*it)["lastSuccessfulUntil"].is_null())
        c.last_successful_until = parse_utc((*it)["lastSuccessfulUntil"].get<std::string>());
    c.records_seen = it->value("recordsSeen", std::uint64_t{0});
    c.last_run_status = parse_status(it->value("lastRunStatus", std::string("OK")));
    return c;
}

void CheckpointStore::put(const HarvestCheckpoint& checkpoint)
{
    std::lock_guard lock(mutex_);
    auto all = load_all(path_);
    std::optional<Timestamp> until = checkpoint.last_successful_until;
    if (auto it = all.find(checkpoint.source_id); it != all.end() && it->contains("lastSuccessfulUntil") &&
                                                   !(*it)["lastSuccessfulUntil"].is_null()) {
        const auto previous = parse_utc((*it)["lastSuccessfulUntil"].get<std::string>());
        if (previous && (!until || *previous > *until))
            until = previous;
    }
    all[checkpoint.source_id] = {
        {"lastSuccessfulUntil", until ? nlohmann::json(format_utc(*until)) : nlohmann::json(nullptr)},
        {"recordsSeen", checkpoint.records_seen},
        {"lastRunStatus", to_string(checkpoint.last_run_status)},
    };
    write_file_atomic(path_, all.dump(2) + "\n");
}

} // namespace fedlibre::store
