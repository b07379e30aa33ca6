#pragma once

#include "fedlibre/util/time.hpp"

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

namespace fedlibre::store {

enum class RunStatus { Ok, Partial, Failed };

std::string_view to_string(RunStatus s) noexcept;

struct HarvestCheckpoint {
    std::string source_id;
    std::optional<Timestamp> last_successful_until;
    std::uint64_t records_seen = 0;
    RunStatus last_run_status = RunStatus::Ok;

    friend bool operator==(const HarvestCheckpoint&, const HarvestCheckpoint&) = default;
};

/// Per-source checkpoints persisted as checkpoints.json.
class CheckpointStore {
public:
    explicit CheckpointStore(std::filesystem::path dir);

    std::optional<HarvestCheckpoint> get(std::string_view source_id) const;
    /// `last_successful_until` never moves backwards: an older value is
    /// ignored in favour of the stored one.
    void put(const HarvestCheckpoint& checkpoint);

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
};

} // namespace fedlibre::store
