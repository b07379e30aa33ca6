#pragma once

#include "fedlibre/harvester/envelope.hpp"
#include "fedlibre/util/time.hpp"
#include "fedlibre/vocabulary/facets.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace fedlibre::store {

enum class Lifecycle { Harvested, Validated, Published, Withdrawn };

std::string_view to_string(Lifecycle l) noexcept;
Lifecycle parse_lifecycle(std::string_view s);

enum class UpsertOutcome { Added, Updated, Unchanged, MarkedDeleted };

std::string_view to_string(UpsertOutcome o) noexcept;

struct StoredRecord {
    RecordKey key;
    RecordEnvelope envelope;
    std::vector<vocabulary::FacetAssignment> facets;
    Lifecycle lifecycle = Lifecycle::Harvested;
    Timestamp first_seen{};
    Timestamp last_updated{};

    bool searchable() const { return lifecycle == Lifecycle::Published; }
    /// Visible through OAI: published, or withdrawn (reported as deleted).
    bool exposed() const { return lifecycle == Lifecycle::Published || lifecycle == Lifecycle::Withdrawn; }
};

using RecordPtr = std::shared_ptr<const StoredRecord>;

struct ListFilter {
    std::optional<Lifecycle> lifecycle;
    std::optional<std::string> source_id;
    std::optional<Timestamp> since_datestamp;
};

/// One JSON object per record; the same encoding is used for the log.
std::string serialize_record(const StoredRecord& r);
/// Throws Error(StorageFailure) on malformed input.
StoredRecord deserialize_record(std::string_view line);

struct StoreOptions {
    bool auto_publish = true;
    /// Replay only: no torn-tail repair, and every mutation throws
    /// StorageFailure. For readers sharing the directory with a writer.
    bool read_only = false;
    const Clock* clock = nullptr; // system clock when null
    const vocabulary::Vocabulary* vocabulary = nullptr; // builtin when null
};

/// Durable metadata store keyed by (sourceId, oaiIdentifier).
///
/// Layout of the store directory:
///   records.log       one JSON record per line; later lines supersede earlier
///                     ones with the same key; `compact()` rewrites it
///   registry.json     source registry (SourceRegistry)
///   checkpoints.json  harvest checkpoints (CheckpointStore)
///
/// Writes are serialized through one writer lock; readers get consistent
/// snapshots of immutable records.
class RecordStore {
public:
    /// Creates the directory if needed and replays the log. A torn final
    /// line (crash mid-append) is truncated away.
    explicit RecordStore(std::filesystem::path dir, StoreOptions options = {});
    ~RecordStore();

    RecordStore(const RecordStore&) = delete;
    RecordStore& operator=(const RecordStore&) = delete;

    const std::filesystem::path& directory() const noexcept { return dir_; }

    /// Last-writer-wins by datestamp; equal datestamps are Unchanged.
    /// Throws InvalidRecord or StorageFailure.
    UpsertOutcome upsert(const RecordEnvelope& envelope);

    /// Throws NotFound.
    RecordPtr get(const RecordKey& key) const;
    RecordPtr find(const RecordKey& key) const;

    /// Ordered by (datestamp, key) ascending.
    std::vector<RecordPtr> list_all(const ListFilter& filter = {}) const;
    std::size_t size() const;
    /// Incremented on every mutation; lets readers detect staleness.
    std::uint64_t generation() const;

    /// HARVESTED/VALIDATED -> PUBLISHED. Throws NotFound, or BadArgument for
    /// withdrawn records.
    void publish(const RecordKey& key);

    /// Rewrites records.log with one line per live key, in key order.
    void compact();

    /// Flushes the log to stable storage.
    void sync();

private:
    void append_line(const std::string& line);
    void replay();

    std::filesystem::path dir_;
    std::filesystem::path log_path_;
    StoreOptions options_;
    SystemClock system_clock_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, RecordPtr> records_;
    std::uint64_t generation_ = 0;
    int log_fd_ = -1;
};

} // namespace fedlibre::store
