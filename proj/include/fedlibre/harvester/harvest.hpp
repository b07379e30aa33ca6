#pragma once

#include "fedlibre/harvester/oai_client.hpp"
#include "fedlibre/store/checkpoint.hpp"
#include "fedlibre/store/record_store.hpp"
#include "fedlibre/store/source.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fedlibre::harvester {

struct HarvestReport {
    std::string source_id;
    std::uint64_t added = 0;
    std::uint64_t updated = 0;
    std::uint64_t unchanged = 0;
    std::uint64_t marked_deleted = 0;
    /// Records skipped because their metadata could not be parsed.
    std::uint64_t errors = 0;
    std::uint64_t requests = 0;
    store::RunStatus status = store::RunStatus::Ok;
    bool skipped = false; // source disabled
    std::optional<Timestamp> from;
    Timestamp until{};
    std::string message;

    std::uint64_t seen() const noexcept { return added + updated + unchanged + marked_deleted; }
};

struct HarvestOptions {
    /// Ignore the checkpoint and harvest everything up to now.
    bool full = false;
    const Clock* clock = nullptr; // system clock when null
    ClientOptions client;
};

/// One harvest window for `source`: from the checkpoint (absent on the first
/// run or with `full`) until the run start. The checkpoint advances to the
/// window end only when every page was received. Transport and protocol
/// failures end the run with status FAILED instead of throwing.
///
/// A source declaring `lom` is listed twice: once in lom, then in oai_dc for
/// the identifiers the lom listing did not return.
HarvestReport harvest_incremental(const store::SourceDescriptor& source, store::RecordStore& records,
                                  store::CheckpointStore& checkpoints, HttpTransport& transport,
                                  const HarvestOptions& options = {});

/// Harvests every enabled source, at most `parallel` at a time. Reports are
/// in registry order; disabled sources get a skipped report.
std::vector<HarvestReport> harvest_all(const store::SourceRegistry& registry, store::RecordStore& records,
                                       store::CheckpointStore& checkpoints, HttpTransport& transport,
                                       const HarvestOptions& options = {}, unsigned parallel = 4);

} // namespace fedlibre::harvester
