#include "fedlibre/harvester/harvest.hpp"

#include "fedlibre/util/error.hpp"

#include <atomic>
#include <set>
#include <thread>

namespace fedlibre::harvester {

namespace {

void count(HarvestReport& report, store::UpsertOutcome outcome)
{
    switch (outcome) {
    case store::UpsertOutcome::Added: ++report.added; break;
    case store::UpsertOutcome::Updated: ++report.updated; break;
    case store::UpsertOutcome::Unchanged: ++report.unchanged; break;
    case store::UpsertOutcome::MarkedDeleted: ++report.marked_deleted; break;
    }
}

} // namespace

HarvestReport harvest_incremental(const store::SourceDescriptor& source, store::RecordStore& records,
                                  store::CheckpointStore& checkpoints, HttpTransport& transport,
                                  const HarvestOptions& options)
{
    SystemClock system_clock;
    const Clock& clock = options.clock ? *options.clock : system_clock;

    HarvestReport report;
    report.source_id = source.source_id;
    report.until = clock.now();
    if (!source.enabled) {
        report.skipped = true;
        report.message = "source disabled";
        return report;
    }

    const auto previous = checkpoints.get(source.source_id);
    if (!options.full && previous)
        report.from = previous->last_successful_until;

    auto client_options = options.client;
    client_options.source_id = source.source_id;
    OaiClient client(source.base_url, transport, client_options);

    const auto on_record = [&](RecordEnvelope&& e) { count(report, records.upsert(e)); };
    const auto on_error = [&](const std::string&, const Error&) { ++report.errors; };

    try {
        const auto identity = client.identify();
        HarvestWindow window;
        window.from = report.from;
        window.until = report.until;
        window.granularity = identity.granularity;

        std::set<std::string> seen;
        if (source.metadata_prefix == metadata::SchemaTag::Lom) {
            try {
                client.list_records("lom", window, [&](RecordEnvelope&& e) {
                    seen.insert(e.oai_identifier);
                    on_record(std::move(e));
                }, on_error);
            } catch (const OaiError& e) {
                if (e.oai_code() != "cannotDisseminateFormat")
                    throw;
            }
        }
        client.list_records("oai_dc", window, [&](RecordEnvelope&& e) {
            if (!seen.contains(e.oai_identifier))
                on_record(std::move(e));
        }, on_error);
        report.status = report.errors ? store::RunStatus::Partial : store::RunStatus::Ok;
    } catch (const Error& e) {
        report.status = store::RunStatus::Failed;
        report.message = std::string(to_string(e.code())) + ": " + e.what();
    }
    report.requests = client.request_count();
    records.sync();

    store::HarvestCheckpoint cp;
    cp.source_id = source.source_id;
    cp.records_seen = (previous ? previous->records_seen : 0) + report.seen();
    cp.last_run_status = report.status;
    if (report.status != store::RunStatus::Failed)
        cp.last_successful_until = report.until;
    else if (previous)
        cp.last_successful_until = previous->last_successful_until;
    checkpoints.put(cp);
    return report;
}

std::vector<HarvestReport> harvest_all(const store::SourceRegistry& registry, store::RecordStore& records,
                                       store::CheckpointStore& checkpoints, HttpTransport& transport,
                                       const HarvestOptions& options, unsigned parallel)
{
    const auto sources = registry.list();
    std::vector<HarvestReport> reports(sources.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (auto i = next++; i < sources.size(); i = next++)
            reports[i] = harvest_incremental(sources[i], records, checkpoints, transport, options);
    };
    const auto n = std::max(1u, std::min<unsigned>(parallel, static_cast<unsigned>(sources.size())));
    std::vector<std::thread> threads;
    for (unsigned t = 1; t < n; ++t)
        threads.emplace_back(worker);
    worker();
    for (auto& t : threads)
        t.join();
    return reports;
}

} // namespace fedlibre::harvester
