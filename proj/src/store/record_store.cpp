#include "fedlibre/store/record_store.hpp"

#include "fedlibre/util/error.hpp"
#include "fedlibre/util/resources.hpp"

#include <json.hpp>

#include <algorithm>
#include <mutex>

#include <fcntl.h>
#include <unistd.h>

namespace fedlibre::store {

namespace {

using nlohmann::json;

json facets_to_json(const std::vector<vocabulary::FacetAssignment>& facets)
{
    json out = json::object();
    for (const auto& f : facets)
        out[std::string(vocabulary::to_string(f.facet))] = f.terms;
    return out;
}

} // namespace

std::string_view to_string(Lifecycle l) noexcept
{
    switch (l) {
    case Lifecycle::Harvested: return "HARVESTED";
    case Lifecycle::Validated: return "VALIDATED";
    case Lifecycle::Published: return "PUBLISHED";
    case Lifecycle::Withdrawn: return "WITHDRAWN";
    }
    return "HARVESTED";
}

Lifecycle parse_lifecycle(std::string_view s)
{
    if (s == "HARVESTED")
        return Lifecycle::Harvested;
    if (s == "VALIDATED")
        return Lifecycle::Validated;
    if (s == "PUBLISHED")
        return Lifecycle::Published;
    if (s == "WITHDRAWN")
        return Lifecycle::Withdrawn;
    throw Error(Errc::BadArgument, "unknown lifecycle '" + std::string(s) + "'");
}

std::string_view to_string(UpsertOutcome o) noexcept
{
    switch (o) {
    case UpsertOutcome::Added: return "Added";
    case UpsertOutcome::Updated: return "Updated";
    case UpsertOutcome::Unchanged: return "Unchanged";
    case UpsertOutcome::MarkedDeleted: return "MarkedDeleted";
    }
    return "Unchanged";
}

std::string serialize_record(const StoredRecord& r)
{
    const auto& e = r.envelope;
    json j{
        {"key", r.key.str()},
        {"sourceId", e.source_id},
        {"oaiIdentifier", e.oai_identifier},
        {"datestamp", format_utc(e.datestamp)},
        {"setSpecs", e.set_specs},
        {"deleted", e.deleted},
        {"lifecycle", to_string(r.lifecycle)},
        {"firstSeen", format_utc(r.first_seen)},
        {"lastUpdated", format_utc(r.last_updated)},
        {"facets", facets_to_json(r.facets)},
    };
    if (e.payload) {
        j["schema"] = metadata::metadata_prefix(e.payload->schema());
        j["rawXml"] = e.payload->raw_xml();
    }
    return j.dump();
}

StoredRecord deserialize_record(std::string_view line)
{
    try {
        const auto j = json::parse(line);
        StoredRecord r;
        auto& e = r.envelope;
        e.source_id = j.at("sourceId").get<std::string>();
        e.oai_identifier = j.at("oaiIdentifier").get<std::string>();
        const auto datestamp = parse_utc(j.at("datestamp").get<std::string>());
        if (!datestamp)
            throw Error(Errc::StorageFailure, "bad datestamp in stored record");
        e.datestamp = *datestamp;
        e.set_specs = j.value("setSpecs", std::vector<std::string>{});
        e.deleted = j.value("deleted", false);
        if (j.contains("rawXml")) {
            const auto tag = metadata::schema_from_prefix(j.at("schema").get<std::string>());
            if (!tag)
                throw Error(Errc::StorageFailure, "bad schema in stored record");
            e.payload = metadata::MetadataPayload::parse(*tag, j["rawXml"].get<std::string>());
        }
        r.key = e.key();
        r.lifecycle = parse_lifecycle(j.at("lifecycle").get<std::string>());
        r.first_seen = parse_utc(j.at("firstSeen").get<std::string>()).value_or(e.datestamp);
        r.last_updated = parse_utc(j.at("lastUpdated").get<std::string>()).value_or(r.first_seen);
        const auto facets = j.value("facets", json::object());
        for (const auto& [name, terms] : facets.items()) {
            const auto facet = vocabulary::parse_facet_id(name);
            if (!facet)
                continue;
            r.facets.push_back({r.key.str(), *facet, terms.get<std::vector<std::string>>()});
        }
        std::sort(r.facets.begin(), r.facets.end(),
                  [](const auto& a, const auto& b) { return a.facet < b.facet; });
        return r;
    } catch (const json::exception& ex) {
        throw Error(Errc::StorageFailure, std::string("malformed stored record: ") + ex.what());
    }
}

RecordStore::RecordStore(std::filesystem::path dir, StoreOptions options)
    : dir_(std::move(dir)), options_(options)
{
    if (!options_.clock)
        options_.clock = &system_clock_;
    if (!options_.vocabulary)
        options_.vocabulary = &vocabulary::Vocabulary::builtin();
    log_path_ = dir_ / "records.log";
    if (options_.read_only) {
        replay();
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec)
        throw Error(Errc::StorageFailure, "cannot create store directory " + dir_.string());
    replay();
    log_fd_ = ::open(log_path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (log_fd_ < 0)
        throw Error(Errc::StorageFailure, "cannot open " + log_path_.string());
}

RecordStore::~RecordStore()
{
    if (log_fd_ >= 0)
        ::close(log_fd_);
}

void RecordStore::replay()
{
    if (!std::filesystem::exists(log_path_))
        return;
    const std::string content = read_file(log_path_);
    std::size_t pos = 0;
    std::size_t good_end = 0;
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        if (nl == std::string::npos)
            break; // torn final line
        const std::string_view line(content.data() + pos, nl - pos);
        if (!line.empty()) {
            try {
                auto r = std::make_shared<StoredRecord>(deserialize_record(line));
                records_[r->key.str()] = std::move(r);
            } catch (const Error&) {
                if (content.find('\n', nl + 1) != std::string::npos)
                    throw;
                break;
            }
        }
        pos = nl + 1;
        good_end = pos;
    }
    if (good_end < content.size() && !options_.read_only) {
        std::error_code ec;
        std::filesystem::resize_file(log_path_, good_end, ec);
        if (ec)
            throw Error(Errc::StorageFailure, "cannot truncate torn log tail: " + ec.message());
    }
}

void RecordStore::append_line(const std::string& line)
{
    if (log_fd_ < 0)
        throw Error(Errc::StorageFailure, "store " + dir_.string() + " is open read-only");
    std::string buf = line;
    buf.push_back('\n');
    std::size_t written = 0;
    while (written < buf.size()) {
        const auto n = ::write(log_fd_, buf.data() + written, buf.size() - written);
        if (n <= 0)
            throw Error(Errc::StorageFailure, "write to records.log failed");
        written += static_cast<std::size_t>(n);
    }
}

UpsertOutcome RecordStore::upsert(const RecordEnvelope& envelope)
{
    envelope.validate();
    const RecordKey key = envelope.key();
    const Timestamp now = options_.clock->now();

    std::unique_lock lock(mutex_);
    const auto it = records_.find(key.str());
    const RecordPtr existing = it == records_.end() ? nullptr : it->second;
    if (existing && envelope.datestamp <= existing->envelope.datestamp)
        return UpsertOutcome::Unchanged;

    auto record = std::make_shared<StoredRecord>();
    record->key = key;
    record->envelope = envelope;
    record->facets = vocabulary::classify(key.str(), envelope.payload ? &*envelope.payload : nullptr,
                                          envelope.datestamp, now, *options_.vocabulary);
    record->first_seen = existing ? existing->first_seen : now;
    record->last_updated = std::max(now, record->first_seen);

    UpsertOutcome outcome;
    if (envelope.deleted) {
        record->lifecycle = Lifecycle::Withdrawn;
        outcome = UpsertOutcome::MarkedDeleted;
    } else if (!existing || existing->lifecycle == Lifecycle::Withdrawn) {
        record->lifecycle = options_.auto_publish ? Lifecycle::Published : Lifecycle::Harvested;
        outcome = existing ? UpsertOutcome::Updated : UpsertOutcome::Added;
    } else {
        record->lifecycle = existing->lifecycle;
        outcome = UpsertOutcome::Updated;
    }

    append_line(serialize_record(*record));
    records_[key.str()] = std::move(record);
    ++generation_;
    return outcome;
}

RecordPtr RecordStore::find(const RecordKey& key) const
{
    std::shared_lock lock(mutex_);
    const auto it = records_.find(key.str());
    return it == records_.end() ? nullptr : it->second;
}

RecordPtr RecordStore::get(const RecordKey& key) const
{
    if (auto r = find(key))
        return r;
    throw Error(Errc::NotFound, "no record " + key.str());
}

std::vector<RecordPtr> RecordStore::list_all(const ListFilter& filter) const
{
    std::vector<RecordPtr> out;
    {
        std::shared_lock lock(mutex_);
        for (const auto& [key, r] : records_) {
            if (filter.lifecycle && r->lifecycle != *filter.lifecycle)
                continue;
            if (filter.source_id && r->envelope.source_id != *filter.source_id)
                continue;
            if (filter.since_datestamp && r->envelope.datestamp < *filter.since_datestamp)
                continue;
            out.push_back(r);
        }
    }
    // records_ is key-ordered, so a stable sort on datestamp keeps the key tiebreak.
    std::stable_sort(out.begin(), out.end(),
                     [](const RecordPtr& a, const RecordPtr& b) { return a->envelope.datestamp < b->envelope.datestamp; });
    return out;
}

std::size_t RecordStore::size() const
{
    std::shared_lock lock(mutex_);
    return records_.size();
}

std::uint64_t RecordStore::generation() const
{
    std::shared_lock lock(mutex_);
    return generation_;
}

void RecordStore::publish(const RecordKey& key)
{
    std::unique_lock lock(mutex_);
    const auto it = records_.find(key.str());
    if (it == records_.end())
        throw Error(Errc::NotFound, "no record " + key.str());
    if (it->second->lifecycle == Lifecycle::Withdrawn)
        throw Error(Errc::BadArgument, "record " + key.str() + " is withdrawn");
    if (it->second->lifecycle == Lifecycle::Published)
        return;
    auto record = std::make_shared<StoredRecord>(*it->second);
    record->lifecycle = Lifecycle::Published;
    record->last_updated = std::max(options_.clock->now(), record->first_seen);
    append_line(serialize_record(*record));
    it->second = std::move(record);
    ++generation_;
}

void RecordStore::compact()
{
    std::unique_lock lock(mutex_);
    if (log_fd_ < 0)
        throw Error(Errc::StorageFailure, "store " + dir_.string() + " is open read-only");
    std::string content;
    for (const auto& [key, r] : records_) {
        content += serialize_record(*r);
        content.push_back('\n');
    }
    write_file_atomic(log_path_, content);
    ::close(log_fd_);
    log_fd_ = ::open(log_path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (log_fd_ < 0)
        throw Error(Errc::StorageFailure, "cannot reopen " + log_path_.string());
}

void RecordStore::sync()
{
    std::unique_lock lock(mutex_);
    if (log_fd_ >= 0)
        ::fdatasync(log_fd_);
}

} // namespace fedlibre::store
