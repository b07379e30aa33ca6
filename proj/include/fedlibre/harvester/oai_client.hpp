#pragma once

#include "fedlibre/harvester/envelope.hpp"
#include "fedlibre/harvester/transport.hpp"
#include "fedlibre/util/error.hpp"
#include "fedlibre/util/time.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fedlibre::harvester {

enum class DeletedRecordPolicy { No, Transient, Persistent };

std::string_view to_string(DeletedRecordPolicy p) noexcept;

struct RepositoryIdentity {
    std::string repository_name;
    std::string base_url;
    std::string protocol_version;
    std::optional<Timestamp> earliest_datestamp;
    DeletedRecordPolicy deleted_record = DeletedRecordPolicy::No;
    Granularity granularity = Granularity::Day;
    std::vector<std::string> admin_emails;
};

struct MetadataFormat {
    std::string prefix;
    std::string schema;
    std::string ns;
};

struct SetInfo {
    std::string spec;
    std::string name;
};

struct RecordHeader {
    std::string identifier;
    Timestamp datestamp{};
    std::vector<std::string> set_specs;
    bool deleted = false;
};

/// Selective-harvest arguments. `from`/`until` are sent at `granularity`.
struct HarvestWindow {
    std::optional<Timestamp> from;
    std::optional<Timestamp> until;
    Granularity granularity = Granularity::Second;
    std::optional<std::string> set;
};

struct ClientOptions {
    /// Extra attempts after a Transport failure; protocol errors are never retried.
    int retries = 3;
    std::chrono::milliseconds backoff{500};
    /// Minimum spacing between two requests of this client.
    std::chrono::milliseconds politeness{1000};
    /// Copied into every envelope.
    std::string source_id;
};

/// OAI-PMH 2.0 client bound to one repository. Requests are sequential.
/// Protocol error responses raise OaiError with the remote code; bodies that
/// are not OAI-PMH raise ProtocolError.
class OaiClient {
public:
    OaiClient(std::string base_url, HttpTransport& transport, ClientOptions options = {});

    /// Throws UnsupportedVersion unless protocolVersion is 2.0.
    RepositoryIdentity identify();
    std::vector<MetadataFormat> list_metadata_formats(const std::optional<std::string>& identifier = std::nullopt);
    std::vector<SetInfo> list_sets();

    using HeaderSink = std::function<void(const RecordHeader&)>;
    using RecordSink = std::function<void(RecordEnvelope&&)>;
    /// Called for a record whose metadata cannot be parsed; without it the
    /// error propagates.
    using RecordErrorSink = std::function<void(const std::string& identifier, const Error&)>;

    /// Both listing verbs follow resumption tokens to the end. noRecordsMatch
    /// yields nothing. A badResumptionToken restarts the window once.
    /// Throws BadArgument before any request when the prefix is not
    /// oai_dc or lom.
    void list_identifiers(std::string_view metadata_prefix, const HarvestWindow& window, const HeaderSink& sink);
    void list_records(std::string_view metadata_prefix, const HarvestWindow& window, const RecordSink& sink,
                      const RecordErrorSink& on_error = {});
    std::vector<RecordEnvelope> list_records(std::string_view metadata_prefix, const HarvestWindow& window = {});

    RecordEnvelope get_record(const std::string& identifier, std::string_view metadata_prefix);

    const std::string& base_url() const noexcept { return base_url_; }
    std::size_t request_count() const noexcept { return requests_; }

private:
    std::string fetch(const std::string& query);
    void pace();

    std::string base_url_;
    HttpTransport& transport_;
    ClientOptions options_;
    std::size_t requests_ = 0;
    std::optional<std::chrono::steady_clock::time_point> last_request_;
};

} // namespace fedlibre::harvester
