#pragma once

#include "fedlibre/harvester/transport.hpp"
#include "fedlibre/util/time.hpp"

#include <atomic>
#include <optional>
#include <string>
#include <vector>

namespace fixtures {

struct FakeRecord {
    std::string id;
    fedlibre::Timestamp datestamp{};
    bool deleted = false;
    std::string dc;                 // oai_dc document
    std::optional<std::string> lom; // absent: cannotDisseminateFormat for lom
    std::vector<std::string> sets;
};

/// Minimal OAI-PMH repository written from the protocol text, independent
/// of the library's server. Tokens are "<offset>|<prefix>|<from>|<until>".
class FakeRepository {
public:
    std::vector<FakeRecord> records;
    std::size_t page_size = 3;
    fedlibre::Granularity granularity = fedlibre::Granularity::Second;
    std::string protocol_version = "2.0";
    /// Answer the n-th ListRecords request (0-based) with HTTP 503, once.
    std::optional<int> fail_request;
    /// Reject the first resumption token presented with badResumptionToken.
    bool expire_first_token = false;

    fedlibre::harvester::HttpResponse handle(const std::string& query);

    int list_requests = 0;
    std::vector<std::string> queries;

private:
    bool token_expired_ = false;
};

std::string oai_envelope(const std::string& verb_or_error_xml);

} // namespace fixtures
