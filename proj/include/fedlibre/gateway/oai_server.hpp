#pragma once

#include "fedlibre/store/record_store.hpp"
#include "fedlibre/util/time.hpp"

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace fedlibre::gateway {

struct OaiServerConfig {
    std::string repository_name = "fedora-libre";
    std::string base_url = "http://localhost:8080/oai";
    std::string admin_email = "admin@localhost";
    std::size_t page_size = 100;
    std::chrono::seconds token_ttl{3600};
};

using QueryParams = std::vector<std::pair<std::string, std::string>>;

/// OAI-PMH 2.0 data provider over the PUBLISHED and WITHDRAWN records of a
/// store. Stateless: resumption tokens carry the request arguments and the
/// offset, signed with HMAC-SHA256 under `secret`.
///
/// Records are exposed under their original identifier and datestamp with
/// one set per source. When two sources share an identifier the record with
/// the smaller store key is served.
class OaiServer {
public:
    OaiServer(const store::RecordStore& store, OaiServerConfig config, std::string secret,
              const Clock* clock = nullptr);

    /// Full response document. Protocol errors are reported inside the
    /// document, never thrown.
    std::string handle(const QueryParams& params) const;

    const OaiServerConfig& config() const noexcept { return config_; }

private:
    const store::RecordStore& store_;
    OaiServerConfig config_;
    std::string secret_;
    const Clock* clock_;
    SystemClock system_clock_;
};

/// Random 32-byte hex secret from the OS entropy source.
std::string generate_secret();

/// Reads `<dir>/token.key`, creating it with a fresh secret if absent.
std::string load_or_create_secret(const std::filesystem::path& dir);

} // namespace fedlibre::gateway
