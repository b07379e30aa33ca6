#pragma once

#include "fedlibre/gateway/api.hpp"
#include "fedlibre/gateway/oai_server.hpp"
#include "fedlibre/indexer/index.hpp"
#include "fedlibre/store/record_store.hpp"

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace httplib {
class Server;
}

namespace fedlibre::gateway {

struct GatewayConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;
    std::filesystem::path store_dir = "store";
    std::optional<std::filesystem::path> vocab_dir;
    std::optional<std::filesystem::path> asset_dir;
    /// Prefix of the links the gateway hands out; "" means http://<bind>:<port>.
    std::string public_url;
    /// Resumption-token key; read from (or written to) <store>/token.key when empty.
    std::string token_secret;
    OaiServerConfig oai;
    std::size_t feed_limit = 20;

    std::string effective_public_url() const;
};

/// Parses a gateway.json document. Relative paths are resolved against
/// `base_dir`. Throws Error(Config).
GatewayConfig parse_gateway_config(std::string_view json_text, const std::filesystem::path& base_dir = {});

/// Reads the config file named by FEDORA_LIBRE_CONFIG, else `path`, else
/// ./gateway.json; defaults when none exists and none was asked for.
GatewayConfig load_gateway_config(const std::optional<std::filesystem::path>& path = std::nullopt);

struct HttpRequest {
    std::string method = "GET";
    /// Decoded path, e.g. "/api/records/src:oai:x:1".
    std::string path;
    std::vector<std::pair<std::string, std::string>> params;
};

struct HttpReply {
    int status = 200;
    std::string content_type;
    std::string body;
};

/// The HTTP surface: search API, record detail, facets, sources, exports,
/// RSS feed and OAI-PMH endpoint. Read-only over the store.
class Gateway {
public:
    /// Serves an externally owned store. The index comes from `set_index`,
    /// or from <store>/index.json when `watch_index` is set.
    Gateway(const store::RecordStore& store, GatewayConfig config, const Clock* clock = nullptr,
            bool watch_index = false);
    /// Opens config.store_dir read-only and follows the writer: a changed
    /// index.json is reloaded, a changed records.log reopens the store.
    explicit Gateway(GatewayConfig config, const Clock* clock = nullptr);
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    void set_index(std::shared_ptr<const indexer::PostingsIndex> index);

    HttpReply handle(const HttpRequest& request);

    /// Binds and serves on a background thread; returns the bound port
    /// (config.port, or an ephemeral one when it is 0).
    int start();
    /// Blocks until the server started by `start` stops.
    void wait();
    /// start() then wait().
    void listen();
    void stop();

    const GatewayConfig& config() const noexcept { return config_; }

private:
    struct View {
        std::shared_ptr<const store::RecordStore> store;
        std::shared_ptr<const OaiServer> oai;
    };

    View view();
    void refresh();
    void install_routes();
    HttpReply route(const HttpRequest& request, const View& v);

    GatewayConfig config_;
    const Clock* clock_;
    bool owns_store_;
    bool watch_index_;
    std::string secret_;
    vocabulary::Vocabulary vocabulary_;
    Labels labels_;
    indexer::IndexHandle index_;

    std::mutex view_mutex_;
    View view_;
    std::optional<std::filesystem::file_time_type> index_mtime_;
    std::optional<std::pair<std::filesystem::file_time_type, std::uintmax_t>> log_stamp_;

    std::unique_ptr<httplib::Server> http_;
    std::thread thread_;
};

} // namespace fedlibre::gateway
