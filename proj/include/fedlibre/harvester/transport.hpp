#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace fedlibre::harvester {

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "text/xml; charset=utf-8";
    std::map<std::string, std::string> headers;
};

/// Blocking HTTP GET. Implementations throw Error(Transport) on connection
/// failures and timeouts and must be safe to call from several threads.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& url) = 0;
};

/// cpp-httplib backed transport (http and https).
std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout = std::chrono::seconds(30));

/// Routes requests to in-process handlers by base URL (the part of the URL
/// before '?'). Unrouted URLs fail with Error(Transport). Counts requests
/// per base URL.
class LoopbackTransport final : public HttpTransport {
public:
    using Handler = std::function<HttpResponse(const std::string& query)>;

    void route(const std::string& base_url, Handler handler);
    HttpResponse get(const std::string& url) override;
    std::size_t requests(const std::string& base_url) const;
    std::size_t total_requests() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, Handler> handlers_;
    std::map<std::string, std::size_t> counts_;
};

} // namespace fedlibre::harvester
