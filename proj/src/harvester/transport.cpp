#include "fedlibre/harvester/transport.hpp"

#include "fedlibre/util/error.hpp"

#include <httplib.h>

namespace fedlibre::harvester {

namespace {

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

    HttpResponse get(const std::string& url) override
    {
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos)
            throw Error(Errc::Transport, "not an absolute URL: " + url);
        const auto path_start = url.find('/', scheme_end + 3);
        const auto origin = url.substr(0, path_start);
        const auto path = path_start == std::string::npos ? std::string("/") : url.substr(path_start);

        httplib::Client client(origin);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        client.set_write_timeout(timeout_);
        client.set_follow_location(true);
        auto res = client.Get(path);
        if (!res)
            throw Error(Errc::Transport, "GET " + url + ": " + httplib::to_string(res.error()));
        HttpResponse out;
        out.status = res->status;
        out.body = std::move(res->body);
        out.content_type = res->get_header_value("Content-Type");
        for (const auto& [k, v] : res->headers)
            out.headers.emplace(k, v);
        return out;
    }

private:
    std::chrono::seconds timeout_;
};

} // namespace

std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout)
{
    return std::make_unique<HttplibTransport>(timeout);
}

void LoopbackTransport::route(const std::string& base_url, Handler handler)
{
    std::lock_guard lock(mutex_);
    handlers_[base_url] = std::move(handler);
}

HttpResponse LoopbackTransport::get(const std::string& url)
{
    const auto q = url.find('?');
    const auto base = url.substr(0, q);
    Handler handler;
    {
        std::lock_guard lock(mutex_);
        ++counts_[base];
        auto it = handlers_.find(base);
        if (it == handlers_.end())
            throw Error(Errc::Transport, "connection refused: " + base);
        handler = it->second;
    }
    return handler(q == std::string::npos ? std::string() : url.substr(q + 1));
}

std::size_t LoopbackTransport::requests(const std::string& base_url) const
{
    std::lock_guard lock(mutex_);
    auto it = counts_.find(base_url);
    return it == counts_.end() ? 0 : it->second;
}

std::size_t LoopbackTransport::total_requests() const
{
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& [k, v] : counts_)
        n += v;
    return n;
}

} // namespace fedlibre::harvester
