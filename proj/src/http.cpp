#include "nuc/http.hpp"

#include "nuc/error.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

namespace nuc {

Endpoint parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ValidationError("URL '" + url + "' has no scheme");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw ValidationError("URL '" + url + "' must use http or https");
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    ep.origin = url.substr(0, path_start);
    ep.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (ep.origin.size() <= scheme_end + 3) throw ValidationError("URL '" + url + "' has no host");
    return ep;
}

Endpoint join_url(const std::string& base, const std::string& suffix) {
    Endpoint ep = parse_url(base);
    std::string path = ep.path;
    while (!path.empty() && path.back() == '/') path.pop_back();
    std::string tail = suffix;
    while (!tail.empty() && tail.front() == '/') tail.erase(tail.begin());
    ep.path = path + "/" + tail;
    return ep;
}

nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body,
                         const std::string& api_key, const RetryPolicy& retry) {
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(retry.timeout).count());
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(retry.timeout).count());
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    const std::string payload = body.dump();

    std::string last_error;
    auto backoff = std::chrono::duration<double, std::milli>(retry.initial_backoff);
    int attempts = 0;
    for (int attempt = 0; attempt <= retry.max_retries; ++attempt) {
        ++attempts;
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= retry.backoff_multiplier;
        }
        auto res = client.Post(endpoint.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) {
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::parse_error& e) {
                throw RemoteError(endpoint.origin + endpoint.path + ": response is not JSON: " + e.what());
            }
        }
        last_error = "HTTP " + std::to_string(res->status);
        if (res->status != 429 && res->status < 500) break;
    }
    throw RemoteError(endpoint.origin + endpoint.path + ": " + last_error + " after " +
                      std::to_string(attempts) + " attempt(s)");
}

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

}  // namespace nuc
