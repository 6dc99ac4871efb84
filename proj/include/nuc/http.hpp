#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <string>

namespace nuc {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // starts with '/'
};

/// Splits an http(s) URL into origin and path. Throws ValidationError otherwise.
Endpoint parse_url(const std::string& url);

/// Appends `suffix` to the path of `base`, inserting a single '/' between them.
Endpoint join_url(const std::string& base, const std::string& suffix);

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    double backoff_multiplier = 2.0;
    std::chrono::seconds timeout{120};
};

/// POSTs `body` as JSON and returns the parsed JSON response. Transport errors,
/// HTTP 429 and 5xx are retried with exponential backoff; other non-2xx statuses
/// fail immediately. Throws RemoteError once retries are exhausted.
nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body,
                         const std::string& api_key, const RetryPolicy& retry);

/// Value of an environment variable, or empty.
std::string env_or_empty(const char* name);

}  // namespace nuc
