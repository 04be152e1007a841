// SPDX-License-Identifier: Apache-2.0
#include "synergy/coder.hpp"

#include "synergy/error.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <regex>
#include <stdexcept>

namespace synergy::coder {

MockTransport::MockTransport(Handler handler) : handler_(std::move(handler)) {}

std::string MockTransport::complete(const ChatRequest& request) {
    {
        std::lock_guard lock(mutex_);
        ++calls_;
    }
    return handler_(request);
}

std::size_t MockTransport::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

void validate(const CoderConfig& config) {
    if (!(config.temperature >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "temperature must be >= 0");
    if (config.max_in_flight < 1)
        throw Error(ErrorKind::InvalidArgument, "max_in_flight must be >= 1");
    if (config.max_retries < 0)
        throw Error(ErrorKind::InvalidArgument, "max_retries must be >= 0");
}

std::string resolve_api_key(const CoderConfig& config) {
    if (config.api_key_env_var.empty())
        throw Error(ErrorKind::Credential, "api_key_env_var is not configured");
    const char* value = std::getenv(config.api_key_env_var.c_str());
    if (!value || !*value)
        throw Error(ErrorKind::Credential, "environment variable " + config.api_key_env_var + " is not set");
    return value;
}

std::string request_body(const ChatRequest& request) {
    nlohmann::ordered_json body;
    body["model"] = request.model;
    body["temperature"] = request.temperature;
    body["messages"] = nlohmann::ordered_json::array({
        {{"role", "system"}, {"content", request.system}},
        {{"role", "user"}, {"content", request.user}},
    });
    return body.dump();
}

std::string parse_response_body(const std::string& body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("response is not JSON: ") + e.what());
    }
    const auto& choices = j.value("choices", nlohmann::json::array());
    if (!choices.is_array() || choices.empty())
        throw std::runtime_error("response has no choices");
    const auto& message = choices.at(0).value("message", nlohmann::json::object());
    auto content = message.find("content");
    if (content == message.end() || !content->is_string())
        throw std::runtime_error("response choice has no text content");
    return content->get<std::string>();
}

HttpTransport::HttpTransport(std::string endpoint_url, std::string api_key, std::chrono::milliseconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
    static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(endpoint_url, m, kUrl))
        throw Error(ErrorKind::Config, "endpoint_url '" + endpoint_url + "' is not an http(s) URL");
    scheme_host_port_ = m[1].str();
    path_ = m[2].matched ? m[2].str() : "/";
}

std::string HttpTransport::complete(const ChatRequest& request) {
    httplib::Client client(scheme_host_port_);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    auto res = client.Post(path_, headers, request_body(request), "application/json");
    if (!res)
        throw std::runtime_error("HTTP request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw std::runtime_error("HTTP status " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    return parse_response_body(res->body);
}

} // namespace synergy::coder
