// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "synergy/codebook.hpp"
#include "synergy/corpus.hpp"

#include <array>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Prompt-based automatic coding through a chat-completion endpoint.
namespace synergy::coder {

enum class ShotMode { ZeroShot, FewShot };

std::string_view to_string(ShotMode mode);

inline constexpr std::size_t kDefaultContextWindow = 5;

inline constexpr std::string_view kRoleInstruction =
    "You are now a text coder in a learning sciences study. Based on the given coding framework, the current "
    "message, and the context messages, you need to assign a code to the current message.";
inline constexpr std::string_view kOutputInstruction = "Please output the code only (e.g., W1, S2, C).";

struct PromptSpec {
    std::string codebook_rendering;
    std::vector<std::string> context; // oldest first, at most the context window
    std::string current_message;
    ShotMode shot_mode = ShotMode::ZeroShot;
};

// Pipe table with columns interaction level, CPS behavior, code, description
// and, in few-shot mode only, example.
std::string render_codebook(const Codebook& codebook, ShotMode mode);

struct Prompt {
    std::string system; // role instruction
    std::string user;   // codebook, context, current message, output format

    std::string text() const { return system + "\n\n" + user; }
};

// Deterministic for identical specs. Throws Error(EmptyMessage).
Prompt build_prompt_parts(const PromptSpec& spec);
std::string build_prompt(const PromptSpec& spec);

// First standalone code token, longest token preferred. A bare "I" is only
// accepted when it is the whole trimmed response. Throws Unparseable.
Code parse_code(std::string_view response);

// One spec per utterance (input order); context is the preceding utterances of
// the same group by seq.
std::vector<PromptSpec> build_prompt_specs(const std::vector<corpus::Utterance>& utterances,
                                           const std::string& codebook_rendering, ShotMode mode,
                                           std::size_t context_window = kDefaultContextWindow);

// ---------------------------------------------------------------------------

struct ChatRequest {
    std::string request_id; // utterance id; never sent over the wire
    std::string model;
    double temperature = 0.0;
    std::string system;
    std::string user;
};

// Implementations must be callable concurrently. Failures throw std::exception.
class Transport {
public:
    virtual ~Transport() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

class MockTransport final : public Transport {
public:
    using Handler = std::function<std::string(const ChatRequest&)>;

    explicit MockTransport(Handler handler);

    std::string complete(const ChatRequest& request) override;
    std::size_t calls() const;

private:
    Handler handler_;
    mutable std::mutex mutex_;
    std::size_t calls_ = 0;
};

struct CoderConfig {
    std::string endpoint_url;
    std::string model_name;
    std::string api_key_env_var;
    double temperature = 0.0;
    int max_retries = 2;
    std::chrono::milliseconds timeout{60000};
    std::chrono::milliseconds retry_backoff{500};
    std::size_t max_in_flight = 4;
    std::optional<std::filesystem::path> cache_dir;
    std::size_t context_window = kDefaultContextWindow;
};

// Throws Error(InvalidArgument) on temperature < 0 or max_in_flight < 1.
void validate(const CoderConfig& config);

// Reads the key from the environment variable named by the config.
// Throws Error(Credential).
std::string resolve_api_key(const CoderConfig& config);

// POSTs the usual chat-completions body ({model, temperature, messages}) and
// returns choices[0].message.content.
class HttpTransport final : public Transport {
public:
    HttpTransport(std::string endpoint_url, std::string api_key, std::chrono::milliseconds timeout);

    std::string complete(const ChatRequest& request) override;

private:
    std::string scheme_host_port_;
    std::string path_;
    std::string api_key_;
    std::chrono::milliseconds timeout_;
};

std::string request_body(const ChatRequest& request);
std::string parse_response_body(const std::string& body);

// ---------------------------------------------------------------------------

// Hex SHA-256 over prompt text, model name and temperature.
std::string cache_key(std::string_view prompt_text, std::string_view model_name, double temperature);

// One file per key, body = raw response text.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& body) const;

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::mutex& lock_for(const std::string& key) const;

    std::filesystem::path dir_;
    mutable std::array<std::mutex, 16> stripes_;
};

enum class FailureKind { Unparseable, Transport, EmptyMessage };

std::string_view to_string(FailureKind kind);

struct CodingFailure {
    std::string utterance_id;
    FailureKind kind = FailureKind::Unparseable;
    std::string detail;
    int attempts = 0;
};

struct CodingReport {
    std::size_t total = 0;
    std::size_t coded = 0;
    std::size_t cache_hits = 0;
    std::size_t transport_calls = 0;
    std::vector<CodingFailure> failures; // input order
};

struct CodingRun {
    std::vector<corpus::Utterance> utterances; // input order, code_pred filled where coded
    CodingReport report;
};

struct CodingOptions {
    ShotMode shot_mode = ShotMode::ZeroShot;
    Codebook codebook = Codebook::builtin();
};

// Requests run on up to max_in_flight workers; results are joined in input
// order so the output does not depend on the parallelism. A cache hit skips the
// transport. Parse and transport failures are reported, never thrown.
CodingRun code_corpus(const std::vector<corpus::Utterance>& utterances, const CoderConfig& config,
                      const CodingOptions& options, Transport& transport);

} // namespace synergy::coder
