// SPDX-License-Identifier: Apache-2.0
#include "synergy/coder.hpp"

#include "synergy/error.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace synergy::coder {

std::string_view to_string(FailureKind kind) {
    switch (kind) {
    case FailureKind::Unparseable: return "unparseable";
    case FailureKind::Transport: return "transport";
    case FailureKind::EmptyMessage: return "empty_message";
    }
    return "?";
}

namespace {

struct Outcome {
    std::optional<Code> code;
    std::optional<CodingFailure> failure;
    bool cache_hit = false;
    std::size_t calls = 0;
};

Outcome code_one(const corpus::Utterance& u, const PromptSpec& spec, const CoderConfig& config,
                 Transport& transport, const ResponseCache* cache) {
    Outcome out;
    Prompt prompt;
    try {
        prompt = build_prompt_parts(spec);
    } catch (const Error& e) {
        out.failure = CodingFailure{u.utterance_id, FailureKind::EmptyMessage, e.what(), 0};
        return out;
    }

    const auto key = cache_key(prompt.text(), config.model_name, config.temperature);
    std::optional<std::string> response;
    if (cache) {
        response = cache->get(key);
        out.cache_hit = response.has_value();
    }

    if (!response) {
        ChatRequest req{u.utterance_id, config.model_name, config.temperature, prompt.system, prompt.user};
        const int attempts_allowed = config.max_retries + 1;
        std::string last_error;
        for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
            ++out.calls;
            try {
                response = transport.complete(req);
                break;
            } catch (const std::exception& e) {
                last_error = e.what();
                if (attempt < attempts_allowed && config.retry_backoff.count() > 0)
                    std::this_thread::sleep_for(config.retry_backoff * (1 << std::min(attempt - 1, 6)));
            }
        }
        if (!response) {
            TransportError err(u.utterance_id, attempts_allowed, last_error);
            out.failure = CodingFailure{u.utterance_id, FailureKind::Transport, err.what(), attempts_allowed};
            return out;
        }
    }

    try {
        out.code = parse_code(*response);
    } catch (const Unparseable& e) {
        out.failure = CodingFailure{u.utterance_id, FailureKind::Unparseable, e.what(), static_cast<int>(out.calls)};
        return out;
    }
    if (cache && !out.cache_hit)
        cache->put(key, *response);
    return out;
}

} // namespace

CodingRun code_corpus(const std::vector<corpus::Utterance>& utterances, const CoderConfig& config,
                      const CodingOptions& options, Transport& transport) {
    validate(config);
    const auto rendering = render_codebook(options.codebook, options.shot_mode);
    const auto specs = build_prompt_specs(utterances, rendering, options.shot_mode, config.context_window);

    std::optional<ResponseCache> cache;
    if (config.cache_dir)
        cache.emplace(*config.cache_dir);

    std::vector<Outcome> outcomes(utterances.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < utterances.size(); i = next++)
            outcomes[i] = code_one(utterances[i], specs[i], config, transport, cache ? &*cache : nullptr);
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(config.max_in_flight, utterances.size()));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    CodingRun run;
    run.utterances = utterances;
    run.report.total = utterances.size();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        auto& o = outcomes[i];
        run.report.transport_calls += o.calls;
        if (o.cache_hit)
            ++run.report.cache_hits;
        if (o.code) {
            run.utterances[i].code_pred = o.code;
            ++run.report.coded;
        } else {
            run.utterances[i].code_pred.reset();
            run.report.failures.push_back(std::move(*o.failure));
        }
    }
    return run;
}

} // namespace synergy::coder
