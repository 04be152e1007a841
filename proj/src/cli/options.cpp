// SPDX-License-Identifier: Apache-2.0
#include "synergy/cli.hpp"

#include "synergy/csv.hpp"
#include "synergy/error.hpp"

#include <algorithm>
#include <map>
#include <cctype>

namespace synergy::cli {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string::npos)
            comma = s.size();
        auto item = csv::trim(std::string_view(s).substr(start, comma - start));
        if (!item.empty())
            out.push_back(item);
        start = comma + 1;
    }
    return out;
}

// key -> section it may also appear under
const std::map<std::string, std::string>& known_keys() {
    static const std::map<std::string, std::string> keys{
        {"utterances", "input"},      {"groups", "input"},          {"codebook", "input"},
        {"predictions", "input"},     {"out_dir", "output"},        {"code_source", "analysis"},
        {"normalization", "analysis"}, {"scope", "analysis"},       {"sign", "analysis"},
        {"gap", "analysis"},          {"zero_fill", "analysis"},    {"seed", "stats"},
        {"iterations", "stats"},      {"threads", "stats"},         {"alpha", "stats"},
        {"holm", "stats"},            {"factors", "stats"},         {"outcomes", "stats"},
        {"folds", "eval"},            {"stratified", "eval"},       {"endpoint_url", "coder"},
        {"model_name", "coder"},      {"api_key_env_var", "coder"}, {"temperature", "coder"},
        {"max_retries", "coder"},     {"timeout_ms", "coder"},      {"retry_backoff_ms", "coder"},
        {"max_in_flight", "coder"},   {"cache_dir", "coder"},       {"context_window", "coder"},
        {"shot", "coder"},            {"transport", "coder"},       {"mock_responses", "coder"},
        {"mock_default", "coder"},
    };
    return keys;
}

class Lookup {
public:
    Lookup(const config::Document& doc) : doc_(doc) {}

    // Resolves "key" or "section.key"; both present is an error.
    std::optional<std::string> address(const std::string& key) const {
        const auto& section = known_keys().at(key);
        const bool top = doc_.has(key);
        const bool nested = doc_.has(section + "." + key);
        if (top && nested)
            throw Error(ErrorKind::Config, doc_.source() + ": '" + key + "' given both at top level and under [" +
                                               section + "]");
        if (top)
            return key;
        if (nested)
            return section + "." + key;
        return std::nullopt;
    }

    std::optional<std::string> str(const std::string& key) const {
        auto a = address(key);
        return a ? doc_.get_string(*a) : std::nullopt;
    }
    std::optional<double> num(const std::string& key) const {
        auto a = address(key);
        return a ? doc_.get_number(*a) : std::nullopt;
    }
    std::optional<std::int64_t> integer(const std::string& key) const {
        auto a = address(key);
        return a ? doc_.get_int(*a) : std::nullopt;
    }
    std::optional<bool> boolean(const std::string& key) const {
        auto a = address(key);
        return a ? doc_.get_bool(*a) : std::nullopt;
    }

private:
    const config::Document& doc_;
};

std::int64_t non_negative(std::int64_t v, const std::string& key) {
    if (v < 0)
        throw Error(ErrorKind::Config, "'" + key + "' must be >= 0");
    return v;
}

} // namespace

corpus::CodeSource parse_code_source(const std::string& token) {
    const auto t = lower(token);
    if (t == "human")
        return corpus::CodeSource::Human;
    if (t == "pred")
        return corpus::CodeSource::Pred;
    throw UnknownEnum("code_source", token);
}

corpus::Normalization parse_normalization(const std::string& token) {
    const auto t = lower(token);
    if (t == "per-member")
        return corpus::Normalization::PerMember;
    if (t == "raw" || t == "raw-count")
        return corpus::Normalization::RawCount;
    throw UnknownEnum("normalization", token);
}

sdm::Scope parse_scope(const std::string& token) {
    const auto t = lower(token);
    if (t == "global")
        return sdm::Scope::Global;
    if (t == "per-group")
        return sdm::Scope::PerGroup;
    throw UnknownEnum("scope", token);
}

sdm::SignConvention parse_sign(const std::string& token) {
    const auto t = lower(token);
    if (t == "prose")
        return sdm::SignConvention::Prose;
    if (t == "paper-literal")
        return sdm::SignConvention::PaperLiteral;
    throw UnknownEnum("sign", token);
}

sdm::GapPolicy parse_gap(const std::string& token) {
    const auto t = lower(token);
    if (t == "consecutive")
        return sdm::GapPolicy::Consecutive;
    if (t == "bridge")
        return sdm::GapPolicy::Bridge;
    throw UnknownEnum("gap", token);
}

coder::ShotMode parse_shot(const std::string& token) {
    const auto t = lower(token);
    if (t == "zero-shot" || t == "zero")
        return coder::ShotMode::ZeroShot;
    if (t == "few-shot" || t == "few")
        return coder::ShotMode::FewShot;
    throw UnknownEnum("shot", token);
}

void apply_config(RunConfig& rc, const config::Document& doc, const std::filesystem::path& base_dir) {
    for (const auto& full : doc.keys()) {
        const auto dot = full.rfind('.');
        const std::string key = dot == std::string::npos ? full : full.substr(dot + 1);
        const std::string section = dot == std::string::npos ? "" : full.substr(0, dot);
        if (key == "api_key")
            throw Error(ErrorKind::Config, doc.source() + ": API keys are read from the environment only; set "
                                                          "api_key_env_var instead");
        auto it = known_keys().find(key);
        if (it == known_keys().end() || (!section.empty() && section != it->second))
            throw Error(ErrorKind::Config, doc.source() + ": unknown key '" + full + "'");
    }

    const Lookup l(doc);
    auto path = [&](const std::string& key) -> std::optional<std::filesystem::path> {
        auto s = l.str(key);
        if (!s)
            return std::nullopt;
        std::filesystem::path p(*s);
        return p.is_absolute() ? p : base_dir / p;
    };

    if (auto p = path("utterances")) rc.utterances = *p;
    if (auto p = path("groups")) rc.groups = *p;
    if (auto p = path("codebook")) rc.codebook = *p;
    if (auto p = path("predictions")) rc.predictions = *p;
    if (auto p = path("out_dir")) rc.out_dir = *p;

    if (auto s = l.str("code_source")) rc.code_source = parse_code_source(*s);
    if (auto s = l.str("normalization")) rc.normalization = parse_normalization(*s);
    if (auto s = l.str("scope")) rc.scope = parse_scope(*s);
    if (auto s = l.str("sign")) rc.sign = parse_sign(*s);
    if (auto s = l.str("gap")) rc.gaps = parse_gap(*s);
    if (auto b = l.boolean("zero_fill")) rc.zero_fill = *b;

    if (auto v = l.integer("seed")) rc.seed = static_cast<std::uint64_t>(non_negative(*v, "seed"));
    if (auto v = l.integer("iterations")) rc.iterations = static_cast<std::size_t>(non_negative(*v, "iterations"));
    if (auto v = l.integer("threads")) rc.threads = static_cast<unsigned>(non_negative(*v, "threads"));
    if (auto v = l.num("alpha")) rc.alpha = *v;
    if (auto b = l.boolean("holm")) rc.holm = *b;
    if (auto s = l.str("factors")) rc.factors = split_list(*s);
    if (auto s = l.str("outcomes")) rc.outcomes = split_list(*s);

    if (auto v = l.integer("folds")) rc.folds = static_cast<std::size_t>(non_negative(*v, "folds"));
    if (auto b = l.boolean("stratified")) rc.stratified = *b;

    auto& cc = rc.coder.config;
    if (auto s = l.str("endpoint_url")) cc.endpoint_url = *s;
    if (auto s = l.str("model_name")) cc.model_name = *s;
    if (auto s = l.str("api_key_env_var")) cc.api_key_env_var = *s;
    if (auto v = l.num("temperature")) cc.temperature = *v;
    if (auto v = l.integer("max_retries")) cc.max_retries = static_cast<int>(non_negative(*v, "max_retries"));
    if (auto v = l.integer("timeout_ms")) cc.timeout = std::chrono::milliseconds(non_negative(*v, "timeout_ms"));
    if (auto v = l.integer("retry_backoff_ms"))
        cc.retry_backoff = std::chrono::milliseconds(non_negative(*v, "retry_backoff_ms"));
    if (auto v = l.integer("max_in_flight"))
        cc.max_in_flight = static_cast<std::size_t>(non_negative(*v, "max_in_flight"));
    if (auto p = path("cache_dir")) cc.cache_dir = *p;
    if (auto v = l.integer("context_window"))
        cc.context_window = static_cast<std::size_t>(non_negative(*v, "context_window"));
    if (auto s = l.str("shot")) rc.coder.shot_mode = parse_shot(*s);
    if (auto s = l.str("transport")) {
        const auto t = lower(*s);
        if (t != "http" && t != "mock")
            throw UnknownEnum("transport", *s);
        rc.coder.transport = t;
    }
    if (auto p = path("mock_responses")) rc.coder.mock_responses = *p;
    if (auto s = l.str("mock_default")) rc.coder.mock_default = *s;
}

} // namespace synergy::cli
