// SPDX-License-Identifier: Apache-2.0
#include "synergy/cli.hpp"

#include "report.hpp"

#include "synergy/csv.hpp"
#include "synergy/error.hpp"
#include "synergy/evalkit.hpp"
#include "synergy/stats.hpp"

#include <fstream>
#include <map>
#include <ostream>

#ifndef SYNERGY_DEMO_DIR
#define SYNERGY_DEMO_DIR "data/demo"
#endif

namespace synergy::cli {

namespace fs = std::filesystem;
using report::Json;

namespace {

constexpr std::uint64_t kDemoSeed = 42;

int combine(int a, int b) {
    if (a == kExitFailure || b == kExitFailure)
        return kExitFailure;
    return std::max(a, b);
}

void prepare_out(const RunConfig& rc) {
    std::error_code ec;
    fs::create_directories(rc.out_dir, ec);
    if (ec)
        throw Error(ErrorKind::Io, "cannot create output directory " + rc.out_dir.string() + ": " + ec.message());
}

const fs::path& require(const std::optional<fs::path>& p, const char* flag) {
    if (!p)
        throw Error(ErrorKind::Config, std::string(flag) + " is required");
    return *p;
}

std::uint64_t require_seed(const RunConfig& rc, const char* command) {
    if (!rc.seed)
        throw Error(ErrorKind::Config, std::string("--seed is required for ") + command);
    return *rc.seed;
}

std::vector<corpus::Utterance> load_utterances(const RunConfig& rc) {
    return corpus::parse_utterances(require(rc.utterances, "--utterances"));
}

std::vector<corpus::GroupProfile> load_profiles(const RunConfig& rc, bool required) {
    if (!rc.groups) {
        if (required)
            throw Error(ErrorKind::Config, "--groups is required");
        return {};
    }
    return corpus::parse_group_profiles(*rc.groups);
}

Codebook load_codebook(const RunConfig& rc) {
    return rc.codebook ? Codebook::load(*rc.codebook) : Codebook::builtin();
}

sdm::PipelineOptions pipeline_options(const RunConfig& rc, corpus::CodeSource source) {
    sdm::PipelineOptions o;
    o.aggregate.code_source = source;
    o.aggregate.normalization = rc.normalization;
    o.aggregate.zero_fill = rc.zero_fill;
    o.scope = rc.scope;
    o.sign = rc.sign;
    o.gaps = rc.gaps;
    o.uniform_fallback = true;
    return o;
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings)
        err << "warning: " << w << '\n';
}

template <class F>
int guarded(std::ostream& err, const char* command, F&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        err << "error: " << command << ": " << e.what() << '\n';
        return kExitFailure;
    }
}

std::map<std::string, std::string> read_mock_responses(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    auto records = csv::read_all(in);
    if (records.empty() || records.front().fields != std::vector<std::string>{"utterance_id", "response"})
        throw MalformedRow(1, "mock response header must be utterance_id,response");
    std::map<std::string, std::string> out;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.fields.size() != 2)
            throw MalformedRow(r.line, "expected 2 fields");
        out[r.fields[0]] = r.fields[1];
    }
    return out;
}

// Key for pairing observations across pipelines.
using GroupWeekKey = std::pair<std::string, int>;

std::map<GroupWeekKey, double> outcome_values(const sdm::PipelineResult& p, const std::string& outcome) {
    std::map<GroupWeekKey, double> out;
    if (outcome == "synergy") {
        for (const auto& r : p.synergy.rows)
            out[{r.group_id, r.week}] = r.synergy;
        return out;
    }
    static const std::map<std::string, Subsystem> kOrders{
        {"u_O", Subsystem::O}, {"u_W", Subsystem::W}, {"u_S", Subsystem::S}, {"u_C", Subsystem::C}};
    auto it = kOrders.find(outcome);
    if (it == kOrders.end())
        throw UnknownEnum("outcome", outcome);
    for (const auto& r : p.orders.rows)
        out[{r.group_id, r.week}] = r.order(it->second);
    return out;
}

std::string factor_level(const corpus::GroupProfile& g, const std::string& factor) {
    if (factor == "problem_type")
        return std::string(corpus::to_string(g.problem_type));
    if (factor == "quality")
        return std::string(corpus::to_string(g.quality));
    if (factor == "homogeneity")
        return std::string(corpus::to_string(g.homogeneity));
    throw UnknownEnum("factor", factor);
}

} // namespace

fs::path demo_data_dir() { return fs::path(SYNERGY_DEMO_DIR); }

int cmd_ingest(const RunConfig& rc, std::ostream& err) {
    return guarded(err, "ingest", [&] {
        const auto utterances = load_utterances(rc);
        const auto profiles = load_profiles(rc, true);
        if (rc.codebook)
            Codebook::load(*rc.codebook);
        const auto v = corpus::validate_corpus(utterances, profiles);
        prepare_out(rc);
        report::write_json(rc.out_dir / "validation_report.json", report::to_json(v));
        print_warnings(err, v.warnings);
        return v.clean() ? kExitOk : kExitWarnings;
    });
}

int cmd_code(const RunConfig& rc, std::ostream& err, coder::Transport* transport) {
    return guarded(err, "code", [&] {
        const auto utterances = load_utterances(rc);
        coder::CodingOptions options;
        options.shot_mode = rc.coder.shot_mode;
        options.codebook = load_codebook(rc);
        coder::validate(rc.coder.config);

        std::unique_ptr<coder::Transport> owned;
        if (!transport) {
            if (rc.coder.transport == "mock") {
                std::map<std::string, std::string> scripted;
                if (rc.coder.mock_responses)
                    scripted = read_mock_responses(*rc.coder.mock_responses);
                owned = std::make_unique<coder::MockTransport>(
                    [scripted = std::move(scripted), fallback = rc.coder.mock_default](const coder::ChatRequest& r) {
                        auto it = scripted.find(r.request_id);
                        return it == scripted.end() ? fallback : it->second;
                    });
            } else {
                const auto& cc = rc.coder.config;
                if (cc.endpoint_url.empty() || cc.model_name.empty())
                    throw Error(ErrorKind::Config, "coder endpoint_url and model_name must be configured");
                owned = std::make_unique<coder::HttpTransport>(cc.endpoint_url, coder::resolve_api_key(cc),
                                                               cc.timeout);
            }
            transport = owned.get();
        }

        const auto run = coder::code_corpus(utterances, rc.coder.config, options, *transport);
        prepare_out(rc);
        {
            std::ofstream out(rc.out_dir / "coded_utterances.csv", std::ios::binary | std::ios::trunc);
            if (!out)
                throw Error(ErrorKind::Io, "cannot write coded_utterances.csv");
            corpus::write_utterances_csv(out, run.utterances);
        }
        Json j = report::to_json(run.report);
        j["model_name"] = rc.coder.config.model_name;
        j["temperature"] = rc.coder.config.temperature;
        j["shot_mode"] = std::string(coder::to_string(rc.coder.shot_mode));
        report::write_json(rc.out_dir / "coding_report.json", j);
        for (const auto& f : run.report.failures)
            err << "warning: " << f.utterance_id << ": " << coder::to_string(f.kind) << ": " << f.detail << '\n';
        return run.report.failures.empty() ? kExitOk : kExitWarnings;
    });
}

int cmd_analyze(const RunConfig& rc, std::ostream& err) {
    return guarded(err, "analyze", [&] {
        const auto utterances = load_utterances(rc);
        const auto profiles = load_profiles(rc, false);
        const auto result = sdm::run_pipeline(utterances, profiles, pipeline_options(rc, rc.code_source));
        prepare_out(rc);
        report::write_metric_panel(rc.out_dir / "metric_panel.csv", result.panel);
        report::write_order_params(rc.out_dir / "order_params.csv", result.orders);
        report::write_synergy(rc.out_dir / "synergy.csv", result.synergy);
        Json w = report::weights_json(result.standardized, result.weights);
        w["warnings"] = result.warnings;
        report::write_json(rc.out_dir / "weights.json", w);
        print_warnings(err, result.warnings);
        return result.warnings.empty() ? kExitOk : kExitWarnings;
    });
}

int cmd_validate(const RunConfig& rc, std::ostream& err) {
    return guarded(err, "validate", [&] {
        const auto seed = require_seed(rc, "validate");
        const auto utterances = load_utterances(rc);
        const auto profiles = load_profiles(rc, false);
        const auto human = sdm::run_pipeline(utterances, profiles, pipeline_options(rc, corpus::CodeSource::Human));
        const auto pred = sdm::run_pipeline(utterances, profiles, pipeline_options(rc, corpus::CodeSource::Pred));

        std::vector<std::string> warnings = human.warnings;
        for (const auto& w : pred.warnings)
            warnings.push_back("pred: " + w);
        for (auto& w : warnings)
            if (w.rfind("pred: ", 0) != 0)
                w = "human: " + w;

        stats::PermutationOptions po;
        po.iterations = rc.iterations;
        po.seed = seed;
        po.threads = rc.threads;
        po.keep_null = true;

        Json tests = Json::array();
        std::vector<report::NullHistogram> hists;
        for (const std::string metric : {"u_O", "u_W", "u_S", "u_C", "synergy"}) {
            const auto a = outcome_values(human, metric);
            const auto b = outcome_values(pred, metric);
            std::vector<double> xs, ys;
            std::size_t unpaired = 0;
            for (const auto& [key, v] : a) {
                auto it = b.find(key);
                if (it == b.end()) {
                    ++unpaired;
                    continue;
                }
                xs.push_back(v);
                ys.push_back(it->second);
            }
            unpaired += b.size() - xs.size();
            if (unpaired)
                warnings.push_back(metric + ": " + std::to_string(unpaired) +
                                   " observation(s) present in only one pipeline were dropped");

            Json t;
            t["label"] = metric;
            t["comparison"] = "human - pred";
            if (xs.size() < 2) {
                warnings.push_back(metric + ": fewer than 2 paired observations, test skipped");
                t["skipped"] = true;
                tests.push_back(t);
                continue;
            }
            const auto res = stats::permutation_test_paired(xs, ys, po);
            t["seed"] = seed;
            t["mean_human"] = stats::mean(xs);
            t["mean_pred"] = stats::mean(ys);
            t["mean_human_fmt"] = report::fixed(stats::mean(xs), 4);
            t["mean_pred_fmt"] = report::fixed(stats::mean(ys), 4);
            t.update(report::to_json(res.result));
            tests.push_back(t);
            hists.push_back({metric, res.null_distribution, res.result.statistic});
        }

        prepare_out(rc);
        report::write_json(rc.out_dir / "stats_report.json", tests);
        report::write_null_histograms(rc.out_dir / "permutation_null.csv", hists);
        print_warnings(err, warnings);
        return warnings.empty() ? kExitOk : kExitWarnings;
    });
}

int cmd_compare(const RunConfig& rc, std::ostream& err) {
    return guarded(err, "compare", [&] {
        const auto utterances = load_utterances(rc);
        const auto profiles = load_profiles(rc, true);
        const auto result = sdm::run_pipeline(utterances, profiles, pipeline_options(rc, rc.code_source));
        std::vector<std::string> warnings = result.warnings;

        stats::OmnibusOptions oo;
        oo.alpha = rc.alpha;
        oo.holm = rc.holm;

        Json tests = Json::array();
        prepare_out(rc);
        std::ofstream desc(rc.out_dir / "descriptives.csv", std::ios::binary | std::ios::trunc);
        if (!desc)
            throw Error(ErrorKind::Io, "cannot write descriptives.csv");
        csv::write_row(desc, {"factor", "outcome", "level", "n", "mean", "sd"});

        for (const auto& factor : rc.factors) {
            for (const auto& outcome : rc.outcomes) {
                std::vector<stats::FactorObservation> rows;
                std::size_t unprofiled = 0;
                for (const auto& [key, value] : outcome_values(result, outcome)) {
                    const auto* g = corpus::find_profile(profiles, key.first);
                    if (!g) {
                        ++unprofiled;
                        continue;
                    }
                    rows.push_back({factor_level(*g, factor), value});
                }
                if (unprofiled)
                    warnings.push_back(factor + "/" + outcome + ": " + std::to_string(unprofiled) +
                                       " observation(s) without a group profile were dropped");
                try {
                    const auto o = stats::run_omnibus(rows, outcome, factor, oo);
                    tests.push_back(report::to_json(o));
                    for (const auto& d : o.descriptives)
                        csv::write_row(desc, {factor, outcome, d.level, std::to_string(d.n), report::fixed(d.mean, 4),
                                              report::fixed(d.sd, 4)});
                    for (const auto& w : o.warnings)
                        warnings.push_back(factor + "/" + outcome + ": " + w);
                } catch (const Error& e) {
                    tests.push_back({{"factor", factor}, {"outcome", outcome}, {"error", e.what()}});
                    warnings.push_back(factor + "/" + outcome + ": " + e.what());
                }
            }
        }
        report::write_json(rc.out_dir / "stats_report.json", tests);
        print_warnings(err, warnings);
        return warnings.empty() ? kExitOk : kExitWarnings;
    });
}

int cmd_evaluate(const RunConfig& rc, std::ostream& err) {
    return guarded(err, "evaluate", [&] {
        const auto utterances = load_utterances(rc);
        std::vector<eval::PredictionRow> predictions;
        if (rc.predictions) {
            predictions = eval::load_predictions(*rc.predictions);
        } else {
            for (const auto& u : utterances)
                if (u.code_pred)
                    predictions.push_back({u.utterance_id, *u.code_pred, std::nullopt, std::nullopt});
        }
        const auto score = eval::score_predictions(utterances, predictions);

        Json runs = Json::array();
        for (const auto& r : score.runs) {
            Json j;
            j["run_id"] = r.run_id;
            j["scored"] = r.scored;
            j.update(report::to_json(r.report));
            j["cohen_kappa"] = r.kappa;
            j["confusion"] = report::to_json(r.confusion);
            runs.push_back(j);
        }
        const auto& s = score.summary;
        auto ms = [](const eval::MeanSd& m) { return Json{{"mean", m.mean}, {"sd", m.sd}}; };
        Json j;
        j["runs"] = runs;
        j["summary"] = {{"runs", s.runs},
                        {"accuracy", ms(s.accuracy)},
                        {"weighted_precision", ms(s.weighted_precision)},
                        {"weighted_recall", ms(s.weighted_recall)},
                        {"weighted_f1", ms(s.weighted_f1)}};
        j["warnings"] = score.warnings;
        prepare_out(rc);
        report::write_json(rc.out_dir / "metric_report.json", j);
        print_warnings(err, score.warnings);
        return score.warnings.empty() ? kExitOk : kExitWarnings;
    });
}

int cmd_folds(const RunConfig& rc, std::ostream& err) {
    return guarded(err, "folds", [&] {
        const auto seed = require_seed(rc, "folds");
        const auto utterances = load_utterances(rc);
        eval::Folds folds;
        if (rc.stratified) {
            std::vector<eval::Label> labels;
            labels.reserve(utterances.size());
            for (const auto& u : utterances) {
                if (!u.code_human)
                    throw Error(ErrorKind::MissingCode, u.utterance_id + " has no code_human to stratify on");
                labels.emplace_back(to_string(*u.code_human));
            }
            folds = eval::stratified_kfold(labels, rc.folds, seed);
        } else {
            folds = eval::kfold(utterances.size(), rc.folds, seed);
        }
        prepare_out(rc);
        std::ofstream out(rc.out_dir / "folds.csv", std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorKind::Io, "cannot write folds.csv");
        eval::write_folds_csv(out, utterances, folds);
        print_warnings(err, folds.warnings);
        return folds.warnings.empty() ? kExitOk : kExitWarnings;
    });
}

int cmd_demo(const RunConfig& rc, std::ostream& err) {
    RunConfig base = rc;
    if (!base.utterances)
        base.utterances = demo_data_dir() / "utterances.csv";
    if (!base.groups)
        base.groups = demo_data_dir() / "groups.csv";
    if (!base.seed)
        base.seed = kDemoSeed;

    auto step = [&](const char* name) {
        RunConfig c = base;
        c.out_dir = base.out_dir / name;
        return c;
    };

    int code = cmd_ingest(step("ingest"), err);
    if (code == kExitFailure)
        return code;

    // Offline coding pass: the mock answers with each utterance's stored prediction.
    std::map<std::string, std::string> stored;
    try {
        for (const auto& u : corpus::parse_utterances(*base.utterances))
            if (u.code_pred)
                stored[u.utterance_id] = std::string(to_string(*u.code_pred));
    } catch (const std::exception& e) {
        err << "error: demo: " << e.what() << '\n';
        return kExitFailure;
    }
    coder::MockTransport mock([&stored](const coder::ChatRequest& r) {
        auto it = stored.find(r.request_id);
        return it == stored.end() ? std::string("no code") : it->second;
    });
    RunConfig coding = step("code");
    coding.coder.config.cache_dir.reset();
    coding.coder.config.retry_backoff = std::chrono::milliseconds(0);
    code = combine(code, cmd_code(coding, err, &mock));

    code = combine(code, cmd_analyze(step("analyze"), err));
    code = combine(code, cmd_validate(step("validate"), err));
    code = combine(code, cmd_compare(step("compare"), err));
    code = combine(code, cmd_evaluate(step("evaluate"), err));
    code = combine(code, cmd_folds(step("folds"), err));
    return code;
}

} // namespace synergy::cli
