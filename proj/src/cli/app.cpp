// SPDX-License-Identifier: Apache-2.0
#include "synergy/cli.hpp"

#include "synergy/error.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace synergy::cli {

namespace {

struct Flags {
    std::string config;
    std::string utterances, groups, codebook, predictions, out_dir;
    std::string code_source, normalization, scope, sign, gap, shot, transport;
    std::string mock_responses, cache_dir;
    std::uint64_t seed = 0;
    std::size_t iterations = 0, folds = 0, max_in_flight = 0;
    unsigned threads = 0;
    double alpha = 0.0;
    std::vector<std::string> factors, outcomes;
};

void add_options(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "TOML-style configuration file; flags override it");
    sub->add_option("--utterances", f.utterances, "utterances file (.csv or .jsonl)");
    sub->add_option("--groups", f.groups, "group profiles CSV");
    sub->add_option("--codebook", f.codebook, "codebook CSV overriding the built-in scheme");
    sub->add_option("--predictions", f.predictions, "predictions CSV for evaluate");
    sub->add_option("--out-dir", f.out_dir, "output directory (created if absent)");
    sub->add_option("--code-source", f.code_source, "human | pred");
    sub->add_option("--normalization", f.normalization, "per-member | raw");
    sub->add_option("--scope", f.scope, "standardization scope: global | per-group");
    sub->add_option("--sign", f.sign, "synergy sign convention: prose | paper-literal");
    sub->add_option("--gap", f.gap, "missing-week policy: consecutive | bridge");
    sub->add_flag("--zero-fill", "emit profiled group-weeks without task-relevant utterances as zeros");
    sub->add_option("--seed", f.seed, "seed for stochastic subcommands");
    sub->add_option("--iterations", f.iterations, "permutation iterations");
    sub->add_option("--threads", f.threads, "permutation worker threads");
    sub->add_option("--alpha", f.alpha, "significance level");
    sub->add_flag("--holm", "Holm-adjust post-hoc p-values");
    sub->add_option("--factor", f.factors, "compare factor(s): problem_type, quality, homogeneity");
    sub->add_option("--outcome", f.outcomes, "compare outcome(s): u_O u_W u_S u_C synergy");
    sub->add_option("--shot", f.shot, "coding prompt: zero-shot | few-shot");
    sub->add_option("--transport", f.transport, "coding transport: http | mock");
    sub->add_option("--mock-responses", f.mock_responses, "mock transport script (utterance_id,response)");
    sub->add_option("--cache-dir", f.cache_dir, "coding response cache directory");
    sub->add_option("--max-in-flight", f.max_in_flight, "concurrent coding requests");
    sub->add_option("--folds", f.folds, "number of folds");
    sub->add_flag("--plain-kfold", "unstratified folds");
}

RunConfig build_config(const CLI::App* sub, const Flags& f) {
    RunConfig rc;
    if (sub->count("--config")) {
        const std::filesystem::path path(f.config);
        apply_config(rc, config::Document::load(path), path.parent_path());
    }
    auto given = [&](const char* name) { return sub->count(name) > 0; };

    if (given("--utterances")) rc.utterances = f.utterances;
    if (given("--groups")) rc.groups = f.groups;
    if (given("--codebook")) rc.codebook = f.codebook;
    if (given("--predictions")) rc.predictions = f.predictions;
    if (given("--out-dir")) rc.out_dir = f.out_dir;
    if (given("--code-source")) rc.code_source = parse_code_source(f.code_source);
    if (given("--normalization")) rc.normalization = parse_normalization(f.normalization);
    if (given("--scope")) rc.scope = parse_scope(f.scope);
    if (given("--sign")) rc.sign = parse_sign(f.sign);
    if (given("--gap")) rc.gaps = parse_gap(f.gap);
    if (given("--zero-fill")) rc.zero_fill = true;
    if (given("--seed")) rc.seed = f.seed;
    if (given("--iterations")) rc.iterations = f.iterations;
    if (given("--threads")) rc.threads = f.threads;
    if (given("--alpha")) rc.alpha = f.alpha;
    if (given("--holm")) rc.holm = true;
    if (given("--factor")) rc.factors = f.factors;
    if (given("--outcome")) rc.outcomes = f.outcomes;
    if (given("--shot")) rc.coder.shot_mode = parse_shot(f.shot);
    if (given("--transport")) {
        if (f.transport != "http" && f.transport != "mock")
            throw UnknownEnum("transport", f.transport);
        rc.coder.transport = f.transport;
    }
    if (given("--mock-responses")) rc.coder.mock_responses = f.mock_responses;
    if (given("--cache-dir")) rc.coder.config.cache_dir = f.cache_dir;
    if (given("--max-in-flight")) rc.coder.config.max_in_flight = f.max_in_flight;
    if (given("--folds")) rc.folds = f.folds;
    if (given("--plain-kfold")) rc.stratified = false;

    if (!(rc.alpha > 0.0 && rc.alpha < 1.0))
        throw Error(ErrorKind::Config, "alpha must lie in (0, 1)");
    if (rc.iterations < 1)
        throw Error(ErrorKind::Config, "iterations must be >= 1");
    if (rc.threads < 1)
        throw Error(ErrorKind::Config, "threads must be >= 1");
    return rc;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synergy degree analysis of coded collaborative discourse", "synergy"};
    app.require_subcommand(1, 1);

    struct Command {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&, std::ostream&);
    };
    static const Command kCommands[] = {
        {"ingest", "parse and validate the corpus, write validation_report.json", cmd_ingest},
        {"code", "code utterances through the chat endpoint", [](const RunConfig& rc, std::ostream& e) {
             return cmd_code(rc, e);
         }},
        {"analyze", "order parameters, synergy degrees and weights", cmd_analyze},
        {"validate", "paired permutation tests, human vs predicted codes", cmd_validate},
        {"compare", "omnibus tests across group factors", cmd_compare},
        {"evaluate", "classification metrics and kappa for predicted codes", cmd_evaluate},
        {"folds", "export cross-validation folds", cmd_folds},
        {"demo", "run the bundled synthetic corpus end to end", cmd_demo},
    };

    Flags flags;
    std::vector<CLI::App*> subs;
    for (const auto& c : kCommands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_options(sub, flags);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitFailure;
    }

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed())
            continue;
        RunConfig rc;
        try {
            rc = build_config(subs[i], flags);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kExitFailure;
        }
        return kCommands[i].fn(rc, err);
    }
    return kExitFailure;
}

} // namespace synergy::cli
