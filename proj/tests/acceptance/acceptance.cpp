// SPDX-License-Identifier: Apache-2.0
#include "synergy/coder.hpp"
#include "synergy/corpus.hpp"
#include "synergy/error.hpp"
#include "synergy/evalkit.hpp"
#include "synergy/sdm.hpp"
#include "synergy/stats.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <tuple>
#include <vector>

using namespace synergy;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

struct Criterion {
    std::string name;
    double limit_seconds;
    std::function<Verdict()> body;
};

// ---------------------------------------------------------------------------

Verdict sdm_constant_law() {
    Verdict v;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> value(0.0, 20.0);
    std::uniform_int_distribution<int> rows(1, 40);
    for (int trial = 0; trial < 200; ++trial) {
        corpus::MetricPanel panel;
        const int n = rows(rng);
        const std::size_t constant_col = static_cast<std::size_t>(trial) % kTaskCodeCount;
        const double c = 0.25 + value(rng);
        for (int i = 0; i < n; ++i) {
            corpus::Observation o{"G" + std::to_string(i % 4), i / 4, {}};
            for (auto& x : o.values)
                x = value(rng);
            o.values[constant_col] = c;
            panel.observations.push_back(o);
        }
        std::sort(panel.observations.begin(), panel.observations.end(),
                  [](const auto& a, const auto& b) { return std::tie(a.group_id, a.week) < std::tie(b.group_id, b.week); });
        for (auto scope : {sdm::Scope::Global, sdm::Scope::PerGroup}) {
            const auto s = sdm::standardize(panel, scope);
            for (const auto& o : s.observations)
                v.require(o.values[constant_col] == 0.5, "constant column did not standardize to exactly 0.5");
        }
    }
    return v;
}

Verdict sdm_oracle() {
    Verdict v;
    const auto fixture = testing::load_json(testing::fixture_dir() / "sdm_oracle.json");
    const auto utterances = corpus::parse_utterances(testing::data_dir() / "oracle" / "utterances.csv");
    const auto profiles = corpus::parse_group_profiles(testing::data_dir() / "oracle" / "groups.csv");
    double worst = 0.0;
    auto track = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };

    for (const auto& c : fixture["cases"]) {
        for (auto sign : {sdm::SignConvention::Prose, sdm::SignConvention::PaperLiteral}) {
            sdm::PipelineOptions opt;
            opt.aggregate.normalization =
                c["normalization"] == "raw" ? corpus::Normalization::RawCount : corpus::Normalization::PerMember;
            opt.scope = c["scope"] == "global" ? sdm::Scope::Global : sdm::Scope::PerGroup;
            opt.sign = sign;
            const auto r = sdm::run_pipeline(utterances, profiles, opt);

            v.require(r.standardized.observations.size() == c["standardized"].size(), "standardized row count");
            v.require(r.orders.rows.size() == c["orders"].size(), "order row count");
            v.require(r.synergy.rows.size() == c["synergy"].size(), "synergy row count");
            if (!v.pass)
                return v;
            for (std::size_t i = 0; i < r.standardized.observations.size(); ++i)
                for (std::size_t j = 0; j < kTaskCodeCount; ++j)
                    track(r.standardized.observations[i].values[j], c["standardized"][i]["u"][j].get<double>());
            for (Code code : kTaskCodes)
                track(r.weights.weight(code), c["weights"][std::string(to_string(code))].get<double>());
            for (std::size_t i = 0; i < r.orders.rows.size(); ++i)
                for (std::size_t s = 0; s < kSubsystemCount; ++s)
                    track(r.orders.rows[i].u[s], c["orders"][i]["u"][s].get<double>());
            const char* col = sign == sdm::SignConvention::Prose ? "prose" : "paper_literal";
            for (std::size_t i = 0; i < r.synergy.rows.size(); ++i) {
                track(r.synergy.rows[i].synergy, c["synergy"][i][col].get<double>());
                track(r.synergy.rows[i].product, c["synergy"][i]["product"].get<double>());
            }
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "max |diff| = %.3g", worst);
    v.require(worst <= 1e-9, buf);
    if (v.pass)
        v.detail = buf;
    return v;
}

Verdict synergy_range_and_sign() {
    Verdict v;
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::bernoulli_distribution repeat(0.15);
    std::size_t rows = 0, zeros = 0, positive = 0;
    for (int series = 0; series < 1000; ++series) {
        sdm::OrderSeries orders;
        const bool increasing = series % 10 == 0;
        std::array<double, kSubsystemCount> prev{};
        for (int w = 0; w < 6; ++w) {
            sdm::OrderRow row{"G", w, {}};
            for (std::size_t s = 0; s < kSubsystemCount; ++s) {
                if (increasing)
                    row.u[s] = w == 0 ? unit(rng) * 0.3 : std::min(1.0, prev[s] + 0.01 + unit(rng) * 0.1);
                else
                    row.u[s] = w > 0 && repeat(rng) ? prev[s] : unit(rng);
            }
            prev = row.u;
            orders.rows.push_back(row);
        }
        const auto prose = sdm::synergy_degrees(orders, sdm::SignConvention::Prose);
        const auto literal = sdm::synergy_degrees(orders, sdm::SignConvention::PaperLiteral);
        v.require(prose.rows.size() == 5 && literal.rows.size() == 5, "expected five synergy rows per series");
        if (!v.pass)
            return v;
        for (std::size_t i = 0; i < prose.rows.size(); ++i) {
            ++rows;
            const double cp = prose.rows[i].synergy;
            const double cl = literal.rows[i].synergy;
            v.require(cp >= -1.0 && cp <= 1.0 && cl >= -1.0 && cl <= 1.0, "synergy outside [-1, 1]");
            bool any_zero = false, all_positive = true;
            for (std::size_t s = 0; s < kSubsystemCount; ++s) {
                const double d = orders.rows[i + 1].u[s] - orders.rows[i].u[s];
                any_zero = any_zero || d == 0.0;
                all_positive = all_positive && d > 0.0;
            }
            if (any_zero) {
                ++zeros;
                v.require(cp == 0.0 && cl == 0.0, "zero delta did not give C = 0");
            }
            if (all_positive) {
                ++positive;
                v.require(cp > 0.0, "all-positive deltas not positive under prose convention");
                v.require(cl < 0.0, "all-positive deltas not negative under paper-literal convention");
            }
        }
    }
    v.require(zeros > 0 && positive > 0, "sampler did not exercise the zero and all-positive cases");
    if (v.pass)
        v.detail = std::to_string(rows) + " rows, " + std::to_string(zeros) + " with a zero delta, " +
                   std::to_string(positive) + " all-positive";
    return v;
}

Verdict permutation_exactness() {
    Verdict v;
    const std::vector<double> ones{1, 1, 1, 1, 1}, zeros{0, 0, 0, 0, 0};
    const auto r = stats::permutation_test_paired(ones, zeros, {10000, 20240601, 1, false});
    char buf[160];
    std::snprintf(buf, sizeof buf, "p(n=5 unit diffs) = %.4f", r.result.p_value);
    v.require(std::abs(r.result.p_value - 0.0625) <= 0.02, buf);

    const std::vector<double> same{0.2, 0.5, 0.9, 0.1, 0.4, 0.4};
    v.require(stats::permutation_test_paired(same, same, {10000, 3, 1, false}).result.p_value == 1.0,
              "identical inputs did not give p = 1 exactly");

    std::mt19937_64 rng(303);
    std::normal_distribution<double> d;
    std::vector<double> a(55), b(55);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = d(rng);
        b[i] = d(rng) * 0.8 + 0.1;
    }
    const auto one = stats::permutation_test_paired(a, b, {10000, 42, 1, true});
    const auto eight = stats::permutation_test_paired(a, b, {10000, 42, 8, true});
    v.require(one.result.p_value == eight.result.p_value && one.result.statistic == eight.result.statistic &&
                  one.result.extras == eight.result.extras && one.null_distribution == eight.null_distribution,
              "1- and 8-thread runs differ");
    if (v.pass)
        v.detail = buf;
    return v;
}

// Two-sided exact p by enumerating every assignment of the pooled values and
// counting pairs directly.
double brute_force_mw_p(const std::vector<double>& a, const std::vector<double>& b, double& u_min) {
    auto pair_count = [](const std::vector<double>& x, const std::vector<double>& y) {
        double u = 0.0;
        for (double xi : x)
            for (double yj : y)
                u += xi > yj ? 1.0 : (xi == yj ? 0.5 : 0.0);
        return u;
    };
    const double nn = static_cast<double>(a.size() * b.size());
    const double ua = pair_count(a, b);
    u_min = std::min(ua, nn - ua);

    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size();
    std::size_t hits = 0, total = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != a.size())
            continue;
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i)
            ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
        const double u = pair_count(x, y);
        if (std::min(u, nn - u) <= u_min)
            ++hits;
        ++total;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

Verdict nonparametric_oracles() {
    Verdict v;
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<int> size(1, 7);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    for (int inst = 0; inst < 200; ++inst) {
        std::vector<double> a(static_cast<std::size_t>(size(rng))), b(static_cast<std::size_t>(size(rng)));
        for (auto& x : a)
            x = value(rng);
        for (auto& x : b)
            x = value(rng);
        double u_brute = 0.0;
        const double p_brute = brute_force_mw_p(a, b, u_brute);
        const auto r = stats::mann_whitney_u(a, b, stats::MannWhitneyMode::Exact);
        v.require(r.statistic == u_brute, "exact U differs from pair counting");
        v.require(r.p_value == p_brute, "exact p differs from brute-force enumeration");
    }
    const auto kw = stats::kruskal_wallis(std::vector<std::vector<double>>{{1, 2}, {3, 4}, {5, 6}});
    v.require(std::abs(kw.statistic - 4.5714) <= 1e-4, "Kruskal-Wallis H != 4.5714");
    const auto wt = stats::welch_t(std::vector<double>{1, 2, 3}, std::vector<double>{2, 3, 4});
    v.require(std::abs(wt.statistic + 1.2247) <= 1e-4, "Welch t != -1.2247");
    v.require(std::abs(wt.df.at(0) - 4.0) <= 1e-4, "Welch df != 4");
    char buf[96];
    std::snprintf(buf, sizeof buf, "H = %.4f, t = %.4f, df = %.4f", kw.statistic, wt.statistic, wt.df.at(0));
    if (v.pass)
        v.detail = buf;
    return v;
}

Verdict calibration() {
    Verdict v;
    std::mt19937_64 rng(505);
    std::normal_distribution<double> d(0.0, 1.0);
    const int datasets = 2000;
    int anova_rej = 0, kw_rej = 0, omni_rej = 0, omni_anova = 0;
    for (int k = 0; k < datasets; ++k) {
        std::vector<std::vector<double>> g(3, std::vector<double>(15));
        std::vector<stats::FactorObservation> rows;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (auto& x : g[i]) {
                x = d(rng);
                rows.push_back({std::string(1, static_cast<char>('a' + i)), x});
            }
        anova_rej += stats::anova_fisher(g).p_value < 0.05;
        kw_rej += stats::kruskal_wallis(g).p_value < 0.05;
        const auto o = stats::run_omnibus(rows, "y", "f");
        omni_rej += o.omnibus.p_value < 0.05;
        omni_anova += o.plan.chosen_test == stats::OmnibusTest::FisherAnova;
    }
    const double ra = anova_rej / static_cast<double>(datasets);
    const double rk = kw_rej / static_cast<double>(datasets);
    const double ro = omni_rej / static_cast<double>(datasets);
    char buf[160];
    std::snprintf(buf, sizeof buf, "ANOVA %.4f, Kruskal-Wallis %.4f, omnibus %.4f (ANOVA chosen %d/%d)", ra, rk, ro,
                  omni_anova, datasets);
    v.require(ra >= 0.03 && ra <= 0.07, buf);
    v.require(rk >= 0.03 && rk <= 0.07, buf);
    v.require(ro >= 0.03 && ro <= 0.07, buf);
    if (v.pass)
        v.detail = buf;
    return v;
}

Verdict shapiro_fixtures() {
    Verdict v;
    const auto fx = testing::load_json(testing::fixture_dir() / "shapiro_fixtures.json");
    double worst = 0.0;
    std::size_t count = 0;
    for (const auto& s : fx["samples"]) {
        const auto r = stats::shapiro_wilk(s["sample"].get<std::vector<double>>());
        worst = std::max(worst, std::abs(r.statistic - s["W"].get<double>()));
        ++count;
    }
    v.require(count == 10, "expected 10 fixture samples");
    char buf[64];
    std::snprintf(buf, sizeof buf, "max |dW| = %.3g over %zu samples", worst, count);
    v.require(worst <= 1e-4, buf);
    v.require(stats::shapiro_wilk(std::vector<double>{1, 2, 3}).statistic == 1.0, "[1,2,3] did not give W = 1");
    if (v.pass)
        v.detail = buf;
    return v;
}

Verdict classification_metrics() {
    Verdict v;
    std::mt19937_64 rng(606);
    std::uniform_int_distribution<int> classes(2, 10);
    std::uniform_int_distribution<int> cell(0, 30);
    std::bernoulli_distribution empty_row(0.1);
    double worst = 0.0;
    for (int m = 0; m < 500; ++m) {
        const auto k = static_cast<std::size_t>(classes(rng));
        eval::ConfusionMatrix cm;
        for (std::size_t i = 0; i < k; ++i)
            cm.labels.push_back("c" + std::to_string(i));
        cm.counts.assign(k, std::vector<std::size_t>(k, 0));
        for (auto& row : cm.counts) {
            const bool blank = empty_row(rng);
            for (auto& x : row)
                x = blank ? 0 : static_cast<std::size_t>(cell(rng));
        }
        cm.counts[0][0] += 1;
        const auto r = eval::weighted_metrics(cm);
        worst = std::max(worst, std::abs(r.weighted_recall - r.accuracy));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max |recall - accuracy| = %.3g", worst);
    v.require(worst <= 1e-12, buf);

    const auto worked = eval::weighted_metrics(eval::confusion({"A", "A", "B"}, {"A", "B", "B"}));
    v.require(worked.weighted_f1 == 2.0 / 3.0, "worked example F1 != 2/3");

    std::discrete_distribution<int> code_dist({14, 11, 9, 16, 12, 8, 13, 9, 5, 3});
    std::vector<eval::Label> labels;
    for (int i = 0; i < 2420; ++i)
        labels.emplace_back(to_string(kAllCodes[static_cast<std::size_t>(code_dist(rng))]));
    const auto folds = eval::stratified_kfold(labels, 5, 42);
    std::map<eval::Label, std::array<int, 5>> per_class;
    std::vector<int> seen(labels.size(), 0);
    for (std::size_t f = 0; f < folds.folds.size(); ++f) {
        v.require(folds.folds[f].size() == 484, "fold size != 484");
        for (auto i : folds.folds[f]) {
            ++seen[i];
            ++per_class[labels[i]][f];
        }
    }
    v.require(folds.folds.size() == 5, "expected 5 folds");
    v.require(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }), "folds do not partition");
    int spread = 0;
    for (const auto& [label, counts] : per_class)
        spread = std::max(spread, *std::max_element(counts.begin(), counts.end()) -
                                      *std::min_element(counts.begin(), counts.end()));
    v.require(spread <= 1, "per-class balance > 1");
    if (v.pass)
        v.detail = std::string(buf) + ", folds 5 x 484, class spread " + std::to_string(spread);
    return v;
}

Verdict coder_protocol() {
    Verdict v;
    std::vector<corpus::Utterance> us;
    for (const std::string g : {"A", "B", "C"})
        for (int i = 0; i < 12; ++i)
            us.push_back({g + std::to_string(i), g, i / 6, i, g + "s", "team " + g + " says thing " + std::to_string(i),
                          std::nullopt, std::nullopt});

    for (auto mode : {coder::ShotMode::ZeroShot, coder::ShotMode::FewShot}) {
        std::mutex m;
        std::vector<coder::ChatRequest> seen;
        coder::MockTransport transport([&](const coder::ChatRequest& r) -> std::string {
            {
                std::lock_guard lk(m);
                seen.push_back(r);
            }
            if (r.request_id == "A3")
                return "I am not sure what this is";
            if (r.request_id == "B7")
                throw std::runtime_error("simulated outage");
            return "S2";
        });
        coder::CoderConfig cfg;
        cfg.model_name = "mock";
        cfg.max_in_flight = 4;
        cfg.max_retries = 1;
        cfg.retry_backoff = std::chrono::milliseconds(0);
        coder::CodingRun run;
        try {
            run = coder::code_corpus(us, cfg, {mode, Codebook::builtin()}, transport);
        } catch (const std::exception& e) {
            v.require(false, std::string("coding run aborted: ") + e.what());
            return v;
        }
        v.require(run.report.total == us.size(), "report total");
        v.require(run.report.coded == us.size() - 2, "expected exactly two failures");
        v.require(run.report.failures.size() == 2, "failures not listed");

        const auto rendering = coder::render_codebook(Codebook::builtin(), mode);
        for (const auto& r : seen) {
            v.require(r.user.find(rendering) != std::string::npos, "prompt lacks the codebook");
            v.require(r.user.find("Please output the code only (e.g., W1, S2, C).") != std::string::npos,
                      "prompt lacks the output instruction");
            const bool has_example = r.user.find("| Example |") != std::string::npos;
            v.require(has_example == (mode == coder::ShotMode::FewShot),
                      "example column presence does not match the shot mode");
            const auto ctx_begin = r.user.find("Context:\n");
            const auto ctx_end = r.user.find("\nCurrent message:");
            v.require(ctx_begin != std::string::npos && ctx_end != std::string::npos, "prompt lacks sections");
            if (!v.pass)
                return v;
            const auto ctx = r.user.substr(ctx_begin, ctx_end - ctx_begin);
            std::size_t lines = 0, foreign = 0;
            const std::string own = "team " + r.request_id.substr(0, 1) + " ";
            for (std::size_t pos = ctx.find("\n["); pos != std::string::npos; pos = ctx.find("\n[", pos + 1)) {
                ++lines;
                const auto eol = ctx.find('\n', pos + 1);
                if (ctx.substr(pos, eol - pos).find(own) == std::string::npos)
                    ++foreign;
            }
            v.require(lines <= 5, "more than five context messages");
            v.require(foreign == 0, "context leaked across groups");
        }
    }
    if (v.pass)
        v.detail = "36 utterances x 2 shot modes, 2 failures reported without aborting";
    return v;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"sdm_constant_series_law", 1.0, sdm_constant_law},
        {"sdm_oracle_fixture", 1.0, sdm_oracle},
        {"synergy_range_and_sign", 5.0, synergy_range_and_sign},
        {"permutation_exactness", 5.0, permutation_exactness},
        {"nonparametric_oracles", 10.0, nonparametric_oracles},
        {"calibration_type_i_error", 60.0, calibration},
        {"shapiro_wilk_fixtures", 1.0, shapiro_fixtures},
        {"classification_metrics", 10.0, classification_metrics},
        {"coder_protocol", 10.0, coder_protocol},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.body();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (v.pass && secs > c.limit_seconds) {
            v.pass = false;
            v.detail = "runtime limit exceeded";
        }
        failed += !v.pass;
        std::printf("%s %s (%.3f s, limit %.0f s)%s%s\n", v.pass ? "PASS" : "FAIL", c.name.c_str(), secs,
                    c.limit_seconds, v.detail.empty() ? "" : ": ", v.detail.c_str());
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
