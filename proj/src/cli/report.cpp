// SPDX-License-Identifier: Apache-2.0
#include "report.hpp"

#include "synergy/csv.hpp"
#include "synergy/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace synergy::cli::report {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    return out;
}

// NaN and infinities have no JSON spelling.
Json number(double v) {
    if (std::isfinite(v))
        return v;
    return nullptr;
}

} // namespace

std::string fixed(double v, int decimals) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    // "-0.0000" reads as a sign where there is none
    std::string s(buf);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

Json to_json(const stats::TestResult& r) {
    Json j;
    j["method"] = std::string(stats::to_string(r.method));
    j["statistic"] = number(r.statistic);
    j["statistic_fmt"] = fixed(r.statistic, 4);
    Json df = Json::array();
    Json df_fmt = Json::array();
    for (double d : r.df) {
        df.push_back(number(d));
        df_fmt.push_back(fixed(d, 4));
    }
    j["df"] = df;
    j["df_fmt"] = df_fmt;
    j["p"] = number(r.p_value);
    j["p_fmt"] = fixed(r.p_value, 4);
    j["n"] = r.n;
    Json extras = Json::object();
    for (const auto& [k, v] : r.extras)
        extras[k] = number(v);
    j["extras"] = extras;
    j["warnings"] = r.warnings;
    return j;
}

Json to_json(const stats::OmnibusOutcome& o) {
    Json j;
    j["factor"] = o.plan.factor;
    j["outcome"] = o.plan.outcome;

    Json plan;
    plan["chosen_test"] = std::string(stats::to_string(o.plan.chosen_test));
    plan["post_hoc_family"] = std::string(stats::to_string(o.plan.post_hoc));
    Json normality = Json::array();
    for (const auto& c : o.plan.normality) {
        Json n;
        n["level"] = c.level;
        n["result"] = c.normality ? to_json(*c.normality) : Json(nullptr);
        n["note"] = c.note;
        normality.push_back(n);
    }
    plan["normality"] = normality;
    plan["homogeneity"] = o.plan.homogeneity ? to_json(*o.plan.homogeneity) : Json(nullptr);
    plan["homogeneity_note"] = o.plan.homogeneity_note;
    j["plan"] = plan;

    Json desc = Json::array();
    for (const auto& d : o.descriptives) {
        Json e;
        e["level"] = d.level;
        e["n"] = d.n;
        e["mean"] = number(d.mean);
        e["sd"] = number(d.sd);
        e["mean_fmt"] = fixed(d.mean, 4);
        e["sd_fmt"] = fixed(d.sd, 4);
        desc.push_back(e);
    }
    j["descriptives"] = desc;
    j["omnibus"] = to_json(o.omnibus);

    Json post = Json::array();
    for (const auto& ph : o.post_hocs) {
        Json e;
        e["level_a"] = ph.level_a;
        e["level_b"] = ph.level_b;
        e["mean_difference"] = number(ph.mean_difference);
        e["mean_difference_fmt"] = fixed(ph.mean_difference, 4);
        e["result"] = to_json(ph.result);
        if (ph.p_holm) {
            e["p_holm"] = number(*ph.p_holm);
            e["p_holm_fmt"] = fixed(*ph.p_holm, 4);
        }
        post.push_back(e);
    }
    j["post_hoc"] = post;
    j["warnings"] = o.warnings;
    return j;
}

Json to_json(const corpus::ValidationReport& v) {
    Json j;
    j["clean"] = v.clean();
    j["orphan_groups"] = v.orphan_groups;
    j["empty_groups"] = v.empty_groups;
    Json absent = Json::array();
    for (const auto& gw : v.absent_group_weeks)
        absent.push_back({{"group_id", gw.group_id}, {"week", gw.week}});
    j["absent_group_weeks"] = absent;
    j["coverage"] = {{"utterances", v.coverage.utterances},
                     {"with_code_human", v.coverage.with_human},
                     {"with_code_pred", v.coverage.with_pred}};
    j["warnings"] = v.warnings;
    j["notes"] = v.notes;
    return j;
}

Json to_json(const coder::CodingReport& r) {
    Json j;
    j["total"] = r.total;
    j["coded"] = r.coded;
    j["failed"] = r.failures.size();
    j["cache_hits"] = r.cache_hits;
    j["transport_calls"] = r.transport_calls;
    j["cache_hit_rate"] = r.total ? static_cast<double>(r.cache_hits) / static_cast<double>(r.total) : 0.0;
    Json failures = Json::array();
    for (const auto& f : r.failures)
        failures.push_back({{"utterance_id", f.utterance_id},
                            {"kind", std::string(coder::to_string(f.kind))},
                            {"attempts", f.attempts},
                            {"detail", f.detail}});
    j["failures"] = failures;
    return j;
}

Json to_json(const eval::MetricReport& m) {
    Json j;
    j["accuracy"] = m.accuracy;
    j["weighted_precision"] = m.weighted_precision;
    j["weighted_recall"] = m.weighted_recall;
    j["weighted_f1"] = m.weighted_f1;
    Json per = Json::object();
    for (const auto& [label, c] : m.per_class)
        per[label] = {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
    j["per_class"] = per;
    return j;
}

Json to_json(const eval::ConfusionMatrix& cm) {
    return Json{{"labels", cm.labels}, {"counts", cm.counts}};
}

Json weights_json(const sdm::StandardizedPanel& std_panel, const sdm::SubsystemWeights& w) {
    Json j;
    Json subsystems = Json::object();
    for (Subsystem s : {Subsystem::O, Subsystem::W, Subsystem::S, Subsystem::C}) {
        Json m = Json::object();
        for (Code c : codes_of(s))
            m[std::string(to_string(c))] = w.weight(c);
        subsystems[std::string(to_string(s))] = m;
    }
    j["weights"] = subsystems;

    Json diag = Json::object();
    for (Code c : kTaskCodes) {
        Json d = Json::object();
        if (auto it = w.sigma.find(c); it != w.sigma.end())
            d["sigma"] = number(it->second);
        if (auto it = w.information.find(c); it != w.information.end())
            d["information"] = number(it->second);
        diag[std::string(to_string(c))] = d;
    }
    j["critic"] = diag;

    j["scope"] = std::string(sdm::to_string(std_panel.scope));
    Json bounds = Json::object();
    for (const auto& [key, row] : std_panel.bounds) {
        Json per = Json::object();
        for (Code c : kTaskCodes) {
            const auto& b = row[*task_index(c)];
            per[std::string(to_string(c))] = {{"alpha", b.alpha}, {"beta", b.beta}};
        }
        bounds[key] = per;
    }
    j["bounds"] = bounds;
    j["warnings"] = w.warnings;
    return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_metric_panel(const std::filesystem::path& path, const corpus::MetricPanel& panel) {
    auto out = open_out(path);
    std::vector<std::string> header{"group_id", "week"};
    for (Code c : kTaskCodes)
        header.emplace_back(to_string(c));
    csv::write_row(out, header);
    for (const auto& o : panel.observations) {
        std::vector<std::string> row{o.group_id, std::to_string(o.week)};
        for (double v : o.values)
            row.push_back(fixed(v, 6));
        csv::write_row(out, row);
    }
}

void write_order_params(const std::filesystem::path& path, const sdm::OrderSeries& orders) {
    auto out = open_out(path);
    csv::write_row(out, {"group_id", "week", "u_O", "u_W", "u_S", "u_C"});
    for (const auto& r : orders.rows)
        csv::write_row(out, {r.group_id, std::to_string(r.week), fixed(r.order(Subsystem::O), 6),
                             fixed(r.order(Subsystem::W), 6), fixed(r.order(Subsystem::S), 6),
                             fixed(r.order(Subsystem::C), 6)});
}

void write_synergy(const std::filesystem::path& path, const sdm::SynergySeries& series) {
    auto out = open_out(path);
    csv::write_row(out, {"group_id", "week", "synergy", "sign_convention"});
    const std::string conv(sdm::to_string(series.sign_convention));
    for (const auto& r : series.rows)
        csv::write_row(out, {r.group_id, std::to_string(r.week), fixed(r.synergy, 6), conv});
}

void write_null_histograms(const std::filesystem::path& path, const std::vector<NullHistogram>& hists,
                           std::size_t bins) {
    auto out = open_out(path);
    csv::write_row(out, {"metric", "bin", "lower", "upper", "count", "observed"});
    for (const auto& h : hists) {
        if (h.null_distribution.empty())
            continue;
        auto [mn, mx] = std::minmax_element(h.null_distribution.begin(), h.null_distribution.end());
        double lo = std::min(*mn, h.observed);
        double hi = std::max(*mx, h.observed);
        if (hi <= lo) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double width = (hi - lo) / static_cast<double>(bins);
        std::vector<std::size_t> counts(bins, 0);
        for (double v : h.null_distribution) {
            auto b = static_cast<std::size_t>((v - lo) / width);
            counts[std::min(b, bins - 1)]++;
        }
        for (std::size_t b = 0; b < bins; ++b)
            csv::write_row(out, {h.label, std::to_string(b), fixed(lo + width * static_cast<double>(b), 6),
                                 fixed(lo + width * static_cast<double>(b + 1), 6), std::to_string(counts[b]),
                                 fixed(h.observed, 6)});
    }
}

} // namespace synergy::cli::report
