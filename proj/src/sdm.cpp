// SPDX-License-Identifier: Apache-2.0
#include "synergy/sdm.hpp"

#include "synergy/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace synergy::sdm {

namespace {

constexpr double kUpperPad = 1.05;
constexpr double kLowerPad = 0.95;

BoundsRow compute_bounds(const std::vector<const corpus::Observation*>& rows) {
    BoundsRow out{};
    for (std::size_t j = 0; j < kTaskCodeCount; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto* o : rows) {
            lo = std::min(lo, o->values[j]);
            hi = std::max(hi, o->values[j]);
        }
        out[j] = {hi * kUpperPad, lo * kLowerPad};
    }
    return out;
}

// Bounds are padded from min/max, so a constant column (min == max > 0) lands
// on the midpoint; returned exactly rather than through rounding.
double standardize_value(double e, const Bounds& b, double lo, double hi) {
    if (b.alpha == b.beta)
        return 0.0;
    if (lo == hi)
        return 0.5;
    return (e - b.beta) / (b.alpha - b.beta);
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs)
        s += x;
    return s / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs, double mean) {
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double pearson(const std::vector<double>& a, double ma, double sa, const std::vector<double>& b, double mb,
               double sb) {
    if (sa == 0.0 || sb == 0.0)
        return 0.0;
    double cov = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        cov += (a[i] - ma) * (b[i] - mb);
    cov /= static_cast<double>(a.size() - 1);
    return std::clamp(cov / (sa * sb), -1.0, 1.0);
}

} // namespace

std::string_view to_string(Scope scope) { return scope == Scope::Global ? "global" : "per_group"; }

std::string_view to_string(SignConvention convention) {
    return convention == SignConvention::Prose ? "prose" : "paper_literal";
}

const BoundsRow& StandardizedPanel::bounds_for(const std::string& group_id) const {
    if (scope == Scope::Global)
        return bounds.at(kGlobalBoundsKey);
    return bounds.at(group_id);
}

StandardizedPanel standardize(const corpus::MetricPanel& panel, Scope scope) {
    if (panel.observations.empty())
        throw Error(ErrorKind::EmptyPanel, "metric panel has no observations");

    StandardizedPanel out;
    out.scope = scope;

    std::map<std::string, std::vector<const corpus::Observation*>> pools;
    for (const auto& o : panel.observations)
        pools[scope == Scope::Global ? std::string(kGlobalBoundsKey) : o.group_id].push_back(&o);

    std::map<std::string, std::array<std::pair<double, double>, kTaskCodeCount>> ranges;
    for (const auto& [key, rows] : pools) {
        out.bounds[key] = compute_bounds(rows);
        auto& range = ranges[key];
        for (std::size_t j = 0; j < kTaskCodeCount; ++j) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const auto* o : rows) {
                lo = std::min(lo, o->values[j]);
                hi = std::max(hi, o->values[j]);
            }
            range[j] = {lo, hi};
            const auto& b = out.bounds[key][j];
            if (b.alpha == b.beta) {
                std::string where = scope == Scope::Global ? std::string() : " in group " + key;
                out.warnings.push_back("metric " + std::string(to_string(kTaskCodes[j])) + where +
                                       " is zero everywhere; degenerate bounds, standardized to 0");
            }
        }
    }

    out.observations.reserve(panel.observations.size());
    for (const auto& o : panel.observations) {
        const auto key = scope == Scope::Global ? std::string(kGlobalBoundsKey) : o.group_id;
        const auto& b = out.bounds.at(key);
        const auto& range = ranges.at(key);
        corpus::Observation s{o.group_id, o.week, {}};
        for (std::size_t j = 0; j < kTaskCodeCount; ++j)
            s.values[j] = standardize_value(o.values[j], b[j], range[j].first, range[j].second);
        out.observations.push_back(std::move(s));
    }
    return out;
}

double SubsystemWeights::weight(Code code) const {
    auto it = weights.find(code);
    if (it == weights.end())
        throw Error(ErrorKind::MissingWeight, std::string(to_string(code)));
    return it->second;
}

SubsystemWeights uniform_weights() {
    SubsystemWeights w;
    for (Subsystem s : kSubsystems) {
        auto codes = codes_of(s);
        for (Code c : codes)
            w.weights[c] = 1.0 / static_cast<double>(codes.size());
    }
    return w;
}

SubsystemWeights critic_weights(const StandardizedPanel& std_panel) {
    SubsystemWeights out;
    const auto n = std_panel.observations.size();

    for (Subsystem s : kSubsystems) {
        const auto codes = codes_of(s);
        if (codes.size() == 1) {
            out.weights[codes[0]] = 1.0;
            continue;
        }
        if (n < 2)
            throw Error(ErrorKind::InsufficientObservations,
                        "subsystem " + std::string(to_string(s)) + " needs at least 2 observations, got " +
                            std::to_string(n));

        std::vector<std::vector<double>> cols(codes.size());
        std::vector<double> means(codes.size()), sds(codes.size());
        for (std::size_t a = 0; a < codes.size(); ++a) {
            const auto j = *task_index(codes[a]);
            cols[a].reserve(n);
            for (const auto& o : std_panel.observations)
                cols[a].push_back(o.values[j]);
            means[a] = mean_of(cols[a]);
            sds[a] = sample_sd(cols[a], means[a]);
        }

        std::vector<double> info(codes.size(), 0.0);
        double total = 0.0;
        for (std::size_t a = 0; a < codes.size(); ++a) {
            double conflict = 0.0;
            for (std::size_t b = 0; b < codes.size(); ++b) {
                const double r = a == b ? 1.0 : pearson(cols[a], means[a], sds[a], cols[b], means[b], sds[b]);
                conflict += 1.0 - r;
            }
            info[a] = sds[a] * conflict;
            total += info[a];
            out.sigma[codes[a]] = sds[a];
            out.information[codes[a]] = info[a];
        }

        double sd_sum = 0.0;
        for (double sd : sds)
            sd_sum += sd;
        // Correlations of identical columns land a few ulps below 1.
        if (total <= 1e-12 * sd_sum) {
            out.warnings.push_back("subsystem " + std::string(to_string(s)) +
                                   " carries no information (all p_j = 0); using uniform weights");
            for (Code c : codes)
                out.weights[c] = 1.0 / static_cast<double>(codes.size());
            continue;
        }
        for (std::size_t a = 0; a < codes.size(); ++a)
            out.weights[codes[a]] = info[a] / total;
    }
    return out;
}

OrderSeries order_parameters(const StandardizedPanel& std_panel, const SubsystemWeights& weights) {
    std::array<double, kTaskCodeCount> w{};
    for (std::size_t j = 0; j < kTaskCodeCount; ++j)
        w[j] = weights.weight(kTaskCodes[j]);

    OrderSeries out;
    out.rows.reserve(std_panel.observations.size());
    for (const auto& o : std_panel.observations) {
        OrderRow row{o.group_id, o.week, {}};
        for (std::size_t j = 0; j < kTaskCodeCount; ++j)
            row.u[static_cast<std::size_t>(subsystem_of(kTaskCodes[j]))] += w[j] * o.values[j];
        out.rows.push_back(std::move(row));
    }
    std::sort(out.rows.begin(), out.rows.end(), [](const OrderRow& a, const OrderRow& b) {
        return std::tie(a.group_id, a.week) < std::tie(b.group_id, b.week);
    });
    return out;
}

double synergy_degree(const std::array<double, kSubsystemCount>& delta, SignConvention convention) {
    double product = 1.0;
    for (double d : delta)
        product *= d;
    if (product == 0.0)
        return 0.0;
    const double lambda = product > 0.0 ? 1.0 : -1.0;
    const double magnitude = std::sqrt(std::abs(product));
    return convention == SignConvention::Prose ? lambda * magnitude : -lambda * magnitude;
}

SynergySeries synergy_degrees(const OrderSeries& orders, SignConvention convention, GapPolicy gaps) {
    auto rows = orders.rows;
    std::sort(rows.begin(), rows.end(), [](const OrderRow& a, const OrderRow& b) {
        return std::tie(a.group_id, a.week) < std::tie(b.group_id, b.week);
    });

    SynergySeries out;
    out.sign_convention = convention;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& prev = rows[i - 1];
        const auto& cur = rows[i];
        if (prev.group_id != cur.group_id)
            continue;
        if (gaps == GapPolicy::Consecutive && cur.week != prev.week + 1)
            continue;
        std::array<double, kSubsystemCount> delta{};
        double product = 1.0;
        for (std::size_t s = 0; s < kSubsystemCount; ++s) {
            delta[s] = cur.u[s] - prev.u[s];
            product *= delta[s];
        }
        out.rows.push_back({cur.group_id, cur.week, prev.week, synergy_degree(delta, convention), product});
    }
    return out;
}

PipelineResult run_pipeline(const std::vector<corpus::Utterance>& utterances,
                            const std::vector<corpus::GroupProfile>& profiles, const PipelineOptions& options) {
    PipelineResult r;
    r.panel = corpus::aggregate_metrics(utterances, profiles, options.aggregate);
    r.standardized = standardize(r.panel, options.scope);
    r.warnings = r.standardized.warnings;
    try {
        r.weights = critic_weights(r.standardized);
    } catch (const Error& e) {
        if (!options.uniform_fallback || e.kind() != ErrorKind::InsufficientObservations)
            throw;
        r.weights = uniform_weights();
        r.weights.warnings.push_back(std::string(e.what()) + "; using uniform weights");
    }
    r.warnings.insert(r.warnings.end(), r.weights.warnings.begin(), r.weights.warnings.end());
    r.orders = order_parameters(r.standardized, r.weights);
    r.synergy = synergy_degrees(r.orders, options.sign, options.gaps);
    return r;
}

} // namespace synergy::sdm
