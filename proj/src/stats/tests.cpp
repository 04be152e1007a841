// SPDX-License-Identifier: Apache-2.0
#include "synergy/stats.hpp"

#include "synergy/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace synergy::stats {

namespace {

bool is_constant(Sample xs) {
    return std::all_of(xs.begin(), xs.end(), [&](double v) { return v == xs.front(); });
}

struct OneWay {
    double ss_between = 0.0;
    double ss_within = 0.0;
    double df_between = 0.0;
    double df_within = 0.0;
    std::vector<std::size_t> n;
};

OneWay one_way(std::span<const std::vector<double>> groups) {
    OneWay r;
    std::size_t total_n = 0;
    double grand = 0.0;
    for (const auto& g : groups) {
        total_n += g.size();
        for (double v : g)
            grand += v;
        r.n.push_back(g.size());
    }
    grand /= static_cast<double>(total_n);
    for (const auto& g : groups) {
        const double m = mean(g);
        r.ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double v : g)
            r.ss_within += (v - m) * (v - m);
    }
    r.df_between = static_cast<double>(groups.size() - 1);
    r.df_within = static_cast<double>(total_n - groups.size());
    return r;
}

void require_groups(std::span<const std::vector<double>> groups, const char* test) {
    if (groups.size() < 2)
        throw Error(ErrorKind::TooFewGroups, std::string(test) + " needs at least 2 groups");
    for (const auto& g : groups)
        if (g.empty())
            throw Error(ErrorKind::EmptyGroup, std::string(test) + " received an empty group");
}

} // namespace

TestResult levene_brown_forsythe(std::span<const std::vector<double>> groups) {
    if (groups.size() < 2)
        throw Error(ErrorKind::TooFewGroups, "Brown-Forsythe needs at least 2 groups");
    for (const auto& g : groups)
        if (g.size() < 2)
            throw Error(ErrorKind::GroupTooSmall, "Brown-Forsythe needs n >= 2 in every group");

    std::vector<std::vector<double>> deviations;
    deviations.reserve(groups.size());
    for (const auto& g : groups) {
        const double med = median(g);
        std::vector<double> d;
        d.reserve(g.size());
        for (double v : g)
            d.push_back(std::abs(v - med));
        deviations.push_back(std::move(d));
    }

    const auto ow = one_way(deviations);
    TestResult r;
    r.method = Method::BrownForsythe;
    r.df = {ow.df_between, ow.df_within};
    r.n = ow.n;

    const bool within_zero = std::all_of(deviations.begin(), deviations.end(),
                                         [](const std::vector<double>& d) { return is_constant(d); });
    if (within_zero) {
        bool all_equal = true;
        for (const auto& d : deviations)
            all_equal = all_equal && d.front() == deviations.front().front();
        if (all_equal) {
            r.statistic = 0.0;
            r.p_value = 1.0;
            r.warnings.push_back("all absolute deviations are equal; homogeneity holds trivially");
        } else {
            r.statistic = std::numeric_limits<double>::infinity();
            r.p_value = 0.0;
            r.warnings.push_back("zero within-group spread of deviations; F is unbounded");
        }
        return r;
    }
    r.statistic = (ow.ss_between / ow.df_between) / (ow.ss_within / ow.df_within);
    r.p_value = f_upper(r.statistic, ow.df_between, ow.df_within);
    return r;
}

TestResult anova_fisher(std::span<const std::vector<double>> groups) {
    require_groups(groups, "ANOVA");
    std::size_t total = 0;
    for (const auto& g : groups)
        total += g.size();
    if (total <= groups.size())
        throw Error(ErrorKind::TooFewObservations, "ANOVA needs more observations than groups");
    if (std::all_of(groups.begin(), groups.end(), [](const std::vector<double>& g) { return is_constant(g); }))
        throw Error(ErrorKind::ZeroWithinVariance, "every group is constant");

    const auto ow = one_way(groups);
    TestResult r;
    r.method = Method::FisherAnova;
    r.statistic = (ow.ss_between / ow.df_between) / (ow.ss_within / ow.df_within);
    r.df = {ow.df_between, ow.df_within};
    r.p_value = f_upper(r.statistic, ow.df_between, ow.df_within);
    r.n = ow.n;
    r.extras["ss_between"] = ow.ss_between;
    r.extras["ss_within"] = ow.ss_within;
    return r;
}

TestResult welch_t(Sample a, Sample b) {
    if (a.size() < 2 || b.size() < 2)
        throw Error(ErrorKind::SampleTooSmall, "Welch t needs n >= 2 in both samples");
    if (is_constant(a) && is_constant(b))
        throw Error(ErrorKind::BothZeroVariance, "both samples are constant");

    const double ma = mean(a), mb = mean(b);
    const double sa = sample_sd(a), sb = sample_sd(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double va = sa * sa / na, vb = sb * sb / nb;
    const double se2 = va + vb;

    TestResult r;
    r.method = Method::WelchT;
    r.statistic = (ma - mb) / std::sqrt(se2);
    const double df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    r.df = {df};
    r.p_value = t_two_sided(r.statistic, df);
    r.n = {a.size(), b.size()};
    r.extras["mean_difference"] = ma - mb;
    return r;
}

TestResult kruskal_wallis(std::span<const std::vector<double>> groups) {
    require_groups(groups, "Kruskal-Wallis");
    std::vector<double> pooled;
    std::vector<std::size_t> sizes;
    for (const auto& g : groups) {
        pooled.insert(pooled.end(), g.begin(), g.end());
        sizes.push_back(g.size());
    }
    const double n = static_cast<double>(pooled.size());
    if (pooled.size() < 3)
        throw Error(ErrorKind::TooFewObservations, "Kruskal-Wallis needs at least 3 observations");

    const auto ranks = midranks(pooled);
    double h = 0.0;
    std::size_t offset = 0;
    for (auto sz : sizes) {
        double rsum = 0.0;
        for (std::size_t i = 0; i < sz; ++i)
            rsum += ranks[offset + i];
        h += rsum * rsum / static_cast<double>(sz);
        offset += sz;
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

    const double correction = 1.0 - tie_sum(pooled) / (n * n * n - n);

    TestResult r;
    r.method = Method::KruskalWallis;
    r.df = {static_cast<double>(groups.size() - 1)};
    r.n = sizes;
    r.extras["tie_correction"] = correction;
    if (correction <= 0.0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        r.warnings.push_back("all observations tied; H set to 0");
        return r;
    }
    r.statistic = std::max(0.0, h / correction);
    r.p_value = chi_squared_upper(r.statistic, r.df[0]);
    return r;
}

namespace {

constexpr std::size_t kExactMaxSize = 8;

// Fraction of all splits of `ranks` into n_a / rest whose min(U_a, U_b) is at
// most `u_obs`.
double exact_mw_p(const std::vector<double>& ranks, std::size_t n_a, double u_obs) {
    const std::size_t n = ranks.size();
    const double nn = static_cast<double>(n_a) * static_cast<double>(n - n_a);
    const double offset = static_cast<double>(n_a) * static_cast<double>(n_a + 1) / 2.0;
    const double eps = 1e-9;

    std::size_t hits = 0, total = 0;
    std::vector<std::size_t> pick(n_a);
    // Iterative enumeration of combinations in lexicographic order.
    for (std::size_t i = 0; i < n_a; ++i)
        pick[i] = i;
    while (true) {
        double rsum = 0.0;
        for (auto idx : pick)
            rsum += ranks[idx];
        const double ua = rsum - offset;
        if (std::min(ua, nn - ua) <= u_obs + eps)
            ++hits;
        ++total;

        std::size_t i = n_a;
        while (i > 0 && pick[i - 1] == n - n_a + i - 1)
            --i;
        if (i == 0)
            break;
        ++pick[i - 1];
        for (std::size_t j = i; j < n_a; ++j)
            pick[j] = pick[j - 1] + 1;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

} // namespace

TestResult mann_whitney_u(Sample a, Sample b, MannWhitneyMode mode) {
    if (a.empty() || b.empty())
        throw Error(ErrorKind::EmptyGroup, "Mann-Whitney needs two non-empty samples");

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double ra = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        ra += ranks[i];
    const double ua = ra - na * (na + 1.0) / 2.0;
    const double ub = na * nb - ua;
    const double u = std::min(ua, ub);
    const double ties = tie_sum(pooled);

    const bool small = a.size() <= kExactMaxSize && b.size() <= kExactMaxSize;
    bool exact = false;
    switch (mode) {
    case MannWhitneyMode::Auto: exact = small && ties == 0.0; break;
    case MannWhitneyMode::Exact:
        if (!small)
            throw Error(ErrorKind::InvalidArgument, "exact Mann-Whitney supports samples of size <= 8");
        exact = true;
        break;
    case MannWhitneyMode::NormalApprox: exact = false; break;
    }

    TestResult r;
    r.statistic = u;
    r.n = {a.size(), b.size()};
    r.extras["u_a"] = ua;
    r.extras["u_b"] = ub;
    r.extras["tie_sum"] = ties;

    if (exact) {
        r.method = Method::MannWhitneyExact;
        r.p_value = exact_mw_p(ranks, a.size(), u);
        return r;
    }

    r.method = Method::MannWhitneyNormal;
    const double n = na + nb;
    const double mu = na * nb / 2.0;
    const double var = na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if (var <= 0.0) {
        r.p_value = 1.0;
        r.warnings.push_back("all observations tied; p set to 1");
        return r;
    }
    const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
    r.extras["z"] = z;
    r.p_value = std::min(1.0, 2.0 * normal_upper(z));
    return r;
}

} // namespace synergy::stats
