// SPDX-License-Identifier: Apache-2.0
#include "synergy/stats.hpp"

#include "synergy/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace synergy::stats {

std::string_view to_string(Method method) {
    switch (method) {
    case Method::PermutationPaired: return "permutation_paired";
    case Method::ShapiroWilk: return "shapiro_wilk";
    case Method::BrownForsythe: return "brown_forsythe";
    case Method::FisherAnova: return "fisher_anova";
    case Method::WelchT: return "welch_t";
    case Method::KruskalWallis: return "kruskal_wallis";
    case Method::MannWhitneyExact: return "mann_whitney_exact";
    case Method::MannWhitneyNormal: return "mann_whitney_normal";
    }
    return "?";
}

double mean(Sample xs) {
    if (xs.empty())
        throw Error(ErrorKind::EmptyInput, "mean of an empty sample");
    double s = 0.0;
    for (double x : xs)
        s += x;
    return s / static_cast<double>(xs.size());
}

double sample_sd(Sample xs) {
    if (xs.size() < 2)
        return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double median(Sample xs) {
    if (xs.empty())
        throw Error(ErrorKind::EmptyInput, "median of an empty sample");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> midranks(Sample xs) {
    const auto n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && xs[order[j]] == xs[order[i]])
            ++j;
        const double r = 0.5 * static_cast<double>(i + 1 + j); // average of ranks i+1 .. j
        for (std::size_t k = i; k < j; ++k)
            ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

double tie_sum(Sample xs) {
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i + 1;
        while (j < v.size() && v[j] == v[i])
            ++j;
        const double t = static_cast<double>(j - i);
        sum += t * t * t - t;
        i = j;
    }
    return sum;
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
    const auto m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> out(m);
    double running = 0.0;
    for (std::size_t rank = 0; rank < m; ++rank) {
        const auto idx = order[rank];
        const double adj = std::min(1.0, static_cast<double>(m - rank) * p_values[idx]);
        running = std::max(running, adj);
        out[idx] = running;
    }
    return out;
}

} // namespace synergy::stats
