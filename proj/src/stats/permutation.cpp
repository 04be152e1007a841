// SPDX-License-Identifier: Apache-2.0
#include "synergy/stats.hpp"

#include "synergy/error.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace synergy::stats {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Independent stream per (seed, iteration).
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t iteration) {
    std::uint64_t s = seed;
    std::uint64_t k = splitmix64(s);
    std::uint64_t t = iteration ^ k;
    return splitmix64(t);
}

// Mean of the sign-flipped differences of one iteration.
double flipped_mean(std::uint64_t seed, std::uint64_t iteration, const std::vector<double>& diffs) {
    std::uint64_t state = stream_key(seed, iteration);
    double sum = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        if (i % 64 == 0)
            bits = splitmix64(state);
        const bool flip = (bits >> (i % 64)) & 1ULL;
        sum += flip ? -diffs[i] : diffs[i];
    }
    return sum / static_cast<double>(diffs.size());
}

} // namespace

std::vector<bool> permutation_signs(std::uint64_t seed, std::uint64_t iteration, std::size_t n) {
    std::uint64_t state = stream_key(seed, iteration);
    std::vector<bool> out(n);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0)
            bits = splitmix64(state);
        out[i] = (bits >> (i % 64)) & 1ULL;
    }
    return out;
}

PermutationResult permutation_test_paired(Sample a, Sample b, const PermutationOptions& options) {
    if (a.size() != b.size())
        throw Error(ErrorKind::LengthMismatch,
                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " paired values");
    if (a.size() < 2)
        throw Error(ErrorKind::TooFewPairs, "paired permutation test needs at least 2 pairs");
    if (options.iterations < 1)
        throw Error(ErrorKind::InvalidArgument, "iterations must be >= 1");

    const auto n = a.size();
    std::vector<double> diffs(n);
    double abs_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diffs[i] = a[i] - b[i];
        abs_total += std::abs(diffs[i]);
    }
    double observed = 0.0;
    for (double d : diffs)
        observed += d;
    observed /= static_cast<double>(n);

    // Floating sums of the same magnitudes in a different sign order may differ
    // in the last bits; ties within this tolerance count as extreme.
    const double tolerance = 1e-12 * abs_total / static_cast<double>(n);
    const double threshold = std::abs(observed) - tolerance;

    const auto iterations = options.iterations;
    const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(iterations)));

    PermutationResult out;
    if (options.keep_null)
        out.null_distribution.resize(iterations);

    std::vector<std::size_t> extreme(threads, 0);
    auto work = [&](unsigned t) {
        const std::size_t begin = iterations * t / threads;
        const std::size_t end = iterations * (t + 1) / threads;
        std::size_t count = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const double stat = flipped_mean(options.seed, i, diffs);
            if (std::abs(stat) >= threshold)
                ++count;
            if (options.keep_null)
                out.null_distribution[i] = stat;
        }
        extreme[t] = count;
    };

    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work, t);
        for (auto& th : pool)
            th.join();
    }

    std::size_t total = 0;
    for (auto c : extreme)
        total += c;

    auto& r = out.result;
    r.method = Method::PermutationPaired;
    r.statistic = observed;
    r.p_value = static_cast<double>(total + 1) / static_cast<double>(iterations + 1);
    r.n = {n};
    r.extras["iterations"] = static_cast<double>(iterations);
    r.extras["seed"] = static_cast<double>(options.seed);
    r.extras["extreme_count"] = static_cast<double>(total);
    return out;
}

} // namespace synergy::stats
