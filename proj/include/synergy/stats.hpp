// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synergy::stats {

enum class Method {
    PermutationPaired,
    ShapiroWilk,
    BrownForsythe,
    FisherAnova,
    WelchT,
    KruskalWallis,
    MannWhitneyExact,
    MannWhitneyNormal,
};

std::string_view to_string(Method method);

struct TestResult {
    Method method = Method::PermutationPaired;
    double statistic = 0.0;
    std::vector<double> df; // empty, one value, or (numerator, denominator)
    double p_value = 1.0;
    std::vector<std::size_t> n;
    std::map<std::string, double> extras;
    std::vector<std::string> warnings;
};

using Sample = std::span<const double>;

// ---------------------------------------------------------------------------
// Distribution tails. Thin wrappers over Boost.Math; all return values in [0, 1].

double normal_cdf(double z);
double normal_quantile(double p);
double normal_upper(double z);
double chi_squared_upper(double x, double df);
double f_upper(double x, double df1, double df2);
double t_two_sided(double t, double df);

// ---------------------------------------------------------------------------
// Small helpers shared by the tests and the CLI.

double mean(Sample xs);
// Sample (n - 1) standard deviation; 0 for a single value.
double sample_sd(Sample xs);
double median(Sample xs);
// Midranks (1-based) of the pooled values, ties averaged.
std::vector<double> midranks(Sample xs);
// Sum over tie blocks of t^3 - t.
double tie_sum(Sample xs);

// ---------------------------------------------------------------------------
// Paired sign-flip permutation test on mean(a - b).

struct PermutationOptions {
    std::size_t iterations = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool keep_null = false;
};

struct PermutationResult {
    TestResult result;
    std::vector<double> null_distribution; // filled when keep_null
};

// Two-sided p = (#{|T*| >= |T|} + 1) / (iterations + 1). Iteration i draws its
// signs from a generator keyed by (seed, i) only, so results do not depend on
// the thread count. Throws LengthMismatch, TooFewPairs.
PermutationResult permutation_test_paired(Sample a, Sample b, const PermutationOptions& options = {});

// Sign vector of iteration `iteration`; exposed so tests can audit the sampler.
std::vector<bool> permutation_signs(std::uint64_t seed, std::uint64_t iteration, std::size_t n);

// ---------------------------------------------------------------------------

// Royston's approximation (AS R94). 3 <= n <= 5000.
TestResult shapiro_wilk(Sample sample);

// Median-centred Levene test.
TestResult levene_brown_forsythe(std::span<const std::vector<double>> groups);

TestResult anova_fisher(std::span<const std::vector<double>> groups);

TestResult welch_t(Sample a, Sample b);

TestResult kruskal_wallis(std::span<const std::vector<double>> groups);

enum class MannWhitneyMode { Auto, Exact, NormalApprox };

// U = min(U_a, U_b). Exact mode enumerates every split of the pooled ranks
// (both samples of size <= 8); auto uses it only when there are no ties.
// extras["u_a"], extras["u_b"] keep the one-sided statistics.
TestResult mann_whitney_u(Sample a, Sample b, MannWhitneyMode mode = MannWhitneyMode::Auto);

// ---------------------------------------------------------------------------
// Omnibus selection with post-hocs.

enum class OmnibusTest { FisherAnova, KruskalWallis };
enum class PostHocFamily { WelchT, MannWhitney };

std::string_view to_string(OmnibusTest t);
std::string_view to_string(PostHocFamily f);

struct LevelCheck {
    std::string level;
    std::optional<TestResult> normality; // absent when the level could not be tested
    std::string note;
};

struct OmnibusPlan {
    std::string outcome;
    std::string factor;
    OmnibusTest chosen_test = OmnibusTest::KruskalWallis;
    std::vector<LevelCheck> normality;
    std::optional<TestResult> homogeneity;
    std::string homogeneity_note;
    PostHocFamily post_hoc = PostHocFamily::MannWhitney;
};

struct Descriptive {
    std::string level;
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
};

struct PostHoc {
    std::string level_a;
    std::string level_b;
    double mean_difference = 0.0; // mean(a) - mean(b)
    TestResult result;
    std::optional<double> p_holm;
};

struct OmnibusOutcome {
    OmnibusPlan plan;
    std::vector<Descriptive> descriptives;
    TestResult omnibus;
    std::vector<PostHoc> post_hocs;
    std::vector<std::string> warnings;
};

struct FactorObservation {
    std::string level;
    double value = 0.0;
};

struct OmnibusOptions {
    double alpha = 0.05;
    bool holm = false;
};

// Shapiro-Wilk per level plus Brown-Forsythe decide between Fisher ANOVA and
// Kruskal-Wallis; when the omnibus p < alpha every pair of levels gets the
// matching post-hoc. Levels come out in lexicographic order.
OmnibusOutcome run_omnibus(const std::vector<FactorObservation>& rows, const std::string& outcome,
                           const std::string& factor, const OmnibusOptions& options = {});

// Holm step-down adjustment, returned in input order.
std::vector<double> holm_adjust(std::span<const double> p_values);

} // namespace synergy::stats
