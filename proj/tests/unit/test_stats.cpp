// SPDX-License-Identifier: Apache-2.0
#include "synergy/error.hpp"
#include "synergy/stats.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace synergy;
using namespace synergy::stats;

namespace {

using Groups = std::vector<std::vector<double>>;

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected synergy::Error");
    return ErrorKind::InvalidArgument;
}

Groups to_groups(const nlohmann::json& j) {
    Groups g;
    for (const auto& x : j)
        g.push_back(x.get<std::vector<double>>());
    return g;
}

} // namespace

TEST_CASE("helpers") {
    std::vector<double> x{3, 1, 2, 2};
    CHECK(mean(x) == 2.0);
    CHECK(median(x) == 2.0);
    CHECK(sample_sd(std::vector<double>{1, 2, 3}) == doctest::Approx(1.0));
    CHECK(sample_sd(std::vector<double>{5}) == 0.0);
    CHECK(midranks(x) == std::vector<double>{4, 1, 2.5, 2.5});
    CHECK(tie_sum(x) == 6.0);
    auto adj = holm_adjust(std::vector<double>{0.01, 0.04, 0.03});
    CHECK(adj[0] == doctest::Approx(0.03));
    CHECK(adj[1] == doctest::Approx(0.06));
    CHECK(adj[2] == doctest::Approx(0.06));
}

TEST_CASE("permutation_test_paired") {
    SUBCASE("identical inputs give p = 1 exactly") {
        std::vector<double> a{0.3, 0.1, 0.7, 0.2};
        auto r = permutation_test_paired(a, a, {1000, 3});
        CHECK(r.result.statistic == 0.0);
        CHECK(r.result.p_value == 1.0);
    }
    SUBCASE("five unit differences") {
        std::vector<double> a{1, 1, 1, 1, 1}, b{0, 0, 0, 0, 0};
        auto r = permutation_test_paired(a, b, {10000, 12345});
        CHECK(r.result.statistic == 1.0);
        CHECK(std::abs(r.result.p_value - 0.0625) <= 0.02);
    }
    SUBCASE("determinism across seeds and threads") {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> d;
        std::vector<double> a(40), b(40);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = d(rng);
            b[i] = d(rng) + 0.2;
        }
        PermutationOptions one{5000, 77, 1, true};
        PermutationOptions eight{5000, 77, 8, true};
        auto r1 = permutation_test_paired(a, b, one);
        auto r8 = permutation_test_paired(a, b, eight);
        CHECK(r1.result.p_value == r8.result.p_value);
        CHECK(r1.null_distribution == r8.null_distribution);
        auto again = permutation_test_paired(a, b, one);
        CHECK(again.result.p_value == r1.result.p_value);

        // Two-sided symmetry: swapping a and b flips every sign.
        auto flipped = permutation_test_paired(b, a, one);
        CHECK(flipped.result.p_value == r1.result.p_value);
        CHECK(flipped.result.statistic == doctest::Approx(-r1.result.statistic));
    }
    SUBCASE("sign streams depend on (seed, iteration) only") {
        CHECK(permutation_signs(9, 100, 16) == permutation_signs(9, 100, 16));
        CHECK(permutation_signs(9, 100, 16) != permutation_signs(9, 101, 16));
    }
    SUBCASE("errors") {
        std::vector<double> a{1, 2, 3}, b{1, 2};
        CHECK(kind_of([&] { permutation_test_paired(a, b); }) == ErrorKind::LengthMismatch);
        std::vector<double> one{1};
        CHECK(kind_of([&] { permutation_test_paired(one, one); }) == ErrorKind::TooFewPairs);
    }
}

TEST_CASE("shapiro_wilk") {
    auto r = shapiro_wilk(std::vector<double>{1, 2, 3});
    CHECK(r.statistic == 1.0);
    CHECK(r.p_value == doctest::Approx(1.0));
    CHECK(kind_of([] { shapiro_wilk(std::vector<double>{5, 5, 5}); }) == ErrorKind::ZeroVariance);
    CHECK(kind_of([] { shapiro_wilk(std::vector<double>{1, 2}); }) == ErrorKind::SampleTooSmall);
    CHECK(kind_of([] { shapiro_wilk(std::vector<double>(5001, 1.0)); }) == ErrorKind::SampleTooLarge);

    const auto fx = testing::load_json(testing::fixture_dir() / "shapiro_fixtures.json");
    for (const auto& s : fx["samples"]) {
        CAPTURE(s["name"].get<std::string>());
        auto res = shapiro_wilk(s["sample"].get<std::vector<double>>());
        CHECK(std::abs(res.statistic - s["W"].get<double>()) < 1e-4);
        CHECK(std::abs(res.p_value - s["p"].get<double>()) < 1e-3);
    }
}

TEST_CASE("levene_brown_forsythe") {
    auto same = levene_brown_forsythe(Groups{{1, 3}, {2, 4}});
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);
    CHECK_FALSE(same.warnings.empty());

    auto spread = levene_brown_forsythe(Groups{{1, 3}, {2, 8}});
    CHECK(spread.p_value >= 0.0);
    CHECK(spread.p_value < 1e-6);

    CHECK(kind_of([] { levene_brown_forsythe(Groups{{1, 2, 3}}); }) == ErrorKind::TooFewGroups);
    CHECK(kind_of([] { levene_brown_forsythe(Groups{{1, 2, 3}, {4}}); }) == ErrorKind::GroupTooSmall);
}

TEST_CASE("anova_fisher") {
    auto r = anova_fisher(Groups{{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
    CHECK(r.statistic == doctest::Approx(3.0));
    REQUIRE(r.df.size() == 2);
    CHECK(r.df[0] == 2.0);
    CHECK(r.df[1] == 6.0);
    CHECK(anova_fisher(Groups{{1, 2}, {1, 2}}).statistic == 0.0);
    CHECK(kind_of([] { anova_fisher(Groups{{1, 1}, {1, 1}}); }) == ErrorKind::ZeroWithinVariance);
    CHECK(kind_of([] { anova_fisher(Groups{{1, 2}}); }) == ErrorKind::TooFewGroups);
}

TEST_CASE("welch_t") {
    auto r = welch_t(std::vector<double>{1, 2, 3}, std::vector<double>{2, 3, 4});
    CHECK(r.statistic == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(r.df.at(0) == doctest::Approx(4.0));
    auto same = welch_t(std::vector<double>{1, 2, 4}, std::vector<double>{1, 2, 4});
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);
    CHECK(kind_of([] { welch_t(std::vector<double>{0, 0}, std::vector<double>{0, 0}); }) ==
          ErrorKind::BothZeroVariance);
    CHECK(kind_of([] { welch_t(std::vector<double>{1}, std::vector<double>{0, 2}); }) == ErrorKind::SampleTooSmall);
}

TEST_CASE("kruskal_wallis") {
    auto r = kruskal_wallis(Groups{{1, 2}, {3, 4}, {5, 6}});
    CHECK(r.statistic == doctest::Approx(4.5714).epsilon(1e-4));
    CHECK(r.df.at(0) == 2.0);
    CHECK(kruskal_wallis(Groups{{2, 2}, {2, 2, 2}}).statistic == 0.0);
    CHECK(kruskal_wallis(Groups{{2, 2}, {2, 2, 2}}).p_value == 1.0);
    CHECK(kind_of([] { kruskal_wallis(Groups{{1, 2, 3}}); }) == ErrorKind::TooFewGroups);

    // Invariant under strictly monotone transforms.
    Groups g{{0.3, 1.2, 2.2, 0.1}, {3.5, 0.9, 4.4}, {2.0, 5.5, 6.1, 7.7, 0.2}};
    Groups t = g;
    for (auto& grp : t)
        for (auto& v : grp)
            v = std::exp(v) * 3 + 1;
    CHECK(kruskal_wallis(t).statistic == doctest::Approx(kruskal_wallis(g).statistic).epsilon(1e-12));
}

TEST_CASE("mann_whitney_u") {
    auto r = mann_whitney_u(std::vector<double>{1, 2}, std::vector<double>{3, 4});
    CHECK(r.statistic == 0.0);
    CHECK(r.method == Method::MannWhitneyExact);
    CHECK(r.p_value == doctest::Approx(1.0 / 3.0));

    std::vector<double> a{1.5, 2.5, 3.5, 9}, b{1.5, 2.5, 3.5, 9};
    auto same = mann_whitney_u(a, b, MannWhitneyMode::NormalApprox);
    CHECK(same.statistic == 8.0);
    CHECK(same.p_value >= 0.99);

    CHECK(kind_of([] { mann_whitney_u(std::vector<double>{}, std::vector<double>{1}); }) == ErrorKind::EmptyGroup);

    // Ties push auto mode to the approximation.
    auto tied = mann_whitney_u(std::vector<double>{1, 2, 2}, std::vector<double>{2, 3});
    CHECK(tied.method == Method::MannWhitneyNormal);
    CHECK(tied.extras.at("u_a") + tied.extras.at("u_b") == 6.0);
    CHECK(tied.statistic == 1.0);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(7), y(7);
        for (auto& v : x)
            v = d(rng);
        for (auto& v : y)
            v = d(rng) + 0.5;
        auto ex = mann_whitney_u(x, y, MannWhitneyMode::Exact);
        auto ap = mann_whitney_u(x, y, MannWhitneyMode::NormalApprox);
        CHECK(ex.statistic == ap.statistic);
        CHECK(ex.extras.at("u_a") + ex.extras.at("u_b") == 49.0);
        CHECK(std::abs(ex.p_value - ap.p_value) < 0.05);
    }
}

TEST_CASE("scipy reference values") {
    const auto ref = testing::load_json(testing::fixture_dir() / "scipy_reference.json");
    for (const auto& c : ref["groups"]) {
        CAPTURE(c["name"].get<std::string>());
        const auto g = to_groups(c["groups"]);
        auto an = anova_fisher(g);
        CHECK(an.statistic == doctest::Approx(c["anova"]["F"].get<double>()).epsilon(1e-9));
        CHECK(an.p_value == doctest::Approx(c["anova"]["p"].get<double>()).epsilon(1e-7));
        auto kw = kruskal_wallis(g);
        CHECK(kw.statistic == doctest::Approx(c["kruskal"]["H"].get<double>()).epsilon(1e-9));
        CHECK(kw.p_value == doctest::Approx(c["kruskal"]["p"].get<double>()).epsilon(1e-7));
        auto bf = levene_brown_forsythe(g);
        CHECK(bf.statistic == doctest::Approx(c["brown_forsythe"]["F"].get<double>()).epsilon(1e-9));
        CHECK(bf.p_value == doctest::Approx(c["brown_forsythe"]["p"].get<double>()).epsilon(1e-7));
    }
    for (const auto& c : ref["pairs"]) {
        CAPTURE(c["name"].get<std::string>());
        const auto a = c["a"].get<std::vector<double>>();
        const auto b = c["b"].get<std::vector<double>>();
        auto w = welch_t(a, b);
        CHECK(w.statistic == doctest::Approx(c["welch"]["t"].get<double>()).epsilon(1e-9));
        CHECK(w.df.at(0) == doctest::Approx(c["welch"]["df"].get<double>()).epsilon(1e-9));
        CHECK(w.p_value == doctest::Approx(c["welch"]["p"].get<double>()).epsilon(1e-7));
        auto mn = mann_whitney_u(a, b, MannWhitneyMode::NormalApprox);
        CHECK(mn.statistic == c["mann_whitney_normal"]["U"].get<double>());
        CHECK(mn.p_value == doctest::Approx(c["mann_whitney_normal"]["p"].get<double>()).epsilon(1e-7));
        if (c.contains("mann_whitney_exact")) {
            auto me = mann_whitney_u(a, b, MannWhitneyMode::Exact);
            CHECK(me.statistic == c["mann_whitney_exact"]["U"].get<double>());
            CHECK(me.p_value == doctest::Approx(c["mann_whitney_exact"]["p"].get<double>()).epsilon(1e-9));
        }
    }
}

TEST_CASE("run_omnibus") {
    std::mt19937_64 rng(2024);
    auto rows_from = [](const Groups& g) {
        std::vector<FactorObservation> rows;
        const char* names[] = {"a", "b", "c", "d"};
        for (std::size_t i = 0; i < g.size(); ++i)
            for (double v : g[i])
                rows.push_back({names[i], v});
        return rows;
    };

    SUBCASE("heavy skew selects Kruskal-Wallis") {
        std::lognormal_distribution<double> d(0.0, 1.5);
        Groups g(3, std::vector<double>(20));
        for (auto& grp : g)
            for (auto& v : grp)
                v = d(rng);
        auto o = run_omnibus(rows_from(g), "y", "f");
        CHECK(o.plan.chosen_test == OmnibusTest::KruskalWallis);
        CHECK(o.plan.post_hoc == PostHocFamily::MannWhitney);
        CHECK(o.omnibus.method == Method::KruskalWallis);
    }
    SUBCASE("normal homoscedastic data selects Fisher ANOVA") {
        std::normal_distribution<double> d(10.0, 1.0);
        Groups g(3, std::vector<double>(20));
        for (auto& grp : g)
            for (auto& v : grp)
                v = d(rng);
        auto o = run_omnibus(rows_from(g), "y", "f");
        CHECK(o.plan.chosen_test == OmnibusTest::FisherAnova);
        CHECK(o.plan.post_hoc == PostHocFamily::WelchT);
        CHECK(o.descriptives.size() == 3);
    }
    SUBCASE("non-significant omnibus has no post-hocs") {
        Groups g{{1, 2, 3, 4, 5}, {1.5, 2.5, 3.5, 4.5, 2}, {2, 3, 1, 4, 5}};
        auto o = run_omnibus(rows_from(g), "y", "f");
        CHECK(o.omnibus.p_value > 0.05);
        CHECK(o.post_hocs.empty());
    }
    SUBCASE("significant omnibus runs every pair, Holm optional") {
        std::normal_distribution<double> d(0.0, 1.0);
        Groups g(3, std::vector<double>(15));
        for (std::size_t i = 0; i < g.size(); ++i)
            for (auto& v : g[i])
                v = d(rng) + 3.0 * static_cast<double>(i);
        OmnibusOptions opt;
        opt.holm = true;
        auto o = run_omnibus(rows_from(g), "y", "f", opt);
        CHECK(o.omnibus.p_value < 0.05);
        REQUIRE(o.post_hocs.size() == 3);
        for (const auto& ph : o.post_hocs) {
            REQUIRE(ph.p_holm.has_value());
            CHECK(*ph.p_holm >= ph.result.p_value);
        }
        CHECK(o.post_hocs[0].mean_difference < 0.0);
    }
    SUBCASE("single-observation level: descriptives kept, post-hoc skipped") {
        Groups g{{1, 1.1, 1.2, 0.9, 1.05, 0.95}, {5, 5.1, 5.2, 4.9, 5.05, 4.95}, {9}};
        auto o = run_omnibus(rows_from(g), "y", "f");
        CHECK(o.descriptives.size() == 3);
        CHECK(o.descriptives[2].n == 1);
        if (o.omnibus.p_value < 0.05) {
            CHECK(o.post_hocs.size() == 1);
            CHECK_FALSE(o.warnings.empty());
        }
    }
    SUBCASE("one level is an error") {
        std::vector<FactorObservation> rows{{"a", 1}, {"a", 2}};
        CHECK(kind_of([&] { run_omnibus(rows, "y", "f"); }) == ErrorKind::TooFewGroups);
    }
}
