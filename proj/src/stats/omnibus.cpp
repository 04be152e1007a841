// SPDX-License-Identifier: Apache-2.0
#include "synergy/stats.hpp"

#include "synergy/error.hpp"

#include <map>

namespace synergy::stats {

std::string_view to_string(OmnibusTest t) { return t == OmnibusTest::FisherAnova ? "fisher_anova" : "kruskal_wallis"; }

std::string_view to_string(PostHocFamily f) { return f == PostHocFamily::WelchT ? "welch_t" : "mann_whitney"; }

OmnibusOutcome run_omnibus(const std::vector<FactorObservation>& rows, const std::string& outcome,
                           const std::string& factor, const OmnibusOptions& options) {
    std::map<std::string, std::vector<double>> by_level;
    for (const auto& r : rows)
        by_level[r.level].push_back(r.value);
    if (by_level.size() < 2)
        throw Error(ErrorKind::TooFewGroups, "factor " + factor + " has fewer than 2 levels for " + outcome);

    OmnibusOutcome out;
    out.plan.outcome = outcome;
    out.plan.factor = factor;

    std::vector<std::string> levels;
    std::vector<std::vector<double>> groups;
    for (const auto& [level, values] : by_level) {
        levels.push_back(level);
        groups.push_back(values);
        out.descriptives.push_back({level, values.size(), mean(values), sample_sd(values)});
    }

    // Normality per level.
    bool all_normal = true;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        LevelCheck check{levels[i], std::nullopt, {}};
        try {
            check.normality = shapiro_wilk(groups[i]);
            if (check.normality->p_value <= options.alpha) {
                all_normal = false;
                check.note = "normality rejected";
            }
        } catch (const Error& e) {
            all_normal = false;
            check.note = std::string("normality not testable (") + e.what() + ")";
        }
        out.plan.normality.push_back(std::move(check));
    }

    // Variance homogeneity.
    bool homogeneous = false;
    try {
        out.plan.homogeneity = levene_brown_forsythe(groups);
        homogeneous = out.plan.homogeneity->p_value > options.alpha;
        if (!homogeneous)
            out.plan.homogeneity_note = "homogeneity rejected";
    } catch (const Error& e) {
        out.plan.homogeneity_note = std::string("homogeneity not testable (") + e.what() + ")";
    }

    if (all_normal && homogeneous) {
        out.plan.chosen_test = OmnibusTest::FisherAnova;
        out.plan.post_hoc = PostHocFamily::WelchT;
        out.omnibus = anova_fisher(groups);
    } else {
        out.plan.chosen_test = OmnibusTest::KruskalWallis;
        out.plan.post_hoc = PostHocFamily::MannWhitney;
        out.omnibus = kruskal_wallis(groups);
    }
    out.warnings.insert(out.warnings.end(), out.omnibus.warnings.begin(), out.omnibus.warnings.end());

    if (out.omnibus.p_value >= options.alpha)
        return out;

    for (std::size_t i = 0; i < levels.size(); ++i) {
        for (std::size_t j = i + 1; j < levels.size(); ++j) {
            if (groups[i].size() < 2 || groups[j].size() < 2) {
                out.warnings.push_back("post-hoc " + levels[i] + " vs " + levels[j] +
                                       " skipped: a level has fewer than 2 observations");
                continue;
            }
            PostHoc ph;
            ph.level_a = levels[i];
            ph.level_b = levels[j];
            ph.mean_difference = mean(groups[i]) - mean(groups[j]);
            try {
                ph.result = out.plan.post_hoc == PostHocFamily::WelchT ? welch_t(groups[i], groups[j])
                                                                       : mann_whitney_u(groups[i], groups[j]);
            } catch (const Error& e) {
                out.warnings.push_back("post-hoc " + levels[i] + " vs " + levels[j] + " skipped: " + e.what());
                continue;
            }
            out.post_hocs.push_back(std::move(ph));
        }
    }

    if (options.holm && !out.post_hocs.empty()) {
        std::vector<double> ps;
        for (const auto& ph : out.post_hocs)
            ps.push_back(ph.result.p_value);
        const auto adjusted = holm_adjust(ps);
        for (std::size_t i = 0; i < adjusted.size(); ++i)
            out.post_hocs[i].p_holm = adjusted[i];
    }
    return out;
}

} // namespace synergy::stats
