// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "synergy/codebook.hpp"
#include "synergy/corpus.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

// Synergy degree model: per-metric standardization, CRITIC weights inside each
// subsystem, subsystem order parameters and the weekly synergy degree.
namespace synergy::sdm {

enum class Scope { Global, PerGroup };

std::string_view to_string(Scope scope);

struct Bounds {
    double alpha = 0.0; // max * 1.05
    double beta = 0.0;  // min * 0.95
};

using BoundsRow = std::array<Bounds, kTaskCodeCount>;

// Key of the single bounds row used in global scope.
inline constexpr const char* kGlobalBoundsKey = "*";

struct StandardizedPanel {
    std::vector<corpus::Observation> observations; // values are u(e) in [0, 1]
    Scope scope = Scope::Global;
    std::map<std::string, BoundsRow> bounds; // kGlobalBoundsKey or group_id
    std::vector<std::string> warnings;

    const BoundsRow& bounds_for(const std::string& group_id) const;
};

// u = (e - beta) / (alpha - beta); a degenerate metric (alpha == beta, i.e. all
// zero) maps to 0 and records a warning. Throws Error(EmptyPanel).
StandardizedPanel standardize(const corpus::MetricPanel& panel, Scope scope = Scope::Global);

struct SubsystemWeights {
    std::map<Code, double> weights; // sums to 1 within each subsystem
    // Diagnostics per metric, kept for the weights report.
    std::map<Code, double> sigma;
    std::map<Code, double> information;
    std::vector<std::string> warnings;

    double weight(Code code) const;
};

// CRITIC within each subsystem on the standardized columns: sample sd sigma_j,
// Pearson r_jk between columns of the same subsystem, p_j = sigma_j * sum_k (1 - r_jk),
// w_j = p_j / sum p. A zero-variance column has r = 0 against every other column.
// Throws InsufficientObservations when a multi-metric subsystem has < 2 rows.
SubsystemWeights critic_weights(const StandardizedPanel& std_panel);

// Equal weights inside every subsystem.
SubsystemWeights uniform_weights();

struct OrderRow {
    std::string group_id;
    int week = 0;
    std::array<double, kSubsystemCount> u{}; // indexed by Subsystem

    double order(Subsystem s) const { return u[static_cast<std::size_t>(s)]; }
};

struct OrderSeries {
    std::vector<OrderRow> rows; // sorted by (group_id, week)
};

// u_s(t) = sum_{j in s} w_j u(e_tj). Throws Error(MissingWeight).
OrderSeries order_parameters(const StandardizedPanel& std_panel, const SubsystemWeights& weights);

enum class SignConvention {
    Prose,        // C = lambda * sqrt(|prod|): synchronized growth is positive
    PaperLiteral, // C = -lambda * sqrt(|prod|), the displayed formula taken verbatim
};

std::string_view to_string(SignConvention convention);

enum class GapPolicy {
    Consecutive, // week t needs week t-1 present
    Bridge,      // difference against the last present week
};

struct SynergyRow {
    std::string group_id;
    int week = 0;
    int previous_week = 0;
    double synergy = 0.0;
    double product = 0.0; // prod_s delta u_s
};

struct SynergySeries {
    std::vector<SynergyRow> rows;
    SignConvention sign_convention = SignConvention::Prose;
};

// Synergy degree from one week-over-week change of the four order parameters.
double synergy_degree(const std::array<double, kSubsystemCount>& delta, SignConvention convention);

SynergySeries synergy_degrees(const OrderSeries& orders, SignConvention convention = SignConvention::Prose,
                              GapPolicy gaps = GapPolicy::Consecutive);

struct PipelineOptions {
    corpus::AggregateOptions aggregate;
    Scope scope = Scope::Global;
    SignConvention sign = SignConvention::Prose;
    GapPolicy gaps = GapPolicy::Consecutive;
    // When a multi-metric subsystem has too few rows for CRITIC, fall back to
    // uniform weights (with a warning) instead of failing.
    bool uniform_fallback = false;
};

struct PipelineResult {
    corpus::MetricPanel panel;
    StandardizedPanel standardized;
    SubsystemWeights weights;
    OrderSeries orders;
    SynergySeries synergy;
    std::vector<std::string> warnings;
};

PipelineResult run_pipeline(const std::vector<corpus::Utterance>& utterances,
                            const std::vector<corpus::GroupProfile>& profiles, const PipelineOptions& options);

} // namespace synergy::sdm
