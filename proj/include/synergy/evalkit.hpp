// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "synergy/codebook.hpp"
#include "synergy/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace synergy::eval {

// Labels are plain strings so any classifier's alphabet can be scored; code
// vectors convert through the overloads below.
using Label = std::string;

struct ConfusionMatrix {
    std::vector<Label> labels;
    std::vector<std::vector<std::size_t>> counts; // [true][pred]

    std::size_t total() const;
    std::size_t trace() const;
};

// Labels default to the sorted union of both vectors. Throws LengthMismatch, EmptyInput.
ConfusionMatrix confusion(const std::vector<Label>& truth, const std::vector<Label>& pred,
                          std::optional<std::vector<Label>> labels = std::nullopt);
// Codebook order, all ten codes.
ConfusionMatrix confusion(const std::vector<Code>& truth, const std::vector<Code>& pred);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct MetricReport {
    double accuracy = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    std::map<Label, ClassMetrics> per_class;
};

// Zero denominators contribute 0. Throws EmptyMatrix.
MetricReport weighted_metrics(const ConfusionMatrix& cm);

// (p_o - p_e) / (1 - p_e); p_e == 1 gives 1 when p_o == 1, else 0.
double cohen_kappa(const std::vector<Label>& coder_a, const std::vector<Label>& coder_b);
double cohen_kappa(const std::vector<Code>& coder_a, const std::vector<Code>& coder_b);

struct Folds {
    std::vector<std::vector<std::size_t>> folds; // sorted indices per fold
    std::vector<std::string> warnings;

    // fold id per index
    std::vector<std::size_t> assignment(std::size_t n) const;
};

// Classes are shuffled independently (seeded) and dealt round-robin, continuing
// the fold cursor across classes, so both per-class counts and fold sizes
// differ by at most one. Throws BadK.
Folds stratified_kfold(const std::vector<Label>& labels, std::size_t k, std::uint64_t seed);
Folds kfold(std::size_t n, std::size_t k, std::uint64_t seed);

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

struct RunSummary {
    std::size_t runs = 0;
    MeanSd accuracy;
    MeanSd weighted_precision;
    MeanSd weighted_recall;
    MeanSd weighted_f1;
};

// Sample sd (n - 1); a single run reports sd = 0. Throws EmptyInput.
RunSummary summarize_runs(const std::vector<MetricReport>& reports);

// ---------------------------------------------------------------------------
// Prediction files: utterance_id, code_pred[, fold_id][, run_id].

struct PredictionRow {
    std::string utterance_id;
    Code code_pred = Code::I;
    std::optional<std::string> fold_id;
    std::optional<std::string> run_id;
};

std::vector<PredictionRow> read_predictions(std::istream& in);
std::vector<PredictionRow> load_predictions(const std::filesystem::path& path);

void write_folds_csv(std::ostream& out, const std::vector<corpus::Utterance>& utterances, const Folds& folds);

struct ScoredRun {
    std::string run_id;
    MetricReport report;
    ConfusionMatrix confusion;
    double kappa = 0.0;
    std::size_t scored = 0;
};

struct PredictionScore {
    std::vector<ScoredRun> runs; // ordered by run_id
    RunSummary summary;
    std::vector<std::string> warnings;
};

// Joins predictions to human codes by utterance_id, one report per run_id
// (rows without run_id form run ""). Unknown ids and utterances lacking a
// human code raise Error(LengthMismatch) / Error(MissingCode).
PredictionScore score_predictions(const std::vector<corpus::Utterance>& utterances,
                                  const std::vector<PredictionRow>& predictions);

} // namespace synergy::eval
