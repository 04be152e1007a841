// SPDX-License-Identifier: Apache-2.0
#include "synergy/evalkit.hpp"

#include "synergy/csv.hpp"
#include "synergy/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <unordered_map>

namespace synergy::eval {

namespace {

std::vector<Label> to_labels(const std::vector<Code>& codes) {
    std::vector<Label> out;
    out.reserve(codes.size());
    for (Code c : codes)
        out.emplace_back(to_string(c));
    return out;
}

void check_pair(std::size_t a, std::size_t b) {
    if (a != b)
        throw Error(ErrorKind::LengthMismatch, std::to_string(a) + " vs " + std::to_string(b) + " labels");
    if (a == 0)
        throw Error(ErrorKind::EmptyInput, "no labels to compare");
}

// Unbiased bounded draw in [0, bound).
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

// Fisher-Yates with our own draws so fold assignment does not depend on the
// standard library's shuffle.
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[draw_below(rng, i)]);
}

MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd r;
    for (double x : xs)
        r.mean += x;
    r.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs)
            ss += (x - r.mean) * (x - r.mean);
        r.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return r;
}

} // namespace

std::size_t ConfusionMatrix::total() const {
    std::size_t t = 0;
    for (const auto& row : counts)
        for (auto c : row)
            t += c;
    return t;
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        t += counts[i][i];
    return t;
}

ConfusionMatrix confusion(const std::vector<Label>& truth, const std::vector<Label>& pred,
                          std::optional<std::vector<Label>> labels) {
    check_pair(truth.size(), pred.size());
    ConfusionMatrix cm;
    if (labels) {
        cm.labels = std::move(*labels);
    } else {
        std::set<Label> all(truth.begin(), truth.end());
        all.insert(pred.begin(), pred.end());
        cm.labels.assign(all.begin(), all.end());
    }
    std::unordered_map<Label, std::size_t> index;
    for (std::size_t i = 0; i < cm.labels.size(); ++i)
        index.emplace(cm.labels[i], i);
    cm.counts.assign(cm.labels.size(), std::vector<std::size_t>(cm.labels.size(), 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        auto t = index.find(truth[i]);
        auto p = index.find(pred[i]);
        if (t == index.end() || p == index.end())
            throw Error(ErrorKind::InvalidArgument, "label outside the declared label set");
        ++cm.counts[t->second][p->second];
    }
    return cm;
}

ConfusionMatrix confusion(const std::vector<Code>& truth, const std::vector<Code>& pred) {
    std::vector<Label> labels;
    for (Code c : kAllCodes)
        labels.emplace_back(to_string(c));
    return confusion(to_labels(truth), to_labels(pred), labels);
}

MetricReport weighted_metrics(const ConfusionMatrix& cm) {
    const auto total = cm.total();
    if (total == 0)
        throw Error(ErrorKind::EmptyMatrix, "confusion matrix has no counts");

    const auto k = cm.labels.size();
    MetricReport r;
    double wp = 0.0, wr = 0.0, wf = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t tp = cm.counts[c][c], support = 0, predicted = 0;
        for (std::size_t j = 0; j < k; ++j) {
            support += cm.counts[c][j];
            predicted += cm.counts[j][c];
        }
        const std::size_t fp = predicted - tp;
        const std::size_t fn = support - tp;
        ClassMetrics m;
        m.support = support;
        m.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
        m.recall = support ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
        // 2PR/(P+R) in integer form: 2TP / (2TP + FP + FN).
        const std::size_t f1_den = 2 * tp + fp + fn;
        m.f1 = f1_den ? static_cast<double>(2 * tp) / static_cast<double>(f1_den) : 0.0;
        const double s = static_cast<double>(support);
        wp += s * m.precision;
        wr += s * m.recall;
        wf += s * m.f1;
        r.per_class[cm.labels[c]] = m;
    }
    const double n = static_cast<double>(total);
    r.accuracy = static_cast<double>(cm.trace()) / n;
    r.weighted_precision = wp / n;
    r.weighted_recall = wr / n;
    r.weighted_f1 = wf / n;
    return r;
}

double cohen_kappa(const std::vector<Label>& coder_a, const std::vector<Label>& coder_b) {
    check_pair(coder_a.size(), coder_b.size());
    const auto cm = confusion(coder_a, coder_b);
    const double n = static_cast<double>(cm.total());
    const auto k = cm.labels.size();
    double po = static_cast<double>(cm.trace()) / n;
    double pe = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            row += static_cast<double>(cm.counts[c][j]);
            col += static_cast<double>(cm.counts[j][c]);
        }
        pe += (row / n) * (col / n);
    }
    if (pe >= 1.0)
        return po >= 1.0 ? 1.0 : 0.0;
    return (po - pe) / (1.0 - pe);
}

double cohen_kappa(const std::vector<Code>& coder_a, const std::vector<Code>& coder_b) {
    return cohen_kappa(to_labels(coder_a), to_labels(coder_b));
}

std::vector<std::size_t> Folds::assignment(std::size_t n) const {
    std::vector<std::size_t> out(n, 0);
    for (std::size_t f = 0; f < folds.size(); ++f)
        for (auto i : folds[f])
            out.at(i) = f;
    return out;
}

Folds stratified_kfold(const std::vector<Label>& labels, std::size_t k, std::uint64_t seed) {
    if (k < 2)
        throw Error(ErrorKind::BadK, "k must be >= 2, got " + std::to_string(k));
    if (labels.size() < k)
        throw Error(ErrorKind::BadK, "k = " + std::to_string(k) + " exceeds n = " + std::to_string(labels.size()));

    std::map<Label, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_class[labels[i]].push_back(i);

    Folds out;
    out.folds.resize(k);
    std::mt19937_64 rng(seed);
    std::size_t cursor = 0;
    for (auto& [label, members] : by_class) {
        if (members.size() < k)
            out.warnings.push_back("class '" + label + "' has " + std::to_string(members.size()) +
                                   " members for " + std::to_string(k) + " folds; distributed round-robin");
        shuffle(members, rng);
        for (auto idx : members) {
            out.folds[cursor % k].push_back(idx);
            ++cursor;
        }
    }
    for (auto& f : out.folds)
        std::sort(f.begin(), f.end());
    return out;
}

Folds kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2)
        throw Error(ErrorKind::BadK, "k must be >= 2, got " + std::to_string(k));
    if (n < k)
        throw Error(ErrorKind::BadK, "k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = i;
    std::mt19937_64 rng(seed);
    shuffle(idx, rng);
    Folds out;
    out.folds.resize(k);
    for (std::size_t i = 0; i < n; ++i)
        out.folds[i % k].push_back(idx[i]);
    for (auto& f : out.folds)
        std::sort(f.begin(), f.end());
    return out;
}

RunSummary summarize_runs(const std::vector<MetricReport>& reports) {
    if (reports.empty())
        throw Error(ErrorKind::EmptyInput, "no metric reports to summarize");
    std::vector<double> acc, wp, wr, wf;
    for (const auto& r : reports) {
        acc.push_back(r.accuracy);
        wp.push_back(r.weighted_precision);
        wr.push_back(r.weighted_recall);
        wf.push_back(r.weighted_f1);
    }
    RunSummary s;
    s.runs = reports.size();
    s.accuracy = mean_sd(acc);
    s.weighted_precision = mean_sd(wp);
    s.weighted_recall = mean_sd(wr);
    s.weighted_f1 = mean_sd(wf);
    return s;
}

std::vector<PredictionRow> read_predictions(std::istream& in) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header)
        throw MalformedRow(1, "missing header row");
    const auto& h = header->fields;
    if (h.size() < 2 || h[0] != "utterance_id" || h[1] != "code_pred")
        throw MalformedRow(header->line, "expected header utterance_id,code_pred[,fold_id][,run_id]");
    std::optional<std::size_t> fold_col, run_col;
    for (std::size_t i = 2; i < h.size(); ++i) {
        if (h[i] == "fold_id" && !fold_col)
            fold_col = i;
        else if (h[i] == "run_id" && !run_col)
            run_col = i;
        else
            throw MalformedRow(header->line, "unexpected column '" + h[i] + "'");
    }

    std::vector<PredictionRow> out;
    while (auto rec = reader.next()) {
        if (rec->fields.size() != h.size())
            throw MalformedRow(rec->line, "expected " + std::to_string(h.size()) + " columns");
        PredictionRow row;
        row.utterance_id = csv::trim(rec->fields[0]);
        row.code_pred = parse_code_token(csv::trim(rec->fields[1]));
        auto optional_field = [&](std::optional<std::size_t> col) -> std::optional<std::string> {
            if (!col)
                return std::nullopt;
            auto v = csv::trim(rec->fields[*col]);
            if (v.empty())
                return std::nullopt;
            return v;
        };
        row.fold_id = optional_field(fold_col);
        row.run_id = optional_field(run_col);
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<PredictionRow> load_predictions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open predictions file " + path.string());
    return read_predictions(in);
}

void write_folds_csv(std::ostream& out, const std::vector<corpus::Utterance>& utterances, const Folds& folds) {
    const auto assignment = folds.assignment(utterances.size());
    csv::write_row(out, {"utterance_id", "fold_id"});
    for (std::size_t i = 0; i < utterances.size(); ++i)
        csv::write_row(out, {utterances[i].utterance_id, std::to_string(assignment[i])});
}

PredictionScore score_predictions(const std::vector<corpus::Utterance>& utterances,
                                  const std::vector<PredictionRow>& predictions) {
    std::unordered_map<std::string, const corpus::Utterance*> by_id;
    for (const auto& u : utterances)
        by_id.emplace(u.utterance_id, &u);

    std::map<std::string, std::pair<std::vector<Code>, std::vector<Code>>> runs;
    std::map<std::string, std::set<std::string>> seen;
    PredictionScore out;
    for (const auto& p : predictions) {
        auto it = by_id.find(p.utterance_id);
        if (it == by_id.end())
            throw Error(ErrorKind::LengthMismatch, "prediction for unknown utterance " + p.utterance_id);
        if (!it->second->code_human)
            throw Error(ErrorKind::MissingCode, p.utterance_id);
        const auto run = p.run_id.value_or("");
        if (!seen[run].insert(p.utterance_id).second)
            throw Error(ErrorKind::DuplicateId, "utterance " + p.utterance_id + " predicted twice in run '" + run + "'");
        runs[run].first.push_back(*it->second->code_human);
        runs[run].second.push_back(p.code_pred);
    }
    if (runs.empty())
        throw Error(ErrorKind::EmptyInput, "predictions file has no rows");

    std::vector<MetricReport> reports;
    for (const auto& [run, vectors] : runs) {
        ScoredRun s;
        s.run_id = run;
        s.confusion = confusion(vectors.first, vectors.second);
        s.report = weighted_metrics(s.confusion);
        s.kappa = cohen_kappa(vectors.first, vectors.second);
        s.scored = vectors.first.size();
        if (s.scored < utterances.size())
            out.warnings.push_back("run '" + run + "' covers " + std::to_string(s.scored) + " of " +
                                   std::to_string(utterances.size()) + " utterances");
        reports.push_back(s.report);
        out.runs.push_back(std::move(s));
    }
    out.summary = summarize_runs(reports);
    return out;
}

} // namespace synergy::eval
