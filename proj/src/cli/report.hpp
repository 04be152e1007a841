// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "synergy/coder.hpp"
#include "synergy/corpus.hpp"
#include "synergy/evalkit.hpp"
#include "synergy/sdm.hpp"
#include "synergy/stats.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace synergy::cli::report {

using Json = nlohmann::ordered_json;

std::string fixed(double v, int decimals);

Json to_json(const stats::TestResult& r);
Json to_json(const stats::OmnibusOutcome& o);
Json to_json(const corpus::ValidationReport& v);
Json to_json(const coder::CodingReport& r);
Json to_json(const eval::MetricReport& m);
Json to_json(const eval::ConfusionMatrix& cm);
Json weights_json(const sdm::StandardizedPanel& std_panel, const sdm::SubsystemWeights& w);

// Trailing newline; parent directory must exist.
void write_json(const std::filesystem::path& path, const Json& j);

void write_metric_panel(const std::filesystem::path& path, const corpus::MetricPanel& panel);
void write_order_params(const std::filesystem::path& path, const sdm::OrderSeries& orders);
void write_synergy(const std::filesystem::path& path, const sdm::SynergySeries& series);

struct NullHistogram {
    std::string label;
    std::vector<double> null_distribution;
    double observed = 0.0;
};

// Equal-width bins spanning the null and the observed statistic.
void write_null_histograms(const std::filesystem::path& path, const std::vector<NullHistogram>& hists,
                           std::size_t bins = 40);

} // namespace synergy::cli::report
