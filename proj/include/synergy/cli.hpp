// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "synergy/coder.hpp"
#include "synergy/config.hpp"
#include "synergy/corpus.hpp"
#include "synergy/sdm.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace synergy::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitWarnings = 2;

struct CoderSettings {
    coder::CoderConfig config;
    coder::ShotMode shot_mode = coder::ShotMode::ZeroShot;
    std::string transport = "http"; // http | mock
    // Mock transport: CSV utterance_id,response; ids not listed get mock_default.
    std::optional<std::filesystem::path> mock_responses;
    std::string mock_default = "W1";
};

struct RunConfig {
    std::optional<std::filesystem::path> utterances;
    std::optional<std::filesystem::path> groups;
    std::optional<std::filesystem::path> codebook;
    std::optional<std::filesystem::path> predictions;
    std::filesystem::path out_dir = "out";

    corpus::CodeSource code_source = corpus::CodeSource::Human;
    corpus::Normalization normalization = corpus::Normalization::PerMember;
    sdm::Scope scope = sdm::Scope::Global;
    sdm::SignConvention sign = sdm::SignConvention::Prose;
    sdm::GapPolicy gaps = sdm::GapPolicy::Consecutive;
    bool zero_fill = false;

    std::optional<std::uint64_t> seed;
    std::size_t iterations = 10000;
    unsigned threads = 1;
    double alpha = 0.05;
    bool holm = false;

    std::vector<std::string> factors{"problem_type", "quality"};
    std::vector<std::string> outcomes{"u_O", "u_W", "u_S", "u_C", "synergy"};

    std::size_t folds = 5;
    bool stratified = true;

    CoderSettings coder;
};

// Keys may sit at top level or under [input], [analysis], [stats], [coder].
// Relative paths resolve against base_dir. Throws Error(Config).
void apply_config(RunConfig& rc, const config::Document& doc, const std::filesystem::path& base_dir);

// Option-token parsers shared by flags and config. Throw Error(UnknownEnum).
corpus::CodeSource parse_code_source(const std::string& token);
corpus::Normalization parse_normalization(const std::string& token);
sdm::Scope parse_scope(const std::string& token);
sdm::SignConvention parse_sign(const std::string& token);
sdm::GapPolicy parse_gap(const std::string& token);
coder::ShotMode parse_shot(const std::string& token);

// Each command writes into rc.out_dir (created when absent) and returns an exit
// code: 0 clean, 2 completed with warnings, 1 failure. Diagnostics go to err.
int cmd_ingest(const RunConfig& rc, std::ostream& err);
// A transport override replaces whatever the coder settings select.
int cmd_code(const RunConfig& rc, std::ostream& err, coder::Transport* transport = nullptr);
int cmd_analyze(const RunConfig& rc, std::ostream& err);
int cmd_validate(const RunConfig& rc, std::ostream& err);
int cmd_compare(const RunConfig& rc, std::ostream& err);
int cmd_evaluate(const RunConfig& rc, std::ostream& err);
int cmd_folds(const RunConfig& rc, std::ostream& err);
int cmd_demo(const RunConfig& rc, std::ostream& err);

// Full command line, argv[0] included.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Directory holding the bundled demo corpus.
std::filesystem::path demo_data_dir();

} // namespace synergy::cli
