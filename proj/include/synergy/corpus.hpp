// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "synergy/codebook.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace synergy::corpus {

inline constexpr int kFirstWeek = 0;
inline constexpr int kLastWeek = 4;
inline constexpr int kWeekCount = kLastWeek - kFirstWeek + 1;

struct Utterance {
    std::string utterance_id;
    std::string group_id;
    int week = 0;
    std::int64_t seq = 0;
    std::string speaker_id;
    std::string text;
    std::optional<Code> code_human;
    std::optional<Code> code_pred;

    bool operator==(const Utterance&) const = default;
};

enum class InputFormat { Csv, Jsonl };

// Picks jsonl for *.jsonl / *.ndjson, csv otherwise.
InputFormat format_for(const std::filesystem::path& path);

// Result is sorted by (group_id, week, seq). Throws MalformedRow, UnknownCode, DuplicateId.
std::vector<Utterance> read_utterances_csv(std::istream& in);
std::vector<Utterance> read_utterances_jsonl(std::istream& in);
std::vector<Utterance> parse_utterances(const std::filesystem::path& path, InputFormat format);
std::vector<Utterance> parse_utterances(const std::filesystem::path& path);

void write_utterances_csv(std::ostream& out, const std::vector<Utterance>& utterances);

enum class ProblemType { SS, MS, DS };
enum class Homogeneity { Homo, Hetero };
enum class Quality { Excellent, Good, Pass, Fail };

std::string_view to_string(ProblemType v);
std::string_view to_string(Homogeneity v);
std::string_view to_string(Quality v);

struct GroupProfile {
    std::string group_id;
    ProblemType problem_type = ProblemType::SS;
    std::string composition;
    Homogeneity homogeneity = Homogeneity::Homo;
    Quality quality = Quality::Pass;
    int n_members = 1;

    bool operator==(const GroupProfile&) const = default;
};

// Columns: group_id, problem_type, composition, homogeneity, quality, n_members.
// Throws UnknownEnum, MalformedRow, Error(DuplicateGroup).
std::vector<GroupProfile> read_group_profiles(std::istream& in);
std::vector<GroupProfile> parse_group_profiles(const std::filesystem::path& path);

const GroupProfile* find_profile(const std::vector<GroupProfile>& profiles, const std::string& group_id);

struct GroupWeek {
    std::string group_id;
    int week = 0;

    auto operator<=>(const GroupWeek&) const = default;
};

struct CodeCoverage {
    std::size_t utterances = 0;
    std::size_t with_human = 0;
    std::size_t with_pred = 0;
};

struct ValidationReport {
    std::vector<std::string> orphan_groups;     // in utterances, missing from profiles
    std::vector<std::string> empty_groups;      // profiled, no utterances at all
    std::vector<GroupWeek> absent_group_weeks;  // profiled group with no utterances that week
    CodeCoverage coverage;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;

    bool clean() const { return warnings.empty(); }
};

ValidationReport validate_corpus(const std::vector<Utterance>& utterances, const std::vector<GroupProfile>& profiles);

enum class CodeSource { Human, Pred };
enum class Normalization { PerMember, RawCount };

std::string_view to_string(CodeSource v);
std::string_view to_string(Normalization v);

/// One (group, week) row of the e_tj matrix, columns in kTaskCodes order.
struct Observation {
    std::string group_id;
    int week = 0;
    std::array<double, kTaskCodeCount> values{};

    double value(Code code) const { return values[*task_index(code)]; }
};

struct MetricPanel {
    std::vector<Observation> observations; // sorted by (group_id, week)
    Normalization normalization = Normalization::PerMember;

    const Observation* find(const std::string& group_id, int week) const;
};

struct AggregateOptions {
    CodeSource code_source = CodeSource::Human;
    Normalization normalization = Normalization::PerMember;
    // Emit every profiled (group, week) even with no task-relevant utterances.
    bool zero_fill = false;
};

// Throws Error(MissingCode) when a counted utterance lacks the chosen code and
// Error(UnknownGroup) when per-member normalization meets an unprofiled group.
MetricPanel aggregate_metrics(const std::vector<Utterance>& utterances, const std::vector<GroupProfile>& profiles,
                              const AggregateOptions& options = {});

} // namespace synergy::corpus
