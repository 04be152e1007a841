// SPDX-License-Identifier: Apache-2.0
#include "synergy/corpus.hpp"

#include "synergy/csv.hpp"
#include "synergy/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

namespace synergy::corpus {

namespace {

const std::vector<std::string> kUtteranceColumns{"utterance_id", "group_id", "week", "seq",
                                                 "speaker_id", "text", "code_human", "code_pred"};
const std::vector<std::string> kGroupColumns{"group_id", "problem_type", "composition",
                                             "homogeneity", "quality", "n_members"};

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

std::optional<Code> optional_code(const std::string& raw) {
    auto token = csv::trim(raw);
    if (token.empty())
        return std::nullopt;
    return parse_code_token(token);
}

struct Located {
    Utterance u;
    std::size_t line;
};

void check_week(int week, std::size_t line) {
    if (week < kFirstWeek || week > kLastWeek)
        throw MalformedRow(line, "week " + std::to_string(week) + " outside 0-4");
}

std::vector<Utterance> finalize(std::vector<Located> rows) {
    std::unordered_set<std::string> ids;
    for (const auto& r : rows)
        if (!ids.insert(r.u.utterance_id).second)
            throw Error(ErrorKind::DuplicateId, r.u.utterance_id);

    std::stable_sort(rows.begin(), rows.end(), [](const Located& a, const Located& b) {
        return std::tie(a.u.group_id, a.u.week, a.u.seq) < std::tie(b.u.group_id, b.u.week, b.u.seq);
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& prev = rows[i - 1].u;
        const auto& cur = rows[i].u;
        if (prev.group_id == cur.group_id && cur.seq <= prev.seq)
            throw MalformedRow(rows[i].line, "seq " + std::to_string(cur.seq) + " of group " + cur.group_id +
                                                 " does not follow seq " + std::to_string(prev.seq));
    }

    std::vector<Utterance> out;
    out.reserve(rows.size());
    for (auto& r : rows)
        out.push_back(std::move(r.u));
    return out;
}

} // namespace

InputFormat format_for(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    return (ext == ".jsonl" || ext == ".ndjson") ? InputFormat::Jsonl : InputFormat::Csv;
}

std::vector<Utterance> read_utterances_csv(std::istream& in) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header)
        throw MalformedRow(1, "missing header row");
    if (header->fields != kUtteranceColumns)
        throw MalformedRow(header->line,
                           "expected header utterance_id,group_id,week,seq,speaker_id,text,code_human,code_pred");

    std::vector<Located> rows;
    while (auto rec = reader.next()) {
        const auto& f = rec->fields;
        if (f.size() != kUtteranceColumns.size())
            throw MalformedRow(rec->line, "expected 8 columns, got " + std::to_string(f.size()));
        Utterance u;
        u.utterance_id = csv::trim(f[0]);
        u.group_id = csv::trim(f[1]);
        if (u.utterance_id.empty())
            throw MalformedRow(rec->line, "empty utterance_id");
        if (u.group_id.empty())
            throw MalformedRow(rec->line, "empty group_id");
        auto week = parse_int<int>(csv::trim(f[2]));
        if (!week)
            throw MalformedRow(rec->line, "week '" + f[2] + "' is not an integer");
        check_week(*week, rec->line);
        u.week = *week;
        auto seq = parse_int<std::int64_t>(csv::trim(f[3]));
        if (!seq || *seq < 0)
            throw MalformedRow(rec->line, "seq '" + f[3] + "' is not a non-negative integer");
        u.seq = *seq;
        u.speaker_id = csv::trim(f[4]);
        u.text = f[5];
        u.code_human = optional_code(f[6]);
        u.code_pred = optional_code(f[7]);
        rows.push_back({std::move(u), rec->line});
    }
    return finalize(std::move(rows));
}

std::vector<Utterance> read_utterances_jsonl(std::istream& in) {
    std::vector<Located> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty())
            continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw MalformedRow(lineno, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object())
            throw MalformedRow(lineno, "expected a JSON object");

        auto str = [&](const char* key, bool required) -> std::string {
            auto it = j.find(key);
            if (it == j.end() || it->is_null()) {
                if (required)
                    throw MalformedRow(lineno, std::string("missing field ") + key);
                return {};
            }
            if (!it->is_string())
                throw MalformedRow(lineno, std::string("field ") + key + " must be a string");
            return it->get<std::string>();
        };
        auto integer = [&](const char* key) -> std::int64_t {
            auto it = j.find(key);
            if (it == j.end() || !it->is_number_integer())
                throw MalformedRow(lineno, std::string("field ") + key + " must be an integer");
            return it->get<std::int64_t>();
        };

        Utterance u;
        u.utterance_id = str("utterance_id", true);
        u.group_id = str("group_id", true);
        if (u.utterance_id.empty() || u.group_id.empty())
            throw MalformedRow(lineno, "empty utterance_id or group_id");
        auto week = integer("week");
        if (week < kFirstWeek || week > kLastWeek)
            throw MalformedRow(lineno, "week " + std::to_string(week) + " outside 0-4");
        u.week = static_cast<int>(week);
        u.seq = integer("seq");
        if (u.seq < 0)
            throw MalformedRow(lineno, "seq must be non-negative");
        u.speaker_id = str("speaker_id", false);
        u.text = str("text", true);
        u.code_human = optional_code(str("code_human", false));
        u.code_pred = optional_code(str("code_pred", false));
        rows.push_back({std::move(u), lineno});
    }
    return finalize(std::move(rows));
}

std::vector<Utterance> parse_utterances(const std::filesystem::path& path, InputFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open utterances file " + path.string());
    return format == InputFormat::Jsonl ? read_utterances_jsonl(in) : read_utterances_csv(in);
}

std::vector<Utterance> parse_utterances(const std::filesystem::path& path) {
    return parse_utterances(path, format_for(path));
}

void write_utterances_csv(std::ostream& out, const std::vector<Utterance>& utterances) {
    csv::write_row(out, kUtteranceColumns);
    auto code = [](const std::optional<Code>& c) { return c ? std::string(to_string(*c)) : std::string(); };
    for (const auto& u : utterances)
        csv::write_row(out, {u.utterance_id, u.group_id, std::to_string(u.week), std::to_string(u.seq), u.speaker_id,
                             u.text, code(u.code_human), code(u.code_pred)});
}

std::string_view to_string(ProblemType v) {
    switch (v) {
    case ProblemType::SS: return "SS";
    case ProblemType::MS: return "MS";
    case ProblemType::DS: return "DS";
    }
    return "?";
}

std::string_view to_string(Homogeneity v) { return v == Homogeneity::Homo ? "Homo" : "Hetero"; }

std::string_view to_string(Quality v) {
    switch (v) {
    case Quality::Excellent: return "Excellent";
    case Quality::Good: return "Good";
    case Quality::Pass: return "Pass";
    case Quality::Fail: return "Fail";
    }
    return "?";
}

std::string_view to_string(CodeSource v) { return v == CodeSource::Human ? "human" : "pred"; }
std::string_view to_string(Normalization v) { return v == Normalization::PerMember ? "per_member" : "raw_count"; }

std::vector<GroupProfile> read_group_profiles(std::istream& in) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header)
        throw MalformedRow(1, "missing header row");
    if (header->fields != kGroupColumns)
        throw MalformedRow(header->line,
                           "expected header group_id,problem_type,composition,homogeneity,quality,n_members");

    std::vector<GroupProfile> out;
    std::set<std::string> seen;
    while (auto rec = reader.next()) {
        const auto& f = rec->fields;
        if (f.size() != kGroupColumns.size())
            throw MalformedRow(rec->line, "expected 6 columns, got " + std::to_string(f.size()));
        GroupProfile p;
        p.group_id = csv::trim(f[0]);
        if (p.group_id.empty())
            throw MalformedRow(rec->line, "empty group_id");

        auto pt = csv::trim(f[1]);
        if (pt == "SS")
            p.problem_type = ProblemType::SS;
        else if (pt == "MS")
            p.problem_type = ProblemType::MS;
        else if (pt == "DS")
            p.problem_type = ProblemType::DS;
        else
            throw UnknownEnum("problem_type", pt);

        p.composition = csv::trim(f[2]);

        auto ho = csv::trim(f[3]);
        if (ho == "Homo" || ho == "Homo." || ho == "Homogeneous")
            p.homogeneity = Homogeneity::Homo;
        else if (ho == "Hetero" || ho == "Hetero." || ho == "Heterogeneous")
            p.homogeneity = Homogeneity::Hetero;
        else
            throw UnknownEnum("homogeneity", ho);

        auto q = csv::trim(f[4]);
        if (q == "Excellent")
            p.quality = Quality::Excellent;
        else if (q == "Good")
            p.quality = Quality::Good;
        else if (q == "Pass")
            p.quality = Quality::Pass;
        else if (q == "Fail" || q == "Failed")
            p.quality = Quality::Fail;
        else
            throw UnknownEnum("quality", q);

        auto n = parse_int<int>(csv::trim(f[5]));
        if (!n || *n < 1)
            throw MalformedRow(rec->line, "n_members '" + f[5] + "' must be an integer >= 1");
        p.n_members = *n;

        if (!seen.insert(p.group_id).second)
            throw Error(ErrorKind::DuplicateGroup, p.group_id);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<GroupProfile> parse_group_profiles(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open groups file " + path.string());
    return read_group_profiles(in);
}

const GroupProfile* find_profile(const std::vector<GroupProfile>& profiles, const std::string& group_id) {
    auto it = std::find_if(profiles.begin(), profiles.end(),
                           [&](const GroupProfile& p) { return p.group_id == group_id; });
    return it == profiles.end() ? nullptr : &*it;
}

ValidationReport validate_corpus(const std::vector<Utterance>& utterances, const std::vector<GroupProfile>& profiles) {
    ValidationReport report;
    std::set<std::string> profiled;
    for (const auto& p : profiles)
        profiled.insert(p.group_id);

    std::set<std::string> orphans;
    std::set<GroupWeek> present;
    for (const auto& u : utterances) {
        ++report.coverage.utterances;
        if (u.code_human)
            ++report.coverage.with_human;
        if (u.code_pred)
            ++report.coverage.with_pred;
        if (!profiled.count(u.group_id))
            orphans.insert(u.group_id);
        present.insert({u.group_id, u.week});
    }

    report.orphan_groups.assign(orphans.begin(), orphans.end());
    for (const auto& g : report.orphan_groups)
        report.warnings.push_back("orphan group '" + g + "': utterances reference a group missing from the profiles");

    for (const auto& g : profiled) {
        bool any = false;
        std::vector<GroupWeek> absent;
        for (int w = kFirstWeek; w <= kLastWeek; ++w) {
            if (present.count({g, w}))
                any = true;
            else
                absent.push_back({g, w});
        }
        if (!any) {
            report.empty_groups.push_back(g);
            report.warnings.push_back("group '" + g + "' has no utterances");
            continue;
        }
        report.absent_group_weeks.insert(report.absent_group_weeks.end(), absent.begin(), absent.end());
    }

    if (!report.absent_group_weeks.empty()) {
        std::string weeks;
        for (const auto& gw : report.absent_group_weeks) {
            if (!weeks.empty())
                weeks += ", ";
            weeks += gw.group_id + "/w" + std::to_string(gw.week);
        }
        report.notes.push_back("absent group-weeks (" + std::to_string(report.absent_group_weeks.size()) +
                               "): " + weeks);
    }
    const auto& c = report.coverage;
    if (c.utterances > 0 && c.with_human < c.utterances)
        report.notes.push_back("human codes present on " + std::to_string(c.with_human) + " of " +
                               std::to_string(c.utterances) + " utterances");
    if (c.utterances > 0 && c.with_pred < c.utterances)
        report.notes.push_back("predicted codes present on " + std::to_string(c.with_pred) + " of " +
                               std::to_string(c.utterances) + " utterances");
    return report;
}

const Observation* MetricPanel::find(const std::string& group_id, int week) const {
    for (const auto& o : observations)
        if (o.group_id == group_id && o.week == week)
            return &o;
    return nullptr;
}

MetricPanel aggregate_metrics(const std::vector<Utterance>& utterances, const std::vector<GroupProfile>& profiles,
                              const AggregateOptions& options) {
    std::map<GroupWeek, std::array<long, kTaskCodeCount>> counts;

    for (const auto& u : utterances) {
        const auto& code = options.code_source == CodeSource::Human ? u.code_human : u.code_pred;
        if (!code)
            throw Error(ErrorKind::MissingCode, u.utterance_id);
        auto idx = task_index(*code);
        if (!idx)
            continue;
        ++counts[{u.group_id, u.week}][*idx];
    }

    if (options.zero_fill) {
        for (const auto& p : profiles)
            for (int w = kFirstWeek; w <= kLastWeek; ++w)
                counts.try_emplace({p.group_id, w});
    }

    MetricPanel panel;
    panel.normalization = options.normalization;
    for (const auto& [gw, raw] : counts) {
        Observation obs;
        obs.group_id = gw.group_id;
        obs.week = gw.week;
        double divisor = 1.0;
        if (options.normalization == Normalization::PerMember) {
            const auto* profile = find_profile(profiles, gw.group_id);
            if (!profile)
                throw Error(ErrorKind::UnknownGroup, "no profile (n_members) for group " + gw.group_id);
            divisor = profile->n_members;
        }
        for (std::size_t j = 0; j < kTaskCodeCount; ++j)
            obs.values[j] = static_cast<double>(raw[j]) / divisor;
        panel.observations.push_back(std::move(obs));
    }
    return panel;
}

} // namespace synergy::corpus
