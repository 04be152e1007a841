// SPDX-License-Identifier: Apache-2.0
#include "synergy/codebook.hpp"

#include "synergy/csv.hpp"
#include "synergy/error.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

namespace synergy {

std::string_view to_string(Code code) {
    switch (code) {
    case Code::I: return "I";
    case Code::O1: return "O1";
    case Code::O2: return "O2";
    case Code::W1: return "W1";
    case Code::W2: return "W2";
    case Code::W3: return "W3";
    case Code::S1: return "S1";
    case Code::S2: return "S2";
    case Code::S3: return "S3";
    case Code::C1: return "C1";
    }
    return "?";
}

std::string_view to_string(Level level) {
    switch (level) {
    case Level::Irrelevant: return "Irrelevant";
    case Level::Operation: return "Operation";
    case Level::Wayfinding: return "Wayfinding";
    case Level::SenseMaking: return "SenseMaking";
    case Level::Creation: return "Creation";
    }
    return "?";
}

std::string_view to_string(Subsystem subsystem) {
    switch (subsystem) {
    case Subsystem::O: return "O";
    case Subsystem::W: return "W";
    case Subsystem::S: return "S";
    case Subsystem::C: return "C";
    }
    return "?";
}

std::optional<Code> code_from_string(std::string_view token) {
    for (Code c : kAllCodes)
        if (to_string(c) == token)
            return c;
    return std::nullopt;
}

Code parse_code_token(std::string_view token) {
    if (auto c = code_from_string(token))
        return *c;
    throw UnknownCode(std::string(token));
}

std::optional<Level> level_from_string(std::string_view token) {
    for (Level l : {Level::Irrelevant, Level::Operation, Level::Wayfinding, Level::SenseMaking, Level::Creation})
        if (to_string(l) == token)
            return l;
    return std::nullopt;
}

Level level_of(Code code) {
    switch (code) {
    case Code::I: return Level::Irrelevant;
    case Code::O1:
    case Code::O2: return Level::Operation;
    case Code::W1:
    case Code::W2:
    case Code::W3: return Level::Wayfinding;
    case Code::S1:
    case Code::S2:
    case Code::S3: return Level::SenseMaking;
    case Code::C1: return Level::Creation;
    }
    return Level::Irrelevant;
}

bool is_task_code(Code code) { return code != Code::I; }

std::optional<std::size_t> task_index(Code code) {
    if (code == Code::I)
        return std::nullopt;
    return static_cast<std::size_t>(code) - 1;
}

Subsystem subsystem_of(Code code) {
    switch (level_of(code)) {
    case Level::Operation: return Subsystem::O;
    case Level::Wayfinding: return Subsystem::W;
    case Level::SenseMaking: return Subsystem::S;
    case Level::Creation: return Subsystem::C;
    case Level::Irrelevant: break;
    }
    throw Error(ErrorKind::InvalidArgument, "code I belongs to no task subsystem");
}

std::vector<Code> codes_of(Subsystem subsystem) {
    std::vector<Code> out;
    for (Code c : kTaskCodes)
        if (subsystem_of(c) == subsystem)
            out.push_back(c);
    return out;
}

std::string_view level_display_name(Level level) {
    switch (level) {
    case Level::Irrelevant: return "Irrelevant Interaction (I)";
    case Level::Operation: return "Operational Interaction (O)";
    case Level::Wayfinding: return "Wayfinding Interaction (W)";
    case Level::SenseMaking: return "Sense-making Interaction (S)";
    case Level::Creation: return "Creation Interaction (C)";
    }
    return "?";
}

Codebook::Codebook(std::vector<CodebookEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const CodebookEntry& a, const CodebookEntry& b) { return a.code < b.code; });
}

Codebook Codebook::builtin() {
    return Codebook({
        {Code::I, "Irrelevant Info", "Operations or messages unrelated to the task", "\"Message was withdrawn\""},
        {Code::O1, "Space Setup", "Initiating chat groups, creating shared documents",
         "\"I created a group, please join\""},
        {Code::O2, "Technical Operation", "Technical guidance on platform use, tools", "\"How to share the screen?\""},
        {Code::W1, "Social Connection", "Greetings, welcoming, checking availability",
         "\"Hi everyone!\", \"Are you free tomorrow?\""},
        {Code::W2, "Content Link", "Sharing resources, providing/asking basic info",
         "\"Here is a related paper I found\""},
        {Code::W3, "Task Alignment", "Reporting progress, encouraging peers",
         "\"I have finished my part, keep going!\""},
        {Code::S1, "Idea Suggestion", "Offering opinions, suggestions, recommendations",
         "\"We can try case analysis, it fits our problem\""},
        {Code::S2, "Conflict Negotiation", "Raising questions, pointing out disagreements",
         "\"I disagree, let's discuss the reasons\""},
        {Code::S3, "Planning/Decision", "Coordinating tasks, deciding methods",
         "\"Let's meet Wednesday to finalize the plan\""},
        {Code::C1, "Integrative Creation", "Integrating information, co-creating content",
         "\"[document]Here's the document we've put together\""},
    });
}

const CodebookEntry& Codebook::entry(Code code) const {
    return entries_.at(static_cast<std::size_t>(code));
}

Codebook Codebook::read_csv(std::istream& in) {
    static const std::vector<std::string> kHeader{"code", "level", "behavior_name", "description", "example"};
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header)
        throw MalformedRow(1, "missing header row");
    if (header->fields != kHeader)
        throw MalformedRow(header->line, "expected header code,level,behavior_name,description,example");

    std::vector<CodebookEntry> entries;
    std::array<bool, kCodeCount> seen{};
    while (auto rec = reader.next()) {
        if (rec->fields.size() != kHeader.size())
            throw MalformedRow(rec->line, "expected 5 columns, got " + std::to_string(rec->fields.size()));
        Code code = parse_code_token(csv::trim(rec->fields[0]));
        auto level = level_from_string(csv::trim(rec->fields[1]));
        if (!level)
            throw MalformedRow(rec->line, "unknown level '" + rec->fields[1] + "'");
        if (*level != level_of(code))
            throw MalformedRow(rec->line, "code " + std::string(to_string(code)) + " belongs to level " +
                                              std::string(to_string(level_of(code))));
        auto& flag = seen[static_cast<std::size_t>(code)];
        if (flag)
            throw MalformedRow(rec->line, "code " + std::string(to_string(code)) + " listed twice");
        flag = true;
        entries.push_back({code, rec->fields[2], rec->fields[3], rec->fields[4]});
    }
    for (Code c : kAllCodes)
        if (!seen[static_cast<std::size_t>(c)])
            throw MalformedRow(0, "codebook lacks code " + std::string(to_string(c)));
    return Codebook(std::move(entries));
}

Codebook Codebook::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open codebook " + path.string());
    return read_csv(in);
}

void Codebook::write_csv(std::ostream& out) const {
    csv::write_row(out, {"code", "level", "behavior_name", "description", "example"});
    for (const auto& e : entries_)
        csv::write_row(out, {std::string(to_string(e.code)), std::string(to_string(e.level())), e.behavior_name,
                             e.description, e.example});
}

} // namespace synergy
