// SPDX-License-Identifier: Apache-2.0
#include "synergy/coder.hpp"

#include "synergy/csv.hpp"
#include "synergy/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace synergy::coder {

namespace {

// Keeps a cell on one table row.
std::string cell(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '\n' || c == '\r')
            out.push_back(' ');
        else if (c == '|')
            out += "\\|";
        else
            out.push_back(c);
    }
    return out;
}

std::string single_line(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        out.push_back(c == '\n' || c == '\r' ? ' ' : c);
    return out;
}

bool is_token_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && std::isalnum(u);
}

} // namespace

std::string_view to_string(ShotMode mode) { return mode == ShotMode::ZeroShot ? "zero_shot" : "few_shot"; }

std::string render_codebook(const Codebook& codebook, ShotMode mode) {
    const bool examples = mode == ShotMode::FewShot;
    std::string out = "| Interaction Level | CPS Behavior | Code | Description |";
    out += examples ? " Example |\n" : "\n";
    out += examples ? "|---|---|---|---|---|\n" : "|---|---|---|---|\n";
    for (const auto& e : codebook.entries()) {
        out += "| " + cell(level_display_name(e.level())) + " | " + cell(e.behavior_name) + " | " +
               std::string(to_string(e.code)) + " | " + cell(e.description) + " |";
        if (examples)
            out += " " + cell(e.example) + " |";
        out += "\n";
    }
    return out;
}

Prompt build_prompt_parts(const PromptSpec& spec) {
    if (csv::trim(spec.current_message).empty())
        throw Error(ErrorKind::EmptyMessage, "current message is empty");

    Prompt p;
    p.system = std::string(kRoleInstruction);

    std::string& u = p.user;
    u += "Coding framework:\n";
    u += spec.codebook_rendering;
    if (!spec.codebook_rendering.empty() && spec.codebook_rendering.back() != '\n')
        u += "\n";
    u += "\nContext:\n";
    if (spec.context.empty()) {
        u += "(no preceding messages)\n";
    } else {
        for (std::size_t i = 0; i < spec.context.size(); ++i)
            u += "[" + std::to_string(i + 1) + "] " + single_line(spec.context[i]) + "\n";
    }
    u += "\nCurrent message:\n";
    u += single_line(spec.current_message) + "\n";
    u += "\nOutput format:\n";
    u += kOutputInstruction;
    return p;
}

std::string build_prompt(const PromptSpec& spec) { return build_prompt_parts(spec).text(); }

Code parse_code(std::string_view response) {
    if (csv::trim(response) == "I")
        return Code::I;

    std::size_t i = 0;
    while (i < response.size()) {
        if (!is_token_char(response[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < response.size() && is_token_char(response[j]))
            ++j;
        // Whole alphanumeric runs only, so "S2" never reads as "S" and "W12" is not "W1".
        if (j - i == 2) {
            std::string token{static_cast<char>(std::toupper(static_cast<unsigned char>(response[i]))),
                              response[i + 1]};
            if (auto code = code_from_string(token); code && *code != Code::I)
                return *code;
        }
        i = j;
    }
    throw Unparseable(std::string(response));
}

std::vector<PromptSpec> build_prompt_specs(const std::vector<corpus::Utterance>& utterances,
                                           const std::string& codebook_rendering, ShotMode mode,
                                           std::size_t context_window) {
    // Per-group streams ordered by seq.
    std::map<std::string, std::vector<std::size_t>> streams;
    for (std::size_t i = 0; i < utterances.size(); ++i)
        streams[utterances[i].group_id].push_back(i);

    std::vector<PromptSpec> out(utterances.size());
    for (auto& [group, idx] : streams) {
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return utterances[a].seq < utterances[b].seq; });
        for (std::size_t pos = 0; pos < idx.size(); ++pos) {
            auto& spec = out[idx[pos]];
            spec.codebook_rendering = codebook_rendering;
            spec.current_message = utterances[idx[pos]].text;
            spec.shot_mode = mode;
            const std::size_t take = std::min(pos, context_window);
            for (std::size_t k = pos - take; k < pos; ++k)
                spec.context.push_back(utterances[idx[k]].text);
        }
    }
    return out;
}

} // namespace synergy::coder
