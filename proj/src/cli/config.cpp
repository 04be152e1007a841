// SPDX-License-Identifier: Apache-2.0
#include "synergy/config.hpp"

#include "synergy/csv.hpp"
#include "synergy/error.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>

namespace synergy::config {

namespace {

bool valid_key(std::string_view k) {
    if (k.empty())
        return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
            return false;
    return true;
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool in_quote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '\\' && in_quote) {
            ++i;
            continue;
        }
        if (c == '"')
            in_quote = !in_quote;
        else if (c == '#' && !in_quote)
            return line.substr(0, i);
    }
    return line;
}

std::string unquote(std::string_view raw, const std::string& where) {
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
        char c = raw[i];
        if (c == '\\') {
            if (i + 2 >= raw.size())
                throw Error(ErrorKind::Config, where + ": dangling escape");
            switch (raw[++i]) {
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case '"': out.push_back('"'); break;
            case '\\': out.push_back('\\'); break;
            default: throw Error(ErrorKind::Config, where + ": unsupported escape");
            }
        } else {
            out.push_back(c);
        }
    }
    return out;
}

} // namespace

Document Document::parse(std::istream& in, const std::string& source) {
    Document doc;
    doc.source_ = source;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        const std::string body = csv::trim(strip_comment(line));
        if (body.empty())
            continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw Error(ErrorKind::Config, where + ": unterminated section header");
            section = csv::trim(std::string_view(body).substr(1, body.size() - 2));
            if (!valid_key(section))
                throw Error(ErrorKind::Config, where + ": bad section name '" + section + "'");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Config, where + ": expected key = value");
        const std::string key = csv::trim(std::string_view(body).substr(0, eq));
        const std::string raw = csv::trim(std::string_view(body).substr(eq + 1));
        if (!valid_key(key))
            throw Error(ErrorKind::Config, where + ": bad key '" + key + "'");
        if (raw.empty())
            throw Error(ErrorKind::Config, where + ": missing value for '" + key + "'");

        Value v;
        v.line = lineno;
        if (raw.front() == '"') {
            if (raw.size() < 2 || raw.back() != '"')
                throw Error(ErrorKind::Config, where + ": unterminated string");
            v.text = unquote(raw, where);
            v.quoted = true;
        } else {
            v.text = raw;
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (!doc.values_.emplace(full, std::move(v)).second)
            throw Error(ErrorKind::Config, where + ": duplicate key '" + full + "'");
    }
    return doc;
}

Document Document::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open config file " + path.string());
    return parse(in, path.string());
}

std::vector<std::string> Document::keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        out.push_back(k);
    return out;
}

void Document::fail(const Value& v, const std::string& key, const std::string& what) const {
    throw Error(ErrorKind::Config, source_ + ":" + std::to_string(v.line) + ": '" + key + "' " + what);
}

std::optional<std::string> Document::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        return std::nullopt;
    return it->second.text;
}

std::optional<double> Document::get_number(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        return std::nullopt;
    const auto& t = it->second.text;
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (it->second.quoted || ec != std::errc() || ptr != t.data() + t.size())
        fail(it->second, key, "is not a number");
    return out;
}

std::optional<std::int64_t> Document::get_int(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        return std::nullopt;
    const auto& t = it->second.text;
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (it->second.quoted || ec != std::errc() || ptr != t.data() + t.size())
        fail(it->second, key, "is not an integer");
    return out;
}

std::optional<bool> Document::get_bool(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        return std::nullopt;
    if (!it->second.quoted && it->second.text == "true")
        return true;
    if (!it->second.quoted && it->second.text == "false")
        return false;
    fail(it->second, key, "is not true/false");
}

} // namespace synergy::config
