// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

// Flat key = value documents with [section] headers, the TOML subset the CLI
// reads. Keys are addressed as "section.key" ("key" before any header).
namespace synergy::config {

struct Value {
    std::string text;
    bool quoted = false;
    int line = 0;
};

class Document {
public:
    // Throws Error(Config) with "source:line" context.
    static Document parse(std::istream& in, const std::string& source = "<config>");
    static Document load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::vector<std::string> keys() const;

    std::optional<std::string> get_string(const std::string& key) const;
    std::optional<double> get_number(const std::string& key) const;
    std::optional<std::int64_t> get_int(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;

    const std::string& source() const noexcept { return source_; }

private:
    [[noreturn]] void fail(const Value& v, const std::string& key, const std::string& what) const;

    std::map<std::string, Value> values_;
    std::string source_;
};

} // namespace synergy::config
