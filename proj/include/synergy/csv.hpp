// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace synergy::csv {

struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0; // 1-based line where the record starts
};

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. A leading UTF-8 BOM is skipped. Blank lines are ignored.
class Reader {
public:
    explicit Reader(std::istream& in);

    std::optional<Record> next();

private:
    std::istream& in_;
    std::size_t line_ = 1;
    bool first_ = true;
};

std::vector<Record> read_all(std::istream& in);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

std::string trim(std::string_view s);

} // namespace synergy::csv
