// SPDX-License-Identifier: Apache-2.0
#include "synergy/csv.hpp"

#include "synergy/error.hpp"

#include <istream>
#include <ostream>

namespace synergy::csv {

Reader::Reader(std::istream& in) : in_(in) {}

std::optional<Record> Reader::next() {
    if (first_) {
        first_ = false;
        if (in_.peek() == 0xEF) {
            char bom[3];
            in_.read(bom, 3);
            if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF))
                throw MalformedRow(1, "invalid byte order mark");
        }
    }

    while (true) {
        if (in_.peek() == std::char_traits<char>::eof())
            return std::nullopt;

        Record rec;
        rec.line = line_;
        std::string field;
        bool quoted = false;
        bool field_was_quoted = false;
        bool any = false;
        char c;
        while (in_.get(c)) {
            any = true;
            if (quoted) {
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get(c);
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    if (c == '\n')
                        ++line_;
                    field.push_back(c);
                }
                continue;
            }
            if (c == '"') {
                if (!field.empty() || field_was_quoted)
                    throw MalformedRow(line_, "stray quote inside unquoted field");
                quoted = true;
                field_was_quoted = true;
            } else if (c == ',') {
                rec.fields.push_back(std::move(field));
                field.clear();
                field_was_quoted = false;
            } else if (c == '\r') {
                if (in_.peek() == '\n')
                    continue;
                break;
            } else if (c == '\n') {
                break;
            } else {
                if (field_was_quoted)
                    throw MalformedRow(line_, "characters after closing quote");
                field.push_back(c);
            }
        }
        if (quoted)
            throw MalformedRow(rec.line, "unterminated quoted field");
        ++line_;
        if (!any)
            return std::nullopt;
        rec.fields.push_back(std::move(field));
        if (rec.fields.size() == 1 && rec.fields[0].empty() && !field_was_quoted)
            continue; // blank line
        return rec;
    }
}

std::vector<Record> read_all(std::istream& in) {
    Reader reader(in);
    std::vector<Record> out;
    while (auto rec = reader.next())
        out.push_back(std::move(*rec));
    return out;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

std::string trim(std::string_view s) {
    const auto* ws = " \t\r\n\f\v";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

} // namespace synergy::csv
