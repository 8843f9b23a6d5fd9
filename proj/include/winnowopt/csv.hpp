#pragma once

#include <winnowopt/relation.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace winnowopt {

/** CSV with a typed header: the first record names each column as `name:sort`, e.g. `ISBN:D,Vendor:D,Price:Q`.
 * Fields follow the usual quoting rules (double quotes, `""` inside a quoted field).  Q cells are exact decimals or
 * `n/d` fractions.  Duplicate rows are dropped and counted. */
struct CsvTable
{
    Relation relation;
    std::size_t duplicates = 0;
};

namespace detail {

/// Splits the next record; returns false at end of input.  Tracks the 1-based line for diagnostics.
inline bool read_csv_record(std::istream &in, std::vector<std::string> &fields, std::size_t &line)
{
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof())
        return false;
    ++line;
    const std::size_t start = line;
    std::string field;
    bool quoted = false, was_quoted = false;
    for (;;) {
        int c = in.get();
        if (c == std::char_traits<char>::eof()) {
            if (quoted)
                throw DataError("line " + std::to_string(start) + ": unterminated quoted field");
            break;
        }
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n')
                    ++line;
                field += char(c);
            }
            continue;
        }
        if (c == '"' and field.empty() and not was_quoted) {
            quoted = was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            was_quoted = false;
        } else if (c == '\n') {
            break;
        } else if (c == '\r' and in.peek() == '\n') {
            continue;
        } else {
            if (was_quoted)
                throw DataError("line " + std::to_string(line) + ": text after closing quote");
            field += char(c);
        }
    }
    fields.push_back(std::move(field));
    return true;
}

inline bool blank_record(const std::vector<std::string> &fields)
{
    return fields.size() == 1 and fields[0].find_first_not_of(" \t\r") == std::string::npos;
}

inline std::string trim(const std::string &s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}

inline SchemaPtr parse_csv_header(const std::vector<std::string> &fields)
{
    std::vector<Attribute> attrs;
    for (const auto &raw : fields) {
        std::string f = detail::trim(raw);
        auto colon = f.rfind(':');
        if (colon == std::string::npos)
            throw DataError("CSV header field '" + f + "' is not of the form name:sort");
        std::string name = detail::trim(f.substr(0, colon));
        std::string sort = detail::trim(f.substr(colon + 1));
        if (sort == "D" or sort == "d")
            attrs.push_back({name, Sort::D});
        else if (sort == "Q" or sort == "q")
            attrs.push_back({name, Sort::Q});
        else
            throw DataError("CSV header field '" + f + "' has unknown sort '" + sort + "'");
    }
    try {
        return make_schema(std::move(attrs));
    } catch (const SchemaError &e) {
        throw DataError(std::string("bad CSV header: ") + e.what());
    }
}

/** Reads a relation.  When `expected` is given the header must declare the same attributes and sorts, and an empty
 * stream is read as the empty relation over `expected`. */
inline CsvTable read_csv(std::istream &in, const SchemaPtr &expected = nullptr)
{
    std::vector<std::string> fields;
    std::size_t line = 0;
    bool have_header = false;
    while (detail::read_csv_record(in, fields, line))
        if (not detail::blank_record(fields)) { have_header = true; break; }
    if (not have_header) {
        if (not expected)
            throw DataError("CSV input has no header");
        return {Relation(expected), 0};
    }
    SchemaPtr schema = parse_csv_header(fields);
    if (expected) {
        if (*schema != *expected)
            throw DataError("CSV header does not match the declared schema");
        schema = expected;
    }

    std::vector<Tuple> rows;
    while (detail::read_csv_record(in, fields, line)) {
        if (detail::blank_record(fields))
            continue;
        if (fields.size() != schema->size())
            throw DataError("line " + std::to_string(line) + ": expected " + std::to_string(schema->size()) +
                            " fields, found " + std::to_string(fields.size()));
        Tuple t;
        t.reserve(fields.size());
        for (std::size_t i = 0; i != fields.size(); ++i) {
            if ((*schema)[i].sort == Sort::D) {
                t.push_back(make_d(fields[i]));
                continue;
            }
            try {
                t.push_back(make_q(detail::trim(fields[i])));
            } catch (const DataError &e) {
                throw DataError("line " + std::to_string(line) + ", column '" + (*schema)[i].name + "': " + e.what());
            }
        }
        rows.push_back(std::move(t));
    }
    Relation r(schema, std::move(rows));
    std::size_t dups = r.dropped_duplicates();
    return {std::move(r), dups};
}

inline CsvTable read_csv_file(const std::string &path, const SchemaPtr &expected = nullptr)
{
    std::ifstream in(path, std::ios::binary);
    if (not in)
        throw DataError("cannot open '" + path + "'");
    return read_csv(in, expected);
}

inline std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos and (s.empty() or (s.front() != ' ' and s.back() != ' ')))
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

/// Writes the header and the rows in the relation's canonical order.
inline void write_csv(std::ostream &out, const Relation &r)
{
    const Schema &schema = r.schema();
    for (std::size_t i = 0; i != schema.size(); ++i)
        out << (i ? "," : "") << csv_field(schema[i].name) << ':' << to_string(schema[i].sort);
    out << '\n';
    for (const auto &t : r) {
        for (std::size_t i = 0; i != t.size(); ++i)
            out << (i ? "," : "") << csv_field(plain_value(t[i]));
        out << '\n';
    }
}

inline std::string to_csv(const Relation &r)
{
    std::ostringstream out;
    write_csv(out, r);
    return out.str();
}

}
