#pragma once

#include <winnowopt/error.hpp>
#include <winnowopt/rational.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace winnowopt {

/// The two interpreted domains: uninterpreted constants (D) and the dense rational order (Q).
enum class Sort : std::uint8_t { D, Q };

inline std::string_view to_string(Sort s) { return s == Sort::D ? "D" : "Q"; }

/// A value of either sort: D-values are strings, Q-values exact rationals.
using Value = std::variant<std::string, Rational>;

/// A tuple is aligned with its schema's attribute list.
using Tuple = std::vector<Value>;

inline Sort sort_of(const Value &v) { return v.index() == 0 ? Sort::D : Sort::Q; }

inline Value make_d(std::string s) { return Value(std::in_place_index<0>, std::move(s)); }
inline Value make_q(Rational q)
{
    q.canonicalize();
    return Value(std::in_place_index<1>, std::move(q));
}
inline Value make_q(std::string_view literal) { return make_q(parse_rational(literal)); }

/** Prints a value the way the textual formats expect it: D-values double-quoted with `\"` and `\\` escapes,
 * Q-values in canonical rational form. */
inline std::string format_value(const Value &v)
{
    if (const auto *s = std::get_if<std::string>(&v)) {
        std::string out = "\"";
        for (char c : *s) {
            if (c == '"' or c == '\\')
                out += '\\';
            out += c;
        }
        return out + '"';
    }
    return format_rational(std::get<Rational>(v));
}

/// Value text without quoting, as written into CSV cells.
inline std::string plain_value(const Value &v)
{
    if (const auto *s = std::get_if<std::string>(&v))
        return *s;
    return format_rational(std::get<Rational>(v));
}

struct Attribute
{
    std::string name;
    Sort sort;

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// An ordered list of uniquely named, sorted attributes.
class Schema
{
    std::vector<Attribute> attributes_;

    public:
    explicit Schema(std::vector<Attribute> attributes) : attributes_(std::move(attributes))
    {
        if (attributes_.empty())
            throw SchemaError("schema must have at least one attribute");
        for (std::size_t i = 0; i != attributes_.size(); ++i) {
            if (attributes_[i].name.empty())
                throw SchemaError("attribute name must not be empty");
            for (std::size_t j = 0; j != i; ++j)
                if (attributes_[i].name == attributes_[j].name)
                    throw SchemaError("duplicate attribute '" + attributes_[i].name + "'");
        }
    }

    std::size_t size() const { return attributes_.size(); }
    const Attribute & operator[](std::size_t i) const { return attributes_[i]; }
    const std::vector<Attribute> & attributes() const { return attributes_; }
    auto begin() const { return attributes_.begin(); }
    auto end() const { return attributes_.end(); }

    std::optional<std::size_t> find(std::string_view name) const
    {
        for (std::size_t i = 0; i != attributes_.size(); ++i)
            if (attributes_[i].name == name)
                return i;
        return std::nullopt;
    }

    std::size_t index_of(std::string_view name) const
    {
        if (auto i = find(name))
            return *i;
        throw SortError("unknown attribute '" + std::string(name) + "'");
    }

    /// Throws `SchemaError` unless `t` has this schema's arity and sorts.
    void check(const Tuple &t) const
    {
        if (t.size() != attributes_.size())
            throw SchemaError("tuple arity " + std::to_string(t.size()) + " does not match schema arity " +
                              std::to_string(attributes_.size()));
        for (std::size_t i = 0; i != t.size(); ++i)
            if (sort_of(t[i]) != attributes_[i].sort)
                throw SchemaError("value of attribute '" + attributes_[i].name + "' has the wrong sort");
    }

    friend bool operator==(const Schema&, const Schema&) = default;
};

using SchemaPtr = std::shared_ptr<const Schema>;

inline SchemaPtr make_schema(std::vector<Attribute> attributes)
{
    return std::make_shared<const Schema>(std::move(attributes));
}

inline bool same_schema(const SchemaPtr &a, const SchemaPtr &b) { return a == b or (a and b and *a == *b); }

/// Renders `(A: v, B: w)` for diagnostics and witness printing.
inline std::string format_tuple(const Schema &schema, const Tuple &t)
{
    std::string out = "(";
    for (std::size_t i = 0; i != t.size(); ++i) {
        if (i)
            out += ", ";
        out += (i < schema.size() ? schema[i].name : "?") + ": " + format_value(t[i]);
    }
    return out + ")";
}

}
