#pragma once

#include <winnowopt/error.hpp>
#include <winnowopt/schema.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace winnowopt {

/*======================================================================================================================
 * Terms and atoms
 *====================================================================================================================*/

enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Gt, Le, Ge };

inline std::string_view to_string(CmpOp op)
{
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Gt: return ">";
        case CmpOp::Le: return "<=";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

/// Logical complement: `x op y` is false iff `x complement(op) y` is true.
constexpr CmpOp complement(CmpOp op)
{
    switch (op) {
        case CmpOp::Eq: return CmpOp::Ne;
        case CmpOp::Ne: return CmpOp::Eq;
        case CmpOp::Lt: return CmpOp::Ge;
        case CmpOp::Ge: return CmpOp::Lt;
        case CmpOp::Gt: return CmpOp::Le;
        case CmpOp::Le: return CmpOp::Gt;
    }
    return op;
}

/// Operator obtained by swapping the operands: `x op y` iff `y converse(op) x`.
constexpr CmpOp converse(CmpOp op)
{
    switch (op) {
        case CmpOp::Lt: return CmpOp::Gt;
        case CmpOp::Gt: return CmpOp::Lt;
        case CmpOp::Le: return CmpOp::Ge;
        case CmpOp::Ge: return CmpOp::Le;
        default: return op;
    }
}

constexpr bool is_order_op(CmpOp op) { return op != CmpOp::Eq and op != CmpOp::Ne; }

/// Applies `op` to the result of a three-way comparison.
constexpr bool holds(CmpOp op, int cmp)
{
    switch (op) {
        case CmpOp::Eq: return cmp == 0;
        case CmpOp::Ne: return cmp != 0;
        case CmpOp::Lt: return cmp < 0;
        case CmpOp::Gt: return cmp > 0;
        case CmpOp::Le: return cmp <= 0;
        case CmpOp::Ge: return cmp >= 0;
    }
    return false;
}

/// Attribute `attr` of tuple variable `tuple`; both are 0-based indices.
struct Var
{
    std::size_t tuple;
    std::size_t attr;

    friend auto operator<=>(const Var&, const Var&) = default;
    friend bool operator==(const Var&, const Var&) = default;
};

inline int compare_values(const Value &a, const Value &b)
{
    if (a.index() != b.index())
        return a.index() < b.index() ? -1 : 1;
    if (a.index() == 0) {
        int c = std::get<0>(a).compare(std::get<0>(b));
        return (c > 0) - (c < 0);
    }
    int c = cmp(std::get<1>(a), std::get<1>(b));
    return (c > 0) - (c < 0);
}

class Term
{
    std::variant<Var, Value> term_;

    public:
    Term() : term_(Var{0, 0}) { }
    Term(Var v) : term_(v) { }
    Term(Value v) : term_(std::move(v)) { }

    static Term var(std::size_t tuple, std::size_t attr) { return Term(Var{tuple, attr}); }
    static Term constant(Value v) { return Term(std::move(v)); }

    bool is_var() const { return term_.index() == 0; }
    const Var & as_var() const { return std::get<Var>(term_); }
    const Value & as_const() const { return std::get<Value>(term_); }

    Sort sort(const Schema &schema) const { return is_var() ? schema[as_var().attr].sort : sort_of(as_const()); }

    /// Value of this term when tuple variable `i` is bound to `tuples[i]`.
    const Value & value_in(std::span<const Tuple* const> tuples) const
    {
        if (is_var()) {
            const Var &v = as_var();
            return (*tuples[v.tuple])[v.attr];
        }
        return as_const();
    }

    friend bool operator==(const Term&, const Term&) = default;

    /// Total order used for canonicalization: variables first, then constants by sort and value.
    friend int compare_terms(const Term &a, const Term &b)
    {
        if (a.is_var() != b.is_var())
            return a.is_var() ? -1 : 1;
        if (a.is_var()) {
            auto c = a.as_var() <=> b.as_var();
            return c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        return compare_values(a.as_const(), b.as_const());
    }
};

struct Atom
{
    Term lhs;
    CmpOp op = CmpOp::Eq;
    Term rhs;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Result of building an atom: either a proper atom or a truth value it folded to.
using Literal = std::variant<Atom, bool>;

/** Builds a well-sorted atom over `schema`.  Comparisons between two constants and comparisons of a term with itself
 * fold to a truth value, so proper atoms always mention at least one variable and never trivially hold or fail.
 * Throws `SortError` on sort mismatches, unknown attributes, and order comparisons on the D sort. */
inline Literal make_atom(const Schema &schema, Term lhs, CmpOp op, Term rhs)
{
    for (const Term *t : {&lhs, &rhs})
        if (t->is_var() and t->as_var().attr >= schema.size())
            throw SortError("attribute index " + std::to_string(t->as_var().attr) + " out of range");
    const Sort ls = lhs.sort(schema), rs = rhs.sort(schema);
    if (ls != rs)
        throw SortError("atom compares a " + std::string(to_string(ls)) + "-term with a " +
                        std::string(to_string(rs)) + "-term");
    if (ls == Sort::D and is_order_op(op))
        throw SortError("order comparison '" + std::string(to_string(op)) + "' on the D sort");
    if (not lhs.is_var() and not rhs.is_var())
        return holds(op, compare_values(lhs.as_const(), rhs.as_const()));
    if (lhs == rhs)
        return holds(op, 0);
    return Atom{std::move(lhs), op, std::move(rhs)};
}

inline Atom negate_atom(const Atom &a) { return Atom{a.lhs, complement(a.op), a.rhs}; }

/// Orientation-normal form: the smaller term on the left.  Two atoms are the same constraint iff their canonical
/// forms are equal.
inline Atom canonical(const Atom &a)
{
    if (compare_terms(a.rhs, a.lhs) < 0)
        return Atom{a.rhs, converse(a.op), a.lhs};
    return a;
}

inline int compare_atoms(const Atom &a, const Atom &b)
{
    if (int c = compare_terms(a.lhs, b.lhs))
        return c;
    if (a.op != b.op)
        return a.op < b.op ? -1 : 1;
    return compare_terms(a.rhs, b.rhs);
}

inline bool evaluate_atom(const Atom &a, std::span<const Tuple* const> tuples)
{
    return holds(a.op, compare_values(a.lhs.value_in(tuples), a.rhs.value_in(tuples)));
}

/*======================================================================================================================
 * DNF formulas
 *====================================================================================================================*/

/// A conjunction of atoms; empty means true.
using Conjunction = std::vector<Atom>;

struct FormulaStats
{
    std::size_t width = 0; ///< number of disjuncts
    std::size_t span = 0;  ///< largest number of atoms in a disjunct

    friend bool operator==(const FormulaStats&, const FormulaStats&) = default;
};

/** A quantifier-free formula in disjunctive normal form over `tuple_vars()` tuple variables of one schema.
 *
 * No disjuncts denotes false; an empty disjunct denotes true.  Construction validates every atom against the schema
 * and folds constant atoms away, so all formulas are well-sorted and contain only proper atoms. */
class DnfFormula
{
    SchemaPtr schema_;
    std::size_t tuple_vars_;
    std::vector<Conjunction> disjuncts_;

    public:
    DnfFormula(SchemaPtr schema, std::size_t tuple_vars, std::vector<Conjunction> disjuncts = {})
        : schema_(std::move(schema)), tuple_vars_(tuple_vars)
    {
        if (not schema_)
            throw SchemaError("formula requires a schema");
        if (tuple_vars_ == 0)
            throw SchemaError("formula requires at least one tuple variable");
        disjuncts_.reserve(disjuncts.size());
        for (auto &conj : disjuncts) {
            Conjunction kept;
            kept.reserve(conj.size());
            bool is_false = false;
            for (auto &atom : conj) {
                for (const Term *t : {&atom.lhs, &atom.rhs})
                    if (t->is_var() and t->as_var().tuple >= tuple_vars_)
                        throw SchemaError("tuple variable index " + std::to_string(t->as_var().tuple) +
                                          " exceeds tuple variable count " + std::to_string(tuple_vars_));
                Literal lit = make_atom(*schema_, std::move(atom.lhs), atom.op, std::move(atom.rhs));
                if (auto *b = std::get_if<bool>(&lit)) {
                    if (not *b) { is_false = true; break; }
                } else {
                    kept.push_back(std::move(std::get<Atom>(lit)));
                }
            }
            if (not is_false)
                disjuncts_.push_back(std::move(kept));
        }
    }

    static DnfFormula falsity(SchemaPtr schema, std::size_t tuple_vars) { return {std::move(schema), tuple_vars}; }
    static DnfFormula truth(SchemaPtr schema, std::size_t tuple_vars)
    {
        return {std::move(schema), tuple_vars, {Conjunction{}}};
    }
    static DnfFormula of(SchemaPtr schema, std::size_t tuple_vars, Literal lit)
    {
        if (auto *b = std::get_if<bool>(&lit))
            return *b ? truth(std::move(schema), tuple_vars) : falsity(std::move(schema), tuple_vars);
        return {std::move(schema), tuple_vars, {Conjunction{std::get<Atom>(std::move(lit))}}};
    }

    const Schema & schema() const { return *schema_; }
    const SchemaPtr & schema_ptr() const { return schema_; }
    std::size_t tuple_vars() const { return tuple_vars_; }
    const std::vector<Conjunction> & disjuncts() const { return disjuncts_; }
    std::size_t width() const { return disjuncts_.size(); }

    /// Syntactically false (no disjuncts).
    bool is_false() const { return disjuncts_.empty(); }
    /// Syntactically true (contains an empty disjunct).
    bool is_true() const
    {
        return std::any_of(disjuncts_.begin(), disjuncts_.end(), [](const auto &c) { return c.empty(); });
    }

    /// Structural equality; logical equivalence is decided by the solver.
    friend bool operator==(const DnfFormula &a, const DnfFormula &b)
    {
        return a.tuple_vars_ == b.tuple_vars_ and same_schema(a.schema_, b.schema_) and a.disjuncts_ == b.disjuncts_;
    }
};

inline FormulaStats stats(const DnfFormula &f)
{
    FormulaStats s;
    s.width = f.width();
    for (const auto &c : f.disjuncts())
        s.span = std::max(s.span, c.size());
    return s;
}

namespace detail {

inline void check_compatible(const DnfFormula &f, const DnfFormula &g)
{
    if (f.tuple_vars() != g.tuple_vars())
        throw SchemaError("formulas range over different numbers of tuple variables");
    if (not same_schema(f.schema_ptr(), g.schema_ptr()))
        throw SchemaError("formulas range over different schemas");
}

struct CanonicalLess
{
    bool operator()(const Atom &a, const Atom &b) const { return compare_atoms(a, b) < 0; }
};

/// Sorted canonical atoms of `c`, or nullopt if `c` contains an atom together with its complement.
inline std::optional<std::vector<Atom>> canonical_key(const Conjunction &c)
{
    std::vector<Atom> key;
    key.reserve(c.size());
    for (const auto &a : c)
        key.push_back(canonical(a));
    std::sort(key.begin(), key.end(), CanonicalLess{});
    key.erase(std::unique(key.begin(), key.end()), key.end());
    for (const auto &a : key)
        if (std::binary_search(key.begin(), key.end(), negate_atom(a), CanonicalLess{}))
            return std::nullopt;
    return key;
}

/// Absorption is quadratic in the width; above this width only the linear simplifications run.
inline constexpr std::size_t kAbsorptionLimit = 256;

}

/** Cheap, equivalence-preserving cleanup of a disjunct list: drops duplicate atoms, contradictory disjuncts (an atom
 * and its complement), and duplicate disjuncts; collapses to true when some disjunct is empty; removes disjuncts
 * absorbed by a smaller one while the width stays small. */
inline std::vector<Conjunction> simplify(std::vector<Conjunction> disjuncts)
{
    std::vector<Conjunction> out;
    std::vector<std::vector<Atom>> keys;
    for (auto &conj : disjuncts) {
        auto key = detail::canonical_key(conj);
        if (not key)
            continue;
        if (key->empty())
            return {Conjunction{}};
        if (std::find(keys.begin(), keys.end(), *key) != keys.end())
            continue;
        Conjunction deduped;
        deduped.reserve(conj.size());
        for (auto &a : conj) {
            Atom ca = canonical(a);
            bool dup = std::any_of(deduped.begin(), deduped.end(), [&](const Atom &b) { return canonical(b) == ca; });
            if (not dup)
                deduped.push_back(std::move(a));
        }
        keys.push_back(std::move(*key));
        out.push_back(std::move(deduped));
    }

    if (out.size() > 1 and out.size() <= detail::kAbsorptionLimit) {
        std::vector<bool> absorbed(out.size(), false);
        for (std::size_t i = 0; i != out.size(); ++i)
            for (std::size_t j = 0; j != out.size() and not absorbed[i]; ++j)
                if (i != j and not absorbed[j] and keys[j].size() < keys[i].size() and
                    std::includes(keys[i].begin(), keys[i].end(), keys[j].begin(), keys[j].end(),
                                  detail::CanonicalLess{}))
                    absorbed[i] = true;
        std::vector<Conjunction> kept;
        for (std::size_t i = 0; i != out.size(); ++i)
            if (not absorbed[i])
                kept.push_back(std::move(out[i]));
        out = std::move(kept);
    }
    return out;
}

/// DNF of `f ∧ g` by cross product of disjuncts.
inline DnfFormula conjoin(const DnfFormula &f, const DnfFormula &g)
{
    detail::check_compatible(f, g);
    std::vector<Conjunction> product;
    product.reserve(f.width() * g.width());
    for (const auto &a : f.disjuncts())
        for (const auto &b : g.disjuncts()) {
            Conjunction c = a;
            c.insert(c.end(), b.begin(), b.end());
            product.push_back(std::move(c));
        }
    return DnfFormula(f.schema_ptr(), f.tuple_vars(), simplify(std::move(product)));
}

inline DnfFormula disjoin(const DnfFormula &f, const DnfFormula &g)
{
    detail::check_compatible(f, g);
    std::vector<Conjunction> all = f.disjuncts();
    all.insert(all.end(), g.disjuncts().begin(), g.disjuncts().end());
    return DnfFormula(f.schema_ptr(), f.tuple_vars(), simplify(std::move(all)));
}

/// DNF of `¬f` by De Morgan, distributing one disjunct at a time with simplification in between.
inline DnfFormula negate(const DnfFormula &f)
{
    std::vector<Conjunction> acc{Conjunction{}};
    for (const auto &disjunct : f.disjuncts()) {
        std::vector<Conjunction> next;
        next.reserve(acc.size() * disjunct.size());
        for (const auto &partial : acc)
            for (const auto &atom : disjunct) {
                Conjunction c = partial;
                c.push_back(negate_atom(atom));
                next.push_back(std::move(c));
            }
        acc = simplify(std::move(next));
        if (acc.empty())
            break;
    }
    return DnfFormula(f.schema_ptr(), f.tuple_vars(), std::move(acc));
}

/** Renames tuple variables: every `Var(i, A)` becomes `Var(mapping[i], A)` in a formula over `target_count` tuple
 * variables.  Atoms that become reflexive (e.g. `t.p < t.p`) fold to their truth value. */
inline DnfFormula instantiate(const DnfFormula &f, std::span<const std::size_t> mapping, std::size_t target_count)
{
    if (mapping.size() != f.tuple_vars())
        throw SchemaError("instantiation mapping has " + std::to_string(mapping.size()) + " entries for " +
                          std::to_string(f.tuple_vars()) + " tuple variables");
    for (std::size_t target : mapping)
        if (target >= target_count)
            throw SchemaError("instantiation target " + std::to_string(target) + " out of range");
    auto rename = [&](const Term &t) {
        return t.is_var() ? Term::var(mapping[t.as_var().tuple], t.as_var().attr) : t;
    };
    std::vector<Conjunction> out;
    out.reserve(f.width());
    for (const auto &conj : f.disjuncts()) {
        Conjunction c;
        c.reserve(conj.size());
        for (const auto &a : conj)
            c.push_back(Atom{rename(a.lhs), a.op, rename(a.rhs)});
        out.push_back(std::move(c));
    }
    return DnfFormula(f.schema_ptr(), target_count, std::move(out));
}

inline DnfFormula instantiate(const DnfFormula &f, std::initializer_list<std::size_t> mapping,
                              std::size_t target_count)
{
    return instantiate(f, std::span<const std::size_t>(mapping.begin(), mapping.size()), target_count);
}

namespace detail {

inline bool evaluate_unchecked(const DnfFormula &f, std::span<const Tuple* const> tuples)
{
    for (const auto &conj : f.disjuncts()) {
        bool all = true;
        for (const auto &a : conj)
            if (not evaluate_atom(a, tuples)) { all = false; break; }
        if (all)
            return true;
    }
    return false;
}

}

/// Truth value of `f` with tuple variable `i` bound to `tuples[i]`.
inline bool evaluate(const DnfFormula &f, std::span<const Tuple> tuples)
{
    if (tuples.size() != f.tuple_vars())
        throw SchemaError("formula over " + std::to_string(f.tuple_vars()) + " tuple variables evaluated on " +
                          std::to_string(tuples.size()) + " tuples");
    std::vector<const Tuple*> ptrs;
    ptrs.reserve(tuples.size());
    for (const auto &t : tuples) {
        f.schema().check(t);
        ptrs.push_back(&t);
    }
    return detail::evaluate_unchecked(f, ptrs);
}

inline bool evaluate(const DnfFormula &f, std::initializer_list<Tuple> tuples)
{
    return evaluate(f, std::span<const Tuple>(tuples.begin(), tuples.size()));
}

/*======================================================================================================================
 * Builders
 *====================================================================================================================*/

/// Conjunction `t_i[A] = t_j[A]` over the attribute indices in `attrs`.
inline Conjunction agree_on(std::span<const std::size_t> attrs, std::size_t i, std::size_t j)
{
    Conjunction c;
    for (std::size_t a : attrs)
        c.push_back(Atom{Term::var(i, a), CmpOp::Eq, Term::var(j, a)});
    return c;
}

/// DNF of `t_i ≠ t_j`: one disequality disjunct per attribute.
inline DnfFormula tuples_differ(SchemaPtr schema, std::size_t tuple_vars, std::size_t i, std::size_t j)
{
    std::vector<Conjunction> ds;
    for (std::size_t a = 0; a != schema->size(); ++a)
        ds.push_back({Atom{Term::var(i, a), CmpOp::Ne, Term::var(j, a)}});
    return DnfFormula(std::move(schema), tuple_vars, std::move(ds));
}

/*======================================================================================================================
 * Printing
 *====================================================================================================================*/

inline std::string default_var_name(std::size_t i) { return "t" + std::to_string(i + 1); }

inline std::string to_string(const Term &t, const Schema &schema, std::span<const std::string> var_names = {})
{
    if (not t.is_var())
        return format_value(t.as_const());
    const Var &v = t.as_var();
    std::string name = v.tuple < var_names.size() ? var_names[v.tuple] : default_var_name(v.tuple);
    return name + "." + schema[v.attr].name;
}

inline std::string to_string(const Atom &a, const Schema &schema, std::span<const std::string> var_names = {})
{
    return to_string(a.lhs, schema, var_names) + " " + std::string(to_string(a.op)) + " " +
           to_string(a.rhs, schema, var_names);
}

/// Infix text, `AND` binding tighter than `OR`; `FALSE` for no disjuncts and `TRUE` for an empty disjunct.
inline std::string to_string(const DnfFormula &f, std::span<const std::string> var_names = {})
{
    if (f.is_false())
        return "FALSE";
    std::string out;
    for (std::size_t i = 0; i != f.width(); ++i) {
        if (i)
            out += " OR ";
        const auto &conj = f.disjuncts()[i];
        if (conj.empty()) {
            out += "TRUE";
            continue;
        }
        for (std::size_t j = 0; j != conj.size(); ++j) {
            if (j)
                out += " AND ";
            out += to_string(conj[j], f.schema(), var_names);
        }
    }
    return out;
}

}
