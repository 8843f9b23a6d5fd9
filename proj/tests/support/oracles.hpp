#pragma once

#include <winnowopt/winnowopt.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

/* Reference implementations that share no code with the library's decision procedures. */

namespace oracles {

using namespace winnowopt;

/*======================================================================================================================
 * Satisfiability by finite-model enumeration
 *====================================================================================================================*/

/** Decides a conjunction by enumerating every order type of its variables.  D variables take a constant of the
 * conjunction, a value already used, or one new value.  Q variables take an existing point (constant or value already
 * used), the midpoint of two adjacent points, or a point below or above all of them.  This visits every
 * configuration the atoms can distinguish. */
class ModelEnumerator
{
    const Schema &schema_;
    const Conjunction &atoms_;
    std::vector<Var> vars_;
    std::map<Var, Value> assignment_;
    std::vector<std::string> d_consts_;
    std::vector<Rational> q_consts_;
    std::size_t fresh_ = 0;

    static std::string raw(const Value &v) { return std::get<std::string>(v); }

    std::optional<Value> value(const Term &t) const
    {
        if (not t.is_var())
            return t.as_const();
        auto it = assignment_.find(t.as_var());
        if (it == assignment_.end())
            return std::nullopt;
        return it->second;
    }

    bool consistent() const
    {
        for (const auto &a : atoms_) {
            auto l = value(a.lhs), r = value(a.rhs);
            if (not l or not r)
                continue;
            int c;
            if (l->index() == 0)
                c = raw(*l) == raw(*r) ? 0 : 1;
            else
                c = std::get<Rational>(*l) < std::get<Rational>(*r) ? -1 : (std::get<Rational>(*l) == std::get<Rational>(*r) ? 0 : 1);
            bool ok;
            switch (a.op) {
                case CmpOp::Eq: ok = c == 0; break;
                case CmpOp::Ne: ok = c != 0; break;
                case CmpOp::Lt: ok = c < 0; break;
                case CmpOp::Gt: ok = c > 0; break;
                case CmpOp::Le: ok = c <= 0; break;
                default: ok = c >= 0; break;
            }
            if (not ok)
                return false;
        }
        return true;
    }

    std::vector<Value> candidates(Sort s)
    {
        std::vector<Value> out;
        if (s == Sort::D) {
            std::set<std::string> seen(d_consts_.begin(), d_consts_.end());
            for (const auto &[v, val] : assignment_)
                if (val.index() == 0)
                    seen.insert(raw(val));
            for (const auto &x : seen)
                out.push_back(make_d(x));
            out.push_back(make_d("#fresh" + std::to_string(fresh_)));
            return out;
        }
        std::set<Rational> points(q_consts_.begin(), q_consts_.end());
        for (const auto &[v, val] : assignment_)
            if (val.index() == 1)
                points.insert(std::get<Rational>(val));
        if (points.empty())
            return {make_q(Rational(0))};
        std::vector<Rational> sorted(points.begin(), points.end());
        out.push_back(make_q(Rational(sorted.front() - 1)));
        for (std::size_t i = 0; i != sorted.size(); ++i) {
            out.push_back(make_q(sorted[i]));
            if (i + 1 != sorted.size())
                out.push_back(make_q(Rational((sorted[i] + sorted[i + 1]) / 2)));
        }
        out.push_back(make_q(Rational(sorted.back() + 1)));
        return out;
    }

    bool search(std::size_t i)
    {
        if (not consistent())
            return false;
        if (i == vars_.size())
            return true;
        const Var v = vars_[i];
        for (const Value &c : candidates(schema_[v.attr].sort)) {
            assignment_[v] = c;
            const bool was_fresh = c.index() == 0 and raw(c).starts_with("#fresh");
            if (was_fresh)
                ++fresh_;
            if (search(i + 1))
                return true;
            if (was_fresh)
                --fresh_;
            assignment_.erase(v);
        }
        return false;
    }

    public:
    ModelEnumerator(const Schema &schema, const Conjunction &atoms) : schema_(schema), atoms_(atoms)
    {
        std::set<Var> vs;
        for (const auto &a : atoms)
            for (const Term *t : {&a.lhs, &a.rhs}) {
                if (t->is_var())
                    vs.insert(t->as_var());
                else if (t->as_const().index() == 0)
                    d_consts_.push_back(raw(t->as_const()));
                else
                    q_consts_.push_back(std::get<Rational>(t->as_const()));
            }
        vars_.assign(vs.begin(), vs.end());
    }

    bool satisfiable() { return search(0); }
};

inline bool enumerate_sat(const Schema &schema, const Conjunction &atoms)
{
    return ModelEnumerator(schema, atoms).satisfiable();
}

/// Every atom holds on the given tuples, checked with plain comparisons.
inline bool witness_satisfies(const Conjunction &atoms, const std::vector<Tuple> &tuples)
{
    for (const auto &a : atoms) {
        auto get = [&](const Term &t) -> Value {
            return t.is_var() ? tuples.at(t.as_var().tuple).at(t.as_var().attr) : t.as_const();
        };
        Value l = get(a.lhs), r = get(a.rhs);
        bool ok;
        if (l.index() == 0) {
            bool eq = std::get<std::string>(l) == std::get<std::string>(r);
            ok = a.op == CmpOp::Eq ? eq : not eq;
        } else {
            const Rational &x = std::get<Rational>(l), &y = std::get<Rational>(r);
            switch (a.op) {
                case CmpOp::Eq: ok = x == y; break;
                case CmpOp::Ne: ok = x != y; break;
                case CmpOp::Lt: ok = x < y; break;
                case CmpOp::Gt: ok = x > y; break;
                case CmpOp::Le: ok = x <= y; break;
                default: ok = x >= y; break;
            }
        }
        if (not ok)
            return false;
    }
    return true;
}

/*======================================================================================================================
 * Winnow and order properties on concrete instances
 *====================================================================================================================*/

/// Rows of `(ISBN, Price, Rating)` not dominated within their ISBN group: lower or equal price and higher or equal
/// rating, strictly better in at least one.
inline std::set<Tuple> pareto_by_group(const Relation &r)
{
    std::map<std::string, std::vector<const Tuple*>> groups;
    for (const auto &t : r)
        groups[std::get<std::string>(t[0])].push_back(&t);
    std::set<Tuple> out;
    for (const auto &[isbn, rows] : groups)
        for (const Tuple *t : rows) {
            const Rational &p = std::get<Rational>((*t)[1]), &q = std::get<Rational>((*t)[2]);
            bool dominated = false;
            for (const Tuple *u : rows) {
                const Rational &p2 = std::get<Rational>((*u)[1]), &q2 = std::get<Rational>((*u)[2]);
                if (p2 <= p and q2 >= q and (p2 < p or q2 > q)) { dominated = true; break; }
            }
            if (not dominated)
                out.insert(*t);
        }
    return out;
}

inline std::set<Tuple> as_set(const Relation &r) { return {r.begin(), r.end()}; }

inline bool irreflexive_on(const Relation &r, const PreferenceRelation &c)
{
    for (const auto &t : r)
        if (c.prefers(t, t))
            return false;
    return true;
}

inline bool transitive_on(const Relation &r, const PreferenceRelation &c)
{
    for (const auto &a : r)
        for (const auto &b : r)
            if (c.prefers(a, b))
                for (const auto &d : r)
                    if (c.prefers(b, d) and not c.prefers(a, d))
                        return false;
    return true;
}

inline bool negatively_transitive_on(const Relation &r, const PreferenceRelation &c)
{
    for (const auto &a : r)
        for (const auto &b : r)
            if (not c.prefers(a, b))
                for (const auto &d : r)
                    if (not c.prefers(b, d) and c.prefers(a, d))
                        return false;
    return true;
}

inline bool strict_partial_order_on(const Relation &r, const PreferenceRelation &c)
{
    return irreflexive_on(r, c) and transitive_on(r, c);
}

inline bool weak_order_on(const Relation &r, const PreferenceRelation &c)
{
    return strict_partial_order_on(r, c) and negatively_transitive_on(r, c);
}

/// Empty when `out` is a subset of `in` whose distinct tuples are pairwise indifferent; a description otherwise.
inline std::string winnow_invariant_violation(const Relation &in, const Relation &out, const PreferenceRelation &c)
{
    if (not is_subset(out, in))
        return "output is not a subset of the input";
    const DnfFormula ind = indifference(c);
    for (const auto &a : out)
        for (const auto &b : out)
            if (a != b and not evaluate(ind, {a, b}))
                return "output tuples " + format_tuple(out.schema(), a) + " and " + format_tuple(out.schema(), b) +
                       " are not indifferent";
    return "";
}

}
