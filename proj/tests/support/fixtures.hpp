#pragma once

#include <winnowopt/winnowopt.hpp>

#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace winnowopt {

/// Readable failure messages for relation comparisons.
inline void PrintTo(const Relation &r, std::ostream *os)
{
    *os << "{";
    for (const auto &t : r)
        *os << " " << format_tuple(r.schema(), t);
    *os << " }";
}

}

namespace fixtures {

using namespace winnowopt;

inline const SchemaPtr & book_schema()
{
    static const SchemaPtr s = make_schema({{"ISBN", Sort::D}, {"Vendor", Sort::D}, {"Price", Sort::Q}});
    return s;
}

/// Book offers rated by customers; the schema of the two-criteria skyline preference.
inline const SchemaPtr & rated_schema()
{
    static const SchemaPtr s = make_schema({{"ISBN", Sort::D}, {"Price", Sort::Q}, {"Rating", Sort::Q}});
    return s;
}

inline Tuple book(const std::string &isbn, const std::string &vendor, const std::string &price)
{
    return {make_d(isbn), make_d(vendor), make_q(price)};
}

inline Relation book_relation()
{
    return Relation(book_schema(), {book("0679726691", "BooksForLess", "14.75"),
                                    book("0679726691", "LowestPrices", "13.50"),
                                    book("0679726691", "QualityBooks", "18.80"),
                                    book("0062059041", "BooksForLess", "7.30"),
                                    book("0374164770", "LowestPrices", "21.88")});
}

inline Relation book_winnow_result()
{
    return Relation(book_schema(), {book("0679726691", "LowestPrices", "13.50"),
                                    book("0062059041", "BooksForLess", "7.30"),
                                    book("0374164770", "LowestPrices", "21.88")});
}

inline PreferenceRelation pref(const std::string &name, const SchemaPtr &schema, const std::string &text)
{
    return PreferenceRelation(name, parse_condition(text, schema, {"t1", "t2"}));
}

inline DnfFormula cond(const SchemaPtr &schema, const std::string &text, std::vector<std::string> vars = {"t1", "t2"})
{
    return parse_condition(text, schema, std::move(vars));
}

/// Same book, cheaper.
inline PreferenceRelation c1() { return pref("C1", book_schema(), "t1.ISBN = t2.ISBN AND t1.Price < t2.Price"); }

/// Same book, no more expensive and no worse rated, strictly better in one of the two.
inline PreferenceRelation c2()
{
    return pref("C2", rated_schema(),
                "t1.ISBN = t2.ISBN AND t1.Price < t2.Price AND t1.Rating >= t2.Rating OR "
                "t1.ISBN = t2.ISBN AND t1.Price <= t2.Price AND t1.Rating > t2.Rating");
}

/// Cheaper regardless of the book: a weak order.
inline PreferenceRelation cheaper() { return pref("cheaper", book_schema(), "t1.Price < t2.Price"); }

/// Irreflexive but not transitive.
inline PreferenceRelation cross_cheaper()
{
    return pref("cross", book_schema(), "t1.ISBN != t2.ISBN AND t1.Price < t2.Price");
}

/// Reflexive, hence not a strict partial order.
inline PreferenceRelation not_dearer() { return pref("not_dearer", book_schema(), "t1.Price <= t2.Price"); }

inline FunctionalDependency fd(std::vector<std::string> lhs, std::vector<std::string> rhs)
{
    return FunctionalDependency(std::move(lhs), std::move(rhs));
}

/*======================================================================================================================
 * Random instances
 *====================================================================================================================*/

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng &rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

inline Rational small_rational(Rng &rng, long range = 10)
{
    return Rational(static_cast<long>(uniform(rng, static_cast<std::size_t>(2 * range))) , 2);
}

inline Value random_value(Rng &rng, Sort sort, std::size_t pool)
{
    if (sort == Sort::D)
        return make_d(std::string(1, char('a' + uniform(rng, pool))));
    return make_q(Rational(static_cast<long>(uniform(rng, 2 * pool)), 2));
}

inline Tuple random_tuple(Rng &rng, const Schema &schema, std::size_t pool)
{
    Tuple t;
    for (const auto &a : schema)
        t.push_back(random_value(rng, a.sort, pool));
    return t;
}

/// Makes every FD hold by chasing: when two rows agree on X but differ on A, every occurrence of the larger A value
/// in the column is replaced by the smaller one.  Each step shrinks a column's value set, so this terminates.
inline std::vector<Tuple> repair(std::vector<Tuple> rows, const Schema &schema, const FdSet &fds)
{
    auto violation = [&](std::size_t &col, Value &from, Value &to) {
        for (const auto &f : fds) {
            auto lhs = attribute_indices(schema, f.lhs());
            for (std::size_t a : attribute_indices(schema, f.rhs()))
                for (std::size_t i = 0; i != rows.size(); ++i)
                    for (std::size_t j = 0; j != i; ++j) {
                        bool agree = true;
                        for (std::size_t b : lhs)
                            agree = agree and rows[i][b] == rows[j][b];
                        if (agree and rows[i][a] != rows[j][a]) {
                            col = a;
                            from = std::max(rows[i][a], rows[j][a]);
                            to = std::min(rows[i][a], rows[j][a]);
                            return true;
                        }
                    }
        }
        return false;
    };
    std::size_t col;
    Value from, to;
    while (violation(col, from, to))
        for (auto &row : rows)
            if (row[col] == from)
                row[col] = to;
    return rows;
}

inline Relation random_relation(Rng &rng, const SchemaPtr &schema, std::size_t max_rows, std::size_t pool,
                                const FdSet &fds = {})
{
    std::vector<Tuple> rows;
    const std::size_t n = uniform(rng, max_rows + 1);
    for (std::size_t i = 0; i != n; ++i)
        rows.push_back(random_tuple(rng, *schema, pool));
    return Relation(schema, repair(std::move(rows), *schema, fds));
}

/// Random FD with `|X ∪ Y| <= max_arity` over the schema's attributes.
inline FunctionalDependency random_fd(Rng &rng, const Schema &schema, std::size_t max_arity)
{
    const std::size_t k = schema.size();
    const std::size_t arity = 1 + uniform(rng, std::min(max_arity, k));
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i != k; ++i)
        idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t lhs_size = uniform(rng, arity);
    std::vector<std::string> lhs, rhs;
    for (std::size_t i = 0; i != arity; ++i)
        (i < lhs_size ? lhs : rhs).push_back(schema[idx[i]].name);
    return FunctionalDependency(std::move(lhs), std::move(rhs));
}

inline FdSet random_fd_set(Rng &rng, const Schema &schema, std::size_t max_size, std::size_t max_arity)
{
    FdSet out;
    const std::size_t n = uniform(rng, max_size + 1);
    for (std::size_t i = 0; i != n; ++i)
        out.push_back(random_fd(rng, schema, max_arity));
    return out;
}

/// A random atom over `n` tuple variables; constants are drawn from a small pool so that collisions happen.
inline Atom random_atom(Rng &rng, const Schema &schema, std::size_t n, std::size_t const_pool = 3)
{
    for (;;) {
        const std::size_t a = uniform(rng, schema.size());
        const Sort s = schema[a].sort;
        Term lhs = Term::var(uniform(rng, n), a);
        Term rhs = Term::constant(make_d("?"));
        if (uniform(rng, 3) == 0) {
            rhs = Term::constant(random_value(rng, s, const_pool));
        } else {
            std::vector<std::size_t> same;
            for (std::size_t b = 0; b != schema.size(); ++b)
                if (schema[b].sort == s)
                    same.push_back(b);
            rhs = Term::var(uniform(rng, n), same[uniform(rng, same.size())]);
        }
        static constexpr CmpOp q_ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Gt, CmpOp::Le, CmpOp::Ge};
        const CmpOp op = s == Sort::D ? (uniform(rng, 2) ? CmpOp::Eq : CmpOp::Ne) : q_ops[uniform(rng, 6)];
        Literal lit = make_atom(schema, lhs, op, rhs);
        if (auto *atom = std::get_if<Atom>(&lit))
            return *atom;
    }
}

inline DnfFormula random_formula(Rng &rng, const SchemaPtr &schema, std::size_t n, std::size_t max_width,
                                 std::size_t max_span)
{
    std::vector<Conjunction> ds;
    const std::size_t w = uniform(rng, max_width + 1);
    for (std::size_t i = 0; i != w; ++i) {
        Conjunction c;
        const std::size_t s = uniform(rng, max_span + 1);
        for (std::size_t j = 0; j != s; ++j)
            c.push_back(random_atom(rng, *schema, n));
        ds.push_back(std::move(c));
    }
    return DnfFormula(schema, n, std::move(ds));
}

/// A random preference that is irreflexive by construction: every disjunct contains a strict comparison between the
/// same attribute of the two tuples.
inline PreferenceRelation random_irreflexive_preference(Rng &rng, const SchemaPtr &schema, std::size_t max_width = 2,
                                                        std::size_t max_span = 2)
{
    std::vector<std::size_t> q_attrs, all;
    for (std::size_t a = 0; a != schema->size(); ++a) {
        all.push_back(a);
        if ((*schema)[a].sort == Sort::Q)
            q_attrs.push_back(a);
    }
    std::vector<Conjunction> ds;
    const std::size_t w = 1 + uniform(rng, max_width);
    for (std::size_t i = 0; i != w; ++i) {
        Conjunction c;
        const std::size_t a = q_attrs[uniform(rng, q_attrs.size())];
        c.push_back(Atom{Term::var(0, a), uniform(rng, 2) ? CmpOp::Lt : CmpOp::Gt, Term::var(1, a)});
        const std::size_t s = uniform(rng, max_span + 1);
        for (std::size_t j = 0; j != s; ++j)
            c.push_back(random_atom(rng, *schema, 2));
        ds.push_back(std::move(c));
    }
    return PreferenceRelation("random", DnfFormula(schema, 2, std::move(ds)));
}

/// Random conjunction with at most 4 variables, 2 constants and 6 atoms over one sort.
inline Conjunction random_conjunction(Rng &rng, Sort sort, SchemaPtr &schema_out, std::size_t &vars_out)
{
    static const SchemaPtr q1 = make_schema({{"x", Sort::Q}});
    static const SchemaPtr q2 = make_schema({{"x", Sort::Q}, {"y", Sort::Q}});
    static const SchemaPtr d1 = make_schema({{"a", Sort::D}});
    static const SchemaPtr d2 = make_schema({{"a", Sort::D}, {"b", Sort::D}});
    const bool wide = uniform(rng, 2);
    schema_out = sort == Sort::Q ? (wide ? q2 : q1) : (wide ? d2 : d1);
    vars_out = wide ? 2 : 4;
    std::vector<Value> consts;
    const std::size_t nconst = uniform(rng, 3);
    for (std::size_t i = 0; i != nconst; ++i)
        consts.push_back(random_value(rng, sort, 3));
    Conjunction c;
    const std::size_t natoms = 1 + uniform(rng, 6);
    for (std::size_t i = 0; i != natoms; ++i) {
        Term lhs = Term::var(uniform(rng, vars_out), uniform(rng, schema_out->size()));
        Term rhs = (not consts.empty() and uniform(rng, 3) == 0)
                       ? Term::constant(consts[uniform(rng, consts.size())])
                       : Term::var(uniform(rng, vars_out), uniform(rng, schema_out->size()));
        static constexpr CmpOp q_ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Gt, CmpOp::Le, CmpOp::Ge};
        CmpOp op = sort == Sort::D ? (uniform(rng, 2) ? CmpOp::Eq : CmpOp::Ne) : q_ops[uniform(rng, 6)];
        Literal lit = make_atom(*schema_out, lhs, op, rhs);
        if (auto *a = std::get_if<Atom>(&lit))
            c.push_back(*a);
    }
    return c;
}

}
