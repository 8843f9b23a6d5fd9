#pragma once

#include <winnowopt/formula.hpp>
#include <winnowopt/relation.hpp>
#include <winnowopt/solver.hpp>

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace winnowopt {

/*======================================================================================================================
 * Functional dependencies
 *====================================================================================================================*/

/// `X -> Y` over attribute names.  `X` may be empty (each attribute of `Y` is constant); `Y` may not.
class FunctionalDependency
{
    std::vector<std::string> lhs_;
    std::vector<std::string> rhs_;

    static std::vector<std::string> normalize(std::vector<std::string> attrs)
    {
        std::sort(attrs.begin(), attrs.end());
        attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
        return attrs;
    }

    public:
    FunctionalDependency(std::vector<std::string> lhs, std::vector<std::string> rhs)
        : lhs_(normalize(std::move(lhs))), rhs_(normalize(std::move(rhs)))
    {
        if (rhs_.empty())
            throw SchemaError("functional dependency needs a nonempty right-hand side");
    }

    const std::vector<std::string> & lhs() const { return lhs_; }
    const std::vector<std::string> & rhs() const { return rhs_; }

    /// Every attribute of X ∪ Y.
    std::vector<std::string> attributes() const
    {
        std::vector<std::string> all;
        std::set_union(lhs_.begin(), lhs_.end(), rhs_.begin(), rhs_.end(), std::back_inserter(all));
        return all;
    }

    bool is_trivial() const { return std::includes(lhs_.begin(), lhs_.end(), rhs_.begin(), rhs_.end()); }

    void check(const Schema &schema) const
    {
        for (const auto &a : attributes())
            if (not schema.find(a))
                throw SchemaError("functional dependency mentions unknown attribute '" + a + "'");
    }

    friend auto operator<=>(const FunctionalDependency&, const FunctionalDependency&) = default;
    friend bool operator==(const FunctionalDependency&, const FunctionalDependency&) = default;
};

using FdSet = std::vector<FunctionalDependency>;

inline std::string to_string(const FunctionalDependency &f)
{
    auto list = [](const std::vector<std::string> &attrs) {
        if (attrs.empty())
            return std::string("{}");
        std::string out;
        for (std::size_t i = 0; i != attrs.size(); ++i)
            out += (i ? ", " : "") + attrs[i];
        return out;
    };
    return list(f.lhs()) + " -> " + list(f.rhs());
}

inline std::size_t fd_arity(const FunctionalDependency &f) { return f.attributes().size(); }

inline std::size_t set_arity(std::span<const FunctionalDependency> fds)
{
    std::size_t k = 0;
    for (const auto &f : fds)
        k = std::max(k, fd_arity(f));
    return k;
}

inline std::vector<std::size_t> attribute_indices(const Schema &schema, const std::vector<std::string> &names)
{
    std::vector<std::size_t> idx;
    for (const auto &n : names)
        idx.push_back(schema.index_of(n));
    return idx;
}

/// `t_i[X] = t_j[X] ⇒ t_i[Y] = t_j[Y]` in DNF: one disjunct per X-disequality plus the conjunction of Y-equalities.
inline DnfFormula fd_formula(const SchemaPtr &schema, const FunctionalDependency &f, std::size_t i = 0,
                             std::size_t j = 1, std::size_t n = 2)
{
    f.check(*schema);
    std::vector<Conjunction> ds;
    for (std::size_t a : attribute_indices(*schema, f.lhs()))
        ds.push_back({Atom{Term::var(i, a), CmpOp::Ne, Term::var(j, a)}});
    auto rhs = attribute_indices(*schema, f.rhs());
    ds.push_back(agree_on(rhs, i, j));
    return DnfFormula(schema, n, std::move(ds));
}

/// One factor per dependency; their conjunction is the formula of the whole set.
inline std::vector<DnfFormula> fd_set_factors(const SchemaPtr &schema, std::span<const FunctionalDependency> fds,
                                              std::size_t i = 0, std::size_t j = 1, std::size_t n = 2)
{
    std::vector<DnfFormula> out;
    for (const auto &f : fds)
        out.push_back(fd_formula(schema, f, i, j, n));
    return out;
}

/// Conjunction of the dependency formulas; true for the empty set.
inline DnfFormula fd_set_formula(const SchemaPtr &schema, std::span<const FunctionalDependency> fds)
{
    DnfFormula acc = DnfFormula::truth(schema, 2);
    for (const auto &f : fds)
        acc = conjoin(acc, fd_formula(schema, f));
    return acc;
}

/*======================================================================================================================
 * Constraint-generating dependencies
 *====================================================================================================================*/

/// A head of the form `¬(f1 ∧ … ∧ fk)`, kept factored so its negation never has to be expanded.
struct Denial
{
    std::vector<DnfFormula> factors;

    friend bool operator==(const Denial&, const Denial&) = default;
};

/** `∀t1…tn. R(t1) ∧ … ∧ R(tn) ∧ body ⇒ head`.  The head is either a DNF formula or a denial; the denial form is what
 * the built-in dependencies derived from preference relations use. */
class Cgd
{
    DnfFormula body_;
    std::variant<DnfFormula, Denial> head_;

    public:
    Cgd(DnfFormula body, DnfFormula head) : body_(std::move(body)), head_(std::move(head))
    {
        detail::check_compatible(body_, std::get<DnfFormula>(head_));
    }

    Cgd(DnfFormula body, Denial head) : body_(std::move(body)), head_(std::move(head))
    {
        if (std::get<Denial>(head_).factors.empty())
            throw SchemaError("denial head needs at least one factor");
        for (const auto &f : std::get<Denial>(head_).factors)
            detail::check_compatible(body_, f);
    }

    std::size_t tuple_vars() const { return body_.tuple_vars(); }
    const Schema & schema() const { return body_.schema(); }
    const SchemaPtr & schema_ptr() const { return body_.schema_ptr(); }
    const DnfFormula & body() const { return body_; }
    const std::variant<DnfFormula, Denial> & head() const { return head_; }
    bool has_denial_head() const { return head_.index() == 1; }

    /// Factors whose conjunction is equivalent to `¬head`.
    std::vector<DnfFormula> negated_head() const
    {
        if (const auto *d = std::get_if<Denial>(&head_))
            return d->factors;
        return {negate(std::get<DnfFormula>(head_))};
    }

    /// The head as a single DNF formula; expands a denial head.
    DnfFormula head_dnf() const
    {
        if (const auto *f = std::get_if<DnfFormula>(&head_))
            return *f;
        const auto &factors = std::get<Denial>(head_).factors;
        DnfFormula acc = factors.front();
        for (std::size_t i = 1; i != factors.size(); ++i)
            acc = conjoin(acc, factors[i]);
        return negate(acc);
    }

    /// DNF of `body ⇒ head`.
    DnfFormula implication() const
    {
        DnfFormula out = negate(body_);
        if (const auto *f = std::get_if<DnfFormula>(&head_))
            return disjoin(out, *f);
        for (const auto &g : std::get<Denial>(head_).factors)
            out = disjoin(out, negate(g));
        return out;
    }

    /// `body ⇒ head` on tuples already known to conform to the schema.
    bool holds_on(std::span<const Tuple* const> tuples) const
    {
        if (not detail::evaluate_unchecked(body_, tuples))
            return true;
        if (const auto *f = std::get_if<DnfFormula>(&head_))
            return detail::evaluate_unchecked(*f, tuples);
        for (const auto &g : std::get<Denial>(head_).factors)
            if (not detail::evaluate_unchecked(g, tuples))
                return true;
        return false;
    }

    friend bool operator==(const Cgd&, const Cgd&) = default;
};

/// The FD as the two-variable CGD `t1[X] = t2[X] ⇒ t1[Y] = t2[Y]`.
inline Cgd fd_to_cgd(const SchemaPtr &schema, const FunctionalDependency &f)
{
    f.check(*schema);
    Conjunction body = agree_on(attribute_indices(*schema, f.lhs()), 0, 1);
    Conjunction head = agree_on(attribute_indices(*schema, f.rhs()), 0, 1);
    return Cgd(DnfFormula(schema, 2, {std::move(body)}), DnfFormula(schema, 2, {std::move(head)}));
}

/// Brute force over all n-tuples of rows, with repetition.
inline bool satisfies(const Relation &r, const Cgd &d)
{
    if (not same_schema(r.schema_ptr(), d.schema_ptr()))
        throw SchemaError("dependency and relation have different schemas");
    const std::size_t n = d.tuple_vars();
    if (r.empty())
        return true;
    std::vector<std::size_t> pick(n, 0);
    std::vector<const Tuple*> bound(n, &r[0]);
    for (;;) {
        if (not d.holds_on(bound))
            return false;
        std::size_t pos = 0;
        while (pos != n and ++pick[pos] == r.size()) {
            pick[pos] = 0;
            bound[pos] = &r[0];
            ++pos;
        }
        if (pos == n)
            return true;
        bound[pos] = &r[pick[pos]];
    }
}

inline bool satisfies(const Relation &r, const FunctionalDependency &f)
{
    f.check(r.schema());
    auto lhs = attribute_indices(r.schema(), f.lhs());
    auto rhs = attribute_indices(r.schema(), f.rhs());
    std::map<Tuple, Tuple, decltype(&tuple_less)> seen(tuple_less);
    for (const auto &t : r) {
        Tuple x, y;
        for (std::size_t a : lhs) x.push_back(t[a]);
        for (std::size_t a : rhs) y.push_back(t[a]);
        auto [it, inserted] = seen.emplace(std::move(x), y);
        if (not inserted and it->second != y)
            return false;
    }
    return true;
}

inline bool satisfies_all(const Relation &r, std::span<const FunctionalDependency> fds)
{
    return std::all_of(fds.begin(), fds.end(), [&](const auto &f) { return satisfies(r, f); });
}

/** Entailment by symmetrization: `F` entails `d` iff no assignment of d's tuple variables satisfies every
 * instantiation of every `f ∈ F` over those variables (all maps from f's variables, not only injective ones)
 * together with `body_d ∧ ¬head_d`.  A failing check's witness is a counterexample instance of at most n tuples. */
inline CheckReport entailment_report(std::span<const Cgd> premises, const Cgd &d)
{
    const std::size_t n = d.tuple_vars();
    std::vector<DnfFormula> factors;
    auto add = [&](DnfFormula f) {
        if (f.is_true())
            return;
        if (std::find(factors.begin(), factors.end(), f) == factors.end())
            factors.push_back(std::move(f));
    };
    for (const auto &f : premises) {
        if (not same_schema(f.schema_ptr(), d.schema_ptr()))
            throw SchemaError("entailment across different schemas");
        const DnfFormula impl = f.implication();
        const std::size_t m = f.tuple_vars();
        std::vector<std::size_t> sigma(m, 0);
        for (;;) {
            add(instantiate(impl, sigma, n));
            std::size_t pos = 0;
            while (pos != m and ++sigma[pos] == n)
                sigma[pos++] = 0;
            if (pos == m)
                break;
        }
    }
    add(d.body());
    for (auto &g : d.negated_head())
        add(std::move(g));
    if (factors.empty())
        factors.push_back(DnfFormula::truth(d.schema_ptr(), n));
    return check_unsat(std::move(factors));
}

inline bool cgd_entails(std::span<const Cgd> premises, const Cgd &d) { return entailment_report(premises, d).holds; }

inline bool cgd_entails(std::initializer_list<Cgd> premises, const Cgd &d)
{
    return cgd_entails(std::span<const Cgd>(premises.begin(), premises.size()), d);
}

}
