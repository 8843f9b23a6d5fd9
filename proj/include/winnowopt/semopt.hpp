#pragma once

#include <winnowopt/dependency.hpp>
#include <winnowopt/plan.hpp>
#include <winnowopt/preference.hpp>
#include <winnowopt/solver.hpp>

#include <algorithm>
#include <span>
#include <vector>

namespace winnowopt {

/*======================================================================================================================
 * Single-winnow decisions under functional dependencies
 *====================================================================================================================*/

namespace detail {

inline void require_irreflexive(const PreferenceRelation &c)
{
    if (not check_property(c, Property::Irreflexive))
        throw PreconditionError("preference '" + c.name() + "' is not irreflexive");
}

inline void append(std::vector<DnfFormula> &to, std::vector<DnfFormula> from)
{
    for (auto &f : from)
        to.push_back(std::move(f));
}

}

/** Winnow by `c` is the identity on every instance satisfying `fds` iff no two tuples can both satisfy the
 * dependencies and stand in the preference relation: `φ_F(t1,t2) ∧ C(t1,t2)` is unsatisfiable.  A failing report's
 * witness is a two-tuple instance satisfying `fds` on which winnow removes a tuple. */
inline CheckReport redundancy_report(const PreferenceRelation &c, std::span<const FunctionalDependency> fds)
{
    auto factors = fd_set_factors(c.schema_ptr(), fds, 0, 1, 2);
    factors.push_back(c.formula());
    return check_unsat(std::move(factors));
}

inline bool is_redundant_winnow(const PreferenceRelation &c, std::span<const FunctionalDependency> fds)
{
    return redundancy_report(c, fds).holds;
}

/** An irreflexive preference is a weak order on every instance satisfying `fds` iff no three tuples pairwise
 * satisfying the dependencies have `t1 ≻ t2` with `t3` indifferent to both.  Throws `PreconditionError` for a
 * preference that is not irreflexive. */
inline CheckReport weak_order_relative_report(const PreferenceRelation &c, std::span<const FunctionalDependency> fds)
{
    detail::require_irreflexive(c);
    const SchemaPtr &schema = c.schema_ptr();
    std::vector<DnfFormula> factors;
    detail::append(factors, fd_set_factors(schema, fds, 0, 1, 3));
    detail::append(factors, fd_set_factors(schema, fds, 1, 2, 3));
    detail::append(factors, fd_set_factors(schema, fds, 0, 2, 3));
    factors.push_back(preferred(c, 0, 1, 3));
    detail::append(factors, indifference_factors(c, 0, 2, 3));
    detail::append(factors, indifference_factors(c, 1, 2, 3));
    return check_unsat(std::move(factors));
}

inline bool is_weak_order_relative(const PreferenceRelation &c, std::span<const FunctionalDependency> fds)
{
    return weak_order_relative_report(c, fds).holds;
}

/** An irreflexive preference is a strict partial order on every instance satisfying `fds` iff no three tuples
 * pairwise satisfying the dependencies break transitivity.  Weak-order relativity alone does not imply this: an
 * irreflexive preference can pass that check and still relate two tuples both ways. */
inline CheckReport strict_partial_order_relative_report(const PreferenceRelation &c,
                                                        std::span<const FunctionalDependency> fds)
{
    detail::require_irreflexive(c);
    const SchemaPtr &schema = c.schema_ptr();
    std::vector<DnfFormula> factors;
    detail::append(factors, fd_set_factors(schema, fds, 0, 1, 3));
    detail::append(factors, fd_set_factors(schema, fds, 1, 2, 3));
    detail::append(factors, fd_set_factors(schema, fds, 0, 2, 3));
    factors.push_back(preferred(c, 0, 1, 3));
    factors.push_back(preferred(c, 1, 2, 3));
    factors.push_back(negate(preferred(c, 0, 2, 3)));
    return check_unsat(std::move(factors));
}

inline bool is_strict_partial_order_relative(const PreferenceRelation &c, std::span<const FunctionalDependency> fds)
{
    return strict_partial_order_relative_report(c, fds).holds;
}

/** `f` holds in the output of winnow by an irreflexive `c` on every instance iff two indifferent tuples can never
 * violate `f`: `t1 ∼ t2 ∧ ¬φ_f(t1,t2)` is unsatisfiable. */
inline CheckReport propagation_report(const PreferenceRelation &c, const FunctionalDependency &f)
{
    detail::require_irreflexive(c);
    auto factors = indifference_factors(c, 0, 1, 2);
    factors.push_back(negate(fd_formula(c.schema_ptr(), f)));
    return check_unsat(std::move(factors));
}

inline bool fd_holds_after_winnow(const PreferenceRelation &c, const FunctionalDependency &f)
{
    return propagation_report(c, f).holds;
}

/** Dependencies `X -> A` with `|X| + 1 <= max_arity` and `A ∉ X` that hold in every winnow output, reduced to a cover:
 * a dependency entailed by the others that remain is dropped, largest left-hand sides first. */
inline FdSet generated_fds(const PreferenceRelation &c, std::size_t max_arity = 2)
{
    detail::require_irreflexive(c);
    const Schema &schema = c.schema();
    const std::size_t k = schema.size();

    FdSet candidates;
    std::vector<std::size_t> subset;
    auto emit = [&] {
        for (std::size_t a = 0; a != k; ++a) {
            if (std::find(subset.begin(), subset.end(), a) != subset.end())
                continue;
            std::vector<std::string> lhs;
            for (std::size_t i : subset)
                lhs.push_back(schema[i].name);
            FunctionalDependency f(std::move(lhs), {schema[a].name});
            if (fd_holds_after_winnow(c, f))
                candidates.push_back(std::move(f));
        }
    };
    // subsets in order of size, lexicographic within a size
    for (std::size_t size = 0; size + 1 <= max_arity and size < k; ++size) {
        subset.resize(size);
        for (std::size_t i = 0; i != size; ++i)
            subset[i] = i;
        for (;;) {
            emit();
            std::size_t i = size;
            while (i > 0 and subset[i - 1] == k - size + i - 1)
                --i;
            if (i == 0)
                break;
            ++subset[i - 1];
            for (std::size_t j = i; j != size; ++j)
                subset[j] = subset[j - 1] + 1;
        }
    }

    std::vector<bool> kept(candidates.size(), true);
    for (std::size_t i = candidates.size(); i-- > 0;) {
        std::vector<Cgd> others;
        for (std::size_t j = 0; j != candidates.size(); ++j)
            if (j != i and kept[j])
                others.push_back(fd_to_cgd(c.schema_ptr(), candidates[j]));
        if (cgd_entails(others, fd_to_cgd(c.schema_ptr(), candidates[i])))
            kept[i] = false;
    }
    FdSet cover;
    for (std::size_t i = 0; i != candidates.size(); ++i)
        if (kept[i])
            cover.push_back(candidates[i]);
    return cover;
}

/*======================================================================================================================
 * The same decisions for constraint-generating dependencies
 *====================================================================================================================*/

/// `∀t1,t2. t1 ∼ t2`: every pair of tuples is indifferent.
inline Cgd build_d2(const PreferenceRelation &c)
{
    return Cgd(DnfFormula::truth(c.schema_ptr(), 2),
               Denial{{disjoin(preferred(c, 0, 1, 2), preferred(c, 1, 0, 2))}});
}

/// `∀t1,t2,t3. ¬(t1 ≻ t2 ∧ t1 ∼ t3 ∧ t2 ∼ t3)`: no triple breaks the weak-order layering.
inline Cgd build_d3(const PreferenceRelation &c)
{
    std::vector<DnfFormula> factors{preferred(c, 0, 1, 3)};
    detail::append(factors, indifference_factors(c, 0, 2, 3));
    detail::append(factors, indifference_factors(c, 1, 2, 3));
    return Cgd(DnfFormula::truth(c.schema_ptr(), 3), Denial{std::move(factors)});
}

inline std::vector<Cgd> fds_as_cgds(const SchemaPtr &schema, std::span<const FunctionalDependency> fds)
{
    std::vector<Cgd> out;
    for (const auto &f : fds)
        out.push_back(fd_to_cgd(schema, f));
    return out;
}

inline bool is_redundant_winnow_cgd(const PreferenceRelation &c, std::span<const Cgd> premises)
{
    return cgd_entails(premises, build_d2(c));
}

inline bool is_weak_order_relative_cgd(const PreferenceRelation &c, std::span<const Cgd> premises)
{
    detail::require_irreflexive(c);
    return cgd_entails(premises, build_d3(c));
}

inline bool cgd_holds_after_winnow(const PreferenceRelation &c, const Cgd &f)
{
    detail::require_irreflexive(c);
    return cgd_entails({build_d2(c)}, f);
}

/*======================================================================================================================
 * Plan rewriting
 *====================================================================================================================*/

struct OptimizerOptions
{
    std::size_t max_generated_arity = 2; ///< bound on |X ∪ {A}| for dependencies generated by winnow
};

/// The optimizer's output: `annotated` is the input plan with every node's FD set and every winnow's annotation;
/// `optimized` is the executable plan with redundant winnows removed and algorithms chosen.
struct OptimizedPlan
{
    QueryPlan annotated;
    QueryPlan optimized;
};

namespace detail {

inline void add_fd(FdSet &set, const FunctionalDependency &f)
{
    if (std::find(set.begin(), set.end(), f) == set.end())
        set.push_back(f);
}

/// `A = c` atoms of a conjunctive selection make `A` constant in its output.
inline FdSet constants_fixed_by(const DnfFormula &condition)
{
    FdSet out;
    if (condition.width() != 1)
        return out;
    for (const auto &a : condition.disjuncts().front()) {
        if (a.op != CmpOp::Eq or a.lhs.is_var() == a.rhs.is_var())
            continue;
        const Var &v = a.lhs.is_var() ? a.lhs.as_var() : a.rhs.as_var();
        add_fd(out, FunctionalDependency({}, {condition.schema()[v.attr].name}));
    }
    return out;
}

inline OptimizedPlan optimize_node(const QueryPlan &plan, const OptimizerOptions &options)
{
    PlanNode annotated = plan.root();
    std::shared_ptr<const PlanNode> optimized_input;
    FdSet incoming;
    if (auto in = plan.input()) {
        OptimizedPlan sub = optimize_node(*in, options);
        annotated.input = sub.annotated.root_ptr();
        optimized_input = sub.optimized.root_ptr();
        incoming = *sub.annotated.root().fds;
    }

    FdSet outgoing;
    std::optional<QueryPlan> optimized;
    if (const auto *scan = std::get_if<ScanOp>(&annotated.op)) {
        for (const auto &f : scan->declared_fds)
            add_fd(outgoing, f);
    } else if (const auto *sel = std::get_if<SelectOp>(&annotated.op)) {
        outgoing = incoming;
        for (const auto &f : constants_fixed_by(sel->condition))
            add_fd(outgoing, f);
    } else if (std::holds_alternative<ProjectOp>(annotated.op)) {
        for (const auto &f : incoming) {
            const auto attrs = f.attributes();
            if (std::all_of(attrs.begin(), attrs.end(),
                            [&](const auto &a) { return annotated.schema->find(a).has_value(); }))
                add_fd(outgoing, f);
        }
    } else {
        auto &w = std::get<WinnowOp>(annotated.op);
        WinnowAnnotation note;
        note.redundant = is_redundant_winnow(w.preference, incoming);
        outgoing = incoming;
        if (note.redundant) {
            optimized = QueryPlan::from_node(*optimized_input);
        } else {
            const bool irreflexive = check_property(w.preference, Property::Irreflexive);
            note.weak_order_relative = irreflexive and is_weak_order_relative(w.preference, incoming);
            note.strict_partial_order_relative =
                irreflexive and is_strict_partial_order_relative(w.preference, incoming);
            if (note.strict_partial_order_relative and note.weak_order_relative)
                note.chosen = WinnowAlgorithm::Wwo;
            else if (note.strict_partial_order_relative)
                note.chosen = WinnowAlgorithm::Bnl;
            else
                note.chosen = WinnowAlgorithm::Naive;
            if (irreflexive)
                note.generated_fds = generated_fds(w.preference, options.max_generated_arity);
            for (const auto &f : note.generated_fds)
                add_fd(outgoing, f);
        }
        w.annotation = note;
    }

    annotated.fds = outgoing;
    if (not optimized) {
        PlanNode node = annotated;
        node.input = optimized_input;
        if (auto *w = std::get_if<WinnowOp>(&node.op))
            w->algorithm = w->annotation->chosen;
        optimized = QueryPlan::from_node(std::move(node));
    }
    return {QueryPlan::from_node(std::move(annotated)), std::move(*optimized)};
}

}

/** One bottom-up pass: derives every node's outgoing FD set (scan: declared; select `A = c`: adds `{} -> A`; project:
 * keeps dependencies inside the kept attributes; winnow: adds the dependencies it generates), removes winnows that are
 * redundant under their incoming dependencies, and picks an algorithm for the remaining ones: WWO when the preference
 * is both a strict partial order and a weak order relative to those dependencies, BNL when it is only a strict
 * partial order relative to them, the naive algorithm otherwise. */
inline OptimizedPlan optimize_with_trace(const QueryPlan &plan, const OptimizerOptions &options = {})
{
    return detail::optimize_node(plan, options);
}

inline QueryPlan optimize_plan(const QueryPlan &plan, const OptimizerOptions &options = {})
{
    return optimize_with_trace(plan, options).optimized;
}

}
