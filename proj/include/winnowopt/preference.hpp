#pragma once

#include <winnowopt/formula.hpp>
#include <winnowopt/solver.hpp>

#include <array>
#include <atomic>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace winnowopt {

enum class Property { Irreflexive, Asymmetric, Transitive, NegativelyTransitive, Connected };

inline constexpr std::array kAllProperties{Property::Irreflexive, Property::Asymmetric, Property::Transitive,
                                           Property::NegativelyTransitive, Property::Connected};

inline std::string_view to_string(Property p)
{
    switch (p) {
        case Property::Irreflexive: return "irreflexive";
        case Property::Asymmetric: return "asymmetric";
        case Property::Transitive: return "transitive";
        case Property::NegativelyTransitive: return "negatively_transitive";
        case Property::Connected: return "connected";
    }
    return "?";
}

namespace detail {

/// One verdict slot per property: -1 unknown, 0 false, 1 true.  Fills are idempotent, so racing writers agree.
struct PropertyCache
{
    std::array<std::atomic<signed char>, kAllProperties.size()> verdicts;

    PropertyCache() { for (auto &v : verdicts) v.store(-1, std::memory_order_relaxed); }
};

}

/// A preference relation `t1 ≻ t2 iff C(t1, t2)` defined by a DNF formula over two tuple variables.
class PreferenceRelation
{
    std::string name_;
    DnfFormula formula_;
    std::shared_ptr<detail::PropertyCache> cache_ = std::make_shared<detail::PropertyCache>();

    public:
    PreferenceRelation(std::string name, DnfFormula formula) : name_(std::move(name)), formula_(std::move(formula))
    {
        if (formula_.tuple_vars() != 2)
            throw SchemaError("preference formula must range over exactly two tuple variables");
    }

    const std::string & name() const { return name_; }
    const DnfFormula & formula() const { return formula_; }
    const Schema & schema() const { return formula_.schema(); }
    const SchemaPtr & schema_ptr() const { return formula_.schema_ptr(); }

    /// `better ≻ worse`, without re-validating the tuples against the schema.
    bool prefers(const Tuple &better, const Tuple &worse) const
    {
        const Tuple *pair[2] = {&better, &worse};
        return detail::evaluate_unchecked(formula_, pair);
    }

    detail::PropertyCache & cache() const { return *cache_; }

    friend bool operator==(const PreferenceRelation &a, const PreferenceRelation &b)
    {
        return a.name_ == b.name_ and a.formula_ == b.formula_;
    }
};

/// `C(t_i, t_j)` inside a formula over `n` tuple variables.
inline DnfFormula preferred(const PreferenceRelation &c, std::size_t i, std::size_t j, std::size_t n)
{
    return instantiate(c.formula(), {i, j}, n);
}

/// Factors whose conjunction is `t_i ∼ t_j`, i.e. `¬C(t_i, t_j)` and `¬C(t_j, t_i)`.
inline std::vector<DnfFormula> indifference_factors(const PreferenceRelation &c, std::size_t i, std::size_t j,
                                                    std::size_t n)
{
    return {negate(preferred(c, i, j, n)), negate(preferred(c, j, i, n))};
}

/// DNF of the indifference relation: neither tuple is preferred to the other.
inline DnfFormula indifference(const PreferenceRelation &c)
{
    auto f = indifference_factors(c, 0, 1, 2);
    return conjoin(f[0], f[1]);
}

/** Reduces a universally quantified order property to unsatisfiability of its negation and reports the tested
 * formula, with a counterexample when the property fails. */
inline CheckReport property_report(const PreferenceRelation &c, Property p)
{
    const SchemaPtr &schema = c.schema_ptr();
    switch (p) {
        case Property::Irreflexive:
            return check_unsat({instantiate(c.formula(), {0, 0}, 1)});
        case Property::Asymmetric:
            return check_unsat({preferred(c, 0, 1, 2), preferred(c, 1, 0, 2)});
        case Property::Transitive:
            return check_unsat({preferred(c, 0, 1, 3), preferred(c, 1, 2, 3), negate(preferred(c, 0, 2, 3))});
        case Property::NegativelyTransitive:
            return check_unsat({negate(preferred(c, 0, 1, 3)), negate(preferred(c, 1, 2, 3)), preferred(c, 0, 2, 3)});
        case Property::Connected: {
            auto f = indifference_factors(c, 0, 1, 2);
            f.push_back(tuples_differ(schema, 2, 0, 1));
            return check_unsat(std::move(f));
        }
    }
    throw Error("unknown property");
}

/// Decides `p` over all type-correct tuples; verdicts are cached on the relation.
inline bool check_property(const PreferenceRelation &c, Property p)
{
    auto &slot = c.cache().verdicts[static_cast<std::size_t>(p)];
    signed char v = slot.load(std::memory_order_acquire);
    if (v >= 0)
        return v == 1;
    bool holds = property_report(c, p).holds;
    slot.store(holds ? 1 : 0, std::memory_order_release);
    return holds;
}

/// Irreflexive and transitive (hence asymmetric).
inline bool is_strict_partial_order(const PreferenceRelation &c)
{
    return check_property(c, Property::Irreflexive) and check_property(c, Property::Transitive);
}

inline bool is_weak_order(const PreferenceRelation &c)
{
    return is_strict_partial_order(c) and check_property(c, Property::NegativelyTransitive);
}

inline bool is_total_order(const PreferenceRelation &c)
{
    return is_strict_partial_order(c) and check_property(c, Property::Connected);
}

}
