#pragma once

#include <winnowopt/preference.hpp>
#include <winnowopt/relation.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace winnowopt {

enum class WinnowAlgorithm { Naive, Bnl, Wwo, WwoTwoPass };

inline std::string_view to_string(WinnowAlgorithm a)
{
    switch (a) {
        case WinnowAlgorithm::Naive: return "naive";
        case WinnowAlgorithm::Bnl: return "bnl";
        case WinnowAlgorithm::Wwo: return "wwo";
        case WinnowAlgorithm::WwoTwoPass: return "wwo2";
    }
    return "?";
}

inline std::optional<WinnowAlgorithm> parse_algorithm(std::string_view s)
{
    for (auto a : {WinnowAlgorithm::Naive, WinnowAlgorithm::Bnl, WinnowAlgorithm::Wwo, WinnowAlgorithm::WwoTwoPass})
        if (s == to_string(a))
            return a;
    return std::nullopt;
}

/// Instrumentation: `comparisons` counts evaluations of the preference formula, `passes` counts scans of the input.
struct WinnowStats
{
    std::size_t comparisons = 0;
    std::size_t passes = 0;
};

namespace detail {

inline void check_winnow_input(const Relation &r, const PreferenceRelation &c)
{
    if (not same_schema(r.schema_ptr(), c.schema_ptr()))
        throw SchemaError("preference '" + c.name() + "' is defined over a different schema than its input");
}

class Counter
{
    const PreferenceRelation &pref_;
    WinnowStats local_;
    WinnowStats *out_;

    public:
    Counter(const PreferenceRelation &pref, WinnowStats *out) : pref_(pref), out_(out ? out : &local_)
    {
        *out_ = {};
    }

    bool operator()(const Tuple &better, const Tuple &worse)
    {
        ++out_->comparisons;
        return pref_.prefers(better, worse);
    }

    void pass() { ++out_->passes; }
};

}

/// `{t ∈ r | no t' ∈ r with t' ≻ t}` by the double loop; the reference for every other algorithm.
inline Relation winnow_naive(const Relation &r, const PreferenceRelation &c, WinnowStats *stats = nullptr)
{
    detail::check_winnow_input(r, c);
    detail::Counter prefers(c, stats);
    std::vector<Tuple> out;
    for (const auto &t : r) {
        prefers.pass();
        bool dominated = false;
        for (const auto &other : r)
            if (prefers(other, t)) { dominated = true; break; }
        if (not dominated)
            out.push_back(t);
    }
    return Relation(r.schema_ptr(), std::move(out));
}

/** Blocked nested loops with a window of `window_size` tuples and an overflow table.  Correct when the preference
 * restricted to `r` is a strict partial order.
 *
 * A window entry remembers the pass it entered and whether the overflow table was empty at that moment.  At the end
 * of a pass, entries that entered while the table was empty, or during an earlier pass, have been compared against
 * every surviving tuple and are emitted; the rest stay for the next pass over the table. */
inline Relation winnow_bnl(const Relation &r, const PreferenceRelation &c, std::size_t window_size,
                           WinnowStats *stats = nullptr)
{
    detail::check_winnow_input(r, c);
    if (window_size < 1)
        throw Error("BNL window size must be at least 1");
    detail::Counter prefers(c, stats);

    struct Entry
    {
        const Tuple *tuple;
        std::size_t pass;
        bool table_was_empty;
    };

    std::vector<const Tuple*> input;
    input.reserve(r.size());
    for (const auto &t : r)
        input.push_back(&t);

    std::vector<Entry> window;
    std::vector<Tuple> out;
    std::vector<bool> beaten;
    for (std::size_t pass = 1; not input.empty(); ++pass) {
        prefers.pass();
        std::vector<const Tuple*> table;
        for (const Tuple *t : input) {
            bool dominated = false;
            bool dominates_some = false;
            beaten.assign(window.size(), false);
            for (std::size_t i = 0; i != window.size(); ++i) {
                if (prefers(*window[i].tuple, *t)) { dominated = true; break; }
                if (prefers(*t, *window[i].tuple)) { beaten[i] = true; dominates_some = true; }
            }
            if (dominated)
                continue;
            if (dominates_some) {
                std::size_t keep = 0;
                for (std::size_t i = 0; i != window.size(); ++i)
                    if (not beaten[i])
                        window[keep++] = window[i];
                window.resize(keep);
                window.push_back({t, pass, table.empty()});
            } else if (window.size() < window_size) {
                window.push_back({t, pass, table.empty()});
            } else {
                table.push_back(t);
            }
        }
        std::vector<Entry> retained;
        for (const auto &e : window) {
            if (e.table_was_empty or e.pass < pass)
                out.push_back(*e.tuple);
            else
                retained.push_back(e);
        }
        window = std::move(retained);
        input = std::move(table);
    }
    return Relation(r.schema_ptr(), std::move(out));
}

/** Single-pass winnow for weak orders: keep one `top` tuple of the best indifference class seen so far and the bucket
 * of tuples indifferent to it.  At most two formula evaluations per tuple after the first.  The weak-order
 * precondition is the caller's responsibility and is not checked. */
inline Relation winnow_wwo(const Relation &r, const PreferenceRelation &c, WinnowStats *stats = nullptr)
{
    detail::check_winnow_input(r, c);
    detail::Counter prefers(c, stats);
    if (r.empty())
        return Relation(r.schema_ptr());
    prefers.pass();
    auto it = r.begin();
    const Tuple *top = &*it;
    std::vector<const Tuple*> bucket{top};
    for (++it; it != r.end(); ++it) {
        if (prefers(*top, *it))
            continue;
        if (prefers(*it, *top)) {
            top = &*it;
            bucket.assign(1, top);
        } else {
            bucket.push_back(&*it);
        }
    }
    std::vector<Tuple> out;
    out.reserve(bucket.size());
    for (const Tuple *t : bucket)
        out.push_back(*t);
    return Relation(r.schema_ptr(), std::move(out));
}

/** Constant-memory variant of `winnow_wwo`: the first pass finds a tuple of the top class, the second selects every
 * tuple it does not dominate.  Nothing dominates the top tuple of a weak order, so one evaluation per tuple decides
 * indifference in the second pass. */
inline Relation winnow_wwo_two_pass(const Relation &r, const PreferenceRelation &c, WinnowStats *stats = nullptr)
{
    detail::check_winnow_input(r, c);
    detail::Counter prefers(c, stats);
    if (r.empty())
        return Relation(r.schema_ptr());
    prefers.pass();
    auto it = r.begin();
    const Tuple *top = &*it;
    for (++it; it != r.end(); ++it)
        if (not prefers(*top, *it) and prefers(*it, *top))
            top = &*it;
    prefers.pass();
    std::vector<Tuple> out;
    for (const auto &t : r)
        if (not prefers(*top, t))
            out.push_back(t);
    return Relation(r.schema_ptr(), std::move(out));
}

inline Relation winnow(const Relation &r, const PreferenceRelation &c, WinnowAlgorithm algorithm,
                       std::size_t window_size = 16, WinnowStats *stats = nullptr)
{
    switch (algorithm) {
        case WinnowAlgorithm::Naive: return winnow_naive(r, c, stats);
        case WinnowAlgorithm::Bnl: return winnow_bnl(r, c, window_size, stats);
        case WinnowAlgorithm::Wwo: return winnow_wwo(r, c, stats);
        case WinnowAlgorithm::WwoTwoPass: return winnow_wwo_two_pass(r, c, stats);
    }
    throw Error("unknown winnow algorithm");
}

/*======================================================================================================================
 * Selection and projection
 *====================================================================================================================*/

/// Rows satisfying a one-variable condition over the relation's schema.
inline Relation select(const Relation &r, const DnfFormula &condition)
{
    if (condition.tuple_vars() != 1)
        throw SchemaError("selection condition must range over one tuple variable");
    if (not same_schema(r.schema_ptr(), condition.schema_ptr()))
        throw SchemaError("selection condition is over a different schema");
    std::vector<Tuple> out;
    for (const auto &t : r) {
        const Tuple *bound[1] = {&t};
        if (detail::evaluate_unchecked(condition, bound))
            out.push_back(t);
    }
    return Relation(r.schema_ptr(), std::move(out));
}

inline SchemaPtr project_schema(const Schema &schema, std::span<const std::string> attrs)
{
    std::vector<Attribute> out;
    for (const auto &a : attrs)
        out.push_back(schema[schema.index_of(a)]);
    return make_schema(std::move(out));
}

/// Keeps the named attributes in the given order; duplicates collapse.
inline Relation project(const Relation &r, std::span<const std::string> attrs, SchemaPtr target = nullptr)
{
    if (not target)
        target = project_schema(r.schema(), attrs);
    std::vector<std::size_t> idx;
    for (const auto &a : attrs)
        idx.push_back(r.schema().index_of(a));
    std::vector<Tuple> out;
    out.reserve(r.size());
    for (const auto &t : r) {
        Tuple p;
        p.reserve(idx.size());
        for (std::size_t i : idx)
            p.push_back(t[i]);
        out.push_back(std::move(p));
    }
    return Relation(std::move(target), std::move(out));
}

}
