#pragma once

#include <winnowopt/schema.hpp>
#include <winnowopt/formula.hpp>

#include <algorithm>
#include <vector>

namespace winnowopt {

/// Attribute-wise order: Q numerically, D lexicographically.  This is the canonical row order of every relation.
inline bool tuple_less(const Tuple &a, const Tuple &b)
{
    for (std::size_t i = 0; i != a.size() and i != b.size(); ++i)
        if (int c = compare_values(a[i], b[i]))
            return c < 0;
    return a.size() < b.size();
}

/** A finite, duplicate-free relation instance.  Tuples are kept in canonical order, so two relations are equal
 * iff they hold the same set of tuples. */
class Relation
{
    SchemaPtr schema_;
    std::vector<Tuple> tuples_;
    std::size_t dropped_duplicates_ = 0;

    public:
    explicit Relation(SchemaPtr schema, std::vector<Tuple> tuples = {})
        : schema_(std::move(schema)), tuples_(std::move(tuples))
    {
        if (not schema_)
            throw SchemaError("relation requires a schema");
        for (const auto &t : tuples_)
            schema_->check(t);
        std::sort(tuples_.begin(), tuples_.end(), tuple_less);
        auto last = std::unique(tuples_.begin(), tuples_.end());
        dropped_duplicates_ = std::size_t(tuples_.end() - last);
        tuples_.erase(last, tuples_.end());
    }

    const Schema & schema() const { return *schema_; }
    const SchemaPtr & schema_ptr() const { return schema_; }
    const std::vector<Tuple> & tuples() const { return tuples_; }
    std::size_t size() const { return tuples_.size(); }
    bool empty() const { return tuples_.empty(); }
    auto begin() const { return tuples_.begin(); }
    auto end() const { return tuples_.end(); }
    const Tuple & operator[](std::size_t i) const { return tuples_[i]; }

    /// Number of duplicate input rows removed at construction.
    std::size_t dropped_duplicates() const { return dropped_duplicates_; }

    bool contains(const Tuple &t) const { return std::binary_search(tuples_.begin(), tuples_.end(), t, tuple_less); }

    friend bool operator==(const Relation &a, const Relation &b)
    {
        return same_schema(a.schema_, b.schema_) and a.tuples_ == b.tuples_;
    }
};

inline bool is_subset(const Relation &sub, const Relation &super)
{
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end(), tuple_less);
}

}
