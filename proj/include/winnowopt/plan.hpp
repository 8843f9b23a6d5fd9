#pragma once

#include <winnowopt/dependency.hpp>
#include <winnowopt/preference.hpp>
#include <winnowopt/relation.hpp>
#include <winnowopt/winnow.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace winnowopt {

inline constexpr std::size_t kDefaultWindowSize = 16;

/// What the optimizer decided about one winnow occurrence.
struct WinnowAnnotation
{
    bool redundant = false;
    bool weak_order_relative = false;
    bool strict_partial_order_relative = false;
    WinnowAlgorithm chosen = WinnowAlgorithm::Naive;
    FdSet generated_fds;

    friend bool operator==(const WinnowAnnotation&, const WinnowAnnotation&) = default;
};

struct ScanOp
{
    std::string relation;
    FdSet declared_fds;
    std::vector<std::string> fd_names; ///< names the dependencies were declared under, if any

    friend bool operator==(const ScanOp&, const ScanOp&) = default;
};

struct SelectOp
{
    DnfFormula condition; ///< over one tuple variable of the input schema

    friend bool operator==(const SelectOp&, const SelectOp&) = default;
};

struct ProjectOp
{
    std::vector<std::string> attributes;

    friend bool operator==(const ProjectOp&, const ProjectOp&) = default;
};

struct WinnowOp
{
    PreferenceRelation preference;
    std::optional<WinnowAlgorithm> algorithm; ///< unset means the naive oracle
    std::size_t window_size = kDefaultWindowSize;
    std::optional<WinnowAnnotation> annotation;

    friend bool operator==(const WinnowOp&, const WinnowOp&) = default;
};

struct PlanNode
{
    using Op = std::variant<ScanOp, SelectOp, ProjectOp, WinnowOp>;

    Op op;
    std::shared_ptr<const PlanNode> input; ///< null exactly for scans
    SchemaPtr schema;                      ///< output schema
    std::optional<FdSet> fds;              ///< outgoing dependencies, once the optimizer has derived them

    friend bool operator==(const PlanNode &a, const PlanNode &b)
    {
        if (not (a.op == b.op and same_schema(a.schema, b.schema) and a.fds == b.fds))
            return false;
        if (bool(a.input) != bool(b.input))
            return false;
        return not a.input or *a.input == *b.input;
    }
};

/// An immutable operator tree.  Builders validate attribute references and schemas as the tree grows.
class QueryPlan
{
    std::shared_ptr<const PlanNode> root_;

    explicit QueryPlan(std::shared_ptr<const PlanNode> root) : root_(std::move(root)) { }

    public:
    static QueryPlan from_node(PlanNode node)
    {
        if (node.op.index() == 0 and node.input)
            throw PlanError("scan must be a leaf");
        if (node.op.index() != 0 and not node.input)
            throw PlanError("operator is missing its input");
        return QueryPlan(std::make_shared<const PlanNode>(std::move(node)));
    }

    static QueryPlan scan(std::string relation, SchemaPtr schema, FdSet declared = {},
                          std::vector<std::string> fd_names = {})
    {
        for (const auto &f : declared)
            f.check(*schema);
        return from_node({ScanOp{std::move(relation), std::move(declared), std::move(fd_names)}, nullptr,
                          std::move(schema), std::nullopt});
    }

    QueryPlan select(DnfFormula condition) const
    {
        if (condition.tuple_vars() != 1)
            throw PlanError("selection condition must range over one tuple variable");
        if (not same_schema(condition.schema_ptr(), schema()))
            throw PlanError("selection condition does not match the input schema");
        return from_node({SelectOp{std::move(condition)}, root_, schema(), std::nullopt});
    }

    QueryPlan project(std::vector<std::string> attributes) const
    {
        if (attributes.empty())
            throw PlanError("projection needs at least one attribute");
        SchemaPtr target;
        try {
            target = project_schema(*schema(), attributes);
        } catch (const Error &e) {
            throw PlanError(std::string("invalid projection: ") + e.what());
        }
        return from_node({ProjectOp{std::move(attributes)}, root_, std::move(target), std::nullopt});
    }

    QueryPlan winnow(PreferenceRelation preference, std::optional<WinnowAlgorithm> algorithm = std::nullopt,
                     std::size_t window_size = kDefaultWindowSize) const
    {
        if (not same_schema(preference.schema_ptr(), schema()))
            throw PlanError("preference '" + preference.name() + "' does not match the input schema");
        if (window_size < 1)
            throw PlanError("window size must be at least 1");
        return from_node({WinnowOp{std::move(preference), algorithm, window_size, std::nullopt}, root_, schema(),
                          std::nullopt});
    }

    const PlanNode & root() const { return *root_; }
    const std::shared_ptr<const PlanNode> & root_ptr() const { return root_; }
    const SchemaPtr & schema() const { return root_->schema; }

    std::optional<QueryPlan> input() const
    {
        if (root_->input)
            return QueryPlan(root_->input);
        return std::nullopt;
    }

    std::size_t depth() const { return root_->input ? 1 + QueryPlan(root_->input).depth() : 1; }

    friend bool operator==(const QueryPlan &a, const QueryPlan &b) { return *a.root_ == *b.root_; }
};

/// Applies `fn` to every winnow operator of the plan, rebuilding the affected nodes.
template<typename Fn>
QueryPlan map_winnows(const QueryPlan &plan, Fn &&fn)
{
    PlanNode node = plan.root();
    if (auto in = plan.input())
        node.input = map_winnows(*in, fn).root_ptr();
    if (auto *w = std::get_if<WinnowOp>(&node.op))
        fn(*w);
    return QueryPlan::from_node(std::move(node));
}

/*======================================================================================================================
 * Execution
 *====================================================================================================================*/

struct Catalog
{
    std::map<std::string, Relation> relations;

    const Relation & at(const std::string &name) const
    {
        auto it = relations.find(name);
        if (it == relations.end())
            throw DataError("unknown relation '" + name + "'");
        return it->second;
    }
};

struct ExecuteOptions
{
    std::optional<WinnowAlgorithm> algorithm;  ///< overrides every winnow node's algorithm
    std::optional<std::size_t> window_size;    ///< overrides every BNL window
    bool verify_declared_fds = false;          ///< check scanned relations against their declared FDs
    bool verify_wwo = false;                   ///< compare WWO results against the naive oracle
};

inline Relation execute(const QueryPlan &plan, const Catalog &catalog, const ExecuteOptions &options = {})
{
    const PlanNode &node = plan.root();
    return std::visit([&](const auto &op) -> Relation {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, ScanOp>) {
            const Relation &r = catalog.at(op.relation);
            if (not same_schema(r.schema_ptr(), node.schema))
                throw DataError("relation '" + op.relation + "' does not match the scanned schema");
            if (options.verify_declared_fds)
                for (const auto &f : op.declared_fds)
                    if (not satisfies(r, f))
                        throw DataError("relation '" + op.relation + "' violates declared FD " + to_string(f));
            return r;
        } else {
            Relation in = execute(*plan.input(), catalog, options);
            if constexpr (std::is_same_v<T, SelectOp>) {
                return select(in, op.condition);
            } else if constexpr (std::is_same_v<T, ProjectOp>) {
                return project(in, op.attributes, node.schema);
            } else {
                WinnowAlgorithm algorithm = options.algorithm.value_or(op.algorithm.value_or(WinnowAlgorithm::Naive));
                std::size_t window = options.window_size.value_or(op.window_size);
                Relation out = winnow(in, op.preference, algorithm, window);
                if (options.verify_wwo and
                    (algorithm == WinnowAlgorithm::Wwo or algorithm == WinnowAlgorithm::WwoTwoPass) and
                    out != winnow_naive(in, op.preference))
                    throw PreconditionError("preference '" + op.preference.name() +
                                            "' is not a weak order on this input; WWO result differs from winnow");
                return out;
            }
        }
    }, node.op);
}

}
