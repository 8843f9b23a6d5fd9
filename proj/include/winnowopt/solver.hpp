#pragma once

#include <winnowopt/formula.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace winnowopt {

/// Outcome of a satisfiability check.  When satisfiable, `witness` binds every tuple variable to a concrete tuple.
struct SatResult
{
    bool satisfiable = false;
    std::optional<std::vector<Tuple>> witness;

    explicit operator bool() const { return satisfiable; }
};

namespace detail {

class UnionFind
{
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;

    public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (rank_[a] < rank_[b])
            std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b])
            ++rank_[a];
    }
};

struct OrderEdge
{
    std::size_t to;
    bool strict;
};

/// Iterative Tarjan.  Components are numbered in reverse topological order: every edge u→v between different
/// components has `component[u] > component[v]`.
inline std::vector<std::size_t> strongly_connected_components(const std::vector<std::vector<OrderEdge>> &adj,
                                                              std::size_t &count)
{
    constexpr std::size_t unvisited = std::size_t(-1);
    const std::size_t n = adj.size();
    std::vector<std::size_t> index(n, unvisited), low(n, 0), component(n, unvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call; // (node, next edge)
    std::size_t next_index = 0;
    count = 0;

    for (std::size_t root = 0; root != n; ++root) {
        if (index[root] != unvisited)
            continue;
        call.emplace_back(root, 0);
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (not call.empty()) {
            auto &[node, edge] = call.back();
            if (edge < adj[node].size()) {
                std::size_t to = adj[node][edge++].to;
                if (index[to] == unvisited) {
                    index[to] = low[to] = next_index++;
                    stack.push_back(to);
                    on_stack[to] = true;
                    call.emplace_back(to, 0);
                } else if (on_stack[to]) {
                    low[node] = std::min(low[node], index[to]);
                }
                continue;
            }
            std::size_t done = node;
            call.pop_back();
            if (not call.empty())
                low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] == index[done]) {
                std::size_t member;
                do {
                    member = stack.back();
                    stack.pop_back();
                    on_stack[member] = false;
                    component[member] = count;
                } while (member != done);
                ++count;
            }
        }
    }
    return component;
}

inline void check_atom_sorts(const Atom &a, const Schema &schema, std::size_t tuple_vars)
{
    for (const Term *t : {&a.lhs, &a.rhs}) {
        if (not t->is_var())
            continue;
        if (t->as_var().attr >= schema.size() or t->as_var().tuple >= tuple_vars)
            throw SortError("atom refers to a variable outside the formula's context");
    }
    Sort ls = a.lhs.sort(schema), rs = a.rhs.sort(schema);
    if (ls != rs)
        throw SortError("ill-sorted atom: mixes D and Q terms");
    if (ls == Sort::D and is_order_op(a.op))
        throw SortError("ill-sorted atom: order comparison on the D sort");
}

}

/** Decides satisfiability of a conjunction of equality constraints over the infinite domain D and order constraints
 * over the dense unbounded order Q.
 *
 * The two sorts share no atoms, so each fragment is decided on its own.  D: union-find over variables and constants;
 * unsatisfiable iff a class holds two distinct constants or the two sides of a `!=`.  Q: a graph with a node per
 * variable and per constant, a non-strict edge for each `<=` (both directions for `=`), a strict edge for each `<`,
 * and strict edges chaining the constants by value; unsatisfiable iff a strongly connected component contains a
 * strict edge or the two sides of a `!=`.  Density and infinity make `!=` fail only where equality is forced.
 *
 * A witness is built from the topological order of the components: constants keep their value, every other
 * component takes a rational strictly between its largest predecessor and smallest constant successor. */
inline SatResult sat_conjunction(const Conjunction &conj, const Schema &schema, std::size_t tuple_vars)
{
    const std::size_t k = schema.size();
    const std::size_t var_nodes = tuple_vars * k;
    auto node_of = [&](const Var &v) { return v.tuple * k + v.attr; };

    std::vector<std::string> d_consts;
    std::unordered_map<std::string, std::size_t> d_const_node;
    std::map<Rational, std::size_t> q_const_node;
    for (const auto &a : conj) {
        detail::check_atom_sorts(a, schema, tuple_vars);
        for (const Term *t : {&a.lhs, &a.rhs}) {
            if (t->is_var())
                continue;
            const Value &v = t->as_const();
            if (sort_of(v) == Sort::D) {
                const auto &s = std::get<std::string>(v);
                if (d_const_node.emplace(s, var_nodes + d_consts.size()).second)
                    d_consts.push_back(s);
            } else {
                q_const_node.emplace(std::get<Rational>(v), 0);
            }
        }
    }
    {
        std::size_t next = var_nodes;
        for (auto &[value, node] : q_const_node)
            node = next++;
    }
    auto d_node = [&](const Term &t) {
        return t.is_var() ? node_of(t.as_var()) : d_const_node.at(std::get<std::string>(t.as_const()));
    };
    auto q_node = [&](const Term &t) {
        return t.is_var() ? node_of(t.as_var()) : q_const_node.at(std::get<Rational>(t.as_const()));
    };

    /*----- D fragment -----*/
    detail::UnionFind uf(var_nodes + d_consts.size());
    for (const auto &a : conj)
        if (a.lhs.sort(schema) == Sort::D and a.op == CmpOp::Eq)
            uf.unite(d_node(a.lhs), d_node(a.rhs));
    std::unordered_map<std::size_t, std::size_t> class_constant; // root -> constant index
    for (std::size_t c = 0; c != d_consts.size(); ++c) {
        auto [it, inserted] = class_constant.emplace(uf.find(var_nodes + c), c);
        if (not inserted)
            return {};
    }
    for (const auto &a : conj)
        if (a.lhs.sort(schema) == Sort::D and a.op == CmpOp::Ne and
            uf.find(d_node(a.lhs)) == uf.find(d_node(a.rhs)))
            return {};

    /*----- Q fragment -----*/
    const std::size_t q_nodes = var_nodes + q_const_node.size();
    std::vector<std::vector<detail::OrderEdge>> adj(q_nodes);
    std::vector<std::pair<std::size_t, std::size_t>> disequalities;
    for (const auto &a : conj) {
        if (a.lhs.sort(schema) != Sort::Q)
            continue;
        std::size_t l = q_node(a.lhs), r = q_node(a.rhs);
        switch (a.op) {
            case CmpOp::Eq: adj[l].push_back({r, false}); adj[r].push_back({l, false}); break;
            case CmpOp::Le: adj[l].push_back({r, false}); break;
            case CmpOp::Lt: adj[l].push_back({r, true}); break;
            case CmpOp::Ge: adj[r].push_back({l, false}); break;
            case CmpOp::Gt: adj[r].push_back({l, true}); break;
            case CmpOp::Ne: disequalities.emplace_back(l, r); break;
        }
    }
    std::vector<const Rational*> const_value(q_nodes, nullptr);
    {
        const Rational *prev_value = nullptr;
        std::size_t prev = 0;
        for (const auto &[value, node] : q_const_node) {
            const_value[node] = &value;
            if (prev_value)
                adj[prev].push_back({node, true});
            prev = node;
            prev_value = &value;
        }
    }

    std::size_t ncomp = 0;
    auto comp = detail::strongly_connected_components(adj, ncomp);
    for (std::size_t u = 0; u != q_nodes; ++u)
        for (const auto &e : adj[u])
            if (e.strict and comp[u] == comp[e.to])
                return {};
    for (auto [l, r] : disequalities)
        if (comp[l] == comp[r])
            return {};

    /*----- Witness: Q values -----*/
    std::vector<const Rational*> comp_const(ncomp, nullptr);
    std::vector<bool> needs_distinct(ncomp, false);
    std::vector<std::vector<std::size_t>> comp_succ(ncomp);
    for (std::size_t u = 0; u != q_nodes; ++u) {
        if (const_value[u]) {
            comp_const[comp[u]] = const_value[u];
            needs_distinct[comp[u]] = true;
        }
        for (const auto &e : adj[u])
            if (comp[u] != comp[e.to])
                comp_succ[comp[u]].push_back(comp[e.to]);
    }
    for (auto [l, r] : disequalities)
        needs_distinct[comp[l]] = needs_distinct[comp[r]] = true;

    // Smallest constant strictly below in the order, i.e. among descendants; successors have smaller numbers.
    std::vector<std::optional<Rational>> ceiling(ncomp);
    for (std::size_t c = 0; c != ncomp; ++c)
        for (std::size_t s : comp_succ[c]) {
            std::optional<Rational> cand = ceiling[s];
            if (comp_const[s] and (not cand or *comp_const[s] < *cand))
                cand = *comp_const[s];
            if (cand and (not ceiling[c] or *cand < *ceiling[c]))
                ceiling[c] = std::move(cand);
        }

    std::vector<std::optional<Rational>> lower(ncomp);
    std::vector<Rational> value(ncomp);
    std::set<Rational> used;
    for (std::size_t c = 0; c != ncomp; ++c)
        if (comp_const[c])
            used.insert(*comp_const[c]);
    for (std::size_t c = ncomp; c-- > 0;) { // topological order
        if (comp_const[c]) {
            value[c] = *comp_const[c];
        } else {
            const auto &lo = lower[c];
            const auto &hi = ceiling[c];
            Rational v;
            if (lo and hi) {
                v = (*lo + *hi) / 2;
                while (needs_distinct[c] and used.count(v))
                    v = (*lo + v) / 2;
            } else if (lo) {
                v = *lo + 1;
                while (needs_distinct[c] and used.count(v))
                    v += 1;
            } else if (hi) {
                v = *hi - 1;
                while (needs_distinct[c] and used.count(v))
                    v -= 1;
            } else {
                v = 0;
                while (needs_distinct[c] and used.count(v))
                    v += 1;
            }
            value[c] = v;
            if (needs_distinct[c])
                used.insert(v);
        }
        for (std::size_t s : comp_succ[c])
            if (not lower[s] or *lower[s] < value[c])
                lower[s] = value[c];
    }

    /*----- Witness: D values -----*/
    std::unordered_set<std::string> taken(d_consts.begin(), d_consts.end());
    std::unordered_map<std::size_t, std::string> fresh;
    std::size_t next_fresh = 0;
    auto d_value = [&](std::size_t node) -> std::string {
        std::size_t root = uf.find(node);
        if (auto it = class_constant.find(root); it != class_constant.end())
            return d_consts[it->second];
        auto [it, inserted] = fresh.try_emplace(root);
        if (inserted) {
            std::string sym;
            do
                sym = "_d" + std::to_string(next_fresh++);
            while (taken.count(sym));
            it->second = sym;
        }
        return it->second;
    };

    std::vector<Tuple> witness(tuple_vars, Tuple(k));
    for (std::size_t t = 0; t != tuple_vars; ++t)
        for (std::size_t a = 0; a != k; ++a) {
            std::size_t node = t * k + a;
            witness[t][a] = schema[a].sort == Sort::D ? make_d(d_value(node)) : make_q(value[comp[node]]);
        }
    return {true, std::move(witness)};
}

/// A DNF formula is satisfiable iff some disjunct is; returns the first satisfiable disjunct's result.
inline SatResult sat(const DnfFormula &f)
{
    for (const auto &conj : f.disjuncts())
        if (auto r = sat_conjunction(conj, f.schema(), f.tuple_vars()))
            return r;
    return {};
}

inline bool is_unsat(const DnfFormula &f) { return not sat(f).satisfiable; }

namespace detail {

class ProductSearch
{
    const Schema &schema_;
    std::size_t tuple_vars_;
    std::vector<const DnfFormula*> factors_;
    Conjunction acc_;
    std::vector<Atom> acc_keys_;

    bool implied(const Conjunction &c) const
    {
        return std::all_of(c.begin(), c.end(), [&](const Atom &a) {
            return std::find(acc_keys_.begin(), acc_keys_.end(), canonical(a)) != acc_keys_.end();
        });
    }

    public:
    ProductSearch(const Schema &schema, std::size_t tuple_vars, std::vector<const DnfFormula*> factors)
        : schema_(schema), tuple_vars_(tuple_vars), factors_(std::move(factors))
    { }

    SatResult run(std::size_t level)
    {
        if (level == factors_.size())
            return sat_conjunction(acc_, schema_, tuple_vars_);
        const auto &disjuncts = factors_[level]->disjuncts();
        for (const auto &d : disjuncts)
            if (implied(d))
                return run(level + 1);
        for (const auto &d : disjuncts) {
            const std::size_t mark = acc_.size();
            for (const auto &a : d) {
                Atom key = canonical(a);
                if (std::find(acc_keys_.begin(), acc_keys_.end(), key) == acc_keys_.end()) {
                    acc_.push_back(a);
                    acc_keys_.push_back(std::move(key));
                }
            }
            if (sat_conjunction(acc_, schema_, tuple_vars_))
                if (auto r = run(level + 1))
                    return r;
            acc_.resize(mark);
            acc_keys_.resize(mark);
        }
        return {};
    }
};

}

/** Satisfiability of the conjunction `factors[0] ∧ factors[1] ∧ …` without materializing its DNF: a depth-first
 * search that picks one disjunct per factor, prunes on unsatisfiable prefixes, and stops at the first model.  The
 * answer equals `sat(conjoin(…))`. */
inline SatResult sat_all(std::span<const DnfFormula> factors)
{
    if (factors.empty())
        throw SchemaError("sat_all needs at least one factor");
    for (const auto &f : factors)
        detail::check_compatible(factors.front(), f);
    std::vector<const DnfFormula*> live;
    for (const auto &f : factors) {
        if (f.is_false())
            return {};
        if (not f.is_true())
            live.push_back(&f);
    }
    std::stable_sort(live.begin(), live.end(), [](auto *a, auto *b) { return a->width() < b->width(); });
    return detail::ProductSearch(factors.front().schema(), factors.front().tuple_vars(), std::move(live)).run(0);
}

inline bool is_unsat_all(std::span<const DnfFormula> factors) { return not sat_all(factors).satisfiable; }

inline SatResult sat_all(std::initializer_list<DnfFormula> factors)
{
    return sat_all(std::span<const DnfFormula>(factors.begin(), factors.size()));
}

/// Logical equivalence of two formulas over the same context: both `f ∧ ¬g` and `g ∧ ¬f` are unsatisfiable.
inline bool equivalent(const DnfFormula &f, const DnfFormula &g)
{
    return not sat_all({f, negate(g)}).satisfiable and not sat_all({g, negate(f)}).satisfiable;
}

/** Result of a "this must be impossible" check: `holds` iff the conjunction of `formula` is unsatisfiable.  When it
 * fails, `witness` carries tuples satisfying the conjunction, i.e. a counterexample. */
struct CheckReport
{
    bool holds = false;
    std::vector<DnfFormula> formula;
    std::optional<std::vector<Tuple>> witness;

    explicit operator bool() const { return holds; }
};

inline CheckReport check_unsat(std::vector<DnfFormula> factors)
{
    SatResult r = sat_all(factors);
    return {not r.satisfiable, std::move(factors), std::move(r.witness)};
}

}
