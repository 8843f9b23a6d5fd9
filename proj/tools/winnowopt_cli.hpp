#pragma once

#include <winnowopt/winnowopt.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace winnowopt::cli {

enum ExitStatus : int { kSuccess = 0, kCheckFalse = 1, kUsage = 2, kData = 3 };

/// Raised for bad command-line arguments that CLI11 cannot catch itself, e.g. unknown workspace names.
struct UsageError : winnowopt::Error
{
    using Error::Error;
};

/*======================================================================================================================
 * Loading
 *====================================================================================================================*/

struct LoadedWorkspace
{
    Workspace ws;
    std::filesystem::path dir;
};

inline LoadedWorkspace load_workspace(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (not in)
        throw UsageError("cannot open workspace '" + path + "'");
    std::stringstream text;
    text << in.rdbuf();
    return {parse_workspace(text.str()), std::filesystem::path(path).parent_path()};
}

inline const PreferenceDecl & preference(const Workspace &ws, const std::string &name)
{
    if (const auto *p = ws.find_preference(name))
        return *p;
    throw UsageError("unknown preference '" + name + "'");
}

inline FdSet fds(const Workspace &ws, const std::vector<std::string> &names, const PreferenceDecl &pref)
{
    FdSet out;
    for (const auto &n : names) {
        const auto *f = ws.find_fd(n);
        if (not f)
            throw UsageError("unknown FD '" + n + "'");
        if (not same_schema(ws.find_schema(f->schema)->schema, pref.preference.schema_ptr()))
            throw UsageError("FD '" + n + "' is not over the schema of preference '" + pref.name() + "'");
        out.push_back(f->fd);
    }
    return out;
}

inline std::vector<Cgd> cgds(const Workspace &ws, const std::vector<std::string> &names, const PreferenceDecl &pref)
{
    std::vector<Cgd> out;
    for (const auto &n : names) {
        const auto *d = ws.find_cgd(n);
        if (not d)
            throw UsageError("unknown CGD '" + n + "'");
        if (not same_schema(d->cgd.schema_ptr(), pref.preference.schema_ptr()))
            throw UsageError("CGD '" + n + "' is not over the schema of preference '" + pref.name() + "'");
        out.push_back(d->cgd);
    }
    return out;
}

inline const QueryPlan & plan(const Workspace &ws, const std::string &name)
{
    if (const auto *p = ws.find_plan(name))
        return p->plan;
    throw UsageError("unknown plan '" + name + "'");
}

inline void collect_scans(const QueryPlan &p, std::vector<std::string> &out)
{
    if (const auto *s = std::get_if<ScanOp>(&p.root().op)) {
        if (std::find(out.begin(), out.end(), s->relation) == out.end())
            out.push_back(s->relation);
        return;
    }
    collect_scans(*p.input(), out);
}

inline Catalog load_catalog(const LoadedWorkspace &lw, const QueryPlan &p, std::ostream &err)
{
    std::vector<std::string> names;
    collect_scans(p, names);
    Catalog catalog;
    for (const auto &name : names) {
        const RelationDecl *r = lw.ws.find_relation(name);
        std::filesystem::path path(r->path);
        if (path.is_relative())
            path = lw.dir / path;
        CsvTable t = read_csv_file(path.string(), lw.ws.find_schema(r->schema)->schema);
        if (t.duplicates)
            err << "warning: relation '" << name << "': dropped " << t.duplicates << " duplicate row(s)\n";
        catalog.relations.emplace(name, std::move(t.relation));
    }
    return catalog;
}

/*======================================================================================================================
 * Reports
 *====================================================================================================================*/

inline void print_report(std::ostream &out, const std::string &verdict, bool yes, const CheckReport &report)
{
    out << verdict << ": " << (yes ? "yes" : "no") << "\n";
    out << "formula (" << (report.holds ? "unsatisfiable" : "satisfiable") << "):\n";
    for (std::size_t i = 0; i != report.formula.size(); ++i)
        out << "  " << (i ? "AND " : "    ") << "(" << to_string(report.formula[i]) << ")\n";
    if (report.witness) {
        const Schema &schema = report.formula.front().schema();
        out << "witness:\n";
        for (std::size_t i = 0; i != report.witness->size(); ++i)
            out << "  " << default_var_name(i) << " = " << format_tuple(schema, (*report.witness)[i]) << "\n";
    }
}

inline std::string join_fds(const FdSet &fds)
{
    if (fds.empty())
        return "(none)";
    std::string out;
    for (const auto &f : fds)
        out += (out.empty() ? "" : "; ") + to_string(f);
    return out;
}

inline std::string algorithm_label(WinnowAlgorithm a, std::size_t window)
{
    switch (a) {
        case WinnowAlgorithm::Naive: return "naive (nested loops)";
        case WinnowAlgorithm::Bnl: return "BNL (window " + std::to_string(window) + ")";
        case WinnowAlgorithm::Wwo: return "WWO (single pass)";
        case WinnowAlgorithm::WwoTwoPass: return "WWO (two passes)";
    }
    return "?";
}

inline std::string node_label(const PlanNode &node)
{
    return std::visit([](const auto &op) -> std::string {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, ScanOp>) {
            std::string out = "SCAN " + op.relation;
            for (std::size_t i = 0; i != op.fd_names.size(); ++i)
                out += (i ? ", " : " WITH ") + op.fd_names[i];
            return out;
        } else if constexpr (std::is_same_v<T, SelectOp>) {
            const std::string t[] = {"t"};
            return "SELECT[" + to_string(op.condition, t) + "]";
        } else if constexpr (std::is_same_v<T, ProjectOp>) {
            std::string out = "PROJECT[";
            for (std::size_t i = 0; i != op.attributes.size(); ++i)
                out += (i ? ", " : "") + op.attributes[i];
            return out + "]";
        } else {
            return "WINNOW[" + op.preference.name() + "]";
        }
    }, node.op);
}

inline void print_tree(std::ostream &out, const QueryPlan &plan, std::size_t indent)
{
    const PlanNode &node = plan.root();
    const std::string pad(indent, ' ');
    const auto *w = std::get_if<WinnowOp>(&node.op);
    const bool removed = w and w->annotation and w->annotation->redundant;
    if (removed)
        out << pad << "~~" << node_label(node) << "~~  (removed: redundant)\n";
    else
        out << pad << node_label(node) << "\n";
    if (node.fds)
        out << pad << "  fds: " << join_fds(*node.fds) << "\n";
    if (w and w->annotation) {
        const WinnowAnnotation &a = *w->annotation;
        out << pad << "  redundant: " << (a.redundant ? "yes" : "no") << "\n";
        if (not a.redundant) {
            out << pad << "  strict partial order relative: " << (a.strict_partial_order_relative ? "yes" : "no")
                << "\n";
            out << pad << "  weak order relative: " << (a.weak_order_relative ? "yes" : "no") << "\n";
            out << pad << "  algorithm: " << algorithm_label(w->algorithm.value_or(a.chosen), w->window_size) << "\n";
            out << pad << "  generated fds: " << join_fds(a.generated_fds) << "\n";
        }
    } else if (w) {
        out << pad << "  algorithm: " << algorithm_label(w->algorithm.value_or(WinnowAlgorithm::Naive), w->window_size)
            << "\n";
    }
    if (auto in = plan.input())
        print_tree(out, *in, indent + 2);
}

inline void explain(std::ostream &out, const OptimizedPlan &p)
{
    out << "original plan:\n";
    print_tree(out, p.annotated, 2);
    out << "optimized plan:\n";
    print_tree(out, p.optimized, 2);
}

/*======================================================================================================================
 * Benchmark families
 *====================================================================================================================*/

struct BenchFamily
{
    std::string name;
    PreferenceRelation preference;
    std::vector<WinnowAlgorithm> algorithms;
    std::function<Relation(std::size_t n, std::mt19937_64 &rng)> generate;
};

inline Rational random_rational(std::mt19937_64 &rng, std::uint64_t range)
{
    return Rational(static_cast<unsigned long>(rng() % range), 1);
}

inline BenchFamily bench_family(const std::string &name)
{
    using A = WinnowAlgorithm;
    if (name == "weak-order") {
        auto schema = make_schema({{"Id", Sort::D}, {"Score", Sort::Q}});
        PreferenceRelation c("score", parse_condition("t1.Score > t2.Score", schema, {"t1", "t2"}));
        return {name, c, {A::Naive, A::Bnl, A::Wwo, A::WwoTwoPass}, [schema](std::size_t n, std::mt19937_64 &rng) {
                    std::vector<Tuple> rows;
                    const std::uint64_t layers = std::max<std::uint64_t>(1, n / 10);
                    for (std::size_t i = 0; i != n; ++i)
                        rows.push_back({make_d("r" + std::to_string(i)), make_q(random_rational(rng, layers))});
                    return Relation(schema, std::move(rows));
                }};
    }
    if (name == "pareto-random") {
        auto schema = make_schema({{"ISBN", Sort::D}, {"Price", Sort::Q}, {"Rating", Sort::Q}});
        PreferenceRelation c("C2", parse_condition("t1.ISBN = t2.ISBN AND t1.Price < t2.Price AND t1.Rating >= "
                                                   "t2.Rating OR t1.ISBN = t2.ISBN AND t1.Price <= t2.Price AND "
                                                   "t1.Rating > t2.Rating",
                                                   schema, {"t1", "t2"}));
        return {name, c, {A::Naive, A::Bnl}, [schema](std::size_t n, std::mt19937_64 &rng) {
                    std::vector<Tuple> rows;
                    const std::uint64_t groups = std::max<std::uint64_t>(1, (n + 19) / 20);
                    for (std::size_t i = 0; i != n; ++i)
                        rows.push_back({make_d("isbn" + std::to_string(rng() % groups)),
                                        make_q(random_rational(rng, 100)), make_q(random_rational(rng, 10))});
                    return Relation(schema, std::move(rows));
                }};
    }
    if (name == "fd-constrained") {
        auto schema = make_schema({{"ISBN", Sort::D}, {"Vendor", Sort::D}, {"Price", Sort::Q}});
        PreferenceRelation c("C1", parse_condition("t1.ISBN = t2.ISBN AND t1.Price < t2.Price", schema,
                                                   {"t1", "t2"}));
        return {name, c, {A::Naive, A::Bnl, A::Wwo, A::WwoTwoPass}, [schema](std::size_t n, std::mt19937_64 &rng) {
                    std::vector<Tuple> rows;
                    for (std::size_t i = 0; i != n; ++i)
                        rows.push_back({make_d("0679726691"), make_d("v" + std::to_string(i)),
                                        make_q(random_rational(rng, std::max<std::uint64_t>(1, n / 4)))});
                    return Relation(schema, std::move(rows));
                }};
    }
    throw UsageError("unknown benchmark family '" + name + "' (expected weak-order, pareto-random or fd-constrained)");
}

struct BenchOptions
{
    std::string family = "weak-order";
    std::vector<std::size_t> sizes{0, 100, 1000};
    std::uint64_t seed = 42;
    std::size_t window = kDefaultWindowSize;
    std::size_t naive_limit = 5000;  ///< the naive algorithm is skipped above this size
    bool show_time = true;
};

/// One row per algorithm and size.  `agrees` compares each result with the naive result, or with BNL above the
/// naive limit.
inline void bench(std::ostream &out, const BenchOptions &opt)
{
    BenchFamily fam = bench_family(opt.family);
    out << std::left << std::setw(16) << "family" << std::right << std::setw(9) << "n" << "  " << std::left
        << std::setw(10) << "algorithm" << std::right << std::setw(14) << "comparisons" << std::setw(8) << "passes"
        << std::setw(9) << "result" << std::setw(8) << "agrees";
    if (opt.show_time)
        out << std::setw(12) << "time_ms";
    out << "\n";
    for (std::size_t n : opt.sizes) {
        std::mt19937_64 rng(opt.seed);
        Relation r = fam.generate(n, rng);
        std::optional<Relation> reference;
        for (WinnowAlgorithm a : fam.algorithms) {
            if (a == WinnowAlgorithm::Naive and r.size() > opt.naive_limit)
                continue;
            WinnowStats stats;
            auto start = std::chrono::steady_clock::now();
            Relation result = winnow(r, fam.preference, a, opt.window, &stats);
            double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            if (not reference)
                reference = result;
            out << std::left << std::setw(16) << fam.name << std::right << std::setw(9) << r.size() << "  "
                << std::left << std::setw(10) << to_string(a) << std::right << std::setw(14) << stats.comparisons
                << std::setw(8) << stats.passes << std::setw(9) << result.size() << std::setw(8)
                << (result == *reference ? "yes" : "NO");
            if (opt.show_time)
                out << std::setw(12) << std::fixed << std::setprecision(3) << ms;
            out << "\n";
        }
    }
}

/*======================================================================================================================
 * Entry point
 *====================================================================================================================*/

/// Runs one command; `args` excludes the program name.  Returns the exit status.
inline int run_cli(std::vector<std::string> args, std::ostream &out, std::ostream &err)
{
    CLI::App app("Preference queries with winnow: checks, optimization, evaluation", "winnowopt");
    app.require_subcommand(1);

    std::string workspace;
    bool print_normalized = false;
    auto *parse_cmd = app.add_subcommand("parse", "Check a workspace file for syntax and reference errors");
    parse_cmd->add_option("workspace", workspace, "workspace file (.pql)")->required();
    parse_cmd->add_flag("--print", print_normalized, "print the normalized workspace");

    std::string pref, fd_name, cgd_name, property_name;
    std::vector<std::string> fd_names, cgd_names;
    auto *check_cmd = app.add_subcommand("check", "Decide a property of a preference relation");
    check_cmd->require_subcommand(1);
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("workspace", workspace, "workspace file (.pql)")->required();
        sub->add_option("--pref", pref, "preference name")->required();
    };
    auto *redundant_cmd = check_cmd->add_subcommand("redundant", "Is winnow redundant under the given FDs or CGDs?");
    add_common(redundant_cmd);
    redundant_cmd->add_option("--fds", fd_names, "FD names")->delimiter(',');
    redundant_cmd->add_option("--cgds", cgd_names, "CGD names")->delimiter(',');
    auto *weak_cmd = check_cmd->add_subcommand("weak-order", "Is the preference a weak order relative to FDs or CGDs?");
    add_common(weak_cmd);
    weak_cmd->add_option("--fds", fd_names, "FD names")->delimiter(',');
    weak_cmd->add_option("--cgds", cgd_names, "CGD names")->delimiter(',');
    auto *propagate_cmd = check_cmd->add_subcommand("propagate", "Does an FD or CGD hold in every winnow output?");
    add_common(propagate_cmd);
    propagate_cmd->add_option("--fd", fd_name, "FD name");
    propagate_cmd->add_option("--cgd", cgd_name, "CGD name");
    auto *property_cmd = check_cmd->add_subcommand("property", "Order-theoretic property of the preference");
    add_common(property_cmd);
    property_cmd
        ->add_option("--property", property_name,
                     "irreflexive, asymmetric, transitive, negatively_transitive, connected, "
                     "strict_partial_order, weak_order or total_order")
        ->required();

    std::string plan_name, optimize = "on", algorithm_name, verify_fds = "on";
    std::size_t window = kDefaultWindowSize;
    std::size_t max_arity = 2;
    bool force = false;
    auto *run_cmd = app.add_subcommand("run", "Execute a plan and print the result as CSV");
    run_cmd->add_option("workspace", workspace, "workspace file (.pql)")->required();
    run_cmd->add_option("--plan", plan_name, "plan name")->required();
    run_cmd->add_option("--optimize", optimize, "run the optimizer first")->check(CLI::IsMember({"on", "off"}));
    run_cmd->add_option("--algorithm", algorithm_name, "force one winnow algorithm")
        ->check(CLI::IsMember({"naive", "bnl", "wwo", "wwo2"}));
    run_cmd->add_option("--window", window, "BNL window size")->check(CLI::PositiveNumber);
    run_cmd->add_flag("--force", force, "allow WWO without an established weak-order precondition");
    run_cmd->add_option("--verify-fds", verify_fds, "check base relations against their declared FDs")
        ->check(CLI::IsMember({"on", "off"}));
    run_cmd->add_option("--max-arity", max_arity, "arity bound for generated FDs")->check(CLI::PositiveNumber);

    auto *explain_cmd = app.add_subcommand("explain", "Show the original and optimized plan with annotations");
    explain_cmd->add_option("workspace", workspace, "workspace file (.pql)")->required();
    explain_cmd->add_option("--plan", plan_name, "plan name")->required();
    explain_cmd->add_option("--max-arity", max_arity, "arity bound for generated FDs")->check(CLI::PositiveNumber);

    BenchOptions bench_opts;
    std::optional<std::uint64_t> seed;
    bool no_time = false;
    auto *bench_cmd = app.add_subcommand("bench", "Compare winnow algorithms on generated instances");
    bench_cmd->add_option("--family", bench_opts.family, "weak-order, pareto-random or fd-constrained");
    bench_cmd->add_option("--sizes", bench_opts.sizes, "instance sizes")->delimiter(',');
    bench_cmd->add_option("--seed", seed, "random seed (default: $WINNOWOPT_SEED or 42)");
    bench_cmd->add_option("--window", bench_opts.window, "BNL window size")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--naive-limit", bench_opts.naive_limit, "largest size the naive algorithm runs on");
    bench_cmd->add_flag("--no-time", no_time, "omit wall-clock times");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (parse_cmd->parsed()) {
            LoadedWorkspace lw = load_workspace(workspace);
            if (print_normalized)
                out << print(lw.ws);
            else
                out << "OK: " << lw.ws.schemas.size() << " schemas, " << lw.ws.relations.size() << " relations, "
                    << lw.ws.preferences.size() << " preferences, " << lw.ws.fds.size() << " FDs, "
                    << lw.ws.cgds.size() << " CGDs, " << lw.ws.plans.size() << " plans\n";
            return kSuccess;
        }

        if (check_cmd->parsed()) {
            LoadedWorkspace lw = load_workspace(workspace);
            const PreferenceDecl &p = preference(lw.ws, pref);
            const PreferenceRelation &c = p.preference;
            if (redundant_cmd->parsed() or weak_cmd->parsed()) {
                const bool redundant = redundant_cmd->parsed();
                const std::string verdict = redundant ? "REDUNDANT" : "WEAK ORDER RELATIVE";
                if (not cgd_names.empty()) {
                    if (not fd_names.empty())
                        throw UsageError("give either --fds or --cgds, not both");
                    auto premises = cgds(lw.ws, cgd_names, p);
                    const Cgd target = redundant ? build_d2(c) : (detail::require_irreflexive(c), build_d3(c));
                    CheckReport r = entailment_report(premises, target);
                    print_report(out, verdict, r.holds, r);
                    return r.holds ? kSuccess : kCheckFalse;
                }
                FdSet f = fds(lw.ws, fd_names, p);
                CheckReport r = redundant ? redundancy_report(c, f) : weak_order_relative_report(c, f);
                print_report(out, verdict, r.holds, r);
                if (not redundant and r.holds and not is_strict_partial_order_relative(c, f))
                    out << "note: not a strict partial order on these instances, so the optimizer will not choose "
                           "WWO\n";
                return r.holds ? kSuccess : kCheckFalse;
            }
            if (propagate_cmd->parsed()) {
                if (fd_name.empty() == cgd_name.empty())
                    throw UsageError("give exactly one of --fd and --cgd");
                CheckReport r;
                if (not fd_name.empty()) {
                    FdSet f = fds(lw.ws, {fd_name}, p);
                    r = propagation_report(c, f.front());
                } else {
                    auto d = cgds(lw.ws, {cgd_name}, p);
                    detail::require_irreflexive(c);
                    r = entailment_report(std::vector<Cgd>{build_d2(c)}, d.front());
                }
                print_report(out, "HOLDS AFTER WINNOW", r.holds, r);
                return r.holds ? kSuccess : kCheckFalse;
            }
            bool holds = false;
            if (property_name == "strict_partial_order") {
                holds = is_strict_partial_order(c);
            } else if (property_name == "weak_order") {
                holds = is_weak_order(c);
            } else if (property_name == "total_order") {
                holds = is_total_order(c);
            } else {
                auto it = std::find_if(kAllProperties.begin(), kAllProperties.end(),
                                       [&](Property q) { return to_string(q) == property_name; });
                if (it == kAllProperties.end())
                    throw UsageError("unknown property '" + property_name + "'");
                CheckReport r = property_report(c, *it);
                std::string verdict = property_name;
                std::transform(verdict.begin(), verdict.end(), verdict.begin(), ::toupper);
                std::replace(verdict.begin(), verdict.end(), '_', ' ');
                print_report(out, verdict, r.holds, r);
                return r.holds ? kSuccess : kCheckFalse;
            }
            std::string verdict = property_name;
            std::transform(verdict.begin(), verdict.end(), verdict.begin(), ::toupper);
            std::replace(verdict.begin(), verdict.end(), '_', ' ');
            out << verdict << ": " << (holds ? "yes" : "no") << "\n";
            return holds ? kSuccess : kCheckFalse;
        }

        if (run_cmd->parsed()) {
            LoadedWorkspace lw = load_workspace(workspace);
            const QueryPlan &original = plan(lw.ws, plan_name);
            OptimizedPlan opt = optimize_with_trace(original, {max_arity});
            QueryPlan chosen = optimize == "on" ? opt.optimized : original;
            ExecuteOptions exec;
            exec.verify_declared_fds = verify_fds == "on";
            if (run_cmd->count("--window"))
                exec.window_size = window;
            if (not algorithm_name.empty()) {
                exec.algorithm = parse_algorithm(algorithm_name);
                bool wwo = *exec.algorithm == WinnowAlgorithm::Wwo or *exec.algorithm == WinnowAlgorithm::WwoTwoPass;
                if (wwo and not force) {
                    bool established = true;
                    map_winnows(opt.annotated, [&](const WinnowOp &w) {
                        if (not w.annotation->redundant and w.annotation->chosen != WinnowAlgorithm::Wwo)
                            established = false;
                    });
                    if (not established)
                        throw PreconditionError("WWO requires a preference that is a weak order relative to the "
                                                "input's FDs; use --force to run it anyway");
                }
            }
            Catalog catalog = load_catalog(lw, chosen, err);
            write_csv(out, execute(chosen, catalog, exec));
            return kSuccess;
        }

        if (explain_cmd->parsed()) {
            LoadedWorkspace lw = load_workspace(workspace);
            explain(out, optimize_with_trace(plan(lw.ws, plan_name), {max_arity}));
            return kSuccess;
        }

        if (bench_cmd->parsed()) {
            bench_opts.show_time = not no_time;
            if (seed) {
                bench_opts.seed = *seed;
            } else if (const char *env = std::getenv("WINNOWOPT_SEED")) {
                try {
                    bench_opts.seed = std::stoull(env);
                } catch (const std::exception&) {
                    throw UsageError(std::string("WINNOWOPT_SEED is not a number: ") + env);
                }
            }
            bench(out, bench_opts);
            return kSuccess;
        }
    } catch (const UsageError &e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError &e) {
        err << workspace << ":" << e.what() << "\n";
        return kUsage;
    } catch (const ReferenceError &e) {
        for (const auto &d : e.diagnostics)
            err << workspace << ":" << to_string(d) << "\n";
        return kUsage;
    } catch (const winnowopt::Error &e) {
        err << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}

}
