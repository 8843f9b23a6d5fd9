#pragma once

#include <winnowopt/dependency.hpp>
#include <winnowopt/plan.hpp>
#include <winnowopt/preference.hpp>

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

/* Workspace text format (`.pql`).  Keywords are case-insensitive, names are case-sensitive; `#` and `--` start
 * comments; a statement may end with `;`.
 *
 *   SCHEMA Book(ISBN: D, Vendor: D, Price: Q)
 *   RELATION Book ON Book FROM "book.csv"
 *   PREFER C1 ON Book(t1, t2) WHEN t1.ISBN = t2.ISBN AND t1.Price < t2.Price
 *   FD f1 ON Book: ISBN -> Price
 *   FD f2 ON Book: {} -> ISBN
 *   CGD d ON Book(t1, t2): t1.ISBN = t2.ISBN => t1.Price = t2.Price
 *   PLAN p = WINNOW[C1](SELECT[t.ISBN = 0679726691](SCAN Book WITH f1))
 *
 * Conditions combine atoms with AND, OR, NOT and parentheses and are normalized to DNF.  A bare number or word
 * compared with a D-term is read as a D-literal. */

namespace winnowopt {

struct ParseError : Error
{
    std::size_t line;
    std::size_t column;
    std::string message;
    std::string token;

    ParseError(std::size_t line, std::size_t column, std::string message, std::string token)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message +
                (token.empty() ? "" : " at '" + token + "'")),
          line(line), column(column), message(std::move(message)), token(std::move(token))
    { }
};

struct Diagnostic
{
    std::size_t line;
    std::size_t column;
    std::string message;
};

inline std::string to_string(const Diagnostic &d)
{
    return std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + d.message;
}

/// Every unresolved name, duplicate declaration and ill-sorted atom of a syntactically valid workspace.
struct ReferenceError : Error
{
    std::vector<Diagnostic> diagnostics;

    explicit ReferenceError(std::vector<Diagnostic> diags) : Error(summary(diags)), diagnostics(std::move(diags)) { }

    private:
    static std::string summary(const std::vector<Diagnostic> &diags)
    {
        std::string out;
        for (const auto &d : diags)
            out += (out.empty() ? "" : "\n") + to_string(d);
        return out;
    }
};

struct ParseOptions
{
    std::size_t max_depth = 256;     ///< nesting limit for parentheses, NOT and plan operators
    std::size_t max_width = 65536;   ///< a condition whose DNF exceeds this many disjuncts is rejected
    std::size_t warn_width = 1024;   ///< a warning is reported above this many disjuncts
};

/*======================================================================================================================
 * Workspace
 *====================================================================================================================*/

struct SchemaDecl
{
    std::string name;
    SchemaPtr schema;

    friend bool operator==(const SchemaDecl &a, const SchemaDecl &b)
    {
        return a.name == b.name and same_schema(a.schema, b.schema);
    }
};

struct RelationDecl
{
    std::string name;
    std::string schema;
    std::string path;

    friend bool operator==(const RelationDecl&, const RelationDecl&) = default;
};

struct PreferenceDecl
{
    std::string schema;
    std::vector<std::string> vars;
    PreferenceRelation preference;

    const std::string & name() const { return preference.name(); }

    friend bool operator==(const PreferenceDecl&, const PreferenceDecl&) = default;
};

struct FdDecl
{
    std::string name;
    std::string schema;
    FunctionalDependency fd;

    friend bool operator==(const FdDecl&, const FdDecl&) = default;
};

struct CgdDecl
{
    std::string name;
    std::string schema;
    std::vector<std::string> vars;
    Cgd cgd;

    friend bool operator==(const CgdDecl&, const CgdDecl&) = default;
};

struct PlanDecl
{
    std::string name;
    QueryPlan plan;

    friend bool operator==(const PlanDecl&, const PlanDecl&) = default;
};

namespace detail {

template<typename T>
const T * find_named(const std::vector<T> &decls, std::string_view name)
{
    for (const auto &d : decls) {
        if constexpr (requires { d.name(); }) {
            if (d.name() == name)
                return &d;
        } else if (d.name == name) {
            return &d;
        }
    }
    return nullptr;
}

}

/// Parsed declarations, one list per category in declaration order.
struct Workspace
{
    std::vector<SchemaDecl> schemas;
    std::vector<RelationDecl> relations;
    std::vector<PreferenceDecl> preferences;
    std::vector<FdDecl> fds;
    std::vector<CgdDecl> cgds;
    std::vector<PlanDecl> plans;

    const SchemaDecl * find_schema(std::string_view n) const { return detail::find_named(schemas, n); }
    const RelationDecl * find_relation(std::string_view n) const { return detail::find_named(relations, n); }
    const PreferenceDecl * find_preference(std::string_view n) const { return detail::find_named(preferences, n); }
    const FdDecl * find_fd(std::string_view n) const { return detail::find_named(fds, n); }
    const CgdDecl * find_cgd(std::string_view n) const { return detail::find_named(cgds, n); }
    const PlanDecl * find_plan(std::string_view n) const { return detail::find_named(plans, n); }

    friend bool operator==(const Workspace&, const Workspace&) = default;
};

/*======================================================================================================================
 * Lexer
 *====================================================================================================================*/

namespace detail {

enum class TokKind { Ident, Number, Word, String, Punct, End };

struct Token
{
    TokKind kind = TokKind::End;
    std::string text;  ///< identifier, literal value, or punctuation
    std::string raw;   ///< source spelling
    std::size_t line = 1;
    std::size_t column = 1;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) or c == '_' or (c & 0x80); }
inline bool ident_char(char c) { return ident_start(c) or std::isdigit(static_cast<unsigned char>(c)); }
inline bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

inline bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() and std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
        return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
    });
}

class Lexer
{
    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    std::optional<Token> peeked_;

    char at(std::size_t off = 0) const { return pos_ + off < src_.size() ? src_[pos_ + off] : '\0'; }
    bool done(std::size_t off = 0) const { return pos_ + off >= src_.size(); }

    void advance()
    {
        if (src_[pos_] == '\n') { ++line_; col_ = 1; }
        else ++col_;
        ++pos_;
    }

    void skip_space()
    {
        while (not done()) {
            char c = at();
            if (c == ' ' or c == '\t' or c == '\r' or c == '\n') {
                advance();
            } else if (c == '#' or (c == '-' and at(1) == '-')) {
                while (not done() and at() != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(std::size_t line, std::size_t col, std::string msg, std::string tok) const
    {
        throw ParseError(line, col, std::move(msg), std::move(tok));
    }

    Token lex()
    {
        skip_space();
        Token t;
        t.line = line_;
        t.column = col_;
        if (done())
            return t;
        const std::size_t start = pos_;
        char c = at();
        if (ident_start(c)) {
            while (not done() and ident_char(at()))
                advance();
            t.kind = TokKind::Ident;
            t.text = t.raw = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        if (is_digit(c) or (c == '-' and is_digit(at(1)))) {
            advance();
            while (not done() and is_digit(at()))
                advance();
            if (at() == '.' and is_digit(at(1))) {
                advance();
                while (not done() and is_digit(at()))
                    advance();
            } else if (at() == '/' and is_digit(at(1))) {
                advance();
                while (not done() and is_digit(at()))
                    advance();
            }
            t.kind = TokKind::Number;
            if (not done() and ident_char(at())) {
                while (not done() and ident_char(at()))
                    advance();
                t.kind = TokKind::Word;
            }
            t.text = t.raw = std::string(src_.substr(start, pos_ - start));
            if (t.kind == TokKind::Number) {
                try {
                    (void) parse_rational(t.text);
                } catch (const DataError &e) {
                    fail(t.line, t.column, e.what(), t.raw);
                }
            }
            return t;
        }
        if (c == '"') {
            advance();
            std::string value;
            for (;;) {
                if (done() or at() == '\n')
                    fail(t.line, t.column, "unterminated string literal", "\"");
                char d = at();
                advance();
                if (d == '"')
                    break;
                if (d == '\\') {
                    if (done())
                        fail(t.line, t.column, "unterminated string literal", "\"");
                    d = at();
                    advance();
                }
                value += d;
            }
            t.kind = TokKind::String;
            t.text = std::move(value);
            t.raw = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        static constexpr std::string_view two[] = {"->", "=>", "!=", "<>", "<=", ">="};
        for (auto p : two)
            if (src_.substr(pos_, 2) == p) {
                advance();
                advance();
                t.kind = TokKind::Punct;
                t.text = t.raw = std::string(p);
                return t;
            }
        if (std::string_view("()[]{},:.=<>;").find(c) != std::string_view::npos) {
            advance();
            t.kind = TokKind::Punct;
            t.text = t.raw = std::string(1, c);
            return t;
        }
        std::size_t len = 1;
        if (c & 0x80)
            while (len < 4 and (at(len) & 0xC0) == 0x80)
                ++len;
        fail(t.line, t.column, "unexpected character", std::string(src_.substr(start, len)));
    }

    public:
    explicit Lexer(std::string_view src) : src_(src) { }

    const Token & peek()
    {
        if (not peeked_)
            peeked_ = lex();
        return *peeked_;
    }

    Token next()
    {
        Token t = peek();
        peeked_.reset();
        return t;
    }

    /// A file path: a string literal, or a run of characters up to whitespace or `;`.
    Token path()
    {
        if (peeked_)
            return next();
        skip_space();
        Token t;
        t.line = line_;
        t.column = col_;
        if (done())
            return t;
        if (at() == '"')
            return lex();
        const std::size_t start = pos_;
        while (not done() and not std::isspace(static_cast<unsigned char>(at())) and at() != ';')
            advance();
        t.kind = TokKind::Word;
        t.text = t.raw = std::string(src_.substr(start, pos_ - start));
        return t;
    }
};

/*======================================================================================================================
 * Syntax tree
 *====================================================================================================================*/

struct RawTerm
{
    enum class Kind { Field, String, Number, Word } kind = Kind::Word;
    Token var;    ///< Field only
    Token attr;   ///< Field only
    Token value;  ///< literals
};

struct Expr
{
    enum class Kind { Atom, And, Or, Not, Const } kind = Kind::Const;
    Token at;
    bool value = false;
    RawTerm lhs, rhs;
    CmpOp op = CmpOp::Eq;
    std::vector<Expr> kids;
};

struct RawPlan
{
    enum class Kind { Scan, Select, Project, Winnow } kind = Kind::Scan;
    Token at;
    Token name;                ///< relation or preference
    std::vector<Token> names;  ///< FD names or projected attributes
    Expr condition;
    std::vector<RawPlan> input;  ///< empty for scans, one element otherwise
};

struct RawDecl
{
    enum class Kind { Schema, Relation, Preference, Fd, Cgd, Plan } kind = Kind::Schema;
    Token keyword;
    Token name;
    Token schema;
    std::vector<std::pair<Token, Sort>> attrs;
    Token path;
    std::vector<Token> vars;
    std::vector<Token> lhs, rhs;
    Expr body, head;
    RawPlan plan;
};

class Parser
{
    Lexer lex_;
    const ParseOptions &opts_;

    [[noreturn]] static void fail(const Token &t, const std::string &msg)
    {
        if (t.kind == TokKind::End)
            throw ParseError(t.line, t.column, msg + " at end of input", "");
        throw ParseError(t.line, t.column, msg, t.raw);
    }

    bool is_kw(const Token &t, std::string_view kw) const { return t.kind == TokKind::Ident and iequals(t.text, kw); }
    bool is_punct(const Token &t, std::string_view p) const { return t.kind == TokKind::Punct and t.text == p; }

    Token expect_punct(std::string_view p)
    {
        Token t = lex_.next();
        if (not is_punct(t, p))
            fail(t, "expected '" + std::string(p) + "'");
        return t;
    }

    Token expect_kw(std::string_view kw)
    {
        Token t = lex_.next();
        if (not is_kw(t, kw))
            fail(t, "expected " + std::string(kw));
        return t;
    }

    Token expect_ident(std::string_view what)
    {
        Token t = lex_.next();
        if (t.kind != TokKind::Ident)
            fail(t, "expected " + std::string(what));
        return t;
    }

    bool accept_punct(std::string_view p)
    {
        if (is_punct(lex_.peek(), p)) { lex_.next(); return true; }
        return false;
    }

    void check_depth(std::size_t depth, const Token &at)
    {
        if (depth > opts_.max_depth)
            fail(at, "nesting deeper than " + std::to_string(opts_.max_depth));
    }

    std::vector<Token> ident_list(std::string_view what)
    {
        std::vector<Token> out{expect_ident(what)};
        while (accept_punct(","))
            out.push_back(expect_ident(what));
        return out;
    }

    RawTerm term()
    {
        Token t = lex_.next();
        RawTerm r;
        switch (t.kind) {
            case TokKind::String: r.kind = RawTerm::Kind::String; r.value = std::move(t); return r;
            case TokKind::Number: r.kind = RawTerm::Kind::Number; r.value = std::move(t); return r;
            case TokKind::Word: r.kind = RawTerm::Kind::Word; r.value = std::move(t); return r;
            case TokKind::Ident:
                if (accept_punct(".")) {
                    r.kind = RawTerm::Kind::Field;
                    r.var = std::move(t);
                    r.attr = expect_ident("attribute name");
                } else {
                    r.kind = RawTerm::Kind::Word;
                    r.value = std::move(t);
                }
                return r;
            default: fail(t, "expected a term");
        }
    }

    CmpOp comparison()
    {
        Token t = lex_.next();
        if (t.kind == TokKind::Punct) {
            if (t.text == "=") return CmpOp::Eq;
            if (t.text == "!=" or t.text == "<>") return CmpOp::Ne;
            if (t.text == "<") return CmpOp::Lt;
            if (t.text == ">") return CmpOp::Gt;
            if (t.text == "<=") return CmpOp::Le;
            if (t.text == ">=") return CmpOp::Ge;
        }
        fail(t, "expected a comparison operator");
    }

    Expr unary(std::size_t depth)
    {
        const Token &t = lex_.peek();
        check_depth(depth, t);
        Expr e;
        e.at = t;
        if (is_kw(t, "NOT")) {
            lex_.next();
            e.kind = Expr::Kind::Not;
            e.kids.push_back(unary(depth + 1));
            return e;
        }
        if (is_punct(t, "(")) {
            lex_.next();
            Expr inner = disjunction(depth + 1);
            expect_punct(")");
            return inner;
        }
        if (is_kw(t, "TRUE") or is_kw(t, "FALSE")) {
            e.kind = Expr::Kind::Const;
            e.value = is_kw(t, "TRUE");
            lex_.next();
            return e;
        }
        e.kind = Expr::Kind::Atom;
        e.lhs = term();
        e.op = comparison();
        e.rhs = term();
        return e;
    }

    Expr conjunction(std::size_t depth)
    {
        Expr first = unary(depth);
        if (not is_kw(lex_.peek(), "AND"))
            return first;
        Expr e;
        e.kind = Expr::Kind::And;
        e.at = first.at;
        e.kids.push_back(std::move(first));
        while (is_kw(lex_.peek(), "AND")) {
            lex_.next();
            e.kids.push_back(unary(depth));
        }
        return e;
    }

    Expr disjunction(std::size_t depth)
    {
        Expr first = conjunction(depth);
        if (not is_kw(lex_.peek(), "OR"))
            return first;
        Expr e;
        e.kind = Expr::Kind::Or;
        e.at = first.at;
        e.kids.push_back(std::move(first));
        while (is_kw(lex_.peek(), "OR")) {
            lex_.next();
            e.kids.push_back(conjunction(depth));
        }
        return e;
    }

    RawPlan plan(std::size_t depth)
    {
        Token t = lex_.next();
        check_depth(depth, t);
        RawPlan p;
        p.at = t;
        if (is_kw(t, "SCAN")) {
            p.kind = RawPlan::Kind::Scan;
            p.name = expect_ident("relation name");
            if (is_kw(lex_.peek(), "WITH")) {
                lex_.next();
                p.names = ident_list("FD name");
            }
            return p;
        }
        if (is_kw(t, "WINNOW")) {
            p.kind = RawPlan::Kind::Winnow;
            expect_punct("[");
            p.name = expect_ident("preference name");
            expect_punct("]");
        } else if (is_kw(t, "SELECT")) {
            p.kind = RawPlan::Kind::Select;
            expect_punct("[");
            p.condition = disjunction(depth + 1);
            expect_punct("]");
        } else if (is_kw(t, "PROJECT")) {
            p.kind = RawPlan::Kind::Project;
            expect_punct("[");
            p.names = ident_list("attribute name");
            expect_punct("]");
        } else {
            fail(t, "expected SCAN, SELECT, PROJECT or WINNOW");
        }
        expect_punct("(");
        p.input.push_back(plan(depth + 1));
        expect_punct(")");
        return p;
    }

    std::vector<Token> fd_side()
    {
        if (accept_punct("{")) {
            std::vector<Token> out;
            if (not accept_punct("}")) {
                out = ident_list("attribute name");
                expect_punct("}");
            }
            return out;
        }
        return ident_list("attribute name");
    }

    void schema_ref(RawDecl &d)
    {
        expect_kw("ON");
        d.schema = expect_ident("schema name");
    }

    RawDecl declaration()
    {
        RawDecl d;
        d.keyword = lex_.next();
        const Token &k = d.keyword;
        if (is_kw(k, "SCHEMA")) {
            d.kind = RawDecl::Kind::Schema;
            d.name = expect_ident("schema name");
            expect_punct("(");
            do {
                Token attr = expect_ident("attribute name");
                expect_punct(":");
                Token s = lex_.next();
                if (is_kw(s, "D")) d.attrs.emplace_back(std::move(attr), Sort::D);
                else if (is_kw(s, "Q")) d.attrs.emplace_back(std::move(attr), Sort::Q);
                else fail(s, "expected sort D or Q");
            } while (accept_punct(","));
            expect_punct(")");
        } else if (is_kw(k, "RELATION")) {
            d.kind = RawDecl::Kind::Relation;
            d.name = expect_ident("relation name");
            schema_ref(d);
            expect_kw("FROM");
            d.path = lex_.path();
            if (d.path.kind != TokKind::String and d.path.kind != TokKind::Word)
                fail(d.path, "expected a file path");
        } else if (is_kw(k, "PREFER")) {
            d.kind = RawDecl::Kind::Preference;
            d.name = expect_ident("preference name");
            schema_ref(d);
            expect_punct("(");
            d.vars.push_back(expect_ident("tuple variable"));
            expect_punct(",");
            d.vars.push_back(expect_ident("tuple variable"));
            expect_punct(")");
            expect_kw("WHEN");
            d.body = disjunction(0);
        } else if (is_kw(k, "FD")) {
            d.kind = RawDecl::Kind::Fd;
            d.name = expect_ident("FD name");
            schema_ref(d);
            expect_punct(":");
            d.lhs = fd_side();
            expect_punct("->");
            d.rhs = fd_side();
        } else if (is_kw(k, "CGD")) {
            d.kind = RawDecl::Kind::Cgd;
            d.name = expect_ident("CGD name");
            schema_ref(d);
            expect_punct("(");
            d.vars = ident_list("tuple variable");
            expect_punct(")");
            expect_punct(":");
            d.body = disjunction(0);
            expect_punct("=>");
            d.head = disjunction(0);
        } else if (is_kw(k, "PLAN")) {
            d.kind = RawDecl::Kind::Plan;
            d.name = expect_ident("plan name");
            expect_punct("=");
            d.plan = plan(0);
        } else {
            fail(k, "expected SCHEMA, RELATION, PREFER, FD, CGD or PLAN");
        }
        accept_punct(";");
        return d;
    }

    public:
    Parser(std::string_view text, const ParseOptions &opts) : lex_(text), opts_(opts) { }

    std::vector<RawDecl> declarations()
    {
        std::vector<RawDecl> out;
        while (lex_.peek().kind != TokKind::End) {
            if (accept_punct(";"))
                continue;
            out.push_back(declaration());
        }
        return out;
    }

    Expr standalone_condition()
    {
        Expr e = disjunction(0);
        const Token &t = lex_.peek();
        if (t.kind != TokKind::End)
            fail(t, "unexpected text after condition");
        return e;
    }
};

/*======================================================================================================================
 * Resolution
 *====================================================================================================================*/

struct Skip { };  ///< abandons one declaration after its diagnostic has been recorded

/// Binds tuple-variable names to indices; a select condition binds its single variable on first use.
struct VarScope
{
    std::vector<std::string> names;
    bool open = false;

    std::optional<std::size_t> lookup(const std::string &name)
    {
        for (std::size_t i = 0; i != names.size(); ++i)
            if (names[i] == name)
                return i;
        if (open and names.empty()) {
            names.push_back(name);
            return 0;
        }
        return std::nullopt;
    }

    bool declared(const std::string &name) const
    {
        return std::find(names.begin(), names.end(), name) != names.end();
    }
};

class Resolver
{
    const ParseOptions &opts_;
    std::vector<Diagnostic> &errors_;
    std::vector<Diagnostic> *warnings_;

    public:
    Resolver(const ParseOptions &opts, std::vector<Diagnostic> &errors, std::vector<Diagnostic> *warnings)
        : opts_(opts), errors_(errors), warnings_(warnings)
    { }

    [[noreturn]] void error(const Token &at, std::string msg)
    {
        errors_.push_back({at.line, at.column, std::move(msg)});
        throw Skip{};
    }

    Term resolve_term(const RawTerm &t, const Schema &schema, VarScope &scope, const RawTerm &other)
    {
        using K = RawTerm::Kind;
        switch (t.kind) {
            case K::Field: {
                auto v = scope.lookup(t.var.text);
                if (not v)
                    error(t.var, "unknown tuple variable '" + t.var.text + "'");
                auto a = schema.find(t.attr.text);
                if (not a)
                    error(t.attr, "unknown attribute '" + t.attr.text + "'");
                return Term::var(*v, *a);
            }
            case K::String: return Term::constant(make_d(t.value.text));
            case K::Word:
                if (t.value.kind == TokKind::Ident and scope.declared(t.value.text))
                    error(t.value, "tuple variable '" + t.value.text + "' used without an attribute");
                return Term::constant(make_d(t.value.text));
            case K::Number: {
                bool d_context = false;
                if (other.kind == K::Field) {
                    auto a = schema.find(other.attr.text);
                    d_context = a and schema[*a].sort == Sort::D;
                } else if (other.kind == K::String or other.kind == K::Word) {
                    d_context = true;
                }
                if (d_context)
                    return Term::constant(make_d(t.value.text));
                return Term::constant(make_q(t.value.text));
            }
        }
        error(t.value, "bad term");
    }

    void check_width(std::size_t width, const Token &at)
    {
        if (width > opts_.max_width)
            throw ParseError(at.line, at.column,
                             "condition expands to more than " + std::to_string(opts_.max_width) + " disjuncts",
                             at.raw);
    }

    /// DNF by distribution; atoms are only folded, never simplified, so printed formulas parse back unchanged.
    std::vector<Conjunction> dnf(const Expr &e, const SchemaPtr &schema, VarScope &scope, std::size_t tuple_vars)
    {
        switch (e.kind) {
            case Expr::Kind::Const:
                return e.value ? std::vector<Conjunction>{Conjunction{}} : std::vector<Conjunction>{};
            case Expr::Kind::Atom: {
                Term l = resolve_term(e.lhs, *schema, scope, e.rhs);
                Term r = resolve_term(e.rhs, *schema, scope, e.lhs);
                Literal lit = false;
                try {
                    lit = make_atom(*schema, std::move(l), e.op, std::move(r));
                } catch (const SortError &err) {
                    error(e.at, err.what());
                }
                if (auto *b = std::get_if<bool>(&lit))
                    return *b ? std::vector<Conjunction>{Conjunction{}} : std::vector<Conjunction>{};
                return {Conjunction{std::get<Atom>(std::move(lit))}};
            }
            case Expr::Kind::Or: {
                std::vector<Conjunction> out;
                for (const auto &k : e.kids) {
                    auto part = dnf(k, schema, scope, tuple_vars);
                    check_width(out.size() + part.size(), e.at);
                    for (auto &c : part)
                        out.push_back(std::move(c));
                }
                return out;
            }
            case Expr::Kind::And: {
                std::vector<Conjunction> acc{Conjunction{}};
                for (const auto &k : e.kids) {
                    auto part = dnf(k, schema, scope, tuple_vars);
                    if (not acc.empty() and part.size() > opts_.max_width / acc.size())
                        check_width(opts_.max_width + 1, e.at);
                    std::vector<Conjunction> next;
                    next.reserve(acc.size() * part.size());
                    for (const auto &a : acc)
                        for (const auto &b : part) {
                            Conjunction c = a;
                            c.insert(c.end(), b.begin(), b.end());
                            next.push_back(std::move(c));
                        }
                    acc = std::move(next);
                }
                return acc;
            }
            case Expr::Kind::Not: {
                auto inner = dnf(e.kids.front(), schema, scope, tuple_vars);
                std::size_t bound = 1;
                for (const auto &c : inner) {
                    if (c.empty()) { bound = 0; break; }
                    if (bound > opts_.max_width / c.size()) { bound = opts_.max_width + 1; break; }
                    bound *= c.size();
                }
                check_width(bound, e.at);
                DnfFormula f(schema, std::max<std::size_t>(tuple_vars, 1), std::move(inner));
                return negate(f).disjuncts();
            }
        }
        return {};
    }

    DnfFormula formula(const Expr &e, const SchemaPtr &schema, VarScope &scope, std::size_t tuple_vars,
                       const Token &decl)
    {
        auto disjuncts = dnf(e, schema, scope, tuple_vars);
        if (warnings_ and disjuncts.size() > opts_.warn_width)
            warnings_->push_back({decl.line, decl.column,
                                  "condition expands to " + std::to_string(disjuncts.size()) + " disjuncts"});
        return DnfFormula(schema, tuple_vars, std::move(disjuncts));
    }
};

}

/*======================================================================================================================
 * Parsing
 *====================================================================================================================*/

namespace detail {

class WorkspaceBuilder
{
    Workspace ws_;
    std::vector<Diagnostic> errors_;
    Resolver resolve_;

    void duplicate_check(bool exists, const Token &name, std::string_view category)
    {
        if (exists)
            resolve_.error(name, "duplicate " + std::string(category) + " '" + name.text + "'");
    }

    SchemaPtr schema_named(const Token &name)
    {
        if (const auto *s = ws_.find_schema(name.text))
            return s->schema;
        resolve_.error(name, "unknown schema '" + name.text + "'");
    }

    VarScope scope_of(const std::vector<Token> &vars)
    {
        VarScope scope;
        for (const auto &v : vars) {
            if (scope.declared(v.text))
                resolve_.error(v, "tuple variable '" + v.text + "' declared twice");
            scope.names.push_back(v.text);
        }
        return scope;
    }

    void schema(const RawDecl &d)
    {
        duplicate_check(ws_.find_schema(d.name.text), d.name, "schema");
        std::vector<Attribute> attrs;
        for (const auto &[tok, sort] : d.attrs) {
            for (const auto &a : attrs)
                if (a.name == tok.text)
                    resolve_.error(tok, "duplicate attribute '" + tok.text + "'");
            attrs.push_back({tok.text, sort});
        }
        ws_.schemas.push_back({d.name.text, make_schema(std::move(attrs))});
    }

    void relation(const RawDecl &d)
    {
        duplicate_check(ws_.find_relation(d.name.text), d.name, "relation");
        schema_named(d.schema);
        ws_.relations.push_back({d.name.text, d.schema.text, d.path.text});
    }

    void preference(const RawDecl &d)
    {
        duplicate_check(ws_.find_preference(d.name.text), d.name, "preference");
        SchemaPtr s = schema_named(d.schema);
        VarScope scope = scope_of(d.vars);
        DnfFormula f = resolve_.formula(d.body, s, scope, 2, d.keyword);
        ws_.preferences.push_back({d.schema.text, scope.names, PreferenceRelation(d.name.text, std::move(f))});
    }

    void fd(const RawDecl &d)
    {
        duplicate_check(ws_.find_fd(d.name.text), d.name, "FD");
        SchemaPtr s = schema_named(d.schema);
        auto names = [&](const std::vector<Token> &toks) {
            std::vector<std::string> out;
            for (const auto &t : toks) {
                if (not s->find(t.text))
                    resolve_.error(t, "unknown attribute '" + t.text + "'");
                out.push_back(t.text);
            }
            return out;
        };
        auto lhs = names(d.lhs);
        auto rhs = names(d.rhs);
        if (rhs.empty())
            resolve_.error(d.name, "FD needs a nonempty right-hand side");
        ws_.fds.push_back({d.name.text, d.schema.text, FunctionalDependency(std::move(lhs), std::move(rhs))});
    }

    void cgd(const RawDecl &d)
    {
        duplicate_check(ws_.find_cgd(d.name.text), d.name, "CGD");
        SchemaPtr s = schema_named(d.schema);
        VarScope scope = scope_of(d.vars);
        const std::size_t n = scope.names.size();
        DnfFormula body = resolve_.formula(d.body, s, scope, n, d.keyword);
        DnfFormula head = resolve_.formula(d.head, s, scope, n, d.keyword);
        ws_.cgds.push_back({d.name.text, d.schema.text, scope.names, Cgd(std::move(body), std::move(head))});
    }

    QueryPlan plan_expr(const RawPlan &p)
    {
        using K = RawPlan::Kind;
        if (p.kind == K::Scan) {
            const RelationDecl *r = ws_.find_relation(p.name.text);
            if (not r)
                resolve_.error(p.name, "unknown relation '" + p.name.text + "'");
            SchemaPtr s = schema_named_text(r->schema, p.name);
            FdSet declared;
            std::vector<std::string> names;
            for (const auto &t : p.names) {
                const FdDecl *f = ws_.find_fd(t.text);
                if (not f)
                    resolve_.error(t, "unknown FD '" + t.text + "'");
                if (not same_schema(schema_named_text(f->schema, t), s))
                    resolve_.error(t, "FD '" + t.text + "' is declared on a different schema");
                declared.push_back(f->fd);
                names.push_back(t.text);
            }
            return QueryPlan::scan(p.name.text, s, std::move(declared), std::move(names));
        }
        QueryPlan in = plan_expr(p.input.front());
        try {
            switch (p.kind) {
                case K::Select: {
                    VarScope scope;
                    scope.open = true;
                    return in.select(resolve_.formula(p.condition, in.schema(), scope, 1, p.at));
                }
                case K::Project: {
                    std::vector<std::string> attrs;
                    for (const auto &t : p.names) {
                        if (not in.schema()->find(t.text))
                            resolve_.error(t, "unknown attribute '" + t.text + "'");
                        attrs.push_back(t.text);
                    }
                    return in.project(std::move(attrs));
                }
                case K::Winnow: {
                    const PreferenceDecl *c = ws_.find_preference(p.name.text);
                    if (not c)
                        resolve_.error(p.name, "unknown preference '" + p.name.text + "'");
                    return in.winnow(c->preference);
                }
                default: break;
            }
        } catch (const PlanError &e) {
            resolve_.error(p.at, e.what());
        }
        resolve_.error(p.at, "bad plan operator");
    }

    SchemaPtr schema_named_text(const std::string &name, const Token &at)
    {
        if (const auto *s = ws_.find_schema(name))
            return s->schema;
        resolve_.error(at, "unknown schema '" + name + "'");
    }

    void plan(const RawDecl &d)
    {
        duplicate_check(ws_.find_plan(d.name.text), d.name, "plan");
        ws_.plans.push_back({d.name.text, plan_expr(d.plan)});
    }

    public:
    WorkspaceBuilder(const ParseOptions &opts, std::vector<Diagnostic> *warnings) : resolve_(opts, errors_, warnings) { }

    Workspace build(const std::vector<RawDecl> &decls)
    {
        using K = RawDecl::Kind;
        for (K kind : {K::Schema, K::Relation, K::Preference, K::Fd, K::Cgd, K::Plan}) {
            for (const auto &d : decls) {
                if (d.kind != kind)
                    continue;
                try {
                    switch (kind) {
                        case K::Schema: schema(d); break;
                        case K::Relation: relation(d); break;
                        case K::Preference: preference(d); break;
                        case K::Fd: fd(d); break;
                        case K::Cgd: cgd(d); break;
                        case K::Plan: plan(d); break;
                    }
                } catch (const Skip&) {
                } catch (const ParseError&) {
                    throw;
                } catch (const Error &e) {
                    errors_.push_back({d.keyword.line, d.keyword.column, e.what()});
                }
            }
        }
        if (not errors_.empty()) {
            std::stable_sort(errors_.begin(), errors_.end(), [](const auto &a, const auto &b) {
                return std::tie(a.line, a.column) < std::tie(b.line, b.column);
            });
            throw ReferenceError(std::move(errors_));
        }
        return std::move(ws_);
    }
};

}

/** Parses workspace text.  Throws `ParseError` for the first syntax error, `ReferenceError` listing every
 * resolution problem otherwise.  Width warnings go to `warnings` when given. */
inline Workspace parse_workspace(std::string_view text, const ParseOptions &options = {},
                                 std::vector<Diagnostic> *warnings = nullptr)
{
    detail::Parser parser(text, options);
    auto decls = parser.declarations();
    return detail::WorkspaceBuilder(options, warnings).build(decls);
}

/// Parses a standalone condition over `schema` with the given tuple-variable names.
inline DnfFormula parse_condition(std::string_view text, const SchemaPtr &schema, std::vector<std::string> vars,
                                  const ParseOptions &options = {})
{
    detail::Parser parser(text, options);
    detail::Expr e = parser.standalone_condition();
    std::vector<Diagnostic> errors;
    detail::Resolver resolver(options, errors, nullptr);
    detail::VarScope scope;
    scope.names = std::move(vars);
    const std::size_t n = std::max<std::size_t>(scope.names.size(), 1);
    scope.open = scope.names.empty();
    try {
        return resolver.formula(e, schema, scope, n, e.at);
    } catch (const detail::Skip&) {
        throw ReferenceError(std::move(errors));
    }
}

/*======================================================================================================================
 * Printing
 *====================================================================================================================*/

inline std::string print(const SchemaDecl &d)
{
    std::string out = "SCHEMA " + d.name + "(";
    for (std::size_t i = 0; i != d.schema->size(); ++i)
        out += (i ? ", " : "") + (*d.schema)[i].name + ": " + std::string(to_string((*d.schema)[i].sort));
    return out + ")";
}

inline std::string print(const RelationDecl &d)
{
    return "RELATION " + d.name + " ON " + d.schema + " FROM " + format_value(make_d(d.path));
}

inline std::string print(const PreferenceDecl &d)
{
    return "PREFER " + d.name() + " ON " + d.schema + "(" + d.vars[0] + ", " + d.vars[1] + ") WHEN " +
           to_string(d.preference.formula(), d.vars);
}

inline std::string print(const FdDecl &d) { return "FD " + d.name + " ON " + d.schema + ": " + to_string(d.fd); }

inline std::string print(const CgdDecl &d)
{
    std::string out = "CGD " + d.name + " ON " + d.schema + "(";
    for (std::size_t i = 0; i != d.vars.size(); ++i)
        out += (i ? ", " : "") + d.vars[i];
    return out + "): " + to_string(d.cgd.body(), d.vars) + " => " + to_string(d.cgd.head_dnf(), d.vars);
}

/// Plan expression text; a select condition is printed over the variable `t`.
inline std::string print(const QueryPlan &plan)
{
    const PlanNode &node = plan.root();
    return std::visit([&](const auto &op) -> std::string {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, ScanOp>) {
            std::string out = "SCAN " + op.relation;
            for (std::size_t i = 0; i != op.fd_names.size(); ++i)
                out += (i ? ", " : " WITH ") + op.fd_names[i];
            return out;
        } else {
            const std::string inner = "(" + print(*plan.input()) + ")";
            if constexpr (std::is_same_v<T, SelectOp>) {
                const std::string t[] = {"t"};
                return "SELECT[" + to_string(op.condition, t) + "]" + inner;
            } else if constexpr (std::is_same_v<T, ProjectOp>) {
                std::string out = "PROJECT[";
                for (std::size_t i = 0; i != op.attributes.size(); ++i)
                    out += (i ? ", " : "") + op.attributes[i];
                return out + "]" + inner;
            } else {
                return "WINNOW[" + op.preference.name() + "]" + inner;
            }
        }
    }, node.op);
}

inline std::string print(const PlanDecl &d) { return "PLAN " + d.name + " = " + print(d.plan); }

inline std::string print(const Workspace &ws)
{
    std::string out;
    auto emit = [&](const auto &decls) {
        for (const auto &d : decls)
            out += print(d) + "\n";
    };
    emit(ws.schemas);
    emit(ws.relations);
    emit(ws.preferences);
    emit(ws.fds);
    emit(ws.cgds);
    emit(ws.plans);
    return out;
}

}
