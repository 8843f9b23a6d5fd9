#include "support/fixtures.hpp"

#include <gtest/gtest.h>

using namespace winnowopt;
using namespace fixtures;

TEST(Rational, ParsesDecimalsExactly)
{
    EXPECT_EQ(parse_rational("13.50"), Rational(27, 2));
    EXPECT_EQ(parse_rational("-0.25"), Rational(-1, 4));
    EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
    EXPECT_EQ(parse_rational("0679726691"), Rational(679726691));
    EXPECT_EQ(parse_rational("+7"), Rational(7));
}

TEST(Rational, RejectsMalformedLiterals)
{
    for (const char *bad : {"", "-", ".", "1.2.3", "1/0", "1.5/2", "abc", "1e5", "1/"})
        EXPECT_THROW(parse_rational(bad), DataError) << bad;
}

TEST(Rational, FormatRoundTrips)
{
    EXPECT_EQ(format_rational(Rational(27, 2)), "13.5");
    EXPECT_EQ(format_rational(Rational(1, 3)), "1/3");
    EXPECT_EQ(format_rational(Rational(-7, 40)), "-0.175");
    EXPECT_EQ(format_rational(Rational(5)), "5");
    Rng rng(7);
    for (int i = 0; i != 500; ++i) {
        Rational q(static_cast<long>(uniform(rng, 20001)) - 10000, static_cast<long>(1 + uniform(rng, 400)));
        q.canonicalize();
        EXPECT_EQ(parse_rational(format_rational(q)), q);
    }
}

TEST(Atom, FoldsConstantComparisons)
{
    const Schema &s = *book_schema();
    EXPECT_EQ(std::get<bool>(make_atom(s, Term::constant(make_q("1")), CmpOp::Lt, Term::constant(make_q("2")))),
              true);
    EXPECT_EQ(std::get<bool>(make_atom(s, Term::constant(make_d("a")), CmpOp::Eq, Term::constant(make_d("b")))),
              false);
    EXPECT_EQ(std::get<bool>(make_atom(s, Term::var(0, 2), CmpOp::Le, Term::var(0, 2))), true);
    EXPECT_EQ(std::get<bool>(make_atom(s, Term::var(1, 0), CmpOp::Ne, Term::var(1, 0))), false);
    EXPECT_TRUE(std::holds_alternative<Atom>(make_atom(s, Term::var(0, 2), CmpOp::Lt, Term::var(1, 2))));
}

TEST(Atom, RejectsIllSortedComparisons)
{
    const Schema &s = *book_schema();
    EXPECT_THROW(make_atom(s, Term::var(0, 0), CmpOp::Lt, Term::var(1, 0)), SortError);
    EXPECT_THROW(make_atom(s, Term::var(0, 0), CmpOp::Eq, Term::var(1, 2)), SortError);
    EXPECT_THROW(make_atom(s, Term::var(0, 2), CmpOp::Eq, Term::constant(make_d("x"))), SortError);
    EXPECT_THROW(make_atom(s, Term::var(0, 7), CmpOp::Eq, Term::var(1, 7)), SortError);
}

TEST(DnfFormula, TruthAndFalsity)
{
    auto t = DnfFormula::truth(book_schema(), 2);
    auto f = DnfFormula::falsity(book_schema(), 2);
    EXPECT_TRUE(t.is_true());
    EXPECT_TRUE(f.is_false());
    EXPECT_EQ(to_string(t), "TRUE");
    EXPECT_EQ(to_string(f), "FALSE");
    Tuple a = book("1", "v", "2");
    EXPECT_TRUE(evaluate(t, {a, a}));
    EXPECT_FALSE(evaluate(f, {a, a}));
    EXPECT_EQ(negate(t), f);
    EXPECT_EQ(negate(f), t);
}

TEST(DnfFormula, RejectsOutOfRangeVariables)
{
    EXPECT_THROW(DnfFormula(book_schema(), 1, {{Atom{Term::var(0, 2), CmpOp::Lt, Term::var(1, 2)}}}), SchemaError);
    EXPECT_THROW(DnfFormula(book_schema(), 0), SchemaError);
}

TEST(DnfFormula, StatsReportWidthAndSpan)
{
    auto s = stats(c2().formula());
    EXPECT_EQ(s.width, 2u);
    EXPECT_EQ(s.span, 3u);
}

TEST(DnfFormula, PrintsInfix)
{
    EXPECT_EQ(to_string(c1().formula()), "t1.ISBN = t2.ISBN AND t1.Price < t2.Price");
    const std::string names[] = {"x", "y"};
    EXPECT_EQ(to_string(c1().formula(), names), "x.ISBN = y.ISBN AND x.Price < y.Price");
}

TEST(Simplify, DropsDuplicatesAndContradictions)
{
    Atom lt{Term::var(0, 2), CmpOp::Lt, Term::var(1, 2)};
    Atom gt{Term::var(1, 2), CmpOp::Gt, Term::var(0, 2)};
    Atom ge{Term::var(0, 2), CmpOp::Ge, Term::var(1, 2)};
    auto out = simplify({{lt, gt}, {lt, ge}, {gt}});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].size(), 1u);
}

TEST(Simplify, EmptyDisjunctMakesTrue)
{
    Atom lt{Term::var(0, 2), CmpOp::Lt, Term::var(1, 2)};
    auto out = simplify({{lt}, {}});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(out[0].empty());
}

namespace {

std::vector<Tuple> all_pairs_domain()
{
    std::vector<Tuple> out;
    for (const char *isbn : {"a", "b"})
        for (const char *price : {"0", "0.5", "1", "1.5"})
            out.push_back(book(isbn, "v", price));
    return out;
}

}

// Connectives agree with pointwise evaluation on a domain large enough to separate the random constants used.
TEST(Connectives, AgreeWithEvaluation)
{
    Rng rng(11);
    const auto domain = all_pairs_domain();
    for (int round = 0; round != 200; ++round) {
        DnfFormula f = random_formula(rng, book_schema(), 2, 3, 3);
        DnfFormula g = random_formula(rng, book_schema(), 2, 3, 3);
        DnfFormula nf = negate(f), fg = conjoin(f, g), forg = disjoin(f, g);
        DnfFormula swapped = instantiate(f, {1, 0}, 2);
        for (const auto &a : domain)
            for (const auto &b : domain) {
                const bool vf = evaluate(f, {a, b}), vg = evaluate(g, {a, b});
                ASSERT_EQ(evaluate(nf, {a, b}), not vf) << to_string(f);
                ASSERT_EQ(evaluate(fg, {a, b}), vf and vg);
                ASSERT_EQ(evaluate(forg, {a, b}), vf or vg);
                ASSERT_EQ(evaluate(swapped, {b, a}), vf);
            }
    }
}

TEST(Instantiate, MapsVariablesIntoLargerFormulas)
{
    DnfFormula f = instantiate(c1().formula(), {2, 0}, 3);
    EXPECT_EQ(f.tuple_vars(), 3u);
    Tuple cheap = book("i", "a", "1"), dear = book("i", "b", "2"), other = book("j", "c", "0");
    EXPECT_TRUE(evaluate(f, {dear, other, cheap}));
    EXPECT_FALSE(evaluate(f, {cheap, other, dear}));
    EXPECT_THROW(instantiate(c1().formula(), {0, 3}, 3), SchemaError);
}

TEST(Instantiate, CollapsingVariablesFolds)
{
    DnfFormula f = instantiate(c1().formula(), {0, 0}, 1);
    EXPECT_TRUE(f.is_false());
}

TEST(Evaluate, ChecksTupleShapes)
{
    Tuple good = book("i", "a", "1");
    Tuple bad = {make_d("i"), make_d("a")};
    EXPECT_THROW(evaluate(c1().formula(), {good, bad}), SchemaError);
    EXPECT_THROW(evaluate(c1().formula(), {good}), SchemaError);
}

TEST(Builders, TuplesDifferAndAgree)
{
    DnfFormula differ = tuples_differ(book_schema(), 2, 0, 1);
    EXPECT_EQ(differ.width(), 3u);
    Tuple a = book("i", "a", "1");
    EXPECT_FALSE(evaluate(differ, {a, a}));
    EXPECT_TRUE(evaluate(differ, {a, book("i", "a", "2")}));
}
