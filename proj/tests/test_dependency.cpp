#include "support/fixtures.hpp"

#include <gtest/gtest.h>

using namespace winnowopt;
using namespace fixtures;

TEST(Fd, NormalizesAttributes)
{
    auto f = fd({"Vendor", "ISBN", "ISBN"}, {"Price"});
    EXPECT_EQ(f.lhs(), (std::vector<std::string>{"ISBN", "Vendor"}));
    EXPECT_EQ(fd_arity(f), 3u);
    EXPECT_EQ(to_string(f), "ISBN, Vendor -> Price");
    EXPECT_EQ(to_string(fd({}, {"ISBN"})), "{} -> ISBN");
    EXPECT_THROW(fd({"ISBN"}, {}), SchemaError);
    EXPECT_TRUE(fd({"ISBN", "Price"}, {"Price"}).is_trivial());
    EXPECT_THROW(fd({"Nope"}, {"Price"}).check(*book_schema()), SchemaError);
}

TEST(Fd, FormulaShape)
{
    DnfFormula f = fd_formula(book_schema(), fd({"ISBN"}, {"Price"}));
    EXPECT_TRUE(equivalent(f, cond(book_schema(), "t1.ISBN != t2.ISBN OR t1.Price = t2.Price")));
    DnfFormula empty = fd_formula(book_schema(), fd({}, {"ISBN"}));
    EXPECT_TRUE(equivalent(empty, cond(book_schema(), "t1.ISBN = t2.ISBN")));
    EXPECT_TRUE(fd_set_formula(book_schema(), {}).is_true());
}

TEST(Fd, SatisfiesOnBook)
{
    Relation r = book_relation();
    EXPECT_FALSE(satisfies(r, fd({"ISBN"}, {"Price"})));
    EXPECT_TRUE(satisfies(r, fd({"ISBN", "Vendor"}, {"Price"})));
    EXPECT_FALSE(satisfies(r, fd({}, {"ISBN"})));
    EXPECT_TRUE(satisfies(book_winnow_result(), fd({"ISBN"}, {"Price"})));
    EXPECT_TRUE(satisfies(Relation(book_schema()), fd({}, {"ISBN"})));
}

// The CGD form of an FD judges every instance exactly like the direct check.
TEST(Cgd, FdEncodingAgreesWithDirectCheck)
{
    Rng rng(5);
    for (int round = 0; round != 300; ++round) {
        auto f = random_fd(rng, *book_schema(), 3);
        Relation r = random_relation(rng, book_schema(), 6, 2);
        ASSERT_EQ(satisfies(r, f), satisfies(r, fd_to_cgd(book_schema(), f))) << to_string(f);
    }
}

TEST(Cgd, ArmstrongTransitivity)
{
    auto s = book_schema();
    std::vector<Cgd> premises{fd_to_cgd(s, fd({"ISBN"}, {"Vendor"})), fd_to_cgd(s, fd({"Vendor"}, {"Price"}))};
    EXPECT_TRUE(cgd_entails(premises, fd_to_cgd(s, fd({"ISBN"}, {"Price"}))));
    EXPECT_FALSE(cgd_entails(premises, fd_to_cgd(s, fd({"Price"}, {"ISBN"}))));
    EXPECT_TRUE(cgd_entails(std::span<const Cgd>{}, fd_to_cgd(s, fd({"ISBN", "Price"}, {"Price"}))));
    EXPECT_FALSE(cgd_entails(std::span<const Cgd>{}, fd_to_cgd(s, fd({"ISBN"}, {"Price"}))));
}

TEST(Cgd, ConstantAttributeEntailsEveryFdIntoIt)
{
    auto s = book_schema();
    EXPECT_TRUE(cgd_entails({fd_to_cgd(s, fd({}, {"ISBN"}))}, fd_to_cgd(s, fd({"Price"}, {"ISBN"}))));
}

// A counterexample to a failed entailment is an instance that satisfies the premises and violates the conclusion.
TEST(Cgd, FailedEntailmentWitnessIsACounterexample)
{
    auto s = book_schema();
    std::vector<Cgd> premises{fd_to_cgd(s, fd({"ISBN"}, {"Vendor"}))};
    Cgd goal = fd_to_cgd(s, fd({"ISBN"}, {"Price"}));
    CheckReport r = entailment_report(premises, goal);
    ASSERT_FALSE(r.holds);
    ASSERT_TRUE(r.witness);
    Relation instance(s, *r.witness);
    EXPECT_TRUE(satisfies(instance, premises.front()));
    EXPECT_FALSE(satisfies(instance, goal));
}

// Three-variable CGD: no three offers of one book at pairwise distinct prices.  It implies nothing about two offers.
TEST(Cgd, ThreeVariableDependencies)
{
    auto s = book_schema();
    std::vector<std::string> vars{"t1", "t2", "t3"};
    Cgd at_most_two(cond(s, "t1.ISBN = t2.ISBN AND t2.ISBN = t3.ISBN AND t1.Price != t2.Price AND "
                            "t2.Price != t3.Price", vars),
                    cond(s, "t1.Price = t3.Price", vars));
    EXPECT_EQ(at_most_two.tuple_vars(), 3u);
    EXPECT_TRUE(satisfies(book_winnow_result(), at_most_two));
    EXPECT_FALSE(satisfies(book_relation(), at_most_two));
    EXPECT_FALSE(cgd_entails({at_most_two}, fd_to_cgd(s, fd({"ISBN"}, {"Price"}))));
}

// A premise applies under every renaming of its variables, so the strict-order form covers both directions.
TEST(Cgd, PremisesApplyUnderSwappedVariables)
{
    auto s = book_schema();
    Cgd distinct(cond(s, "t1.ISBN = t2.ISBN AND t1.Price != t2.Price"), cond(s, "t1.Vendor = t2.Vendor"));
    Cgd ordered(cond(s, "t1.ISBN = t2.ISBN AND t1.Price < t2.Price"), cond(s, "t1.Vendor = t2.Vendor"));
    EXPECT_TRUE(cgd_entails({distinct}, ordered));
    EXPECT_TRUE(cgd_entails({ordered}, distinct));
    Cgd one_sided(cond(s, "t1.ISBN = t2.ISBN AND t1.Price < 5"), cond(s, "t1.Vendor = t2.Vendor"));
    Cgd both_sided(cond(s, "t1.ISBN = t2.ISBN AND t1.Price < 5 AND t2.Price < 5"), cond(s, "t1.Vendor = t2.Vendor"));
    EXPECT_TRUE(cgd_entails({one_sided}, both_sided));
    EXPECT_FALSE(cgd_entails({both_sided}, one_sided));
}

TEST(Cgd, DenialHeadsMatchTheirExpansion)
{
    auto s = book_schema();
    Cgd denial(DnfFormula::truth(s, 2), Denial{{cond(s, "t1.ISBN = t2.ISBN"), cond(s, "t1.Price < t2.Price")}});
    Cgd expanded(DnfFormula::truth(s, 2), denial.head_dnf());
    EXPECT_TRUE(equivalent(denial.head_dnf(), cond(s, "t1.ISBN != t2.ISBN OR t1.Price >= t2.Price")));
    EXPECT_TRUE(cgd_entails({denial}, expanded));
    EXPECT_TRUE(cgd_entails({expanded}, denial));
    Rng rng(17);
    for (int round = 0; round != 100; ++round) {
        Relation r = random_relation(rng, s, 5, 2);
        ASSERT_EQ(satisfies(r, denial), satisfies(r, expanded));
    }
}

TEST(Cgd, RejectsMismatchedParts)
{
    auto s = book_schema();
    EXPECT_THROW(Cgd(DnfFormula::truth(s, 2), DnfFormula::truth(s, 3)), SchemaError);
    EXPECT_THROW(Cgd(DnfFormula::truth(s, 2), Denial{}), SchemaError);
    auto other = make_schema({{"x", Sort::Q}});
    EXPECT_THROW(cgd_entails({fd_to_cgd(s, fd({"ISBN"}, {"Price"}))}, Cgd(DnfFormula::truth(other, 2),
                                                                         DnfFormula::truth(other, 2))),
                 SchemaError);
}
