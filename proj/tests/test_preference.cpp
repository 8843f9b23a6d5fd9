#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace winnowopt;
using namespace fixtures;

TEST(Preference, RequiresTwoTupleVariables)
{
    EXPECT_THROW(PreferenceRelation("p", DnfFormula::truth(book_schema(), 1)), SchemaError);
    EXPECT_THROW(PreferenceRelation("p", DnfFormula::truth(book_schema(), 3)), SchemaError);
}

TEST(Preference, PrefersEvaluatesTheFormula)
{
    auto c = c1();
    Tuple cheap = book("i", "a", "1"), dear = book("i", "b", "2"), other = book("j", "c", "5");
    EXPECT_TRUE(c.prefers(cheap, dear));
    EXPECT_FALSE(c.prefers(dear, cheap));
    EXPECT_FALSE(c.prefers(cheap, other));
}

TEST(Preference, IndifferenceOfC1)
{
    EXPECT_TRUE(equivalent(indifference(c1()), cond(book_schema(), "t1.ISBN != t2.ISBN OR t1.Price = t2.Price")));
}

TEST(Preference, C1IsAStrictPartialOrderButNotAWeakOrder)
{
    auto c = c1();
    EXPECT_TRUE(check_property(c, Property::Irreflexive));
    EXPECT_TRUE(check_property(c, Property::Asymmetric));
    EXPECT_TRUE(check_property(c, Property::Transitive));
    EXPECT_FALSE(check_property(c, Property::NegativelyTransitive));
    EXPECT_FALSE(check_property(c, Property::Connected));
    EXPECT_TRUE(is_strict_partial_order(c));
    EXPECT_FALSE(is_weak_order(c));
    EXPECT_FALSE(is_total_order(c));
}

TEST(Preference, NegativeTransitivityWitnessIsACounterexample)
{
    CheckReport r = property_report(c1(), Property::NegativelyTransitive);
    ASSERT_FALSE(r.holds);
    ASSERT_TRUE(r.witness);
    const auto &w = *r.witness;
    auto c = c1();
    EXPECT_FALSE(c.prefers(w[0], w[1]));
    EXPECT_FALSE(c.prefers(w[1], w[2]));
    EXPECT_TRUE(c.prefers(w[0], w[2]));
}

TEST(Preference, WeakAndTotalOrders)
{
    EXPECT_TRUE(is_weak_order(cheaper()));
    EXPECT_FALSE(is_total_order(cheaper()));
    auto prices = make_schema({{"Price", Sort::Q}});
    EXPECT_TRUE(is_total_order(pref("p", prices, "t1.Price < t2.Price")));
    EXPECT_TRUE(is_strict_partial_order(c2()));
    EXPECT_FALSE(is_weak_order(c2()));
}

TEST(Preference, NonStrictPreferences)
{
    EXPECT_FALSE(check_property(not_dearer(), Property::Irreflexive));
    EXPECT_FALSE(is_strict_partial_order(not_dearer()));
    EXPECT_TRUE(check_property(cross_cheaper(), Property::Irreflexive));
    EXPECT_FALSE(check_property(cross_cheaper(), Property::Transitive));
}

TEST(Preference, EmptyPreferenceIsAWeakOrder)
{
    auto none = PreferenceRelation("none", DnfFormula::falsity(book_schema(), 2));
    EXPECT_TRUE(is_weak_order(none));
    EXPECT_FALSE(check_property(none, Property::Connected));
}

// Property verdicts hold on every finite instance: whenever the solver says a property holds, no instance
// violates it.
TEST(Preference, VerdictsAreSoundOnInstances)
{
    Rng rng(99);
    for (int round = 0; round != 200; ++round) {
        PreferenceRelation c("r", random_formula(rng, book_schema(), 2, 2, 3));
        const bool irr = check_property(c, Property::Irreflexive);
        const bool tr = check_property(c, Property::Transitive);
        const bool nt = check_property(c, Property::NegativelyTransitive);
        for (int k = 0; k != 5; ++k) {
            Relation r = random_relation(rng, book_schema(), 6, 3);
            if (irr) ASSERT_TRUE(oracles::irreflexive_on(r, c)) << to_string(c.formula());
            if (tr) ASSERT_TRUE(oracles::transitive_on(r, c)) << to_string(c.formula());
            if (nt) ASSERT_TRUE(oracles::negatively_transitive_on(r, c)) << to_string(c.formula());
        }
    }
}

TEST(Preference, PropertyCacheIsSafeUnderConcurrency)
{
    auto c = c2();
    std::vector<std::thread> threads;
    std::vector<int> results(8, -1);
    for (int i = 0; i != 8; ++i)
        threads.emplace_back([&, i] { results[i] = is_strict_partial_order(c) and not is_weak_order(c); });
    for (auto &t : threads)
        t.join();
    for (int r : results)
        EXPECT_EQ(r, 1);
}
