#include <gtest/gtest.h>

#include <sstream>

#include "plp/verify.hpp"

using namespace plp;

TEST(Budget, Formulas) {
    const PlpSignature s{3, 2, 1, 3, 4};
    const auto b = budget(s);
    EXPECT_EQ(b.dimX, 3 * 2 + 1 + 4 * 3 + 2 * 4);
    EXPECT_EQ(b.dimY, 2 * 2 + 1 + 2 * 3 + 4);
    EXPECT_EQ(b.dimDomain, 33 + b.dimX - 15);
    EXPECT_EQ(b.dimCodomain, 3 * b.dimY);
    EXPECT_THROW(budget({1, 4, 0, 0, 0}), std::invalid_argument);
}

TEST(Balanced, AgreesWithDimensionCount) {
    for (int m = 2; m <= 9; ++m)
        for (int pf = 0; pf <= 8; ++pf)
            for (int pd = 0; pd <= 4; ++pd)
                for (int lf = 0; lf <= 10; ++lf)
                    for (int la = 0; la <= 10; ++la) {
                        const PlpSignature s{m, pf, pd, lf, la};
                        const auto b = budget(s);
                        EXPECT_EQ(is_balanced(s), b.dimDomain == b.dimCodomain) << s.str();
                    }
}

TEST(Enumerate, MatchesReferenceTable) {
    const auto en = enumerate_balanced(3, 9);
    EXPECT_EQ(en.signatures, reference_balanced_classes());
    EXPECT_EQ(en.signatures.size(), 124u);
    EXPECT_EQ(en.families.size(), 4u);
}

TEST(Enumerate, EveryListedClassIsBalancedAndAdmissible) {
    for (const auto& s : enumerate_balanced(3, 9).signatures) {
        EXPECT_TRUE(is_balanced(s)) << s.str();
        EXPECT_TRUE(admissible_counts(s)) << s.str();
        EXPECT_LE(s.pf + s.pd, 8) << s.str();
    }
}

TEST(Enumerate, NineViewsHaveOneClass) {
    const auto en = enumerate_balanced(9, 9);
    ASSERT_EQ(en.signatures.size(), 1u);
    EXPECT_EQ(en.signatures[0], (PlpSignature{9, 0, 0, 6, 0}));
}

TEST(Enumerate, TwoViewsGiveOnlyTheFamily) {
    const auto en = enumerate_balanced(2, 2);
    EXPECT_TRUE(en.signatures.empty());
    ASSERT_EQ(en.families.size(), 1u);
    EXPECT_TRUE(en.families[0].contains({2, 7, 0, 3, 1}));
    EXPECT_TRUE(en.families[0].contains({2, 4, 3, 0, 0}));
    EXPECT_FALSE(en.families[0].contains({2, 6, 0, 0, 0}));
}

TEST(Enumerate, SevenPointFamiliesAreBalancedForEveryM) {
    for (const auto& f : infinite_families())
        for (int m = 3; m <= 30; ++m) {
            const PlpSignature s{m, f.pf, f.pd, f.lf, f.la};
            EXPECT_TRUE(is_balanced(s)) << s.str();
            EXPECT_TRUE(f.contains(s));
        }
}

TEST(Enumerate, InvalidRangeThrows) {
    EXPECT_THROW(enumerate_balanced(5, 4), std::invalid_argument);
    EXPECT_THROW(enumerate_balanced(1, 4), std::invalid_argument);
}

TEST(SingleView, SevenSignatures) {
    const auto s = single_view_balanced();
    ASSERT_EQ(s.size(), 7u);
    for (const auto& x : s) EXPECT_EQ(x.pf + 2 * x.lf + x.la, 4) << x.str();
}

TEST(Csv, HeaderAndRows) {
    std::ostringstream os;
    write_csv(os, {{3, 1, 0, 2, 3}, {9, 0, 0, 6, 0}});
    EXPECT_EQ(os.str(), "m,pf,pd,lf,la\n3,1,0,2,3\n9,0,0,6,0\n");
}
