#include <gtest/gtest.h>

#include <set>

#include "plp/catalog.hpp"

using namespace plp;

TEST(Arrangements, CountsPerPointType) {
    EXPECT_EQ(point_arrangements(4, 2).size(), 2u);
    EXPECT_EQ(point_arrangements(5, 2).size(), 2u);
    EXPECT_EQ(point_arrangements(4, 3).size(), 2u);
    EXPECT_EQ(point_arrangements(3, 1).size(), 1u);
    EXPECT_TRUE(point_arrangements(2, 2).empty());
    EXPECT_TRUE(point_arrangements(3, 3).empty());
}

TEST(Arrangements, TemplatesAreValid) {
    for (int pf = 0; pf <= 7; ++pf)
        for (int pd = 0; pd <= 3; ++pd)
            for (const auto& a : point_arrangements(pf, pd)) {
                const auto inst = make_instance(3, a.points, 0, {});
                EXPECT_TRUE(validate(inst).valid()) << a.name;
                EXPECT_EQ(static_cast<int>(a.points.size()), pf + pd);
            }
}

TEST(Candidates, AttachmentMultisetsDeduplicated) {
    // The three collinear points are interchangeable: the line sits on the triple or off it.
    EXPECT_EQ(expand_candidates({3, 5, 1, 0, 1}).size(), 2u);
    EXPECT_EQ(expand_candidates({3, 6, 0, 0, 0}).size(), 1u);
}

TEST(Candidates, MultisetCountForFreePoints) {
    // k identical free points, la lines: number of partitions of la into at most k parts.
    const auto partitions = [](int n, int k) {
        std::vector<std::vector<int>> p(n + 1, std::vector<int>(k + 1, 0));
        for (int j = 0; j <= k; ++j) p[0][j] = 1;
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= k; ++j) p[i][j] = p[i][j - 1] + (i >= j ? p[i - j][j] : 0);
        return p[n][k];
    };
    for (const auto& s : enumerate_balanced(3, 9).signatures) {
        if (s.pd != 0 || s.pf == 0) continue;
        EXPECT_EQ(static_cast<int>(expand_candidates(s).size()), partitions(s.la, s.pf)) << s.str();
    }
}

TEST(Candidates, TotalAndDistinctKeys) {
    const auto all = all_candidates();
    EXPECT_EQ(all.size(), 434u);
    std::set<std::string> keys;
    for (const auto& inst : all) {
        EXPECT_TRUE(validate(inst).valid());
        EXPECT_TRUE(is_balanced(signature_of(inst)));
        keys.insert(canonical_key(inst).text);
    }
    EXPECT_EQ(keys.size(), 434u);
}

TEST(Candidates, ExpansionIsDeterministic) {
    const PlpSignature s{3, 3, 1, 1, 5};
    const auto a = expand_candidates(s), b = expand_candidates(s);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(SingleView, EightProblems) {
    const auto p = single_view_problems();
    EXPECT_EQ(p.size(), 8u);
    for (const auto& inst : p) EXPECT_EQ(inst.m, 1);
}

TEST(TwoView, SixArrangements) {
    const auto a = two_view_arrangements();
    EXPECT_EQ(a.size(), 6u);
    for (const auto& inst : a) EXPECT_EQ(inst.points.size(), 7u);
}

TEST(ExpectedTable, SplitOverCandidates) {
    const auto& t = default_expected_table();
    int minimal = 0, criteria = 0, ledger = 0;
    for (const auto& inst : all_candidates()) {
        const auto* r = t.find(canonical_key(inst));
        ASSERT_NE(r, nullptr);
        switch (r->verdict) {
        case ExpectedVerdict::Minimal: ++minimal; break;
        case ExpectedVerdict::NonMinimalByCriteria: ++criteria; break;
        case ExpectedVerdict::NonMinimalByElimination: ++ledger; break;
        }
    }
    EXPECT_EQ(minimal, 285);
    EXPECT_EQ(criteria, 130);
    EXPECT_EQ(ledger, 19);
}

TEST(ExpectedTable, HexLookupMatchesKeyLookup) {
    const auto& t = default_expected_table();
    const auto inst = make_instance(3, std::vector<PointTag>(6, PointTag::free()), 0, {});
    const auto* a = t.find(canonical_key(inst));
    ASSERT_NE(a, nullptr);
    EXPECT_EQ(t.find_hex(canonical_key(inst).hex()), a);
    EXPECT_EQ(a->verdict, ExpectedVerdict::Minimal);
    EXPECT_EQ(t.find_hex("not-a-key"), nullptr);
}

TEST(Atlas, EntryFields) {
    const auto inst = make_instance(3, std::vector<PointTag>(6, PointTag::free()), 0, {});
    const auto j = atlas_entry(inst);
    EXPECT_EQ(j.at("signature"), json::array({3, 6, 0, 0, 0}));
    EXPECT_EQ(j.at("key").get<std::string>(), canonical_key(inst).hex());
    EXPECT_EQ(j.at("expected").at("verdict").get<std::string>(), to_string(ExpectedVerdict::Minimal));
}
