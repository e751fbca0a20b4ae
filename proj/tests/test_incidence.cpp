#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "plp/incidence.hpp"

using namespace plp;

namespace {

const PointTag F = PointTag::free();

// Relabels points and lines by the given permutations, keeping parents earlier than children.
PlpInstance relabel_lines(const PlpInstance& inst, const std::vector<int>& perm) {
    PlpInstance out;
    out.m = inst.m;
    out.points = inst.points;
    out.lines.resize(inst.lines.size());
    for (std::size_t l = 0; l < perm.size(); ++l) out.lines[perm[l]] = inst.lines[l];
    for (const auto& [p, l] : inst.incidences) out.incidences.emplace(p, perm[l]);
    return out;
}

}  // namespace

TEST(Validate, FreeAndAdjacentInstanceIsValid) {
    const auto inst = make_instance(3, {F, F, PointTag::dep(0, 1)}, 2, {0, 0, 2});
    const auto rep = validate(inst);
    EXPECT_TRUE(rep.valid()) << (rep.problems.empty() ? "" : rep.problems.front());
    const auto s = signature_of(inst);
    EXPECT_EQ(s, (PlpSignature{3, 2, 1, 2, 3}));
}

TEST(Validate, SpannedLineWithItsCollinearPoint) {
    PlpInstance inst = make_instance(2, {F, F, PointTag::dep(0, 1)}, 0, {});
    inst.lines.push_back(LineTag::span(0, 1));
    inst.incidences = {{0, 0}, {1, 0}, {2, 0}};
    EXPECT_TRUE(validate(inst).valid());
}

TEST(Validate, SpannedLineMissingCollinearPointIsIncomplete) {
    PlpInstance inst = make_instance(2, {F, F, PointTag::dep(0, 1)}, 0, {});
    inst.lines.push_back(LineTag::span(0, 1));
    inst.incidences = {{0, 0}, {1, 0}};
    const auto rep = validate(inst);
    EXPECT_FALSE(rep.complete);
    EXPECT_THROW(signature_of(inst), InvalidInstance);
}

TEST(Validate, ParentsMustPrecedeChild) {
    const auto inst = make_instance(2, {F, PointTag::dep(0, 2), F}, 0, {});
    EXPECT_FALSE(validate(inst).well_formed);
}

TEST(Validate, FreeLineWithIncidenceRejected) {
    auto inst = make_instance(2, {F}, 1, {});
    inst.incidences.emplace(0, 0);
    EXPECT_FALSE(validate(inst).complete);
}

TEST(Validate, TwoLinesThroughTwoPointsUnrealizable) {
    PlpInstance inst = make_instance(2, {F, F}, 0, {});
    inst.lines = {LineTag::span(0, 1), LineTag::span(0, 1)};
    inst.incidences = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    EXPECT_FALSE(validate(inst).realizable);
}

TEST(Validate, FourPointsOnASpannedLineUnrealizable) {
    PlpInstance inst = make_instance(2, {F, F, PointTag::dep(0, 1), PointTag::dep(0, 1)}, 0, {});
    inst.lines.push_back(LineTag::span(0, 1));
    inst.incidences = {{0, 0}, {1, 0}, {2, 0}, {3, 0}};
    EXPECT_FALSE(validate(inst).realizable);
}

TEST(CanonicalKey, InvariantUnderLineRelabeling) {
    const auto inst = make_instance(4, {F, F, F}, 2, {0, 0, 1, 2});
    const auto k0 = canonical_key(inst);
    std::vector<int> perm(inst.lines.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937 rng(1);
    for (int n = 0; n < 20; ++n) {
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto k = canonical_key(relabel_lines(inst, perm));
        EXPECT_EQ(k.text, k0.text);
        EXPECT_EQ(k.hex(), k0.hex());
    }
}

TEST(CanonicalKey, InvariantUnderFreePointRelabeling) {
    // Same multiset of attachments on differently numbered free points.
    const auto a = make_instance(3, {F, F, F}, 0, {0, 0, 0, 1});
    const auto b = make_instance(3, {F, F, F}, 0, {2, 2, 2, 0});
    EXPECT_EQ(canonical_key(a), canonical_key(b));
}

TEST(CanonicalKey, DistinguishesAttachmentPatterns) {
    const auto a = make_instance(3, {F, F}, 0, {0, 0, 1, 1});
    const auto b = make_instance(3, {F, F}, 0, {0, 0, 0, 1});
    EXPECT_NE(canonical_key(a).text, canonical_key(b).text);
}

TEST(CanonicalKey, DistinguishesDisjointAndSharedCollinearities) {
    const auto D = [](int a, int b) { return PointTag::dep(a, b); };
    const auto disjoint = make_instance(2, {F, F, F, F, F, D(0, 1), D(2, 3)}, 0, {});
    const auto shared = make_instance(2, {F, F, F, F, F, D(0, 1), D(1, 2)}, 0, {});
    EXPECT_NE(canonical_key(disjoint).text, canonical_key(shared).text);
}

TEST(CanonicalKey, HexIsSixteenLowercaseDigits) {
    const auto h = canonical_key(make_instance(2, {F, F, F, F, F, F, F}, 0, {})).hex();
    ASSERT_EQ(h.size(), 16u);
    EXPECT_TRUE(std::all_of(h.begin(), h.end(), [](char c) { return std::isxdigit(c) && !std::isupper(c); }));
}

TEST(Json, RoundTrip) {
    PlpInstance inst = make_instance(3, {F, F, PointTag::dep(0, 1)}, 1, {0, 2});
    inst.lines.push_back(LineTag::span(0, 1));
    inst.incidences.emplace(0, 3);
    inst.incidences.emplace(1, 3);
    inst.incidences.emplace(2, 3);
    ASSERT_TRUE(validate(inst).valid());
    const auto back = instance_from_json(json::parse(to_json(inst).dump()));
    EXPECT_EQ(back, inst);
    EXPECT_EQ(canonical_key(back), canonical_key(inst));
}

TEST(Json, UnknownTagThrows) {
    const auto j = json::parse(R"({"m":2,"points":[{"tag":"weird"}],"lines":[],"incidences":[]})");
    EXPECT_THROW(instance_from_json(j), InvalidInstance);
}
