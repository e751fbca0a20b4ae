#include <gtest/gtest.h>

#include "plp/catalog.hpp"
#include "plp/stabilizer.hpp"

using namespace plp;

namespace {

const PointTag F = PointTag::free();

// Largest l with m c + (xa l + xb) >= m (ya l + yb), solved in closed form.
int closed_form_bound(const ReducedSubproblem& r, int m) {
    const int slope = m * r.dimYPrime.a - r.dimXPrime.a;
    const int rhs = m * r.dimCPrime + r.dimXPrime.b - m * r.dimYPrime.b;
    if (slope <= 0) return rhs >= 0 ? kUnbounded : -1;
    if (rhs < 0) return -1;
    return rhs / slope;
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    if (pos != std::string::npos) s.replace(pos, from.size(), to);
    return s;
}

}  // namespace

TEST(Inequality, LoadedPointAtEightViews) {
    EXPECT_FALSE(inequality_holds(8, 7, 4, 8));
    EXPECT_TRUE(inequality_holds(8, 7, 8, 7));
    EXPECT_TRUE(inequality_holds(3, 0, 0, 0));
}

TEST(Criteria, StoredBoundsMatchClosedForm) {
    const CriteriaTable t(embedded_data().criteria);
    EXPECT_EQ(t.rows().size(), 10u);
    for (const auto& r : t.rows())
        for (std::size_t k = 0; k < t.buckets().size(); ++k)
            for (int m = t.buckets()[k].first; m <= t.buckets()[k].second; ++m) {
                EXPECT_EQ(closed_form_bound(r, m), r.bounds[k]) << r.id << " m=" << m;
                EXPECT_EQ(derive_bound(r, m), r.bounds[k]) << r.id << " m=" << m;
            }
}

TEST(Criteria, LookupOutsideBucketsIsEmpty) {
    const CriteriaTable t(embedded_data().criteria);
    EXPECT_EQ(t.bound("1", 3), 7);
    EXPECT_EQ(t.bound("1", 8), 5);
    EXPECT_FALSE(t.bound("1", 9).has_value());
    EXPECT_FALSE(t.bound("nope", 3).has_value());
}

TEST(Criteria, CorruptedBoundRejected) {
    const auto bad = replace_once(embedded_data().criteria, "\"bounds\": [7, 6, 5]", "\"bounds\": [7, 6, 6]");
    ASSERT_NE(bad, embedded_data().criteria);
    EXPECT_THROW(CriteriaTable{bad}, CriterionRederivationError);
}

TEST(Criteria, CorruptedDimensionRejected) {
    const auto bad = replace_once(embedded_data().criteria, "\"c\": 7, \"x\": [2, -8]", "\"c\": 8, \"x\": [2, -8]");
    ASSERT_NE(bad, embedded_data().criteria);
    EXPECT_THROW(CriteriaTable{bad}, CriterionRederivationError);
}

TEST(Criteria, UnparsableTextRejected) { EXPECT_THROW(CriteriaTable{"{"}, CriterionRederivationError); }

TEST(Scan, EightViewsSixLinesOnOnePointHitsCriterionOne) {
    const auto c = expand_candidates({8, 1, 0, 2, 6});
    ASSERT_EQ(c.size(), 1u);
    const auto hits = scan_criteria(c.front());
    ASSERT_FALSE(hits.empty());
    EXPECT_EQ(hits.front().id, "1");
    EXPECT_EQ(hits.front().value, 6);
    EXPECT_EQ(hits.front().bound, 5);
}

TEST(Scan, CriterionOneThresholdPerView) {
    const CriteriaTable& t = default_obstructions().criteria;
    for (int m = 3; m <= 8; ++m) {
        const int b = *t.bound("1", m);
        for (int k = 1; k <= b + 2; ++k) {
            const auto inst = make_instance(m, {F}, 0, std::vector<int>(k, 0));
            const auto hits = scan_criteria(inst, t);
            const bool c1 = std::any_of(hits.begin(), hits.end(), [](const CriterionHit& h) { return h.id == "1"; });
            EXPECT_EQ(c1, k > b) << "m=" << m << " k=" << k;
        }
    }
}

TEST(Scan, AddingLinesNeverClearsAHit) {
    const auto& ob = default_obstructions();
    for (const auto& inst : all_candidates()) {
        const auto hits = scan_criteria(inst, ob.criteria);
        if (hits.empty() || inst.points.empty()) continue;
        PlpInstance more = inst;
        const int p = hits.front().points.empty() ? 0 : hits.front().points.front();
        more.incidences.emplace(p, static_cast<int>(more.lines.size()));
        more.lines.push_back(LineTag::adj(p));
        EXPECT_FALSE(scan_criteria(more, ob.criteria).empty()) << signature_of(inst).str();
    }
}

TEST(Scan, HighViewCountsOnlyGetGeometricChecks) {
    const auto inst = make_instance(9, {}, 6, {});
    EXPECT_TRUE(scan_criteria(inst).empty());
}

TEST(Scan, FourCollinearPointsHitH1) {
    PlpInstance inst = make_instance(3, {F, F, PointTag::dep(0, 1), PointTag::dep(0, 1)}, 0, {});
    const auto hits = scan_criteria(inst);
    ASSERT_FALSE(hits.empty());
    EXPECT_EQ(hits.front().id, "H1");
}

TEST(Ledger, NineteenEntriesAllCandidates) {
    const auto& ob = default_obstructions();
    std::set<std::string> cand;
    for (const auto& inst : all_candidates()) cand.insert(canonical_key(inst).text);
    EXPECT_EQ(ob.ledger.entries().size(), 19u);
    for (const auto& e : ob.ledger.entries()) {
        EXPECT_TRUE(cand.count(e.key.text)) << e.id;
        EXPECT_TRUE(scan_criteria(e.instance, ob.criteria).empty()) << e.id;
    }
}

TEST(Classify, CriterionBeforeRank) {
    const auto c = expand_candidates({8, 1, 0, 2, 6});
    const auto cert = classify(c.front());
    EXPECT_EQ(cert.verdict, Verdict::NonMinimal);
    EXPECT_EQ(cert.evidence_kind, "criterion");
    EXPECT_EQ(cert.evidence, "1");
}

TEST(Classify, LedgerEntriesAreNonMinimal) {
    for (const auto& e : default_obstructions().ledger.entries()) {
        const auto cert = classify(e.instance);
        EXPECT_EQ(cert.verdict, Verdict::NonMinimal) << e.id;
        EXPECT_EQ(cert.evidence_kind, "ledger") << e.id;
    }
}
