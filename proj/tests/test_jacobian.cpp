#include <gtest/gtest.h>

#include <random>

#include "plp/stabilizer.hpp"
#include "plp/verify.hpp"

using namespace plp;

namespace {

const PointTag F = PointTag::free();

std::vector<cplx> random_complex(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> u(n);
    for (auto& x : u) x = {g(rng), g(rng)};
    return u;
}

}  // namespace

TEST(Chart, ParameterLayout) {
    const auto c = build_chart(make_instance(3, {F, F, F, PointTag::dep(0, 1)}, 2, {0, 1, 3}));
    EXPECT_EQ(c.camera_params, 7 + 11);
    EXPECT_EQ(c.point_offset, (std::vector<int>{18, 21, 24, 27}));
    EXPECT_EQ(c.line_offset, (std::vector<int>{28, 32, 36, 38, 40}));
    EXPECT_EQ(c.domain_size(), 42);
}

TEST(Chart, UnbalancedInputThrows) {
    EXPECT_THROW(build_chart(make_instance(3, {F, F, F, F, F}, 0, {})), UnbalancedSignature);
    EXPECT_THROW(build_chart(make_instance(1, {F, F, F, F}, 0, {})), UnbalancedSignature);
}

TEST(Chart, GaugeShape) {
    std::mt19937_64 rng(2);
    const auto c = build_chart(make_instance(3, {F, F, F, F, F, F}, 0, {}));
    const auto r = realize(c, random_complex(c.domain_size(), rng));
    ASSERT_EQ(r.cams.size(), 3u);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_EQ(r.cams[0].P[i][j], cplx(i == j ? 1.0 : 0.0));
    const double row0[4] = {0, 0, 0, 1};
    for (int j = 0; j < 4; ++j) EXPECT_EQ(r.cams[1].P[0][j], cplx(row0[j]));
    EXPECT_EQ(r.cams[1].P[2][2], cplx(1.0));
    EXPECT_EQ(r.cams[2].P[2][3], cplx(1.0));
}

TEST(Map, FreePointImagesAreAffineRatios) {
    std::mt19937_64 rng(4);
    const auto c = build_chart(make_instance(3, {F, F, F, F, F, F}, 0, {}));
    const auto u = random_complex(c.domain_size(), rng);
    const auto r = realize(c, u);
    const auto y = evaluate_map(c, u);
    ASSERT_EQ(static_cast<int>(y.size()), c.image_size());
    std::size_t k = 0;
    for (const auto& cam : r.cams)
        for (const auto& X : r.points) {
            cplx x[3] = {};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 4; ++j) x[i] += cam.P[i][j] * X[j];
            EXPECT_LT(std::abs(y[k++] - x[0] / x[2]), 1e-9);
            EXPECT_LT(std::abs(y[k++] - x[1] / x[2]), 1e-9);
        }
}

TEST(Jacobian, DenseEqualsSparseOverFp) {
    FpContext ctx(kDefaultPrime);
    std::mt19937_64 rng(6);
    for (const auto& inst : {make_instance(3, {F, F, F, PointTag::dep(0, 1)}, 2, {0, 1, 3}),
                             make_instance(4, {F, F, F}, 2, {0, 1, 1}), make_instance(2, {F, F, F, F, F, F, F}, 0, {})}) {
        const auto c = build_chart(inst);
        const auto u = sample_params(c, rng);
        const auto a = jacobian_dense(c, u), b = jacobian(c, u);
        EXPECT_EQ(a.a, b.a);
    }
}

TEST(Jacobian, MatchesFiniteDifferences) {
    std::mt19937_64 rng(8);
    int tested = 0;
    for (const auto& inst : all_candidates()) {
        if (inst.m > 4 || (tested++ % 7)) continue;
        const auto c = build_chart(inst);
        const auto u = random_complex(c.domain_size(), rng);
        const auto J = jacobian(c, u);
        const auto N = oracle::finite_difference_jacobian(c, u);
        double scale = 1.0, err = 0.0;
        for (std::size_t i = 0; i < J.a.size(); ++i) {
            scale = std::max(scale, std::abs(J.a[i]));
            err = std::max(err, std::abs(J.a[i] - N.a[i]));
        }
        EXPECT_LT(err / scale, 1e-5) << signature_of(inst).str();
    }
    EXPECT_GT(tested, 20);
}

TEST(Gauge, RoundTripThroughRandomHomography) {
    FpContext ctx(kDefaultPrime);
    std::mt19937_64 rng(10);
    const auto c = build_chart(make_instance(3, {F, F, F, PointTag::dep(0, 1)}, 2, {0, 1, 3}));
    int done = 0;
    for (int n = 0; n < 10; ++n) {
        const auto u = sample_params(c, rng);
        const auto r = realize(c, u);
        Matrix<Fp> H(4, 4);
        for (auto& x : H.a) x = Fp::from_residue(rng() % Fp::modulus());
        try {
            const auto v = to_chart(c, transform(Configuration<Fp>{r.cams, r.points, r.lines}, H));
            EXPECT_EQ(evaluate_map(c, u), evaluate_map(c, v));
            ++done;
        } catch (const DegenerateSample&) {
        }
    }
    EXPECT_GE(done, 8);
}

TEST(Certify, SevenPointsTwoViewsMinimal) {
    const auto cert = certify(make_instance(2, {F, F, F, F, F, F, F}, 0, {}));
    EXPECT_EQ(cert.verdict, Verdict::Minimal);
    EXPECT_EQ(cert.rank, cert.dim);
    EXPECT_EQ(cert.evidence_kind, "rank");
}

TEST(Certify, SeedIndependentVerdict) {
    CertifyOptions a, b;
    b.seed = 99;
    const auto inst = make_instance(3, {F, F, F, F}, 0, {0, 1, 2, 3, 3, 3});
    EXPECT_EQ(certify(inst, a).verdict, certify(inst, b).verdict);
}

TEST(Certify, CriterionFlaggedCandidatesNeverReachFullRank) {
    const auto& ob = default_obstructions();
    int flagged = 0;
    for (const auto& inst : all_candidates()) {
        if (scan_criteria(inst, ob.criteria).empty()) continue;
        ++flagged;
        const auto cert = certify(inst);
        EXPECT_NE(cert.verdict, Verdict::Minimal) << signature_of(inst).str();
        EXPECT_LT(cert.rank, cert.dim);
    }
    EXPECT_EQ(flagged, 130);
}

TEST(Certify, JsonFields) {
    const auto j = to_json(certify(make_instance(3, {F, F, F, F, F, F}, 0, {})));
    for (const char* k : {"key", "verdict", "rank", "dim"}) EXPECT_TRUE(j.contains(k)) << k;
}
