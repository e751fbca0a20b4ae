#include <gtest/gtest.h>

#include <random>

#include "plp/algebra.hpp"

using namespace plp;

TEST(Fp, ArithmeticModuloSmallPrime) {
    FpContext ctx(101);
    const Fp a(57), b(88);
    EXPECT_EQ((a + b).residue(), (57 + 88) % 101);
    EXPECT_EQ((a - b).residue(), (57 - 88 + 101) % 101);
    EXPECT_EQ((a * b).residue(), (57 * 88) % 101);
    EXPECT_EQ(((a / b) * b).residue(), a.residue());
    EXPECT_EQ(Fp(-1).residue(), 100u);
}

TEST(Fp, ContextRestoresModulus) {
    const auto outer = Fp::modulus();
    {
        FpContext ctx(7);
        EXPECT_EQ(Fp::modulus(), 7u);
        EXPECT_EQ(Fp(10).residue(), 3u);
    }
    EXPECT_EQ(Fp::modulus(), outer);
}

TEST(Fp, InverseOfEveryUnit) {
    FpContext ctx(101);
    for (int v = 1; v < 101; ++v) EXPECT_EQ((Fp(v) * Fp(v).inverse()).residue(), 1u) << v;
}

TEST(Fp, LargePrimeProductsDoNotOverflow) {
    FpContext ctx(kDefaultPrime);
    const Fp a = Fp::from_residue(kDefaultPrime - 1);
    EXPECT_EQ((a * a).residue(), 1u);
}

namespace {

// Cofactor expansion, independent of the elimination code.
Fp det3(const Matrix<Fp>& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

}  // namespace

TEST(Rank, ThreeByThreeMatchesExplicitDeterminant) {
    FpContext ctx(101);
    std::mt19937_64 rng(11);
    for (int n = 0; n < 500; ++n) {
        Matrix<Fp> m(3, 3);
        for (auto& x : m.a) x = Fp::from_residue(rng() % 5);  // small entries hit singular cases often
        EXPECT_EQ(rank(m) == 3, !det3(m).is_zero());
        EXPECT_EQ(determinant(m).residue(), det3(m).residue());
    }
}

TEST(Rank, KnownShapes) {
    FpContext ctx(101);
    EXPECT_EQ(rank(Matrix<Fp>(4, 5)), 0u);
    EXPECT_EQ(rank(Matrix<Fp>::identity(5)), 5u);
    Matrix<Fp> m(3, 4);
    for (int j = 0; j < 4; ++j) m(0, j) = Fp(j + 1), m(1, j) = Fp(2 * (j + 1)), m(2, j) = Fp(j * j);
    EXPECT_EQ(rank(m), 2u);
}

TEST(Rank, ComplexRankWithTolerance) {
    Matrix<cplx> m(3, 3);
    m(0, 0) = {1, 1}, m(0, 1) = 2.0, m(0, 2) = {0, 3};
    m(1, 0) = {2, 2}, m(1, 1) = 4.0, m(1, 2) = {0, 6};
    m(2, 0) = 1.0, m(2, 1) = {0, -1}, m(2, 2) = 5.0;
    EXPECT_EQ(rank(m), 2u);
    m(1, 2) += cplx(1e-3, 0);
    EXPECT_EQ(rank(m), 3u);
}

TEST(Inverse, RoundTripAndSingularThrows) {
    FpContext ctx(kDefaultPrime);
    std::mt19937_64 rng(3);
    Matrix<Fp> m(4, 4);
    for (auto& x : m.a) x = Fp::from_residue(rng() % Fp::modulus());
    const auto p = m * inverse(m);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(p(i, j).residue(), i == j ? 1u : 0u);
    Matrix<Fp> s(2, 2);
    s(0, 0) = Fp(1), s(0, 1) = Fp(2), s(1, 0) = Fp(2), s(1, 1) = Fp(4);
    EXPECT_THROW(inverse(s), DegenerateSample);
}

TEST(TangentNumber, ProductAndQuotientRules) {
    using T = TangentNumber<double>;
    const T x = T::variable(3.0, 0, 2), y = T::variable(5.0, 1, 2);
    const T f = x * y / (x + y);  // xy/(x+y)
    EXPECT_DOUBLE_EQ(f.value(), 15.0 / 8.0);
    EXPECT_DOUBLE_EQ(f.partial(0), 25.0 / 64.0);  // y^2/(x+y)^2
    EXPECT_DOUBLE_EQ(f.partial(1), 9.0 / 64.0);
}

TEST(SparseTangent, AgreesWithDense) {
    using D = TangentNumber<cplx>;
    using S = SparseTangent<cplx>;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 6;
        std::vector<D> xd;
        std::vector<S> xs;
        for (int i = 0; i < n; ++i) {
            const cplx v(g(rng), g(rng));
            xd.push_back(D::variable(v, i, n));
            xs.push_back(S::variable(v, i, n));
        }
        const D fd = (xd[0] * xd[1] - xd[2]) / (xd[3] + xd[4] * xd[5]) + xd[1] * xd[1];
        const S fs = (xs[0] * xs[1] - xs[2]) / (xs[3] + xs[4] * xs[5]) + xs[1] * xs[1];
        EXPECT_LT(std::abs(fd.value() - fs.value()), 1e-12);
        std::vector<cplx> dense(n);
        for (int k = 0; k < fs.nnz(); ++k) dense[fs.index(k)] = fs.derivative(k);
        for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(fd.partial(i) - dense[i]), 1e-12);
    }
}

TEST(SparseTangent, SupportIsUnionOfOperands) {
    using S = SparseTangent<double>;
    const S a = S::variable(1.0, 3, 10), b = S::variable(2.0, 7, 10);
    const S c = a * b + a;
    ASSERT_EQ(c.nnz(), 2);
    EXPECT_EQ(c.index(0), 3);
    EXPECT_EQ(c.index(1), 7);
    EXPECT_DOUBLE_EQ(c.derivative(0), 3.0);
    EXPECT_DOUBLE_EQ(c.derivative(1), 1.0);
}

TEST(Projection, PointOnLineStaysOnImageLine) {
    FpContext ctx(kDefaultPrime);
    std::mt19937_64 rng(9);
    const auto r = [&] { return Fp::from_residue(rng() % Fp::modulus()); };
    Camera<Fp> cam;
    for (auto& row : cam.P)
        for (auto& e : row) e = r();
    const WorldLine<Fp> L{{r(), r(), r(), r()}, {r(), r(), r(), r()}};
    const Fp s = r();
    Vec4<Fp> X;
    for (int k = 0; k < 4; ++k) X[k] = L.a[k] + s * L.b[k];
    EXPECT_TRUE(dot(project_point(cam, X), project_line(cam, L)).is_zero());
}
