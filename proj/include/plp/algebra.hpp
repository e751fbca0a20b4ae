#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace plp {

using cplx = std::complex<double>;

/** Thrown when a sampled configuration hits a chart singularity. */
struct DegenerateSample : std::runtime_error {
    explicit DegenerateSample(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Prime field
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultPrime = 2147483647ULL;  // 2^31 - 1
inline constexpr std::uint64_t kSecondPrime = 2147483629ULL;   // 2^31 - 19

namespace detail {
inline std::uint64_t& fp_modulus_slot() {
    thread_local std::uint64_t p = kDefaultPrime;
    return p;
}
}  // namespace detail

/**
 * Element of Z/pZ for the current thread's modulus.
 *
 * The modulus lives in a thread-local slot; use FpContext to switch it for a
 * scope.  Moduli must stay below 2^32 so products fit in 64 bits.
 */
class Fp {
public:
    Fp() = default;
    Fp(std::int64_t v) {  // NOLINT(google-explicit-constructor)
        const auto p = static_cast<std::int64_t>(modulus());
        v %= p;
        if (v < 0) v += p;
        r_ = static_cast<std::uint64_t>(v);
    }
    static Fp from_residue(std::uint64_t r) {
        Fp x;
        x.r_ = r % modulus();
        return x;
    }

    static std::uint64_t modulus() { return detail::fp_modulus_slot(); }
    std::uint64_t residue() const { return r_; }
    bool is_zero() const { return r_ == 0; }

    Fp operator-() const { return from_raw(r_ == 0 ? 0 : modulus() - r_); }
    Fp& operator+=(Fp o) {
        r_ += o.r_;
        if (r_ >= modulus()) r_ -= modulus();
        return *this;
    }
    Fp& operator-=(Fp o) {
        r_ = r_ >= o.r_ ? r_ - o.r_ : r_ + modulus() - o.r_;
        return *this;
    }
    Fp& operator*=(Fp o) {
        r_ = (r_ * o.r_) % modulus();
        return *this;
    }
    Fp& operator/=(Fp o) { return *this *= o.inverse(); }

    Fp pow(std::uint64_t e) const {
        Fp base = *this, acc = from_raw(1 % modulus());
        while (e) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }
    Fp inverse() const {
        if (r_ == 0) throw DegenerateSample("division by zero in F_p");
        return pow(modulus() - 2);
    }

    friend Fp operator+(Fp a, Fp b) { return a += b; }
    friend Fp operator-(Fp a, Fp b) { return a -= b; }
    friend Fp operator*(Fp a, Fp b) { return a *= b; }
    friend Fp operator/(Fp a, Fp b) { return a /= b; }
    friend bool operator==(Fp a, Fp b) { return a.r_ == b.r_; }
    friend bool operator!=(Fp a, Fp b) { return a.r_ != b.r_; }

private:
    static Fp from_raw(std::uint64_t r) {
        Fp x;
        x.r_ = r;
        return x;
    }
    std::uint64_t r_ = 0;
};

/** Sets the thread's F_p modulus for the lifetime of the object. */
class FpContext {
public:
    explicit FpContext(std::uint64_t p) : saved_(detail::fp_modulus_slot()) {
        if (p < 2 || p >= (1ULL << 32)) throw std::invalid_argument("modulus out of range");
        detail::fp_modulus_slot() = p;
    }
    ~FpContext() { detail::fp_modulus_slot() = saved_; }
    FpContext(const FpContext&) = delete;
    FpContext& operator=(const FpContext&) = delete;

private:
    std::uint64_t saved_;
};

// Scalar helpers so templated code can treat Fp and complex alike.
inline bool is_zero(const Fp& x) { return x.is_zero(); }
inline bool is_zero(const cplx& x) { return x == cplx(0.0, 0.0); }
inline bool is_zero(double x) { return x == 0.0; }

// ---------------------------------------------------------------------------
// Forward-mode derivatives
// ---------------------------------------------------------------------------

/**
 * Value plus a vector of partial derivatives.  An empty partial vector means
 * all partials are zero, which keeps constants cheap.
 */
template <class S>
class TangentNumber {
public:
    TangentNumber() = default;
    TangentNumber(S v) : v_(v) {}  // NOLINT(google-explicit-constructor)
    TangentNumber(std::int64_t v) : v_(S(v)) {}  // NOLINT(google-explicit-constructor)
    TangentNumber(int v) : v_(S(static_cast<std::int64_t>(v))) {}  // NOLINT(google-explicit-constructor)

    /** The i-th of k seed variables with value v. */
    static TangentNumber variable(S v, std::size_t i, std::size_t k) {
        TangentNumber t(v);
        t.d_.assign(k, S(0));
        t.d_[i] = S(1);
        return t;
    }

    const S& value() const { return v_; }
    const std::vector<S>& partials() const { return d_; }
    S partial(std::size_t i) const { return i < d_.size() ? d_[i] : S(0); }

    TangentNumber operator-() const {
        TangentNumber r(-v_);
        r.d_.resize(d_.size());
        for (std::size_t i = 0; i < d_.size(); ++i) r.d_[i] = -d_[i];
        return r;
    }
    TangentNumber& operator+=(const TangentNumber& o) {
        v_ += o.v_;
        if (d_.size() < o.d_.size()) d_.resize(o.d_.size(), S(0));
        for (std::size_t i = 0; i < o.d_.size(); ++i) d_[i] += o.d_[i];
        return *this;
    }
    TangentNumber& operator-=(const TangentNumber& o) {
        v_ -= o.v_;
        if (d_.size() < o.d_.size()) d_.resize(o.d_.size(), S(0));
        for (std::size_t i = 0; i < o.d_.size(); ++i) d_[i] -= o.d_[i];
        return *this;
    }
    TangentNumber& operator*=(const TangentNumber& o) {
        // (a + a')(b + b') = ab + (a b' + a' b)
        for (auto& x : d_) x *= o.v_;
        if (d_.size() < o.d_.size()) d_.resize(o.d_.size(), S(0));
        for (std::size_t i = 0; i < o.d_.size(); ++i) d_[i] += v_ * o.d_[i];
        v_ *= o.v_;
        return *this;
    }
    TangentNumber& operator/=(const TangentNumber& o) {
        if (is_zero(o.v_)) throw DegenerateSample("division by zero");
        const S inv = S(1) / o.v_;
        const S q = v_ * inv;
        // (a/b)' = (a' - q b') / b
        if (d_.size() < o.d_.size()) d_.resize(o.d_.size(), S(0));
        for (std::size_t i = 0; i < d_.size(); ++i) {
            S di = d_[i];
            if (i < o.d_.size()) di -= q * o.d_[i];
            d_[i] = di * inv;
        }
        v_ = q;
        return *this;
    }

    friend TangentNumber operator+(TangentNumber a, const TangentNumber& b) { return a += b; }
    friend TangentNumber operator-(TangentNumber a, const TangentNumber& b) { return a -= b; }
    friend TangentNumber operator*(TangentNumber a, const TangentNumber& b) { return a *= b; }
    friend TangentNumber operator/(TangentNumber a, const TangentNumber& b) { return a /= b; }

private:
    S v_{};
    std::vector<S> d_;
};

template <class S>
bool is_zero(const TangentNumber<S>& x) {
    return is_zero(x.value());
}

/**
 * Tangent number with sparse partials stored inline: sorted variable indices
 * and their derivatives, at most Cap of them.  Same arithmetic as
 * TangentNumber but cost proportional to the number of nonzero partials.
 */
template <class S, int Cap = 64>
class SparseTangent {
public:
    SparseTangent() : v_(S(0)) {}
    SparseTangent(S v) : v_(v) {}  // NOLINT(google-explicit-constructor)
    SparseTangent(std::int64_t v) : v_(S(v)) {}  // NOLINT(google-explicit-constructor)
    SparseTangent(int v) : v_(S(static_cast<std::int64_t>(v))) {}  // NOLINT(google-explicit-constructor)
    SparseTangent(const SparseTangent& o) : v_(o.v_), n_(o.n_) {
        std::copy_n(o.i_, n_, i_);
        std::copy_n(o.s_.d, n_, s_.d);
    }
    SparseTangent& operator=(const SparseTangent& o) {
        v_ = o.v_;
        n_ = o.n_;
        std::copy_n(o.i_, n_, i_);
        std::copy_n(o.s_.d, n_, s_.d);
        return *this;
    }

    static SparseTangent variable(S v, std::size_t i, std::size_t /*k*/) {
        SparseTangent t(v);
        t.n_ = 1;
        t.i_[0] = static_cast<std::uint16_t>(i);
        t.s_.d[0] = S(1);
        return t;
    }

    const S& value() const { return v_; }
    int nnz() const { return n_; }
    std::size_t index(int k) const { return i_[k]; }
    const S& derivative(int k) const { return s_.d[k]; }

    SparseTangent operator-() const {
        SparseTangent r(*this);
        r.v_ = -v_;
        for (int k = 0; k < n_; ++k) r.s_.d[k] = -s_.d[k];
        return r;
    }

    friend SparseTangent operator+(const SparseTangent& a, const SparseTangent& b) {
        SparseTangent r(a.v_ + b.v_);
        r.merge(a, S(1), b, S(1));
        return r;
    }
    friend SparseTangent operator-(const SparseTangent& a, const SparseTangent& b) {
        SparseTangent r(a.v_ - b.v_);
        r.merge(a, S(1), b, -S(1));
        return r;
    }
    friend SparseTangent operator*(const SparseTangent& a, const SparseTangent& b) {
        SparseTangent r(a.v_ * b.v_);
        r.merge(a, b.v_, b, a.v_);
        return r;
    }
    friend SparseTangent operator/(const SparseTangent& a, const SparseTangent& b) {
        if (is_zero(b.v_)) throw DegenerateSample("division by zero");
        const S inv = S(1) / b.v_;
        const S q = a.v_ * inv;
        SparseTangent r(q);
        r.merge(a, inv, b, -q * inv);
        return r;
    }
    SparseTangent& operator+=(const SparseTangent& o) { return *this = *this + o; }
    SparseTangent& operator-=(const SparseTangent& o) { return *this = *this - o; }
    SparseTangent& operator*=(const SparseTangent& o) { return *this = *this * o; }
    SparseTangent& operator/=(const SparseTangent& o) { return *this = *this / o; }

private:
    // partials = ca * a.partials + cb * b.partials
    void merge(const SparseTangent& a, const S& ca, const SparseTangent& b, const S& cb) {
        int x = 0, y = 0, k = 0;
        while (x < a.n_ || y < b.n_) {
            if (k == Cap) throw std::length_error("SparseTangent capacity exceeded");
            if (y == b.n_ || (x < a.n_ && a.i_[x] < b.i_[y])) {
                i_[k] = a.i_[x];
                s_.d[k++] = ca * a.s_.d[x++];
            } else if (x == a.n_ || b.i_[y] < a.i_[x]) {
                i_[k] = b.i_[y];
                s_.d[k++] = cb * b.s_.d[y++];
            } else {
                i_[k] = a.i_[x];
                s_.d[k++] = ca * a.s_.d[x++] + cb * b.s_.d[y++];
            }
        }
        n_ = k;
    }

    union Store {
        Store() {}
        S d[Cap];
    };
    S v_;
    int n_ = 0;
    std::uint16_t i_[Cap];
    Store s_;
};

template <class S, int Cap>
bool is_zero(const SparseTangent<S, Cap>& x) {
    return is_zero(x.value());
}

// ---------------------------------------------------------------------------
// Dense matrices and rank
// ---------------------------------------------------------------------------

/** Row-major dense matrix. */
template <class S>
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<S> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, S(0)) {}
    S& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
        return m;
    }
};

template <class S>
Matrix<S> operator*(const Matrix<S>& x, const Matrix<S>& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matrix shape mismatch");
    Matrix<S> z(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            const S xik = x(i, k);
            if (is_zero(xik)) continue;
            for (std::size_t j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

/** Exact rank over F_p by Gaussian elimination (current modulus). */
inline std::size_t rank(Matrix<Fp> m) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
        std::size_t piv = r;
        while (piv < m.rows && m(piv, c).is_zero()) ++piv;
        if (piv == m.rows) continue;
        if (piv != r)
            for (std::size_t j = c; j < m.cols; ++j) std::swap(m(piv, j), m(r, j));
        const Fp inv = m(r, c).inverse();
        for (std::size_t i = r + 1; i < m.rows; ++i) {
            if (m(i, c).is_zero()) continue;
            const Fp f = m(i, c) * inv;
            for (std::size_t j = c; j < m.cols; ++j) m(i, j) -= f * m(r, j);
        }
        ++r;
    }
    return r;
}

/**
 * Numerical rank over C with partial pivoting.  A pivot counts as zero when
 * its modulus is below rel_tol times the largest entry of the input.
 */
inline std::size_t rank(Matrix<cplx> m, double rel_tol = 1e-10) {
    double scale = 0.0;
    for (const auto& x : m.a) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return 0;
    const double thresh = rel_tol * scale;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
        std::size_t piv = r;
        double best = std::abs(m(r, c));
        for (std::size_t i = r + 1; i < m.rows; ++i)
            if (std::abs(m(i, c)) > best) best = std::abs(m(i, c)), piv = i;
        if (best <= thresh) continue;
        if (piv != r)
            for (std::size_t j = c; j < m.cols; ++j) std::swap(m(piv, j), m(r, j));
        for (std::size_t i = r + 1; i < m.rows; ++i) {
            const cplx f = m(i, c) / m(r, c);
            if (f == cplx(0, 0)) continue;
            for (std::size_t j = c; j < m.cols; ++j) m(i, j) -= f * m(r, j);
        }
        ++r;
    }
    return r;
}

/** Determinant by cofactor-free elimination; exact over F_p. */
template <class S>
S determinant(Matrix<S> m) {
    if (m.rows != m.cols) throw std::invalid_argument("determinant of non-square matrix");
    const std::size_t n = m.rows;
    S det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && is_zero(m(piv, c))) ++piv;
        if (piv == n) return S(0);
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        const S inv = S(1) / m(c, c);
        for (std::size_t i = c + 1; i < n; ++i) {
            const S f = m(i, c) * inv;
            for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return det;
}

/** Inverse of a square matrix over a field; throws DegenerateSample if singular. */
template <class S>
Matrix<S> inverse(Matrix<S> m) {
    const std::size_t n = m.rows;
    Matrix<S> inv = Matrix<S>::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && is_zero(m(piv, c))) ++piv;
        if (piv == n) throw DegenerateSample("singular matrix");
        if (piv != c)
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j)), std::swap(inv(piv, j), inv(c, j));
        const S d = S(1) / m(c, c);
        for (std::size_t j = 0; j < n; ++j) m(c, j) *= d, inv(c, j) *= d;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || is_zero(m(i, c))) continue;
            const S f = m(i, c);
            for (std::size_t j = 0; j < n; ++j) m(i, j) -= f * m(c, j), inv(i, j) -= f * inv(c, j);
        }
    }
    return inv;
}

// ---------------------------------------------------------------------------
// Projective primitives
// ---------------------------------------------------------------------------

template <class S>
using Vec3 = std::array<S, 3>;
template <class S>
using Vec4 = std::array<S, 4>;

/** 3x4 projective camera, row-major. */
template <class S>
struct Camera {
    std::array<std::array<S, 4>, 3> P{};
};

/** World line spanned by two homogeneous points. */
template <class S>
struct WorldLine {
    Vec4<S> a{}, b{};
};

template <class S>
Vec3<S> cross(const Vec3<S>& u, const Vec3<S>& v) {
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

template <class S>
S dot(const Vec3<S>& u, const Vec3<S>& v) {
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

template <class S>
bool all_zero(const Vec3<S>& x) {
    return is_zero(x[0]) && is_zero(x[1]) && is_zero(x[2]);
}

/** PX without the center check; used inside map evaluation. */
template <class S>
Vec3<S> apply(const Camera<S>& cam, const Vec4<S>& X) {
    Vec3<S> x;
    for (int i = 0; i < 3; ++i) {
        S acc = cam.P[i][0] * X[0];
        for (int j = 1; j < 4; ++j) acc += cam.P[i][j] * X[j];
        x[i] = acc;
    }
    return x;
}

/** Image of a world point; throws if X is the camera center. */
template <class S>
Vec3<S> project_point(const Camera<S>& cam, const Vec4<S>& X) {
    Vec3<S> x = apply(cam, X);
    if (all_zero(x)) throw DegenerateSample("world point at camera center");
    return x;
}

/** Image line as the cross product of the two projected spanning points. */
template <class S>
Vec3<S> project_line(const Camera<S>& cam, const WorldLine<S>& L) {
    Vec3<S> l = cross(apply(cam, L.a), apply(cam, L.b));
    if (all_zero(l)) throw DegenerateSample("line projects to a point");
    return l;
}

}  // namespace plp
