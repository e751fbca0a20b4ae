#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "dimension.hpp"
#include "incidence.hpp"

namespace plp {

struct UnbalancedSignature : std::invalid_argument {
    explicit UnbalancedSignature(const std::string& w) : std::invalid_argument(w) {}
};

/**
 * Gauge-fixed coordinates on (cameras x arrangement) / PGL4 and on the image
 * space of one view.
 *
 * Domain parameters, in order:
 *   camera 2: [[0,0,0,1],[a,b,c,d],[e,f,1,g]]          7
 *   camera k >= 3: all entries except (2,3) = 1          11 each
 *   free point (x,y,z,1)                                 3
 *   dependent point parentA + t parentB                  1
 *   free line through (1,a,b,0) and (c,1,0,d)            4
 *   adjacent line through its point and (1,a,b,0)        2
 * Camera 1 is [I|0]; spanned lines carry no parameters.
 *
 * Image coordinates per view, in the same entity order: free point x0/x2,
 * x1/x2; dependent point its mixing weight along the normalized parent
 * images; free line l0/l2, l1/l2; adjacent line l0/l2.
 */
struct ChartSpec {
    PlpInstance instance;
    PlpSignature sig;
    DimensionBudget dims;
    int camera_params = 0;
    std::vector<int> point_offset;  // parameter offset of each point
    std::vector<int> line_offset;   // parameter offset of each line, -1 for spanned

    int domain_size() const { return dims.dimDomain; }
    int view_size() const { return dims.dimY; }
    int image_size() const { return dims.dimCodomain; }
};

inline ChartSpec build_chart(const PlpInstance& inst) {
    ChartSpec c;
    c.instance = inst;
    c.sig = signature_of(inst);
    if (c.sig.m < 2) throw UnbalancedSignature("chart needs m >= 2");
    if (!is_balanced(c.sig)) throw UnbalancedSignature("signature " + c.sig.str() + " is not balanced");
    c.dims = budget(c.sig);
    c.camera_params = 7 + 11 * (inst.m - 2);
    int off = c.camera_params;
    for (const auto& p : inst.points) {
        c.point_offset.push_back(off);
        off += p.kind == PointTag::Free ? 3 : 1;
    }
    for (const auto& l : inst.lines) {
        switch (l.kind) {
        case LineTag::Free: c.line_offset.push_back(off), off += 4; break;
        case LineTag::Adjacent: c.line_offset.push_back(off), off += 2; break;
        case LineTag::Spanned: c.line_offset.push_back(-1); break;
        }
    }
    if (off != c.dims.dimDomain) throw std::logic_error("chart parameter count differs from the domain dimension");
    return c;
}

/** Cameras and homogeneous world entities for one parameter vector. */
template <class T>
struct Realization {
    std::vector<Camera<T>> cams;
    std::vector<Vec4<T>> points;
    std::vector<WorldLine<T>> lines;  // spanned lines use their two spanning points
};

template <class T>
Realization<T> realize(const ChartSpec& c, const std::vector<T>& u) {
    if (static_cast<int>(u.size()) != c.domain_size()) throw std::invalid_argument("parameter vector has wrong length");
    const T zero(0), one(1);
    Realization<T> r;
    const int m = c.instance.m;
    r.cams.resize(m);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) r.cams[0].P[i][j] = i == j ? one : zero;
    r.cams[1].P[0] = {zero, zero, zero, one};
    r.cams[1].P[1] = {u[0], u[1], u[2], u[3]};
    r.cams[1].P[2] = {u[4], u[5], one, u[6]};
    for (int k = 2; k < m; ++k) {
        const int o = 7 + 11 * (k - 2);
        for (int e = 0; e < 11; ++e) r.cams[k].P[e / 4][e % 4] = u[o + e];
        r.cams[k].P[2][3] = one;
    }
    const auto& inst = c.instance;
    r.points.resize(inst.points.size());
    for (std::size_t i = 0; i < inst.points.size(); ++i) {
        const int o = c.point_offset[i];
        const auto& t = inst.points[i];
        if (t.kind == PointTag::Free) {
            r.points[i] = {u[o], u[o + 1], u[o + 2], one};
        } else {
            const auto& A = r.points[t.a];
            const auto& B = r.points[t.b];
            for (int k = 0; k < 4; ++k) r.points[i][k] = A[k] + u[o] * B[k];
        }
    }
    r.lines.resize(inst.lines.size());
    for (std::size_t l = 0; l < inst.lines.size(); ++l) {
        const int o = c.line_offset[l];
        const auto& t = inst.lines[l];
        switch (t.kind) {
        case LineTag::Free:
            r.lines[l] = {{one, u[o], u[o + 1], zero}, {u[o + 2], one, zero, u[o + 3]}};
            break;
        case LineTag::Adjacent: r.lines[l] = {r.points[t.a], {one, u[o], u[o + 1], zero}}; break;
        case LineTag::Spanned: r.lines[l] = {r.points[t.a], r.points[t.b]}; break;
        }
    }
    return r;
}

/** Homogeneous images of every point and line in every view. */
template <class T>
struct ImageSet {
    std::vector<std::vector<Vec3<T>>> points;  // [view][point]
    std::vector<std::vector<Vec3<T>>> lines;   // [view][line]
};

template <class T>
ImageSet<T> project_all(const ChartSpec& c, const std::vector<T>& u) {
    const auto r = realize(c, u);
    ImageSet<T> im;
    for (const auto& cam : r.cams) {
        std::vector<Vec3<T>> xs, ls;
        for (const auto& X : r.points) xs.push_back(apply(cam, X));
        for (const auto& L : r.lines) ls.push_back(cross(apply(cam, L.a), apply(cam, L.b)));
        im.points.push_back(std::move(xs));
        im.lines.push_back(std::move(ls));
    }
    return im;
}

/**
 * The joint camera map in chart coordinates; output length m * dimY.
 * Chart divisions by zero throw DegenerateSample for exact scalar types.
 */
template <class T>
std::vector<T> evaluate_map(const ChartSpec& c, const std::vector<T>& u) {
    const auto r = realize(c, u);
    const auto& inst = c.instance;
    std::vector<T> y;
    y.reserve(c.image_size());
    std::vector<Vec3<T>> img(inst.points.size());
    for (const auto& cam : r.cams) {
        for (std::size_t i = 0; i < inst.points.size(); ++i) img[i] = apply(cam, r.points[i]);
        for (std::size_t i = 0; i < inst.points.size(); ++i) {
            const auto& t = inst.points[i];
            const auto& x = img[i];
            if (t.kind == PointTag::Free) {
                y.push_back(x[0] / x[2]);
                y.push_back(x[1] / x[2]);
            } else {
                // x ~ a + mu b with a, b the parent images scaled to third coordinate 1
                const auto& A = img[t.a];
                const auto& B = img[t.b];
                const T xa = (x[0] * A[1] - x[1] * A[0]) / A[2];
                const T xb = (x[0] * B[1] - x[1] * B[0]) / B[2];
                y.push_back(-xa / xb);
            }
        }
        for (std::size_t l = 0; l < inst.lines.size(); ++l) {
            const auto& t = inst.lines[l];
            if (t.kind == LineTag::Spanned) continue;
            const Vec3<T> ln = cross(apply(cam, r.lines[l].a), apply(cam, r.lines[l].b));
            y.push_back(ln[0] / ln[2]);
            if (t.kind == LineTag::Free) y.push_back(ln[1] / ln[2]);
        }
    }
    return y;
}

/** Jacobian of evaluate_map by forward-mode derivatives with seed width D. */
template <class S>
Matrix<S> jacobian_dense(const ChartSpec& c, const std::vector<S>& u, std::vector<S>* value = nullptr) {
    const std::size_t D = u.size();
    std::vector<TangentNumber<S>> x;
    x.reserve(D);
    for (std::size_t i = 0; i < D; ++i) x.push_back(TangentNumber<S>::variable(u[i], i, D));
    const auto y = evaluate_map(c, x);
    Matrix<S> J(y.size(), D);
    for (std::size_t r = 0; r < y.size(); ++r) {
        const auto& d = y[r].partials();
        for (std::size_t k = 0; k < d.size(); ++k) J(r, k) = d[k];
    }
    if (value) {
        value->clear();
        for (const auto& t : y) value->push_back(t.value());
    }
    return J;
}

/** Same Jacobian with sparse tangents; the default for certification and tracking. */
template <class S>
Matrix<S> jacobian(const ChartSpec& c, const std::vector<S>& u, std::vector<S>* value = nullptr) {
    const std::size_t D = u.size();
    std::vector<SparseTangent<S>> x;
    x.reserve(D);
    for (std::size_t i = 0; i < D; ++i) x.push_back(SparseTangent<S>::variable(u[i], i, D));
    const auto y = evaluate_map(c, x);
    Matrix<S> J(y.size(), D);
    for (std::size_t r = 0; r < y.size(); ++r)
        for (int k = 0; k < y[r].nnz(); ++k) J(r, y[r].index(k)) = y[r].derivative(k);
    if (value) {
        value->clear();
        for (const auto& t : y) value->push_back(t.value());
    }
    return J;
}

// ---------------------------------------------------------------------------
// Re-gauging a general configuration into the chart
// ---------------------------------------------------------------------------

/** Configuration in arbitrary projective coordinates (one WorldLine per line, spanned ones ignored). */
template <class S>
struct Configuration {
    std::vector<Camera<S>> cams;
    std::vector<Vec4<S>> points;
    std::vector<WorldLine<S>> lines;
};

template <class S>
Matrix<S> to_matrix(const Camera<S>& c) {
    Matrix<S> M(3, 4);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) M(i, j) = c.P[i][j];
    return M;
}

template <class S>
Camera<S> to_camera(const Matrix<S>& M) {
    Camera<S> c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) c.P[i][j] = M(i, j);
    return c;
}

template <class S>
Vec4<S> mul(const Matrix<S>& M, const Vec4<S>& x) {
    Vec4<S> y{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) y[i] += M(i, j) * x[j];
    return y;
}

/** Applies a world homography: cameras P -> P H, world X -> H^-1 X. */
template <class S>
Configuration<S> transform(const Configuration<S>& cfg, const Matrix<S>& H) {
    const Matrix<S> Hi = inverse(H);
    Configuration<S> out;
    for (const auto& c : cfg.cams) out.cams.push_back(to_camera(to_matrix(c) * H));
    for (const auto& X : cfg.points) out.points.push_back(mul(Hi, X));
    for (const auto& L : cfg.lines) out.lines.push_back({mul(Hi, L.a), mul(Hi, L.b)});
    return out;
}

/**
 * Chart parameters of a configuration: finds the unique homography taking
 * camera 1 to [I|0] and camera 2 to the normalized shape, then reads off
 * the entity coordinates.  Throws DegenerateSample on chart singularities.
 */
template <class S>
std::vector<S> to_chart(const ChartSpec& c, const Configuration<S>& cfg) {
    const int m = c.instance.m;
    const S zero(0), one(1);
    Matrix<S> Q(4, 4);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) Q(i, j) = cfg.cams[0].P[i][j];
    Q(3, 3) = one;
    const Matrix<S> Qi = inverse(Q);
    Matrix<S> A(4, 3);
    Vec4<S> ctr;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 3; ++j) A(i, j) = Qi(i, j);
        ctr[i] = Qi(i, 3);
    }
    const Matrix<S> P2 = to_matrix(cfg.cams[1]);
    const Matrix<S> P2A = P2 * A;
    Vec3<S> P2c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) P2c[i] += P2(i, j) * ctr[j];
    if (is_zero(P2c[0])) throw DegenerateSample("camera 2 chart singular");
    Matrix<S> M(4, 3);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = A(i, j) - ctr[i] * P2A(0, j) / P2c[0];
    const Matrix<S> P2M = P2 * M;
    if (is_zero(P2M(2, 2))) throw DegenerateSample("camera 2 chart singular");
    const S kappa = one / P2M(2, 2);
    const S s = one / (kappa * P2c[0]);
    Matrix<S> G(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 3; ++j) G(i, j) = M(i, j);
        G(i, 3) = s * ctr[i];
    }
    const Configuration<S> g = transform(cfg, G);

    std::vector<S> u(c.domain_size(), zero);
    {
        const auto& P = g.cams[1].P;
        const S k = one / P[2][2];
        u[0] = k * P[1][0], u[1] = k * P[1][1], u[2] = k * P[1][2], u[3] = k * P[1][3];
        u[4] = k * P[2][0], u[5] = k * P[2][1], u[6] = k * P[2][3];
    }
    for (int cam = 2; cam < m; ++cam) {
        const auto& P = g.cams[cam].P;
        if (is_zero(P[2][3])) throw DegenerateSample("camera chart singular");
        const S k = one / P[2][3];
        const int o = 7 + 11 * (cam - 2);
        for (int e = 0; e < 11; ++e) u[o + e] = k * P[e / 4][e % 4];
    }

    const auto& inst = c.instance;
    std::vector<Vec4<S>> chart_pts(inst.points.size());
    for (std::size_t i = 0; i < inst.points.size(); ++i) {
        const int o = c.point_offset[i];
        const auto& X = g.points[i];
        const auto& t = inst.points[i];
        if (t.kind == PointTag::Free) {
            if (is_zero(X[3])) throw DegenerateSample("point at infinity");
            const S k = one / X[3];
            u[o] = k * X[0], u[o + 1] = k * X[1], u[o + 2] = k * X[2];
            chart_pts[i] = {u[o], u[o + 1], u[o + 2], one};
        } else {
            // X = alpha (A + t B): solve on the first coordinate pair with nonzero minor
            const auto& Ap = chart_pts[t.a];
            const auto& Bp = chart_pts[t.b];
            bool done = false;
            for (int p = 0; p < 4 && !done; ++p)
                for (int q = p + 1; q < 4 && !done; ++q) {
                    const S det = Ap[p] * Bp[q] - Ap[q] * Bp[p];
                    if (is_zero(det)) continue;
                    const S alpha = (X[p] * Bp[q] - X[q] * Bp[p]) / det;
                    const S alpha_t = (Ap[p] * X[q] - Ap[q] * X[p]) / det;
                    if (is_zero(alpha)) throw DegenerateSample("dependent point chart singular");
                    u[o] = alpha_t / alpha;
                    done = true;
                }
            if (!done) throw DegenerateSample("parents coincide");
            for (int k = 0; k < 4; ++k) chart_pts[i][k] = Ap[k] + u[o] * Bp[k];
        }
    }
    for (std::size_t l = 0; l < inst.lines.size(); ++l) {
        const auto& t = inst.lines[l];
        if (t.kind == LineTag::Spanned) continue;
        const int o = c.line_offset[l];
        const auto& U = g.lines[l].a;
        const auto& V = g.lines[l].b;
        Vec4<S> w0, z0;  // meets with the planes w = 0 and z = 0
        for (int k = 0; k < 4; ++k) w0[k] = U[3] * V[k] - V[3] * U[k], z0[k] = U[2] * V[k] - V[2] * U[k];
        if (is_zero(w0[0])) throw DegenerateSample("line chart singular");
        const S kw = one / w0[0];
        u[o] = kw * w0[1], u[o + 1] = kw * w0[2];
        if (t.kind == LineTag::Free) {
            if (is_zero(z0[1])) throw DegenerateSample("line chart singular");
            const S kz = one / z0[1];
            u[o + 2] = kz * z0[0], u[o + 3] = kz * z0[3];
        }
    }
    return u;
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

enum class Verdict { Minimal, NonMinimal, Undetermined };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Minimal: return "minimal";
    case Verdict::NonMinimal: return "non-minimal";
    case Verdict::Undetermined: return "undetermined";
    }
    return "?";
}

struct Certificate {
    std::string key;  // hex canonical key
    Verdict verdict = Verdict::Undetermined;
    int rank = -1;     // best Jacobian rank observed (-1: not evaluated)
    int dim = 0;       // domain dimension
    std::uint64_t prime = 0;
    std::uint64_t seed = 0;
    int trials = 0;    // Jacobian samples evaluated
    std::string evidence_kind;  // "rank", "criterion", "ledger", or ""
    std::string evidence;       // criterion id, ledger id or diagnostic
};

inline json to_json(const Certificate& c) {
    json j;
    j["key"] = c.key;
    j["verdict"] = to_string(c.verdict);
    j["rank"] = c.rank;
    j["dim"] = c.dim;
    j["prime"] = c.prime;
    j["seed"] = c.seed;
    j["trials"] = c.trials;
    j["evidence"] = c.evidence_kind.empty() ? json(nullptr) : json(c.evidence_kind + ":" + c.evidence);
    return j;
}

struct CertifyOptions {
    int trials = 3;  // per prime
    std::vector<std::uint64_t> primes{kDefaultPrime, kSecondPrime};
    std::uint64_t seed = 20240601;
    int max_resamples = 50;
};

/** Uniform parameter vector over the current F_p. */
inline std::vector<Fp> sample_params(const ChartSpec& c, std::mt19937_64& rng) {
    std::vector<Fp> u(c.domain_size());
    const std::uint64_t p = Fp::modulus();
    for (auto& x : u) x = Fp::from_residue(rng() % p);
    return u;
}

/** Per-instance seed so results do not depend on scheduling. */
inline std::uint64_t instance_seed(std::uint64_t global, const CanonicalLabel& key) { return global ^ key.hash; }

/**
 * Minimal when the Jacobian has full rank at some random sample over some
 * prime; otherwise Undetermined.  A rank deficiency is never taken as proof of
 * non-minimality here.
 */
inline Certificate certify(const PlpInstance& inst, const CertifyOptions& opt = {}) {
    const ChartSpec c = build_chart(inst);
    const auto key = canonical_key(inst);
    Certificate cert;
    cert.key = key.hex();
    cert.dim = c.domain_size();
    cert.seed = instance_seed(opt.seed, key);
    std::mt19937_64 rng(cert.seed);
    int degenerate_streak = 0;
    for (const auto p : opt.primes) {
        FpContext ctx(p);
        for (int t = 0; t < opt.trials; ++t) {
            Matrix<Fp> J;
            int resamples = 0;
            while (true) {
                try {
                    J = jacobian(c, sample_params(c, rng));
                    break;
                } catch (const DegenerateSample&) {
                    if (++resamples >= opt.max_resamples) break;
                }
            }
            if (resamples >= opt.max_resamples) {
                ++degenerate_streak;
                cert.evidence = "persistent degenerate samples";
                continue;
            }
            ++cert.trials;
            const int r = static_cast<int>(rank(J));
            if (r > cert.rank) cert.rank = r, cert.prime = p;
            if (r == cert.dim) {
                cert.verdict = Verdict::Minimal;
                cert.evidence_kind = "rank";
                cert.evidence = std::to_string(r) + "/" + std::to_string(cert.dim);
                return cert;
            }
        }
    }
    if (degenerate_streak == 0) cert.evidence.clear();
    return cert;
}

/** Sampled evidence for an m-independent family: certify at each requested m. */
inline std::vector<Certificate> certify_family(const std::vector<PointTag>& points, int lf, const std::vector<int>& attach,
                                               const std::vector<int>& m_samples, const CertifyOptions& opt = {}) {
    std::vector<Certificate> out;
    for (int m : m_samples) out.push_back(certify(make_instance(m, points, lf, attach), opt));
    return out;
}

}  // namespace plp
