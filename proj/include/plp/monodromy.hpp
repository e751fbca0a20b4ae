#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jacobian.hpp"
#include "parallel.hpp"

namespace plp {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/**
 * F(u; q) = Phi(u) - q for the chart map Phi of an instance.  Unknowns are
 * chart parameters, parameters are image chart coordinates, both of length D.
 */
class SquareSystem {
public:
    explicit SquareSystem(const PlpInstance& inst) : chart_(build_chart(inst)) {}
    explicit SquareSystem(ChartSpec chart) : chart_(std::move(chart)) {}

    int size() const { return chart_.domain_size(); }
    const ChartSpec& chart() const { return chart_; }

    CVec phi(const CVec& u) const {
        const auto y = evaluate_map(chart_, std::vector<cplx>(u.data(), u.data() + u.size()));
        return Eigen::Map<const CVec>(y.data(), static_cast<Eigen::Index>(y.size()));
    }
    /** Phi(u) and dF/du. */
    void eval(const CVec& u, CVec& value, CMat& dFdu) const {
        std::vector<cplx> v;
        const auto J = jacobian(chart_, std::vector<cplx>(u.data(), u.data() + u.size()), &v);
        value = Eigen::Map<const CVec>(v.data(), static_cast<Eigen::Index>(v.size()));
        dFdu.resize(J.rows, J.cols);
        for (std::size_t r = 0; r < J.rows; ++r)
            for (std::size_t c = 0; c < J.cols; ++c) dFdu(r, c) = J(r, c);
    }
    /** dF/dq is constant. */
    CMat dFdq() const { return -CMat::Identity(size(), size()); }
    CVec residual(const CVec& u, const CVec& q) const { return phi(u) - q; }

private:
    ChartSpec chart_;
};

/** Euler and RK4 use the tangent field; Hermite extrapolates from the previous step. */
enum class Predictor { Euler, Hermite, RK4 };

inline const char* to_string(Predictor p) {
    switch (p) {
    case Predictor::Euler: return "euler";
    case Predictor::Hermite: return "hermite";
    case Predictor::RK4: return "rk4";
    }
    return "?";
}

struct TrackOptions {
    Predictor predictor = Predictor::RK4;
    double initial_step = 0.05;
    double min_step = 1e-7;
    double max_step = 0.25;
    double newton_tol = 1e-10;       // endpoint Newton update, relative to 1 + |u|
    double path_tol = 1e-6;          // corrector update along the path, relative to 1 + |u|
    int max_newton = 4;
    int max_steps = 5000;            // accepted plus rejected steps per segment
    int grow_after = 3;
    double grow = 2.0;
    double shrink = 0.5;
    double max_condition = 1e12;
    double endpoint_residual = 1e-8;
    double dedup_distance = 1e-6;
    double divergence_norm = 1e8;
};

enum class PathStatus { Success, MinStep, MaxSteps, NewtonDivergence, IllConditioned, Diverged, EndpointResidual };

inline const char* to_string(PathStatus s) {
    switch (s) {
    case PathStatus::Success: return "success";
    case PathStatus::MinStep: return "min-step";
    case PathStatus::MaxSteps: return "max-steps";
    case PathStatus::NewtonDivergence: return "newton-divergence";
    case PathStatus::IllConditioned: return "ill-conditioned";
    case PathStatus::Diverged: return "diverged";
    case PathStatus::EndpointResidual: return "endpoint-residual";
    }
    return "?";
}

struct TrackResult {
    PathStatus status = PathStatus::Success;
    CVec u;
    int steps = 0;
    int rejected = 0;
    double residual = 0.0;
    bool ok() const { return status == PathStatus::Success; }
};

/** Segment homotopy q(t) with random complex weights, normalized so q(0)=q_from and q(1)=q_to. */
struct GammaPath {
    CVec qa, qb;
    cplx g1{1.0, 0.0}, g2{1.0, 0.0};

    cplx w(double t) const { return (1.0 - t) * g1 + t * g2; }
    CVec q(double t) const {
        if (t == 0.0) return qa;
        if (t == 1.0) return qb;
        return ((1.0 - t) * g1 * qa + t * g2 * qb) / w(t);
    }
    CVec dq(double t) const { return (g1 * g2 / (w(t) * w(t))) * (qb - qa); }
};

inline double inf_norm(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

namespace detail {

/** Newton on F(u) = phi(u) - q; returns false on divergence or bad conditioning. */
template <class System>
PathStatus newton(const System& sys, CVec& u, const CVec& q, const TrackOptions& o, int max_iter, double tol) {
    CVec val;
    CMat J;
    double prev = 0.0;
    for (int k = 0; k < max_iter; ++k) {
        sys.eval(u, val, J);
        Eigen::PartialPivLU<CMat> lu(J);
        const double rc = lu.rcond();
        if (!(rc > 0.0) || 1.0 / rc > o.max_condition) return PathStatus::IllConditioned;
        const CVec du = lu.solve(q - val);
        const double n = inf_norm(du);
        if (!std::isfinite(n)) return PathStatus::NewtonDivergence;
        if (k > 0 && n > 0.5 * prev) return PathStatus::NewtonDivergence;
        u += du;
        const double scale = 1.0 + inf_norm(u);
        if (scale > o.divergence_norm) return PathStatus::Diverged;
        if (n <= tol * scale) return PathStatus::Success;
        prev = n;
    }
    return PathStatus::NewtonDivergence;
}

/** Chord iterations on F(u) = phi(u) - q with a fixed factorization. */
template <class System>
PathStatus chord(const System& sys, const Eigen::PartialPivLU<CMat>& lu, CVec& u, const CVec& q,
                 const TrackOptions& o) {
    double prev = 0.0;
    for (int k = 0; k < o.max_newton; ++k) {
        const CVec du = lu.solve(q - sys.phi(u));
        const double n = inf_norm(du);
        if (!std::isfinite(n)) return PathStatus::NewtonDivergence;
        if (k > 0 && n > 0.5 * prev) return PathStatus::NewtonDivergence;
        u += du;
        const double scale = 1.0 + inf_norm(u);
        if (scale > o.divergence_norm) return PathStatus::Diverged;
        if (n <= o.path_tol * scale) return PathStatus::Success;
        prev = n;
    }
    return PathStatus::NewtonDivergence;
}

}  // namespace detail

/**
 * Tracks a solution of F(u; q_from) = 0 to q_to along the gamma path with the
 * configured predictor and a chord Newton corrector, halving the step on
 * failure and doubling it after a run of successes.  The Jacobian factored at
 * the predicted point serves the corrector and the next predictor.  The
 * endpoint is polished with full Newton to newton_tol.
 */
template <class System>
TrackResult track(const System& sys, const CVec& u_start, const GammaPath& path, const TrackOptions& o) {
    TrackResult r;
    r.u = u_start;
    double t = 0.0, h = o.initial_step;
    int streak = 0;
    CVec val;
    CMat J;
    const auto factor = [&](const CVec& u, Eigen::PartialPivLU<CMat>& lu) {
        sys.eval(u, val, J);
        lu.compute(J);
        const double rc = lu.rcond();
        return rc > 0.0 && 1.0 / rc <= o.max_condition;
    };
    Eigen::PartialPivLU<CMat> lu, lu1, luk;
    const auto tangent = [&](const CVec& u, double tk, bool& ok) -> CVec {
        ok = factor(u, luk);
        return ok ? CVec(luk.solve(path.dq(tk))) : CVec();
    };
    if (!factor(r.u, lu)) {
        r.status = PathStatus::IllConditioned;
        return r;
    }
    double t_prev = 0.0;
    CVec u_prev, v_prev;
    bool have_prev = false;
    while (t < 1.0) {
        h = std::min(h, 1.0 - t);
        const double t1 = (1.0 - t - h) < 1e-14 ? 1.0 : t + h;
        const double dt = t1 - t;
        const CVec k1 = lu.solve(path.dq(t));
        CVec u1;
        bool pred_ok = true;
        if (o.predictor == Predictor::RK4) {
            const CVec k2 = tangent(r.u + 0.5 * dt * k1, t + 0.5 * dt, pred_ok);
            const CVec k3 = pred_ok ? tangent(r.u + 0.5 * dt * k2, t + 0.5 * dt, pred_ok) : k2;
            const CVec k4 = pred_ok ? tangent(r.u + dt * k3, t1, pred_ok) : k3;
            u1 = r.u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else if (o.predictor == Predictor::Hermite && have_prev) {
            const double span = t - t_prev;
            const double x = (t1 - t_prev) / span;
            const double x2 = x * x, x3 = x2 * x;
            u1 = (2 * x3 - 3 * x2 + 1) * u_prev + ((x3 - 2 * x2 + x) * span) * v_prev + (-2 * x3 + 3 * x2) * r.u +
                 ((x3 - x2) * span) * k1;
        } else {
            u1 = r.u + dt * k1;
        }
        auto st = PathStatus::IllConditioned;
        if (pred_ok && factor(u1, lu1)) st = detail::chord(sys, lu1, u1, path.q(t1), o);
        if (r.steps + r.rejected >= o.max_steps) {
            r.status = PathStatus::MaxSteps;
            return r;
        }
        if (st == PathStatus::Success) {
            t_prev = t, u_prev = r.u, v_prev = k1, have_prev = true;
            r.u = u1;
            t = t1;
            std::swap(lu, lu1);
            ++r.steps;
            if (++streak >= o.grow_after) h = std::min(h * o.grow, o.max_step), streak = 0;
        } else {
            ++r.rejected;
            streak = 0;
            h *= o.shrink;
            if (h < o.min_step) {
                r.status = st == PathStatus::Diverged ? st : PathStatus::MinStep;
                return r;
            }
        }
    }
    detail::newton(sys, r.u, path.qb, o, 5, o.newton_tol);
    const CVec res = sys.phi(r.u) - path.qb;
    r.residual = inf_norm(res);
    if (!(r.residual < o.endpoint_residual)) r.status = PathStatus::EndpointResidual;
    return r;
}

inline cplx random_unit(std::mt19937_64& rng) {
    const double th = 2.0 * std::numbers::pi * std::generate_canonical<double, 53>(rng);
    return {std::cos(th), std::sin(th)};
}

inline cplx random_disk(std::mt19937_64& rng) {
    const double r = std::sqrt(std::generate_canonical<double, 53>(rng));
    return r * random_unit(rng);
}

inline cplx random_gaussian(std::mt19937_64& rng) {
    // Box-Muller on two uniforms; the complex result has unit variance.
    double u1 = std::generate_canonical<double, 53>(rng);
    if (u1 <= 0.0) u1 = 1e-300;
    const double rad = std::sqrt(-std::log(u1));
    return rad * random_unit(rng);
}

struct StartPair {
    CVec u0, q0;
};

/** Random chart parameters in the unit disk and their image; resamples on non-finite output. */
inline StartPair synth_start_pair(const SquareSystem& sys, std::uint64_t seed, int max_resamples = 50) {
    std::mt19937_64 rng(seed);
    for (int k = 0; k < max_resamples; ++k) {
        StartPair s;
        s.u0.resize(sys.size());
        for (int i = 0; i < sys.size(); ++i) s.u0[i] = random_disk(rng);
        s.q0 = sys.phi(s.u0);
        if (s.q0.allFinite() && inf_norm(s.q0) < 1e6) return s;
    }
    throw DegenerateSample("no non-degenerate start pair after resampling");
}

struct SolutionSet {
    CVec q0;
    std::vector<CVec> solutions;
    int loops = 0;
    int paths_tracked = 0;
    int path_failures = 0;
    std::vector<int> history;  // solution count after each loop
};

struct DegreeOptions {
    TrackOptions track;
    int stop_after_stable_loops = 10;
    int max_loops = 200;
    std::uint64_t seed = 20240601;
    int width = parallel_width();
    std::function<void(const SolutionSet&)> on_loop;  // progress hook, called after each loop
};

struct DegreeEstimate {
    std::string key;
    int degree = 0;
    int loops = 0;
    int path_failures = 0;
    int seeds_agreeing = 1;
    bool lower_bound = true;
    SolutionSet set;
};

inline json to_json(const DegreeEstimate& d) {
    json j;
    j["key"] = d.key;
    j["degree"] = d.degree;
    j["loops"] = d.loops;
    j["path_failures"] = d.path_failures;
    j["seeds_agreeing"] = d.seeds_agreeing;
    return j;
}

inline bool near(const CVec& a, const CVec& b, double tol) {
    return inf_norm(a - b) <= tol * (1.0 + std::max(inf_norm(a), inf_norm(b)));
}

struct MonodromyAbort : std::runtime_error {
    explicit MonodromyAbort(const std::string& w) : std::runtime_error(w) {}
};

/**
 * Triangle loops q0 -> q1 -> q2 -> q0 with fresh q1, q2 each round, tracking
 * every known solution; stops after a run of loops without new solutions.
 * The count is a lower bound on the degree.
 */
inline DegreeEstimate degree(const PlpInstance& inst, const DegreeOptions& opt = {}) {
    const SquareSystem sys(inst);
    const auto key = canonical_key(inst);
    std::mt19937_64 rng(opt.seed ^ key.hash);
    const StartPair sp = synth_start_pair(sys, rng());
    DegreeEstimate est;
    est.key = key.hex();
    SolutionSet& S = est.set;
    S.q0 = sp.q0;
    S.solutions.push_back(sp.u0);
    TrackOptions to = opt.track;
    int stable = 0;
    bool retried = false;
    const int D = sys.size();
    while (S.loops < opt.max_loops && stable < opt.stop_after_stable_loops) {
        CVec q1(D), q2(D);
        for (int i = 0; i < D; ++i) q1[i] = random_gaussian(rng);
        for (int i = 0; i < D; ++i) q2[i] = random_gaussian(rng);
        const GammaPath legs[3] = {{S.q0, q1, random_unit(rng), random_unit(rng)},
                                   {q1, q2, random_unit(rng), random_unit(rng)},
                                   {q2, S.q0, random_unit(rng), random_unit(rng)}};
        const std::vector<CVec> start = S.solutions;
        std::vector<TrackResult> ends(start.size());
        parallel_for(
            start.size(),
            [&](std::size_t i) {
                CVec u = start[i];
                for (const auto& leg : legs) {
                    ends[i] = track(sys, u, leg, to);
                    if (!ends[i].ok()) return;
                    u = ends[i].u;
                }
            },
            opt.width);
        int failed = 0, added = 0;
        for (const auto& e : ends) {
            S.paths_tracked += 1;
            if (!e.ok()) {
                ++failed;
                continue;
            }
            bool dup = false;
            for (const auto& s : S.solutions)
                if (near(s, e.u, to.dedup_distance)) {
                    dup = true;
                    break;
                }
            if (!dup) S.solutions.push_back(e.u), ++added;
        }
        S.path_failures += failed;
        ++S.loops;
        S.history.push_back(static_cast<int>(S.solutions.size()));
        if (failed == static_cast<int>(ends.size())) {
            if (retried) throw MonodromyAbort("every path failed twice in a row");
            retried = true;
            to.initial_step *= 0.5;
            continue;
        }
        retried = false;
        stable = added == 0 ? stable + 1 : 0;
        if (opt.on_loop) opt.on_loop(S);
    }
    est.degree = static_cast<int>(S.solutions.size());
    est.loops = S.loops;
    est.path_failures = S.path_failures;
    return est;
}

/** Runs degree() for each seed; seeds_agreeing counts runs matching the largest count. */
inline DegreeEstimate degree_across_seeds(const PlpInstance& inst, const std::vector<std::uint64_t>& seeds,
                                          DegreeOptions opt = {}) {
    DegreeEstimate best;
    std::vector<int> counts;
    for (auto s : seeds) {
        opt.seed = s;
        auto d = degree(inst, opt);
        counts.push_back(d.degree);
        if (counts.size() == 1 || d.degree > best.degree) best = std::move(d);
    }
    best.seeds_agreeing = static_cast<int>(std::count(counts.begin(), counts.end(), best.degree));
    return best;
}

}  // namespace plp
