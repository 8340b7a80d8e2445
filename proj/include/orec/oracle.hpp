/**
 * @file oracle.hpp
 * @brief Brute-force checks on tiny instances: grid search, KKT values, the
 * scalar lemma, and continuum extrapolation of discretized cone problems.
 */
#ifndef OREC_ORACLE_HPP
#define OREC_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "constants.hpp"
#include "core_model.hpp"
#include "errors.hpp"
#include "extremal.hpp"
#include "quadrature.hpp"
#include "specialfn.hpp"

namespace orec {

/** \brief Brute-force value next to the KKT value of one instance. */
struct OracleReport {
    double brute_value = 0.0;
    double kkt_value = 0.0;
    double rel_gap = 0.0;
    double resolution = 0.0;
    int refine_rounds = 0;
};

namespace detail {

/** \brief Per-atom box extent from the single-atom constraint envelope. */
inline std::vector<double> atom_upper_bounds(const DiscreteInstance& in) {
    const ExponentTriple e = in.exponents;
    std::vector<double> U(in.atoms(), kInf);
    for (int i = 0; i < in.atoms(); ++i) {
        if (in.in_t0(i)) U[i] = in.delta / std::pow(in.mu[i], 1.0 / e.p);
        for (int j = 0; j < in.n(); ++j)
            if (in.phi[j][i] > 0.0) U[i] = std::min(U[i], 1.0 / (in.phi[j][i] * std::pow(in.mu[i], 1.0 / e.r)));
        if (std::isinf(U[i]) && in.psi[i] != 0.0) throw DomainError("grid search: unbounded atom");
        if (std::isinf(U[i])) U[i] = 0.0;
    }
    return U;
}

/**
 * \brief Objective with the last atom pushed to its largest feasible value;
 * −1 when the free coordinates are already infeasible.
 */
struct BoundaryObjective {
    const DiscreteInstance& in;
    int last;
    std::vector<int> free;
    double q, p, r, dp;

    double operator()(const double* xs) const {
        double noise = 0.0, obj = 0.0;
        std::array<double, 8> cons{};
        const int n = in.n();
        for (std::size_t k = 0; k < free.size(); ++k) {
            const int i = free[k];
            const double x = xs[k];
            if (in.in_t0(i)) noise += in.mu[i] * std::pow(x, p);
            for (int j = 0; j < n; ++j) cons[j] += in.mu[i] * std::pow(in.phi[j][i] * x, r);
            obj += in.mu[i] * std::pow(in.psi[i] * x, q);
        }
        double xl = kInf;
        if (in.in_t0(last)) {
            const double rem = dp - noise;
            if (rem < -1e-15 * dp) return -1.0;
            xl = std::pow(std::max(rem, 0.0) / in.mu[last], 1.0 / p);
        }
        for (int j = 0; j < n; ++j) {
            const double rem = 1.0 - cons[j];
            if (rem < -1e-15) return -1.0;
            if (in.phi[j][last] > 0.0)
                xl = std::min(xl, std::pow(std::max(rem, 0.0) / in.mu[last], 1.0 / r) / in.phi[j][last]);
        }
        if (std::isinf(xl)) xl = 0.0;
        obj += in.mu[last] * std::pow(in.psi[last] * xl, q);
        return std::pow(obj, 1.0 / q);
    }
};

} // namespace detail

/**
 * \brief Maximum of (Σμ|ψx|^q)^{1/q} under the noise and unit constraints by
 * exhaustive search on a box lattice, followed by local refinement rounds
 * (window ±2 steps, step ÷10). The atom of largest |ψ| is eliminated by
 * pushing it to the constraint boundary.
 * \throws SizeError beyond 4 atoms.
 */
inline double grid_search_value(const DiscreteInstance& in, double resolution = 1e-3, int refine_rounds = 3,
                                int threads = 1) {
    check_instance(in);
    const int m = in.atoms();
    if (m > 4) throw SizeError("grid search supports at most 4 atoms");
    if (in.n() > 8) throw SizeError("grid search supports at most 8 constraints");
    if (!(resolution > 0.0 && resolution <= 0.5)) throw DomainError("grid search: resolution must lie in (0, 0.5]");
    const ExponentTriple e = in.exponents;
    const auto U = detail::atom_upper_bounds(in);
    int last = 0;
    for (int i = 1; i < m; ++i)
        if (in.psi[i] > in.psi[last]) last = i;
    detail::BoundaryObjective f{in, last, {}, e.q, e.p, e.r, std::pow(in.delta, e.p)};
    for (int i = 0; i < m; ++i)
        if (i != last) f.free.push_back(i);
    const int k = m - 1;
    if (k == 0) return f(nullptr);

    const int cap = static_cast<int>(std::floor(std::pow(4.0e6, 1.0 / k)));
    const int N = std::max(2, std::min(static_cast<int>(std::ceil(1.0 / resolution)), cap));
    std::vector<double> lo(k, 0.0), step(k);
    for (int a = 0; a < k; ++a) step[a] = U[f.free[a]] / N;
    std::vector<int> npts(k, N + 1);
    std::vector<double> best_x(k, 0.0);
    double best = f(best_x.data());

    auto sweep = [&]() {
        const int outer = npts[0];
        std::vector<double> vals(outer, -1.0);
        std::vector<std::vector<double>> args(outer, std::vector<double>(k, 0.0));
        parallel_for(outer, threads, [&](int i0) {
            std::vector<double> x(k);
            std::vector<int> idx(k, 0);
            idx[0] = i0;
            while (true) {
                bool ok = true;
                for (int a = 0; a < k; ++a) {
                    x[a] = lo[a] + idx[a] * step[a];
                    if (x[a] > U[f.free[a]] * (1 + 1e-15) || x[a] < 0.0) ok = false;
                }
                if (ok) {
                    const double v = f(x.data());
                    if (v > vals[i0]) {
                        vals[i0] = v;
                        args[i0] = x;
                    }
                }
                int a = k - 1;
                while (a >= 1 && ++idx[a] >= npts[a]) idx[a--] = 0;
                if (a < 1) break;
            }
        });
        for (int i0 = 0; i0 < outer; ++i0)
            if (vals[i0] > best) {
                best = vals[i0];
                best_x = args[i0];
            }
    };
    sweep();
    for (int round = 0; round < refine_rounds; ++round) {
        for (int a = 0; a < k; ++a) {
            const double w = 2.0 * step[a];
            step[a] /= 10.0;
            lo[a] = std::max(0.0, best_x[a] - w);
            npts[a] = static_cast<int>(std::round((std::min(U[f.free[a]], best_x[a] + w) - lo[a]) / step[a])) + 1;
        }
        sweep();
    }
    return best;
}

/** \brief Closed-form optimal value from the discrete multipliers. */
inline double kkt_value(const DiscreteInstance& in) { return discrete_multiplier_solver(in).E; }

inline OracleReport oracle_report(const DiscreteInstance& in, double resolution = 1e-3, int refine_rounds = 3,
                                  int threads = 1) {
    OracleReport rep;
    rep.resolution = resolution;
    rep.refine_rounds = refine_rounds;
    rep.brute_value = grid_search_value(in, resolution, refine_rounds, threads);
    rep.kkt_value = kkt_value(in);
    rep.rel_gap = std::fabs(rep.brute_value - rep.kkt_value) / std::max(rep.brute_value, 1e-300);
    return rep;
}

/**
 * \brief Random instance of the given regime: 2–4 atoms, n = 1, masses and
 * weights in [0.3, 2], δ log-uniform in [0.3, 3]. The exponents are drawn from
 * small ranges that keep the regime.
 */
inline DiscreteInstance random_instance(Regime g, std::uint64_t seed, int atoms = 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.3, 2.0), L(std::log(0.3), std::log(3.0)), X(0.0, 1.0);
    DiscreteInstance in;
    const int m = atoms > 0 ? atoms : 2 + static_cast<int>(rng() % 3);
    in.mu.resize(m);
    in.psi.resize(m);
    in.phi.assign(1, std::vector<double>(m));
    for (int i = 0; i < m; ++i) {
        in.mu[i] = U(rng);
        in.psi[i] = U(rng);
        in.phi[0][i] = U(rng);
    }
    in.delta = std::exp(L(rng));
    const double q = 1.0 + X(rng);
    switch (g) {
    case Regime::P: in.exponents = {q + 0.5 + 2.0 * X(rng), q, q + 0.5 + 2.0 * X(rng)}; break;
    case Regime::P1: in.exponents = {q + 0.5 + 2.0 * X(rng), q, q}; break;
    case Regime::P2: in.exponents = {q, q, q + 0.5 + 2.0 * X(rng)}; break;
    }
    return in;
}

/**
 * \brief max over random (u,v) ∈ [0,10û]² of F(û,û,α) − F(u,v,α) with
 * F(u,v,α) = −((1−α)u+αv)^q + a v^p + b u^r and α = q^{−1}pa û^{p−q}.
 */
inline double lemma3_min_check(double a, double b, double p, double q, double r, int samples, std::uint64_t seed) {
    const double uh = lemma3_root(a, b, p, q, r);
    const double al = p * a * std::pow(uh, p - q) / q;
    auto F = [&](double u, double v) {
        return -std::pow((1.0 - al) * u + al * v, q) + a * std::pow(v, p) + b * std::pow(u, r);
    };
    const double f0 = F(uh, uh);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 10.0 * uh);
    double worst = -kInf;
    for (int i = 0; i < samples; ++i) {
        const double u = U(rng), v = U(rng);
        worst = std::max(worst, f0 - F(u, v));
    }
    return worst;
}

/** \brief max over a uniform u-grid on [0, 10û] of g(û) − g(u), g(u) = −u^q + a u^p + b u^r. */
inline double lemma3_scalar_check(double a, double b, double p, double q, double r, int points) {
    const double uh = lemma3_root(a, b, p, q, r);
    auto g = [&](double u) { return -std::pow(u, q) + a * std::pow(u, p) + b * std::pow(u, r); };
    double worst = -kInf;
    for (int i = 0; i <= points; ++i) worst = std::max(worst, g(uh) - g(10.0 * uh * i / points));
    return worst;
}

/** \brief |−q + p a û^{p−q} + r b û^{r−q}| at the computed root. */
inline double lemma3_residual(double a, double b, double p, double q, double r) {
    const double u = lemma3_root(a, b, p, q, r);
    return std::fabs(-q + p * a * std::pow(u, p - q) + r * b * std::pow(u, r - q));
}

/** \brief Midpoint discretization of a cone problem on a log-radial × angular atom grid. */
struct DiscretizationSpec {
    int radial = 64;  ///< atoms per ray
    int angular = 16; ///< atoms per polar angle (d ≥ 2)
    double s_lo = 0.0;
    double s_hi = 0.0;
};

/**
 * \brief s-range covering the closed-form extremal profile on every sampled
 * direction (Fourier specs use their plain equivalent).
 */
inline std::pair<double, double> profile_s_range(const ProblemSpec& spec, const QuadratureConfig& cfg,
                                                 double rel = 1e-16) {
    const ProblemSpec s = plain_equivalent(spec).spec;
    const PolarData t = polar_data(s, cfg);
    const auto prof = build_profile(s, closed_form_multipliers(s, t.I1, t.I2));
    double lo = kInf, hi = -kInf;
    auto visit = [&](const Direction& dir) {
        const RayExtent ex = ray_extent(prof, dir, rel);
        lo = std::min(lo, ex.lo);
        hi = std::max(hi, ex.hi);
        return 0.0;
    };
    const int d = s.d();
    if (d == 1) {
        for (double sg : s.cone.line_directions()) {
            Direction dir;
            dir.unit[0] = sg;
            visit(dir);
        }
    } else {
        const auto dom = s.cone.angular_domain();
        const int per = 9;
        std::vector<int> idx(d - 1, 0);
        while (true) {
            Direction dir;
            dir.d = d;
            for (int k = 0; k < d - 1; ++k)
                dir.omega[k] = dom[k].lo + (idx[k] + 0.5) * (dom[k].hi - dom[k].lo) / per;
            ConeDomain::unit_from_angles(d, dir.omega.data(), dir.unit.data());
            visit(dir);
            int k = d - 2;
            while (k >= 0 && ++idx[k] >= per) idx[k--] = 0;
            if (k < 0) break;
        }
    }
    return {lo, hi};
}

/** \brief Atoms of a plain (or plain-equivalent) spec on the midpoint grid. */
inline DiscreteInstance discretize_spec(const ProblemSpec& spec, const DiscretizationSpec& g) {
    const ProblemSpec s = plain_equivalent(spec).spec;
    const int d = s.d();
    if (g.radial < 1 || g.angular < 1) throw DomainError("discretization needs positive atom counts");
    if (!(g.s_hi > g.s_lo)) throw DomainError("discretization needs s_hi > s_lo");
    DiscreteInstance in;
    in.exponents = s.exponents;
    in.delta = s.delta;
    in.phi.assign(s.n(), {});
    const double hs = (g.s_hi - g.s_lo) / g.radial;
    std::vector<Direction> dirs;
    std::vector<double> dw;
    if (d == 1) {
        for (double sg : s.cone.line_directions()) {
            Direction dir;
            dir.unit[0] = sg;
            dirs.push_back(dir);
            dw.push_back(1.0);
        }
    } else {
        const auto dom = s.cone.angular_domain();
        std::vector<int> idx(d - 1, 0);
        while (true) {
            Direction dir;
            dir.d = d;
            double w = 1.0;
            for (int k = 0; k < d - 1; ++k) {
                const double h = (dom[k].hi - dom[k].lo) / g.angular;
                dir.omega[k] = dom[k].lo + (idx[k] + 0.5) * h;
                w *= h;
            }
            ConeDomain::unit_from_angles(d, dir.omega.data(), dir.unit.data());
            dirs.push_back(dir);
            dw.push_back(w * jacobian_J(dir.w(), d));
            int k = d - 2;
            while (k >= 0 && ++idx[k] >= g.angular) idx[k--] = 0;
            if (k < 0) break;
        }
    }
    for (std::size_t a = 0; a < dirs.size(); ++a) {
        const auto u = dirs[a].u();
        const double ps = s.psi.profile(u);
        std::vector<double> pj;
        for (const auto& ph : s.phis) pj.push_back(ph.profile(u));
        for (int i = 0; i < g.radial; ++i) {
            const double t = g.s_lo + (i + 0.5) * hs;
            const double mu = dw[a] * hs * std::exp(d * t);
            if (!(mu > 0.0)) continue;
            in.mu.push_back(mu);
            in.psi.push_back(ps * std::exp(s.eta() * t));
            for (int j = 0; j < s.n(); ++j) in.phi[j].push_back(pj[j] * std::exp(s.nu() * t));
            std::vector<double> pt(d);
            for (int k = 0; k < d; ++k) pt[k] = u[k] * std::exp(t);
            in.points.push_back(std::move(pt));
        }
    }
    return in;
}

/** \brief KKT values on refining discretizations, their Richardson limit, and the order estimate. */
struct ContinuumResult {
    std::vector<int> counts;
    std::vector<double> values;
    double extrapolated = 0.0;
    double order = 0.0;
    double reference = 0.0; ///< constants-module E
    double rel_error = 0.0;
    bool stable = true;
    std::string note;
};

/**
 * \brief Discretize with angular = count and radial = radial_factor·count
 * (radial_factor 0 means 1 for d = 1 and 8 otherwise) for each entry of
 * atom_counts (each entry twice the previous), solve each instance and
 * Richardson-extrapolate. The order is estimated from the last three values
 * and clamped to [1, 8]; with two values order 2 is assumed.
 * \throws DomainError when γ ∉ (0,1) or the counts are not successive doublings.
 */
inline ContinuumResult continuum_extrapolation(const ProblemSpec& spec, const std::vector<int>& atom_counts,
                                               const QuadratureConfig& cfg, int radial_factor = 0,
                                               double rel_extent = 1e-14) {
    const ExponentBundle b = exponent_bundle(plain_equivalent(spec).spec);
    if (!b.in_range) throw DomainError("continuum extrapolation: gamma out of range (0,1)");
    if (atom_counts.size() < 2) throw DomainError("continuum extrapolation: need at least two atom counts");
    for (std::size_t i = 1; i < atom_counts.size(); ++i)
        if (atom_counts[i] != 2 * atom_counts[i - 1]) throw DomainError("continuum extrapolation: counts must double");
    ContinuumResult res;
    res.reference = recovery_error(spec, cfg).E;
    const auto [lo, hi] = profile_s_range(spec, cfg, rel_extent);
    const double factor = plain_equivalent(spec).error_factor;
    const int rf = radial_factor > 0 ? radial_factor : (spec.d() == 1 ? 1 : 8);
    for (int c : atom_counts) {
        DiscretizationSpec g{rf * c, c, lo, hi};
        res.counts.push_back(c);
        res.values.push_back(factor * kkt_value(discretize_spec(spec, g)));
    }
    const std::size_t n = res.values.size();
    const double v2 = res.values[n - 1], v1 = res.values[n - 2];
    const double d21 = v2 - v1;
    double order = 2.0;
    if (n >= 3) {
        const double d10 = v1 - res.values[n - 3];
        if (std::fabs(d21) <= 1e-13 * std::fabs(v2)) {
            order = 8.0;
            res.note = "converged";
        } else if (std::fabs(d21) >= std::fabs(d10)) {
            res.stable = false;
            res.note = "differences do not shrink";
        } else {
            order = std::clamp(std::log2(std::fabs(d10 / d21)), 1.0, 8.0);
        }
    }
    res.order = order;
    res.extrapolated = v2 + d21 / (std::pow(2.0, order) - 1.0);
    res.rel_error = std::fabs(res.extrapolated - res.reference) / res.reference;
    return res;
}

} // namespace orec

#endif // OREC_ORACLE_HPP
