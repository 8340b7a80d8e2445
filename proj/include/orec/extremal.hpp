/**
 * @file extremal.hpp
 * @brief Lagrange multipliers, extremal profiles x̂ and the discrete multiplier solver.
 */
#ifndef OREC_EXTREMAL_HPP
#define OREC_EXTREMAL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "constants.hpp"
#include "core_model.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "specialfn.hpp"

namespace orec {

/** \brief Multipliers λ0, common λ and the method scale ξ. */
struct MultiplierSolution {
    double lambda0 = 0.0;
    double lambda = 0.0;
    double xi = 1.0;
    Regime regime = Regime::P;
    double E = 0.0;  ///< value formula evaluated at the multipliers
    std::map<std::string, double> residuals;
    std::vector<double> x; ///< per-atom maximizer (discrete solver only)
};

/** \brief Value formula of the regime: the optimal error in terms of the multipliers. */
inline double multiplier_value(Regime g, const ExponentTriple& e, double lambda0, double sum_lambda, double delta) {
    const double p = e.p, q = e.q, r = e.r;
    switch (g) {
    case Regime::P: return std::pow((p * lambda0 * std::pow(delta, p) + r * sum_lambda) / q, 1.0 / q);
    case Regime::P1: return std::pow((p / q) * lambda0 * std::pow(delta, p) + sum_lambda, 1.0 / q);
    case Regime::P2: return std::pow(lambda0 * std::pow(delta, p) + (r / p) * sum_lambda, 1.0 / p);
    }
    return 0.0;
}

/**
 * \brief Closed-form multipliers of a homogeneous problem from I1, I2.
 *
 * Fourier specs are converted to their plain equivalent first.
 * \throws DomainError on regime or γ violations.
 */
inline MultiplierSolution closed_form_multipliers(const ProblemSpec& spec, double I1, double I2) {
    const ProblemSpec s = plain_equivalent(spec).spec;
    const ExponentBundle b = exponent_bundle(s);
    if (!b.in_range) throw DomainError("gamma out of range (0,1)");
    const ConeMultipliers m = cone_multipliers(s, I1, I2);
    MultiplierSolution sol;
    sol.lambda0 = m.lambda0;
    sol.lambda = m.lambda;
    sol.xi = m.xi;
    sol.regime = m.regime;
    sol.E = m.E;
    return sol;
}

/**
 * \brief Extremal function x̂ of a plain homogeneous problem.
 *
 * log_ray(u, s) returns ln x̂(e^s u) (−∞ where x̂ = 0); eval(t) returns x̂(t).
 */
struct ExtremalProfile {
    ProblemSpec spec;
    MultiplierSolution solution;
    Regime regime = Regime::P;
    std::function<double(const Direction&, double)> log_ray;
    std::function<double(std::span<const double>)> eval;
    /** \brief s = ln ρ locations where x̂ has a kink or changes scale. */
    std::function<RayHints(const Direction&)> hints;
};

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/** \brief ln x̂ from ln|ψ|, ln s_r (s_q in P1) at one point. */
inline double log_xhat(Regime g, const ExponentTriple& e, double ll0, double ll, double lpsi, double lsr) {
    const double p = e.p, q = e.q, r = e.r;
    if (lpsi == kNegInf) return kNegInf;
    switch (g) {
    case Regime::P: {
        const double la = ll0 - q * lpsi;
        const double lb = ll + lsr - q * lpsi;
        return lemma3_log_root(la, lb, p, q, r);
    }
    case Regime::P1: {
        const double lr = ll + lsr - q * lpsi;
        if (lr >= 0.0) return kNegInf;
        const double lpos = q * lpsi + std::log1p(-std::exp(lr));
        return (std::log(q / p) - ll0 + lpos) / (p - q);
    }
    case Regime::P2: {
        const double lr = ll0 - p * lpsi;
        if (lr >= 0.0) return kNegInf;
        const double lpos = p * lpsi + std::log1p(-std::exp(lr));
        return (std::log(p / r) - ll - lsr + lpos) / (r - p);
    }
    }
    return kNegInf;
}

inline double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

} // namespace detail

/**
 * \brief x̂ for the symmetric multipliers: the stationarity root pointwise in
 * regime P, the explicit clamps in P1 and P2. The spec must be plain.
 */
inline ExtremalProfile build_profile(const ProblemSpec& spec, const MultiplierSolution& sol) {
    if (spec.normalization != Normalization::Plain) throw DomainError("build_profile: plain spec required");
    ExtremalProfile prof;
    prof.spec = spec;
    prof.solution = sol;
    prof.regime = sol.regime;
    const ExponentTriple e = spec.exponents;
    const Regime g = sol.regime;
    const double ll0 = detail::safe_log(sol.lambda0), ll = detail::safe_log(sol.lambda);
    const double rr = g == Regime::P1 ? e.q : e.r;
    const double eta = spec.eta(), nu = spec.nu();
    const ProblemSpec* sp = &prof.spec;
    auto logs = [sp, rr](std::span<const double> u, double& lpsi, double& lsr) {
        lpsi = detail::safe_log(sp->psi.profile(u));
        lsr = detail::safe_log(sum_phi_profiles(*sp, u, rr));
    };
    prof.log_ray = [=](const Direction& dir, double s) {
        double lpsi, lsr;
        logs(dir.u(), lpsi, lsr);
        if (lpsi == detail::kNegInf) return detail::kNegInf;
        return detail::log_xhat(g, e, ll0, ll, eta * s + lpsi, rr * nu * s + lsr);
    };
    prof.eval = [=](std::span<const double> t) {
        const double pv = sp->psi(t);
        if (pv == 0.0) return 0.0;
        double sr = 0.0;
        for (const auto& ph : sp->phis) sr += std::pow(ph(t), rr);
        return std::exp(detail::log_xhat(g, e, ll0, ll, std::log(pv), detail::safe_log(sr)));
    };
    const double xi = sol.xi;
    prof.hints = [=](const Direction& dir) {
        double lpsi, lsr;
        logs(dir.u(), lpsi, lsr);
        RayHints h;
        if (!std::isfinite(lpsi) || !std::isfinite(lsr)) return h;
        if (g == Regime::P) {
            const double p = e.p, q = e.q, r = e.r;
            const double cp = q * (p - r) / ((p - q) * (r - q));
            const double slope = -nu * r / (r - q) + cp * eta;
            const double icpt = -lsr / (r - q) + cp * lpsi;
            if (slope != 0.0) h.center = -icpt / slope - std::log(xi);
        } else if (g == Regime::P1) {
            if (nu != eta) {
                h.center = (e.q * lpsi - lsr - ll) / ((nu - eta) * e.q);
                h.breaks.push_back(h.center);
            }
        } else if (eta != 0.0) {
            h.center = (ll0 / e.p - lpsi) / eta;
            h.breaks.push_back(h.center);
        }
        return h;
    };
    return prof;
}

/** \brief Relative residual of the pointwise stationarity condition at t. */
inline double stationarity_residual(const ExtremalProfile& prof, std::span<const double> t) {
    const ProblemSpec& s = prof.spec;
    const ExponentTriple e = s.exponents;
    const double p = e.p, q = e.q, r = e.r;
    const double pv = s.psi(t);
    const double x = prof.eval(t);
    if (pv == 0.0) return x == 0.0 ? 0.0 : 1.0;
    const double l0 = prof.solution.lambda0, l = prof.solution.lambda;
    switch (prof.regime) {
    case Regime::P: {
        double sr = 0.0;
        for (const auto& ph : s.phis) sr += std::pow(ph(t), r);
        const double lhs = p * l0 * std::pow(x, p - q) + r * l * sr * std::pow(x, r - q);
        return std::fabs(lhs - q * std::pow(pv, q)) / (q * std::pow(pv, q));
    }
    case Regime::P1: {
        double sq = 0.0;
        for (const auto& ph : s.phis) sq += std::pow(ph(t), q);
        const double rhs = q * std::max(0.0, std::pow(pv, q) - l * sq);
        return std::fabs(p * l0 * std::pow(x, p - q) - rhs) / (q * std::pow(pv, q));
    }
    case Regime::P2: {
        double sr = 0.0;
        for (const auto& ph : s.phis) sr += std::pow(ph(t), r);
        const double rhs = p * std::max(0.0, std::pow(pv, p) - l0);
        return std::fabs(r * l * sr * std::pow(x, r - p) - rhs) / (p * std::pow(pv, p));
    }
    }
    return 0.0;
}

/** \brief ∫x̂^p, ∫|φ_j|^r x̂^r and ∫|ψ x̂|^q over the cone. */
struct ProfileIntegrals {
    double noise = 0.0;
    std::vector<double> constraints;
    double target = 0.0;
};

inline ProfileIntegrals profile_integrals(const ExtremalProfile& prof, const QuadratureConfig& cfg) {
    const ProblemSpec& s = prof.spec;
    const ExponentTriple e = s.exponents;
    const double p = e.p, q = e.q, r = e.r, eta = s.eta(), nu = s.nu();
    const int d = s.d();
    ProfileIntegrals out;
    auto run = [&](int which) {
        RayIntegrand f = [&, which](const Direction& dir, double t) {
            const double lx = prof.log_ray(dir, t);
            if (lx == detail::kNegInf) return 0.0;
            const auto u = dir.u();
            if (which == -2) return std::exp(p * lx + d * t);
            if (which == -1) {
                const double lp = std::log(s.psi.profile(u)) + eta * t;
                return std::exp(q * (lp + lx) + d * t);
            }
            const double pj = s.phis[which].profile(u);
            if (pj == 0.0) return 0.0;
            return std::exp(r * (std::log(pj) + nu * t + lx) + d * t);
        };
        return polar_integral(f, prof.hints, s.cone, cfg).value;
    };
    out.noise = run(-2);
    out.target = run(-1);
    for (int j = 0; j < s.n(); ++j) out.constraints.push_back(run(j));
    return out;
}

/**
 * \brief ‖ψ x̂‖_q by quadrature. `factor` rescales to the original problem
 * (the Plancherel factor of a Fourier L2 spec).
 */
inline double extremal_value(const ExtremalProfile& prof, const QuadratureConfig& cfg, double factor = 1.0) {
    return factor * std::pow(profile_integrals(prof, cfg).target, 1.0 / prof.spec.exponents.q);
}

/** \brief Interval of s = ln ρ carrying the profile's mass along one ray. */
struct RayExtent {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> breaks;
};

/**
 * \brief Smallest [lo, hi] outside which the noise, target and constraint
 * densities along the ray all stay below rel times their peak (scan step 0.25).
 * \throws ConvergenceError when a density does not decay within |s| ≤ 700.
 */
inline RayExtent ray_extent(const ExtremalProfile& prof, const Direction& dir, double rel = 1e-16) {
    const ProblemSpec& s = prof.spec;
    const ExponentTriple e = s.exponents;
    const int d = s.d();
    const auto u = dir.u();
    const double ps = s.psi.profile(u);
    std::vector<double> pj;
    for (const auto& ph : s.phis) pj.push_back(ph.profile(u));
    auto logdens = [&](double t) {
        const double lx = prof.log_ray(dir, t);
        if (lx == detail::kNegInf) return detail::kNegInf;
        double m = e.p * lx + d * t;
        if (ps > 0.0) m = std::max(m, e.q * (std::log(ps) + s.eta() * t + lx) + d * t);
        for (double v : pj)
            if (v > 0.0) m = std::max(m, e.r * (std::log(v) + s.nu() * t + lx) + d * t);
        return m;
    };
    RayExtent ext;
    const RayHints h = prof.hints(dir);
    ext.breaks = h.breaks;
    const double c = std::isfinite(h.center) ? h.center : 0.0;
    double peak = detail::kNegInf;
    for (double t = c - 5.0; t <= c + 5.0; t += 0.25) peak = std::max(peak, logdens(t));
    for (double b : h.breaks) peak = std::max({peak, logdens(b - 1e-9), logdens(b + 1e-9)});
    if (peak == detail::kNegInf) throw ConvergenceError("ray_extent: profile vanishes near the center");
    const double cut = peak + std::log(rel);
    double lo = c - 5.0, hi = c + 5.0;
    for (double b : h.breaks) {
        lo = std::min(lo, b - 1.0);
        hi = std::max(hi, b + 1.0);
    }
    while (logdens(lo) > cut || logdens(lo + 0.5) > cut) {
        lo -= 0.25;
        if (lo < -700.0) throw ConvergenceError("ray_extent: lower tail does not decay");
    }
    while (logdens(hi) > cut || logdens(hi - 0.5) > cut) {
        hi += 0.25;
        if (hi > 700.0) throw ConvergenceError("ray_extent: upper tail does not decay");
    }
    ext.lo = lo;
    ext.hi = hi;
    return ext;
}

/** \brief Finite atom set with per-atom weight values. */
struct DiscreteInstance {
    std::vector<std::vector<double>> points;  ///< optional coordinates t_i
    std::vector<double> mu;                   ///< masses μ_i > 0
    std::vector<double> psi;                  ///< |ψ(t_i)|
    std::vector<std::vector<double>> phi;     ///< phi[j][i] = |φ_j(t_i)|
    ExponentTriple exponents;
    double delta = 1.0;
    std::vector<bool> t0_mask;                ///< empty means every atom is in T0

    int atoms() const { return static_cast<int>(mu.size()); }
    int n() const { return static_cast<int>(phi.size()); }
    bool in_t0(int i) const { return t0_mask.empty() || t0_mask[i]; }
};

/** \throws DimensionError or DomainError on malformed instances. */
inline void check_instance(const DiscreteInstance& in) {
    const int m = in.atoms();
    if (m < 1) throw DimensionError("instance needs at least one atom");
    if (static_cast<int>(in.psi.size()) != m) throw DimensionError("psi values must match the atom count");
    if (in.phi.empty()) throw DimensionError("instance needs constraint weights");
    for (const auto& ph : in.phi)
        if (static_cast<int>(ph.size()) != m) throw DimensionError("phi values must match the atom count");
    if (!in.t0_mask.empty() && static_cast<int>(in.t0_mask.size()) != m)
        throw DimensionError("t0 mask must match the atom count");
    bool any = false;
    for (int i = 0; i < m; ++i) {
        if (!(in.mu[i] > 0.0)) throw DomainError("atom masses must be positive");
        any = any || in.psi[i] != 0.0;
    }
    if (!any) throw DomainError("psi vanishes on every atom");
    if (!(in.delta > 0.0)) throw DomainError("delta must be positive");
}

namespace detail {

/** \brief Per-atom x̂ for multipliers (λ0, λ) of a discrete instance. */
inline std::vector<double> discrete_x(const DiscreteInstance& in, Regime g, double lambda0, double lambda) {
    const ExponentTriple e = in.exponents;
    const double rr = g == Regime::P1 ? e.q : e.r;
    std::vector<double> x(in.atoms(), 0.0);
    const double ll0 = safe_log(lambda0), ll = safe_log(lambda);
    for (int i = 0; i < in.atoms(); ++i) {
        if (in.psi[i] == 0.0) continue;
        double sr = 0.0;
        for (int j = 0; j < in.n(); ++j) sr += std::pow(in.phi[j][i], rr);
        const double l0 = in.in_t0(i) ? ll0 : kNegInf;
        if (g == Regime::P && l0 == kNegInf && (ll == kNegInf || sr == 0.0))
            throw ConvergenceError("discrete solver: unbounded atom (no active multiplier)");
        x[i] = std::exp(log_xhat(g, e, l0, ll, std::log(in.psi[i]), safe_log(sr)));
    }
    return x;
}

inline double noise_sum(const DiscreteInstance& in, const std::vector<double>& x) {
    double acc = 0.0;
    for (int i = 0; i < in.atoms(); ++i)
        if (in.in_t0(i)) acc += in.mu[i] * std::pow(x[i], in.exponents.p);
    return acc;
}

inline std::vector<double> constraint_sums(const DiscreteInstance& in, const std::vector<double>& x, double r) {
    std::vector<double> c(in.n(), 0.0);
    for (int j = 0; j < in.n(); ++j)
        for (int i = 0; i < in.atoms(); ++i) c[j] += in.mu[i] * std::pow(in.phi[j][i] * x[i], r);
    return c;
}

/**
 * \brief Root in log space of a decreasing function h (h(−∞) > 0 > h(+∞)).
 *
 * The bracket grows geometrically from `start`; refinement is Illinois false
 * position with a bisection fallback.
 */
inline double log_bisect(const std::function<double(double)>& h, double start = 0.0) {
    double lo = start - 1.0, hi = start + 1.0;
    double flo = h(lo), fhi = h(hi);
    int guard = 0;
    while (flo <= 0.0) {
        if (flo == 0.0) return lo;
        hi = lo;
        fhi = flo;
        lo -= 2.0 * (start - lo + 1.0);
        if (++guard > 60 || lo < -1400.0) throw ConvergenceError("discrete solver: bracket underflow");
        flo = h(lo);
    }
    guard = 0;
    while (fhi >= 0.0) {
        if (fhi == 0.0) return hi;
        lo = hi;
        flo = fhi;
        hi += 2.0 * (hi - start + 1.0);
        if (++guard > 60 || hi > 1400.0) throw ConvergenceError("discrete solver: bracket overflow");
        fhi = h(hi);
    }
    int side = 0;
    for (int it = 0; it < 300; ++it) {
        const double w = hi - lo;
        if (w <= 1e-15 * std::max(1.0, std::fabs(lo))) break;
        double m = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(m > lo + 1e-3 * w && m < hi - 1e-3 * w) || it % 8 == 7) m = 0.5 * (lo + hi);
        const double fm = h(m);
        if (fm == 0.0 || std::fabs(fm) < 1e-15) return m;
        if (fm > 0.0) {
            lo = m;
            flo = fm;
            if (side == 1) fhi *= 0.5;
            side = 1;
        } else {
            hi = m;
            fhi = fm;
            if (side == -1) flo *= 0.5;
            side = -1;
        }
    }
    return 0.5 * (lo + hi);
}

/** \brief Index of the atom maximizing num_i/den_i (den_i > 0). */
inline int best_ratio_atom(const std::vector<double>& num, const std::vector<double>& den) {
    int best = -1;
    double bv = -1.0;
    for (std::size_t i = 0; i < num.size(); ++i) {
        if (den[i] <= 0.0) continue;
        const double v = num[i] / den[i];
        if (v > bv) {
            bv = v;
            best = static_cast<int>(i);
        }
    }
    return best;
}

} // namespace detail

/**
 * \brief Symmetric multipliers of a discrete instance by nested monotone root
 * finding: outer on λ0 for the δ^p constraint, inner on the common λ for the
 * unit constraints, taking λ0 = 0 or λ = 0 when a constraint is slack.
 * The per-atom maximizer is stored in the result.
 * \throws AsymmetryError when the constraints cannot share one λ.
 */
inline MultiplierSolution discrete_multiplier_solver(const DiscreteInstance& in, double tol = 1e-8) {
    check_instance(in);
    const ExponentTriple e = in.exponents;
    const Regime g = classify_regime(e);
    if (std::isinf(e.p) || std::isinf(e.r)) throw DomainError("discrete solver: p and r must be finite");
    for (int i = 0; i < in.atoms(); ++i)
        if (!in.in_t0(i) && g != Regime::P) throw DomainError("discrete solver: T0 masks are supported in regime P only");
    const int m = in.atoms();
    const double p = e.p, q = e.q, rr = g == Regime::P1 ? e.q : e.r, dp = std::pow(in.delta, p);
    std::vector<double> s(m, 0.0), pw(m, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < in.n(); ++j) s[i] += std::pow(in.phi[j][i], rr);
        pw[i] = std::pow(in.psi[i], g == Regime::P2 ? p : q);
    }
    MultiplierSolution sol;
    sol.regime = g;
    bool done = false;
    if (g == Regime::P1) {
        const int k = detail::best_ratio_atom(pw, s);
        if (k >= 0) {
            const double xk = std::pow(1.0 / (in.mu[k] * s[k]), 1.0 / q);
            if (in.mu[k] * std::pow(xk, p) < dp) {
                sol.lambda0 = 0.0;
                sol.lambda = pw[k] / s[k];
                sol.x.assign(m, 0.0);
                sol.x[k] = xk;
                done = true;
            }
        }
    } else if (g == Regime::P2) {
        const std::vector<double> ones(m, 1.0);
        const int k = detail::best_ratio_atom(pw, ones);
        const double xk = in.delta / std::pow(in.mu[k], 1.0 / p);
        if (in.mu[k] * s[k] * std::pow(xk, rr) < 1.0) {
            sol.lambda0 = pw[k];
            sol.lambda = 0.0;
            sol.x.assign(m, 0.0);
            sol.x[k] = xk;
            done = true;
        }
    }
    if (!done) {
        auto cmax = [&](double l0, double l) {
            const auto c = detail::constraint_sums(in, detail::discrete_x(in, g, l0, l), rr);
            return *std::max_element(c.begin(), c.end());
        };
        auto inner = [&](double l0) -> double {
            if (g != Regime::P2) {
                bool slack = false;
                try {
                    slack = cmax(l0, 0.0) <= 1.0;
                } catch (const ConvergenceError&) {
                    slack = false;
                }
                if (slack && l0 > 0.0) return 0.0;
            }
            return std::exp(detail::log_bisect([&](double u) { return cmax(l0, std::exp(u)) - 1.0; }));
        };
        // in P2 every atom is switched off once λ0 reaches max ψ^p, and no λ can meet the unit constraints
        const double l0_cap = g == Regime::P2 ? *std::max_element(pw.begin(), pw.end()) : kInf;
        auto noise_at = [&](double l0) {
            if (l0 >= l0_cap) return 0.0;
            return detail::noise_sum(in, detail::discrete_x(in, g, l0, inner(l0)));
        };
        bool lambda0_zero = false;
        if (g != Regime::P1) {
            try {
                lambda0_zero = noise_at(0.0) <= dp;
            } catch (const ConvergenceError&) {
                lambda0_zero = false;
            }
        }
        sol.lambda0 =
            lambda0_zero ? 0.0 : std::exp(detail::log_bisect([&](double u) { return noise_at(std::exp(u)) / dp - 1.0; }));
        sol.lambda = inner(sol.lambda0);
        sol.x = detail::discrete_x(in, g, sol.lambda0, sol.lambda);
    }
    const auto c = detail::constraint_sums(in, sol.x, rr);
    const double nz = detail::noise_sum(in, sol.x);
    double worst_c = 0.0, worst_slack = 0.0;
    for (double cj : c) {
        if (sol.lambda > 0.0) worst_c = std::max(worst_c, std::fabs(cj - 1.0));
        else worst_c = std::max(worst_c, std::max(0.0, cj - 1.0));
        worst_slack = std::max(worst_slack, sol.lambda * std::fabs(cj - 1.0));
    }
    if (in.n() > 1 && sol.lambda > 0.0 && worst_c > std::max(tol, 1e-6))
        throw AsymmetryError("discrete constraints cannot share a common multiplier");
    sol.residuals["noise_constraint"] = sol.lambda0 > 0.0 ? std::fabs(nz - dp) / dp : std::max(0.0, nz - dp) / dp;
    sol.residuals["unit_constraints"] = worst_c;
    sol.residuals["slackness"] = std::max(worst_slack, sol.lambda0 * std::fabs(nz - dp));
    sol.E = multiplier_value(g, e, sol.lambda0, in.n() * sol.lambda, in.delta);
    return sol;
}

/** \brief Per-atom extremal values for a discrete solution. */
inline std::vector<double> discrete_profile(const DiscreteInstance& in, const MultiplierSolution& sol) {
    if (!sol.x.empty()) return sol.x;
    return detail::discrete_x(in, sol.regime, sol.lambda0, sol.lambda);
}

/** \brief (Σ μ_i |ψ_i x_i|^q)^{1/q}. */
inline double discrete_objective(const DiscreteInstance& in, const std::vector<double>& x) {
    double acc = 0.0;
    for (int i = 0; i < in.atoms(); ++i) acc += in.mu[i] * std::pow(in.psi[i] * x[i], in.exponents.q);
    return std::pow(acc, 1.0 / in.exponents.q);
}

} // namespace orec

#endif // OREC_EXTREMAL_HPP
