/**
 * @file constants.hpp
 * @brief Closed-form exponents, sharp constants and optimal recovery errors.
 *
 * Everything is evaluated in log space and exponentiated once.
 */
#ifndef OREC_CONSTANTS_HPP
#define OREC_CONSTANTS_HPP

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "core_model.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "specialfn.hpp"

namespace orec {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/** \brief γ, q* and the degrees ν, η of a problem. */
struct ExponentBundle {
    double gamma = 0.0;
    double q_star = 0.0;
    double nu = 0.0;
    double eta = 0.0;
    bool in_range = false;
};

/**
 * \brief γ = (ν − η − d(1/q − 1/r)) / (ν + d(1/r − 1/p)).
 * \throws DegenerateError when the denominator vanishes.
 */
inline double gamma_exponent(double nu, double eta, int d, const ExponentTriple& e) {
    const double den = nu + d * (inv(e.r) - inv(e.p));
    if (std::fabs(den) < 1e-14 * (1.0 + std::fabs(nu))) throw DegenerateError("gamma: nu + d(1/r - 1/p) = 0");
    return (nu - eta - d * (inv(e.q) - inv(e.r))) / den;
}

/** \brief ĝ = (θ̂1 − θ̂)/(θ̂1 − θ̂0) with θ̂ = θ + d/q, θ̂0 = θ0 + d/p, θ̂1 = θ1 + d/r. */
inline double gamma_three_weight(double theta, double theta0, double theta1, int d, const ExponentTriple& e) {
    const double t = theta + d * inv(e.q), t0 = theta0 + d * inv(e.p), t1 = theta1 + d * inv(e.r);
    if (std::fabs(t1 - t0) < 1e-14) throw DegenerateError("gamma: theta1_hat = theta0_hat");
    return (t1 - t) / (t1 - t0);
}

/** \brief γ̆ = (ν − η)/(ν + d(1/2 − 1/p)). */
inline double gamma_fourier_L2(double nu, double eta, int d, double p) {
    return gamma_exponent(nu, eta, d, {p, 2.0, 2.0});
}

/** \brief γ1 = (ν − η − d/2)/(ν + d(1/2 − 1/p)). */
inline double gamma_fourier_Linf(double nu, double eta, int d, double p) {
    return gamma_exponent(nu, eta, d, {p, 1.0, 2.0});
}

/**
 * \brief q* from 1/q* = 1/q − γ/p − (1−γ)/r.
 * \throws DomainError unless γ ∈ (0,1) and 1/q* > 0.
 */
inline double q_star(double gamma, const ExponentTriple& e) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma out of range (0,1)");
    const double iq = inv(e.q) - gamma * inv(e.p) - (1.0 - gamma) * inv(e.r);
    if (!(iq > 0.0)) throw DomainError("q_star: 1/q* must be positive");
    return 1.0 / iq;
}

/** \brief q̆ = 1/(γ̆(1/2 − 1/p)). */
inline double q_fourier_L2(double gamma, double p) { return q_star(gamma, {p, 2.0, 2.0}); }

/** \brief q1 = 1/(1/2 + γ1(1/2 − 1/p)). */
inline double q_fourier_Linf(double gamma, double p) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma out of range (0,1)");
    return 1.0 / (0.5 + gamma * (0.5 - inv(p)));
}

/**
 * \brief The plain problem behind a spec and the factor applied to its error.
 *
 * Fourier L2 target: φ_j → (2π)^{−d/2}φ_j, q = r = 2, error × (2π)^{−d/2}.
 * Fourier L∞ target: ψ → (2π)^{−d}ψ, φ_j → (2π)^{−d/2}φ_j, q = 1, r = 2.
 */
struct PlainEquivalent {
    ProblemSpec spec;
    double error_factor = 1.0;
};

inline PlainEquivalent plain_equivalent(const ProblemSpec& s) {
    PlainEquivalent out{s, 1.0};
    if (s.normalization == Normalization::Plain) return out;
    const int d = s.d();
    const double half = std::pow(kTwoPi, -0.5 * d);
    out.spec.normalization = Normalization::Plain;
    out.spec.exponents = effective_exponents(s);
    for (auto& ph : out.spec.phis) ph = ph.scaled(half);
    if (std::isinf(s.exponents.q)) out.spec.psi = s.psi.scaled(half * half);
    else out.error_factor = half;
    return out;
}

/** \brief Exponent bundle of a spec (Fourier specs use their plain triple). */
inline ExponentBundle exponent_bundle(const ProblemSpec& s) {
    ExponentBundle b;
    b.nu = s.nu();
    b.eta = s.eta();
    const ExponentTriple e = effective_exponents(s);
    b.gamma = gamma_exponent(b.nu, b.eta, s.d(), e);
    b.in_range = b.gamma > 0.0 && b.gamma < 1.0;
    if (b.in_range) b.q_star = q_star(b.gamma, e);
    return b;
}

/**
 * \brief Angular integrals with the symmetry requirement I'_1 = … = I'_n.
 * \throws SymmetryError listing the I'_j when the defect exceeds sym_tol.
 */
inline AngularIntegrals symmetric_angular_integrals(const ProblemSpec& s, double gamma, double qs,
                                                    const QuadratureConfig& cfg, double sym_tol = 1e-6) {
    AngularIntegrals a = angular_integrals(s, gamma, qs, cfg);
    if (a.symmetry_report > sym_tol) {
        std::ostringstream os;
        os.precision(12);
        os << "constraint integrals differ (symmetry defect " << a.symmetry_report << "): I'_j =";
        for (double v : a.Ij) os << ' ' << v;
        throw SymmetryError(os.str());
    }
    return a;
}

/** \brief Data of the beta-function reduction of a plain homogeneous problem. */
struct PolarData {
    double gamma = 0.0;
    double q_star = 0.0;
    double c = 0.0;      ///< ν + d(1/r − 1/p)
    double log_M = 0.0;  ///< ln(B(q*γ/p, q*(1−γ)/r) I / (|c|(γr + (1−γ)p)))
    double log_K = 0.0;
    double I = 0.0;
    double I1 = 0.0;     ///< γM
    double I2 = 0.0;     ///< (1−γ)M/n
    AngularIntegrals angular;
};

/**
 * \brief Sharp constant K of a plain problem with finite p and r.
 * \throws DomainError for γ ∉ (0,1) or infinite p, r; SymmetryError.
 */
inline PolarData polar_data(const ProblemSpec& s, const QuadratureConfig& cfg, double sym_tol = 1e-6) {
    if (s.normalization != Normalization::Plain) throw DomainError("polar_data: plain spec required");
    const ExponentTriple e = s.exponents;
    (void)classify_regime(e);
    if (std::isinf(e.p) || std::isinf(e.r))
        throw DomainError("closed form needs finite p and r (p = inf uses the Fourier formulas)");
    if (s.phis.empty()) throw DomainError("no constraint weights");
    PolarData t;
    const int n = s.n();
    t.gamma = gamma_exponent(s.nu(), s.eta(), s.d(), e);
    t.q_star = q_star(t.gamma, e);
    t.c = s.nu() + s.d() * (inv(e.r) - inv(e.p));
    t.angular = symmetric_angular_integrals(s, t.gamma, t.q_star, cfg, sym_tol);
    t.I = t.angular.I;
    const double g = t.gamma, qs = t.q_star, p = e.p, r = e.r;
    t.log_M = log_beta(qs * g / p, qs * (1.0 - g) / r) + std::log(t.I) - std::log(std::fabs(t.c)) -
              std::log(g * r + (1.0 - g) * p);
    t.log_K = -(g / p) * std::log(g) - ((1.0 - g) / r) * std::log((1.0 - g) / n) + t.log_M / qs;
    t.I1 = g * std::exp(t.log_M);
    t.I2 = (1.0 - g) * std::exp(t.log_M) / n;
    return t;
}

/** \brief δ^γ I1^{−γ/p} I2^{−(1−γ)/r} (I1 + n I2)^{1/q}. */
inline double error_from_integrals(const ProblemSpec& s, double I1, double I2) {
    const ExponentTriple e = s.exponents;
    const double g = gamma_exponent(s.nu(), s.eta(), s.d(), e);
    return std::exp(g * std::log(s.delta) - (g / e.p) * std::log(I1) - ((1.0 - g) / e.r) * std::log(I2) +
                    std::log(I1 + s.n() * I2) / e.q);
}

/** \brief Multipliers of the symmetric extremal problem in closed form. */
struct ConeMultipliers {
    Regime regime = Regime::P;
    double lambda0 = 0.0;
    double lambda = 0.0;
    double xi = 1.0;  ///< the method is k(ξt)ψ(t)y(t)
    double E = 0.0;   ///< error from the multiplier value formula
};

/**
 * \brief λ0, λ and ξ from I1, I2 for a plain problem (regimes P, P1, P2).
 * \throws DomainError on non-positive integrals or infinite exponents.
 */
inline ConeMultipliers cone_multipliers(const ProblemSpec& s, double I1, double I2) {
    const ExponentTriple e = s.exponents;
    if (!(I1 > 0.0) || !(I2 > 0.0) || !std::isfinite(I1) || !std::isfinite(I2))
        throw DomainError("multipliers: I1, I2 must be finite and positive");
    if (std::isinf(e.p) || std::isinf(e.r)) throw DomainError("multipliers: p and r must be finite");
    const double p = e.p, q = e.q, r = e.r, d = s.d(), nu = s.nu(), eta = s.eta();
    const double ld = std::log(s.delta), l1 = std::log(I1), l2 = std::log(I2);
    const int n = s.n();
    ConeMultipliers m;
    m.regime = classify_regime(e);
    switch (m.regime) {
    case Regime::P: {
        const double c = nu + d * (1.0 / r - 1.0 / p);
        const double lxi = (ld - l1 / p + l2 / r) / c;
        const double ll0 = std::log(q / p) + ((p - q) / p) * l1 + (-eta * q - d * (p - q) / p) * lxi + (q - p) * ld;
        const double ll = std::log(q / r) - ((r - q) / (p - q)) * (std::log(q / p) - ll0) +
                          (-eta * q * (p - r) / (p - q) + nu * r) * lxi;
        m.xi = std::exp(lxi);
        m.lambda0 = std::exp(ll0);
        m.lambda = std::exp(ll);
        m.E = std::pow((p * m.lambda0 * std::pow(s.delta, p) + r * n * m.lambda) / q, 1.0 / q);
        break;
    }
    case Regime::P1: {
        const double c = nu + d * (1.0 / q - 1.0 / p);
        const double la = (l1 / p - l2 / q - ld) / c;
        // X = (q/(pλ0))^{1/(p−q)} from X^q a^{d+qν+q²η/(p−q)} I2 = 1
        const double lX = -(l2 + (d + q * nu + q * q * eta / (p - q)) * la) / q;
        const double ll0 = std::log(q / p) - (p - q) * lX;
        m.xi = std::exp(-la);
        m.lambda = std::exp((eta - nu) * q * la);
        m.lambda0 = std::exp(ll0);
        m.E = std::pow((p / q) * m.lambda0 * std::pow(s.delta, p) + n * m.lambda, 1.0 / q);
        break;
    }
    case Regime::P2: {
        const double c = nu + d * (1.0 / r - 1.0 / p);
        const double la = (l1 / p - l2 / r - ld) / c;
        const double ll = std::log(p / r) + (r / p - 1.0) * l1 + (p - r) * ld +
                          ((p * eta / r - nu - d * (1.0 / r - 1.0 / p)) / c) * ((r / p) * l1 - l2 - r * ld);
        m.xi = std::exp(-la);
        m.lambda0 = std::exp(eta * p * la);
        m.lambda = std::exp(ll);
        m.E = std::pow(m.lambda0 * std::pow(s.delta, p) + (r / p) * n * m.lambda, 1.0 / p);
        break;
    }
    }
    return m;
}

namespace detail {

/** \brief ln(e^x − 1) for x > 0. */
inline double log_expm1(double x) { return x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x)); }

/** \brief Log profiles of a spec along one direction. */
struct RayLogs {
    double lpsi = 0.0;
    double lsr = 0.0;
    std::vector<double> lphi;
};

inline RayLogs ray_logs(const ProblemSpec& s, const Direction& dir, double r) {
    RayLogs o;
    const auto u = dir.u();
    o.lpsi = std::log(s.psi.profile(u));
    double sr = 0.0;
    for (const auto& ph : s.phis) {
        const double v = ph.profile(u);
        o.lphi.push_back(std::log(v));
        sr += std::pow(v, r);
    }
    o.lsr = std::log(sr);
    return o;
}

} // namespace detail

/** \brief I1 and I_{j+1} evaluated from their definitions by polar quadrature. */
struct DirectIntegrals {
    double I1 = 0.0;
    std::vector<double> Ij;
};

/**
 * \brief The integrals I1, I_{j+1} of the symmetric extremal problem computed
 * directly over the cone (no beta-function reduction).
 */
inline DirectIntegrals direct_integrals(const ProblemSpec& s, const QuadratureConfig& cfg) {
    const ExponentTriple e = s.exponents;
    const Regime g = classify_regime(e);
    if (std::isinf(e.p) || std::isinf(e.r)) throw DomainError("direct integrals need finite p and r");
    const double p = e.p, q = e.q, r = e.r, eta = s.eta(), nu = s.nu();
    const int d = s.d();
    const double ninf = -std::numeric_limits<double>::infinity();
    DirectIntegrals out;
    for (int which = -1; which < s.n(); ++which) {
        RayIntegrand f;
        RayHintFn hints;
        if (g == Regime::P) {
            const double A = 1.0 / (p - q), B = 1.0 / (r - q);
            const double cp = q * (p - r) / ((p - q) * (r - q));
            const double slope = -nu * r / (r - q) + cp * eta;
            f = [=, &s](const Direction& dir, double t) {
                const auto L = detail::ray_logs(s, dir, r);
                if (L.lpsi == ninf) return 0.0;
                const double lp = eta * t + L.lpsi;
                const double Lk = -(nu * r * t + L.lsr) / (r - q) + cp * lp;
                const KSolution k = solve_k_log(Lk, A, B);
                if (which < 0) return std::exp(q * p / (p - q) * lp + p / (p - q) * k.log_k + d * t);
                if (L.lphi[which] == ninf) return 0.0;
                return std::exp(q * r / (p - q) * lp + r * (nu * t + L.lphi[which]) + r / (p - q) * k.log_k + d * t);
            };
            hints = [=, &s](const Direction& dir) {
                const auto L = detail::ray_logs(s, dir, r);
                RayHints h;
                const double icpt = -L.lsr / (r - q) + cp * L.lpsi;
                if (slope != 0.0 && std::isfinite(icpt)) h.center = -icpt / slope;
                return h;
            };
        } else if (g == Regime::P1) {
            f = [=, &s](const Direction& dir, double t) {
                const auto L = detail::ray_logs(s, dir, q);
                if (L.lpsi == ninf) return 0.0;
                const double lratio = L.lsr + (nu - eta) * q * t - q * L.lpsi;
                if (lratio >= 0.0) return 0.0;
                const double lk = std::log1p(-std::exp(lratio));
                const double lp = eta * t + L.lpsi;
                if (which < 0) return std::exp(q * p / (p - q) * lp + p / (p - q) * lk + d * t);
                if (L.lphi[which] == ninf) return 0.0;
                return std::exp(q * q / (p - q) * lp + q * (nu * t + L.lphi[which]) + q / (p - q) * lk + d * t);
            };
            hints = [=, &s](const Direction& dir) {
                const auto L = detail::ray_logs(s, dir, q);
                RayHints h;
                if (nu != eta && std::isfinite(L.lsr) && std::isfinite(L.lpsi)) {
                    h.center = (q * L.lpsi - L.lsr) / ((nu - eta) * q);
                    h.breaks.push_back(h.center);
                }
                return h;
            };
        } else {
            f = [=, &s](const Direction& dir, double t) {
                const auto L = detail::ray_logs(s, dir, r);
                if (L.lpsi == ninf) return 0.0;
                const double x = p * (eta * t + L.lpsi);
                if (x <= 0.0) return 0.0;
                const double lu = detail::log_expm1(x) - nu * r * t - L.lsr;
                if (which < 0) return std::exp(p / (r - p) * lu + d * t);
                if (L.lphi[which] == ninf) return 0.0;
                return std::exp(r * (nu * t + L.lphi[which]) + r / (r - p) * lu + d * t);
            };
            hints = [=, &s](const Direction& dir) {
                const auto L = detail::ray_logs(s, dir, r);
                RayHints h;
                if (eta != 0.0 && std::isfinite(L.lpsi)) {
                    h.center = -L.lpsi / eta;
                    h.breaks.push_back(h.center);
                }
                return h;
            };
        }
        const double v = polar_integral(f, hints, s.cone, cfg).value;
        if (which < 0) out.I1 = v;
        else out.Ij.push_back(v);
    }
    return out;
}

/** \brief Options of the homogeneous closed form. */
struct ConstantsOptions {
    double symmetry_tol = 1e-6;
    bool direct_check = false;         ///< also evaluate I1, I2 from their definitions
    bool literal_linf_exponent = false; ///< L∞ filter scale with the n-based exponent
    bool literal_power_weight_exponent = false; ///< power-weight angular exponent r(d−1)+μ instead of d(r−1)+μ
};

inline double rel_diff(double a, double b) {
    const double m = std::max(std::fabs(a), std::fabs(b));
    return m == 0.0 ? 0.0 : std::fabs(a - b) / m;
}

/**
 * \brief Optimal error E = Kδ^γ of a plain homogeneous problem, with the
 * I1/I2 decomposition, multipliers and consistency residuals.
 */
inline RecoveryReport recovery_error_homogeneous(const ProblemSpec& s, const QuadratureConfig& cfg,
                                                 const ConstantsOptions& opt = {}) {
    if (s.normalization != Normalization::Plain)
        throw DomainError("recovery_error_homogeneous: use the Fourier routines for Fourier specs");
    const PolarData t = polar_data(s, cfg, opt.symmetry_tol);
    RecoveryReport rep;
    rep.gamma = t.gamma;
    rep.q_star = t.q_star;
    rep.I = t.I;
    rep.constant = std::exp(t.log_K);
    rep.constant_name = "K";
    rep.E = std::exp(t.log_K + t.gamma * std::log(s.delta));
    rep.values["I1"] = t.I1;
    rep.values["I2"] = t.I2;
    rep.values["symmetry_report"] = t.angular.symmetry_report;
    for (int j = 0; j < s.n(); ++j) rep.values["I'_" + std::to_string(j + 1)] = t.angular.Ij[j];
    const double Eee = error_from_integrals(s, t.I1, t.I2);
    rep.values["E_decomposition"] = Eee;
    rep.residuals["decomposition_vs_closed_form"] = rel_diff(Eee, rep.E);
    double sumIj = 0.0;
    for (double v : t.angular.Ij) sumIj += v;
    rep.residuals["sum_Ij_vs_I"] = rel_diff(sumIj, t.I);
    const ConeMultipliers m = cone_multipliers(s, t.I1, t.I2);
    rep.multipliers["lambda0"] = m.lambda0;
    rep.multipliers["lambda"] = m.lambda;
    rep.multipliers["xi"] = m.xi;
    rep.values["E_multipliers"] = m.E;
    rep.residuals["multiplier_value"] = rel_diff(m.E, rep.E);
    rep.flags.push_back(std::string("regime ") + regime_name(m.regime));
    if (opt.direct_check) {
        const DirectIntegrals di = direct_integrals(s, cfg);
        rep.values["I1_direct"] = di.I1;
        rep.values["I2_direct"] = di.Ij.front();
        rep.residuals["I1_direct"] = rel_diff(di.I1, t.I1);
        double worst = 0.0;
        for (double v : di.Ij) worst = std::max(worst, rel_diff(v, t.I2));
        rep.residuals["I2_direct"] = worst;
        rep.residuals["direct_decomposition_vs_closed_form"] = rel_diff(error_from_integrals(s, di.I1, di.Ij.front()), rep.E);
    }
    return rep;
}

/** \brief Problem in the three-weight form ‖w x‖_q with ‖w0 x‖_p ≤ δ, ‖w_j x‖_r ≤ 1. */
struct ThreeWeightSpec {
    ConeDomain cone = ConeDomain::positive_orthant(1);
    ExponentTriple exponents;
    HomogeneousWeight w = HomogeneousWeight::radial(0.0);
    HomogeneousWeight w0 = HomogeneousWeight::radial(0.0);
    std::vector<HomogeneousWeight> ws;
};

namespace detail {

inline HomogeneousWeight ratio_weight(const HomogeneousWeight& num, const HomogeneousWeight& den) {
    if (den.kind == HomogeneousWeight::Kind::RadialPower)
        return num.over_radial(den.degree()).scaled(1.0 / den.scale);
    HomogeneousWeight out = HomogeneousWeight::custom_weight(
        num.degree() - den.degree(),
        [num, den](std::span<const double> u) {
            const double b = den.profile(u);
            return b == 0.0 ? kInf : num.profile(u) / b;
        },
        num.permutation_symmetric && den.permutation_symmetric);
    return out;
}

} // namespace detail

/** \brief The equivalent plain problem with ψ = w/w0 and φ_j = w_j/w0. */
inline ProblemSpec to_problem_spec(const ThreeWeightSpec& t, double delta = 1.0) {
    ProblemSpec s;
    s.cone = t.cone;
    s.exponents = t.exponents;
    s.delta = delta;
    s.psi = detail::ratio_weight(t.w, t.w0);
    for (const auto& wj : t.ws) s.phis.push_back(detail::ratio_weight(wj, t.w0));
    return s;
}

/** \brief Parameters of the power-weight Carlson family on the orthant. */
struct CarlsonParams {
    int d = 1;
    ExponentTriple exponents;
    double lambda_ = 1.0;
    double mu = 1.0;
    double theta = 0.0, theta0 = 0.0, theta1 = 0.0;
    double alpha = 0.0, beta = 0.0;
};

/** \brief θ = d(1−1/q), θ0 = d − (λ+d)/p, θ1 = d + (μ−d)/r, α = μ/(pμ+rλ), β = λ/(pμ+rλ). */
inline CarlsonParams make_carlson_params(int d, const ExponentTriple& e, double lambda_, double mu) {
    if (!(lambda_ > 0.0) || !(mu > 0.0)) throw DomainError("carlson: lambda and mu must be positive");
    if (std::isinf(e.p) || std::isinf(e.r) || std::isinf(e.q)) throw DomainError("carlson: exponents must be finite");
    (void)classify_regime(e);
    CarlsonParams c;
    c.d = d;
    c.exponents = e;
    c.lambda_ = lambda_;
    c.mu = mu;
    c.theta = d * (1.0 - 1.0 / e.q);
    c.theta0 = d - (lambda_ + d) / e.p;
    c.theta1 = d + (mu - d) / e.r;
    c.alpha = mu / (e.p * mu + e.r * lambda_);
    c.beta = lambda_ / (e.p * mu + e.r * lambda_);
    return c;
}

/** \brief w = |t|^θ, w0 = |t|^θ0, w_j = t_j^θ1 (j = 1..d) on the orthant. */
inline ThreeWeightSpec carlson_three_weight(const CarlsonParams& c) {
    ThreeWeightSpec t;
    t.cone = ConeDomain::positive_orthant(c.d);
    t.exponents = c.exponents;
    t.w = HomogeneousWeight::radial(c.theta);
    t.w0 = HomogeneousWeight::radial(c.theta0);
    for (int j = 0; j < c.d; ++j) t.ws.push_back(HomogeneousWeight::coordinate(j, c.theta1));
    return t;
}

/** \brief Constant of the power-weight Carlson family, with its cross-check. */
struct CarlsonResult {
    double C = 0.0;          ///< closed form with α, β
    double C_general = 0.0;  ///< three-weight constant of the equivalent problem
    double I = 0.0;
    double exponent = 0.0;   ///< angular exponent used in I
    double gamma = 0.0;
    double residual = 0.0;
};

/**
 * \brief C = d^β/((pα)^α (rβ)^β) · (I/(λ+μ) · B(α/s, β/s))^s with s = 1/q − α − β.
 */
inline CarlsonResult carlson_report(const CarlsonParams& c, const QuadratureConfig& cfg,
                                    const ConstantsOptions& opt = {}) {
    const double p = c.exponents.p, q = c.exponents.q, r = c.exponents.r, d = c.d;
    const double s = 1.0 / q - c.alpha - c.beta;
    if (!(s > 0.0)) throw DomainError("carlson: 1/q - alpha - beta must be positive");
    CarlsonResult out;
    out.exponent = opt.literal_power_weight_exponent ? r * (d - 1.0) + c.mu : d * (r - 1.0) + c.mu;
    const double pw = c.beta / s, ex = out.exponent;
    const auto cone = ConeDomain::positive_orthant(c.d);
    out.I = sphere_integral(
                [&](const Direction& dir) {
                    double acc = 0.0;
                    for (double v : dir.u()) acc += std::pow(std::fabs(v), ex);
                    return std::pow(acc, -pw);
                },
                cone, cfg)
                .value;
    const double lC = c.beta * std::log(d) - c.alpha * std::log(p * c.alpha) - c.beta * std::log(r * c.beta) +
                      s * (std::log(out.I) - std::log(c.lambda_ + c.mu) + log_beta(c.alpha / s, c.beta / s));
    out.C = std::exp(lC);
    const ProblemSpec ps = to_problem_spec(carlson_three_weight(c));
    const PolarData t = polar_data(ps, cfg, opt.symmetry_tol);
    out.gamma = t.gamma;
    out.C_general = std::exp(t.log_K);
    out.residual = rel_diff(out.C, out.C_general);
    return out;
}

/** \brief Sharp constant of the power-weight Carlson family. */
inline double carlson_constant(const CarlsonParams& c, const QuadratureConfig& cfg, const ConstantsOptions& opt = {}) {
    return carlson_report(c, cfg, opt).C;
}

/** \brief Sharp constant Ĉ of a general three-weight problem. */
inline double carlson_constant(const ThreeWeightSpec& t, const QuadratureConfig& cfg,
                               const ConstantsOptions& opt = {}) {
    return std::exp(polar_data(to_problem_spec(t), cfg, opt.symmetry_tol).log_K);
}

namespace detail {

inline void require_fourier(const ProblemSpec& s, bool linf) {
    if (s.normalization != Normalization::FourierPlancherel) throw DomainError("fourier routine needs a Fourier spec");
    if (s.cone.kind() != ConeDomain::Kind::FullSpace) throw DomainError("fourier routine needs the full space");
    if (s.exponents.r != 2.0) throw DomainError("fourier routine needs r = 2");
    if (linf ? !std::isinf(s.exponents.q) : s.exponents.q != 2.0)
        throw DomainError(linf ? "fourier L-inf routine needs q = inf" : "fourier L2 routine needs q = 2");
}

} // namespace detail

/** \brief ln C_p(ν,η) for the L2 target (continuous up to p = ∞). */
inline double log_fourier_Cp(double gamma, double qb, double p, double nu, double eta, int n) {
    return -(gamma * inv(p)) * std::log(gamma) - 0.5 * (1.0 - gamma) * std::log((1.0 - gamma) / n) +
           (log_beta(qb * gamma * inv(p) + 1.0, qb * (1.0 - gamma) / 2.0) - std::log(2.0 * std::fabs(nu - eta))) / qb;
}

/**
 * \brief Optimal error for the L2 target from a noisy Fourier transform,
 * 2 < p ≤ ∞, with C_p, I and the threshold β of the filter.
 */
inline RecoveryReport fourier_L2_error(const ProblemSpec& s, const QuadratureConfig& cfg,
                                       const ConstantsOptions& opt = {}) {
    detail::require_fourier(s, false);
    const double p = s.exponents.p, nu = s.nu(), eta = s.eta();
    const int d = s.d(), n = s.n();
    if (!(p > 2.0)) throw DomainError("fourier L2 needs 2 < p <= inf");
    const double g = gamma_fourier_L2(nu, eta, d, p);
    const double qb = q_fourier_L2(g, p);
    const AngularIntegrals a = symmetric_angular_integrals(s, g, qb, cfg, opt.symmetry_tol);
    RecoveryReport rep;
    rep.gamma = g;
    rep.q_star = qb;
    rep.I = a.I;
    rep.values["symmetry_report"] = a.symmetry_report;
    double lC = log_fourier_Cp(g, qb, p, nu, eta, n);
    if (std::isinf(p)) {
        const double lC2 = ((eta + 0.5 * d) / (nu + 0.5 * d)) * std::log(n * std::fabs(2.0 * nu + d)) -
                           std::log(std::fabs(2.0 * eta + d));
        rep.residuals["c_inf_vs_limit"] = rel_diff(std::exp(0.5 * lC2), std::exp(lC));
        lC = 0.5 * lC2;
    }
    rep.constant = std::exp(lC);
    rep.constant_name = "C_p";
    const double lI = std::log(a.I), ld = std::log(s.delta);
    rep.E = std::exp(-0.5 * d * g * std::log(kTwoPi) + lC + lI / qb + g * ld);
    const double beta =
        std::exp(std::log((1.0 - g) / n) - d * g * std::log(kTwoPi) + 2.0 * lC + 2.0 * g * (ld + (0.5 - inv(p)) * lI));
    rep.multipliers["beta"] = beta;
    if (std::isinf(p)) {
        const double lam = std::exp(((nu - eta) / (2.0 * nu + d)) *
                                    (2.0 * ld + lI - d * std::log(kTwoPi) - std::log(n * std::fabs(2.0 * nu + d))));
        rep.multipliers["lambda"] = lam;
        rep.residuals["lambda_sq_vs_beta"] = rel_diff(lam * lam, beta);
    } else {
        const PlainEquivalent pe = plain_equivalent(s);
        const RecoveryReport pr = recovery_error_homogeneous(pe.spec, cfg, opt);
        rep.values["E_plain_equivalent"] = pr.E * pe.error_factor;
        rep.residuals["plain_crosscheck"] = rel_diff(pr.E * pe.error_factor, rep.E);
        rep.residuals["beta_vs_p1_lambda"] = rel_diff(pr.multipliers.at("lambda") * std::pow(kTwoPi, -d), beta);
        rep.multipliers["xi"] = pr.multipliers.at("xi");
        rep.multipliers["lambda0"] = pr.multipliers.at("lambda0");
    }
    return rep;
}

/** \brief ln Ĉ_p(ν,η) for the L∞ target. */
inline double log_fourier_Cp_hat(double g1, double q1, double p, double nu, double eta, int d, int n) {
    return -(g1 * inv(p)) * std::log(g1) - 0.5 * (1.0 - g1) * std::log((1.0 - g1) / n) +
           (log_beta(q1 * g1 * inv(p) + 1.0, q1 * (1.0 - g1) / 2.0) - std::log(2.0 * std::fabs(nu - eta - 0.5 * d))) /
               q1;
}

/** \brief Scale exponent of the L∞ filter: 1/(ν + d(1/2 − 1/p)), or with n in place of ν. */
inline double linf_scale_exponent(const ProblemSpec& s, bool literal) {
    const double lead = literal ? static_cast<double>(s.n()) : s.nu();
    return 1.0 / (lead + s.d() * (0.5 - inv(s.exponents.p)));
}

/**
 * \brief Optimal error for the L∞ target from a noisy Fourier transform,
 * 1 ≤ p ≤ ∞, with Ĉ_p, γ1, q1 and ξ1.
 */
inline RecoveryReport fourier_Linf_error(const ProblemSpec& s, const QuadratureConfig& cfg,
                                         const ConstantsOptions& opt = {}) {
    detail::require_fourier(s, true);
    const double p = s.exponents.p, nu = s.nu(), eta = s.eta();
    const int d = s.d(), n = s.n();
    if (!(p >= 1.0)) throw DomainError("fourier L-inf needs 1 <= p <= inf");
    const double g = gamma_fourier_Linf(nu, eta, d, p);
    const double q1 = q_fourier_Linf(g, p);
    const AngularIntegrals a = symmetric_angular_integrals(s, g, q1, cfg, opt.symmetry_tol);
    RecoveryReport rep;
    rep.gamma = g;
    rep.q_star = q1;
    rep.I = a.I;
    rep.values["symmetry_report"] = a.symmetry_report;
    if (nu < eta + 0.5 * d) rep.flags.push_back("conditions-unverified");
    const double lC = log_fourier_Cp_hat(g, q1, p, nu, eta, d, n);
    rep.constant = std::exp(lC);
    rep.constant_name = "C_hat_p";
    const double lI = std::log(a.I), ld = std::log(s.delta), l2p = std::log(kTwoPi);
    rep.E = std::exp(-0.5 * d * (1.0 + g) * l2p + lC + lI / q1 + g * ld);
    const double lCI = lC + lI / q1 - 0.5 * d * (1.0 + g) * l2p;
    const double lxi1 = ld - 0.5 * q1 * inv(p) * std::log(g) + 0.5 * q1 * (1.0 - inv(p)) * std::log((1.0 - g) / n) +
                        q1 * (0.5 - inv(p)) * lCI;
    rep.multipliers["xi1"] = std::exp(lxi1);
    rep.values["xi1_simplified_form"] =
        std::exp(ld - 0.5 * q1 * inv(p) * std::log(g) + q1 * (0.5 - inv(p)) * (std::log((1.0 - g) / n) + lCI));
    rep.values["scale_exponent"] = linf_scale_exponent(s, opt.literal_linf_exponent);
    rep.values["filter_scale"] = std::exp(lxi1 * linf_scale_exponent(s, opt.literal_linf_exponent));
    if (opt.literal_linf_exponent) rep.flags.push_back("literal-scale-exponent");
    if (std::isinf(p)) {
        const double a1 = 2.0 * nu - eta, a2 = 2.0 * nu + d, a3 = 2.0 * nu - 2.0 * eta - d;
        const double lE0 = ((eta + d) / a2) * std::log(n * std::fabs(nu + 0.5 * d)) - std::log(std::fabs(eta + d)) +
                           (a1 / a2) * (std::log(std::fabs(a1 / a3)) + lI - d * l2p) + (a3 / a2) * ld;
        rep.values["E0"] = std::exp(lE0);
        rep.residuals["e0_vs_formula"] = rel_diff(std::exp(lE0), rep.E);
        const double llam =
            (a1 / a2) * (std::log(2.0 * std::fabs(a1)) + 2.0 * ld + lI - d * l2p - std::log(std::fabs(n * a2 * a3)));
        rep.multipliers["lambda"] = std::exp(llam);
        rep.residuals["xi1_vs_lambda"] = rel_diff(std::exp(lxi1), std::exp(llam * (nu + 0.5 * d) / a1));
    } else {
        const PlainEquivalent pe = plain_equivalent(s);
        const RecoveryReport pr = recovery_error_homogeneous(pe.spec, cfg, opt);
        rep.values["E_plain_equivalent"] = pr.E;
        rep.residuals["plain_crosscheck"] = rel_diff(pr.E, rep.E);
        rep.multipliers["xi"] = pr.multipliers.at("xi");
        rep.multipliers["lambda0"] = pr.multipliers.at("lambda0");
        rep.multipliers["lambda_plain"] = pr.multipliers.at("lambda");
        if (!opt.literal_linf_exponent)
            rep.residuals["xi1_vs_plain_scale"] = rel_diff(rep.values["filter_scale"], pr.multipliers.at("xi"));
    }
    return rep;
}

/** \brief Generalized Laplace power recovered from a noisy L2 Fourier transform. */
struct LaplacianParams {
    int d = 2;
    double theta = 2.0;
    double eta = 1.0;
    double nu = 2.0;
    double delta = 1.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

/** \throws HypothesisError unless ν > η > 0, ν ≥ 1, 0 < θ ≤ 2ν. */
inline void check_laplacian(const LaplacianParams& L) {
    if (!(L.nu > L.eta)) throw HypothesisError("laplacian: need nu > eta");
    if (!(L.eta > 0.0)) throw HypothesisError("laplacian: need eta > 0");
    if (!(L.nu >= 1.0)) throw HypothesisError("laplacian: need nu >= 1");
    if (!(L.theta > 0.0 && L.theta <= 2.0 * L.nu)) throw HypothesisError("laplacian: need 0 < theta <= 2 nu");
    if (!(L.delta > 0.0)) throw DomainError("laplacian: delta must be positive");
    if (L.d < 1 || L.d > kMaxDim) throw DimensionError("laplacian: dimension must lie in [1, 8]");
}

/** \brief λ1, λ2 filled in. */
inline LaplacianParams laplacian_multipliers(LaplacianParams L) {
    check_laplacian(L);
    const double d = L.d, e = L.eta, v = L.nu, th = L.theta;
    const double lr = d * std::log(kTwoPi) - 2.0 * std::log(L.delta);
    L.lambda1 = std::exp((2.0 * e / th) * std::log(d) - d * std::log(kTwoPi) + std::log(1.0 - e / v) + (e / v) * lr);
    L.lambda2 = std::exp(std::log(e / v) + (2.0 * e / th - 1.0) * std::log(d) + (e / v - 1.0) * lr);
    return L;
}

/** \brief E = d^{η/θ} (δ/(2π)^{d/2})^{1−η/ν} and the multiplier identity λ2 d + λ1 δ² = E². */
inline RecoveryReport laplacian_error(const LaplacianParams& in) {
    const LaplacianParams L = laplacian_multipliers(in);
    RecoveryReport rep;
    const double d = L.d;
    rep.gamma = 1.0 - L.eta / L.nu;
    rep.E = std::exp((L.eta / L.theta) * std::log(d) +
                     rep.gamma * (std::log(L.delta) - 0.5 * d * std::log(kTwoPi)));
    rep.constant = std::exp((L.eta / L.theta) * std::log(d) - 0.5 * d * rep.gamma * std::log(kTwoPi));
    rep.constant_name = "C";
    rep.q_star = 2.0;
    rep.I = 0.0;
    rep.multipliers["lambda1"] = L.lambda1;
    rep.multipliers["lambda2"] = L.lambda2;
    rep.residuals["multiplier_identity"] = rel_diff(L.lambda2 * d + L.lambda1 * L.delta * L.delta, rep.E * rep.E);
    return rep;
}

/**
 * \brief Dispatch on the spec: plain homogeneous, Fourier L2 or Fourier L∞.
 */
inline RecoveryReport recovery_error(const ProblemSpec& s, const QuadratureConfig& cfg,
                                     const ConstantsOptions& opt = {}) {
    if (s.normalization == Normalization::Plain) return recovery_error_homogeneous(s, cfg, opt);
    if (std::isinf(s.exponents.q)) return fourier_Linf_error(s, cfg, opt);
    return fourier_L2_error(s, cfg, opt);
}

} // namespace orec

#endif // OREC_CONSTANTS_HPP
