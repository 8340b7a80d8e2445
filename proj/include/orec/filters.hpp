/**
 * @file filters.hpp
 * @brief Optimal recovery methods as frequency multipliers m̂(y)(t) = α(t)ψ(t)y(t).
 */
#ifndef OREC_FILTERS_HPP
#define OREC_FILTERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "constants.hpp"
#include "core_model.hpp"
#include "errors.hpp"
#include "extremal.hpp"
#include "specialfn.hpp"

namespace orec {

using Multiplier = std::function<double(std::span<const double>)>;

/** \brief Evaluable multiplier α with its metadata. */
struct FilterSpec {
    Multiplier multiplier;
    Multiplier complement; ///< 1 − α to full relative accuracy; empty means 1 − multiplier
    HomogeneousWeight psi;
    bool apply_psi = true;
    std::string kind;       ///< "regime-P", "regime-P1", "regime-P2", "fourier-L2", "fourier-Linf", "laplacian", "identity"
    Regime regime = Regime::P;
    double scale = 1.0;     ///< ξ (or the L∞ filter scale)
    double threshold = 0.0; ///< β, λ or λ0 where the filter has one

    double alpha(std::span<const double> t) const { return multiplier(t); }
    double one_minus_alpha(std::span<const double> t) const { return complement ? complement(t) : 1.0 - multiplier(t); }
    /** \brief Multiplier applied to y(t): α(t)ψ(t), or α(t) when apply_psi is false. */
    double gain(std::span<const double> t) const {
        const double a = multiplier(t);
        return apply_psi ? a * psi(t) : a;
    }
};

namespace detail {

inline double weight_power_sum(const std::vector<HomogeneousWeight>& ws, std::span<const double> t, double r) {
    double acc = 0.0;
    for (const auto& w : ws) acc += std::pow(w(t), r);
    return acc;
}

/** \brief Copy of t scaled by c into a fixed buffer. */
struct ScaledPoint {
    std::array<double, kMaxDim> buf{};
    std::size_t n = 0;
    ScaledPoint(std::span<const double> t, double c) : n(t.size()) {
        for (std::size_t k = 0; k < n; ++k) buf[k] = c * t[k];
    }
    std::span<const double> span() const { return {buf.data(), n}; }
};

inline void require_plain(const ProblemSpec& s, const char* who) {
    if (s.normalization != Normalization::Plain) throw DomainError(std::string(who) + ": plain spec required");
}

} // namespace detail

/**
 * \brief k of the implicit k-equation at a point: k^{1/(p−q)}(1−k)^{−1/(r−q)} = s_r^{−1/(r−q)}|ψ|^{q(p−r)/((p−q)(r−q))}.
 */
inline KSolution k_regime_P_full(const ProblemSpec& s, std::span<const double> z) {
    const ExponentTriple e = s.exponents;
    const double p = e.p, q = e.q, r = e.r;
    const double pv = s.psi(z);
    const double sr = detail::weight_power_sum(s.phis, z, r);
    KSolution out;
    if (pv == 0.0) return out;
    if (sr == 0.0) return {1.0, 0.0, 0.0, -kInf};
    const double L = -std::log(sr) / (r - q) + q * (p - r) / ((p - q) * (r - q)) * std::log(pv);
    return solve_k_log(L, 1.0 / (p - q), 1.0 / (r - q));
}

inline double k_regime_P(const ProblemSpec& s, std::span<const double> z) { return k_regime_P_full(s, z).k; }

/** \brief Regime P: α(t) = k(ξt) with ξ from the closed-form scale. */
inline FilterSpec multiplier_regime_P(const ProblemSpec& spec, const MultiplierSolution& sol) {
    detail::require_plain(spec, "multiplier_regime_P");
    if (classify_regime(spec.exponents) != Regime::P) throw DomainError("multiplier_regime_P: regime P required");
    FilterSpec f;
    f.kind = "regime-P";
    f.regime = Regime::P;
    f.psi = spec.psi;
    f.scale = sol.xi;
    f.threshold = sol.lambda;
    const double xi = sol.xi;
    f.multiplier = [spec, xi](std::span<const double> t) {
        const detail::ScaledPoint z(t, xi);
        return k_regime_P(spec, z.span());
    };
    f.complement = [spec, xi](std::span<const double> t) {
        const detail::ScaledPoint z(t, xi);
        return k_regime_P_full(spec, z.span()).one_minus_k;
    };
    return f;
}

/** \brief The explicit form q^{−1}pλ0 x̂^{p−q}(t)|ψ(t)|^{−q} of the regime-P multiplier. */
inline double met_form_multiplier(const ExtremalProfile& prof, std::span<const double> t) {
    const double pv = prof.spec.psi(t);
    if (pv == 0.0) return 0.0;
    const ExponentTriple e = prof.spec.exponents;
    return e.p / e.q * prof.solution.lambda0 * std::pow(prof.eval(t), e.p - e.q) / std::pow(pv, e.q);
}

/** \brief Regime P1: α(t) = (1 − λ s_q(t)/|ψ(t)|^q)₊. */
inline FilterSpec multiplier_regime_P1(const ProblemSpec& spec, const MultiplierSolution& sol) {
    if (classify_regime(spec.exponents) != Regime::P1) throw DomainError("multiplier_regime_P1: regime P1 required");
    FilterSpec f;
    f.kind = "regime-P1";
    f.regime = Regime::P1;
    f.psi = spec.psi;
    f.scale = sol.xi;
    f.threshold = sol.lambda;
    const double lam = sol.lambda, q = spec.exponents.q;
    const auto phis = spec.phis;
    const auto psi = spec.psi;
    f.multiplier = [=](std::span<const double> t) {
        const double pv = psi(t);
        if (pv == 0.0) return 0.0;
        const double sq = detail::weight_power_sum(phis, t, q);
        return std::clamp(1.0 - lam * sq / std::pow(pv, q), 0.0, 1.0);
    };
    f.complement = [=](std::span<const double> t) {
        const double pv = psi(t);
        if (pv == 0.0) return 1.0;
        return std::min(1.0, lam * detail::weight_power_sum(phis, t, q) / std::pow(pv, q));
    };
    return f;
}

/** \brief Regime P2: α(t) = min{1, λ0/|ψ(t)|^p}. */
inline FilterSpec multiplier_regime_P2(const ProblemSpec& spec, const MultiplierSolution& sol) {
    if (classify_regime(spec.exponents) != Regime::P2) throw DomainError("multiplier_regime_P2: regime P2 required");
    FilterSpec f;
    f.kind = "regime-P2";
    f.regime = Regime::P2;
    f.psi = spec.psi;
    f.scale = sol.xi;
    f.threshold = sol.lambda0;
    const double l0 = sol.lambda0, p = spec.exponents.p;
    const auto psi = spec.psi;
    f.multiplier = [=](std::span<const double> t) {
        const double pv = psi(t);
        if (pv == 0.0) return 0.0;
        return std::min(1.0, l0 / std::pow(pv, p));
    };
    f.complement = [=](std::span<const double> t) {
        const double pv = psi(t);
        if (pv == 0.0) return 1.0;
        return std::max(0.0, 1.0 - l0 / std::pow(pv, p));
    };
    return f;
}

/** \brief Filter of a plain spec from its multipliers, dispatched on the regime. */
inline FilterSpec multiplier_filter(const ProblemSpec& spec, const MultiplierSolution& sol) {
    switch (classify_regime(spec.exponents)) {
    case Regime::P: return multiplier_regime_P(spec, sol);
    case Regime::P1: return multiplier_regime_P1(spec, sol);
    case Regime::P2: return multiplier_regime_P2(spec, sol);
    }
    throw DomainError("no regime");
}

/** \brief Multipliers recorded in a report of a plain spec. */
inline MultiplierSolution solution_from_report(const ProblemSpec& spec, const RecoveryReport& rep) {
    MultiplierSolution sol;
    sol.regime = classify_regime(spec.exponents);
    sol.lambda0 = rep.multipliers.at("lambda0");
    sol.lambda = rep.multipliers.at("lambda");
    sol.xi = rep.multipliers.at("xi");
    sol.E = rep.E;
    return sol;
}

/** \brief L2 Fourier target: α(t) = (1 − β s₂(t)/|ψ(t)|²)₊. */
inline FilterSpec fourier_L2_filter(const ProblemSpec& spec, const RecoveryReport& rep) {
    detail::require_fourier(spec, false);
    FilterSpec f;
    f.kind = "fourier-L2";
    f.regime = classify_regime(effective_exponents(spec));
    f.psi = spec.psi;
    const double beta = rep.multipliers.at("beta");
    f.threshold = beta;
    const auto phis = spec.phis;
    const auto psi = spec.psi;
    f.multiplier = [=](std::span<const double> t) {
        const double pv = psi(t);
        if (pv == 0.0) return 0.0;
        const double s2 = detail::weight_power_sum(phis, t, 2.0);
        return std::clamp(1.0 - beta * s2 / (pv * pv), 0.0, 1.0);
    };
    f.complement = [=](std::span<const double> t) {
        const double pv = psi(t);
        if (pv == 0.0) return 1.0;
        return std::min(1.0, beta * detail::weight_power_sum(phis, t, 2.0) / (pv * pv));
    };
    return f;
}

/**
 * \brief k of the L∞ Fourier target at a point z:
 * k/(1−k)^{p−1} = (2π)^d|ψ|^{p−2}/s₂^{p−1} for 1 < p < ∞,
 * min{1, (2π)^d/|ψ|} for p = 1, (1 − s₂/|ψ|)₊ for p = ∞.
 */
inline KSolution k_fourier_Linf_full(const ProblemSpec& s, std::span<const double> z) {
    const double p = s.exponents.p;
    const int d = s.d();
    const double pv = s.psi(z);
    KSolution out;
    if (pv == 0.0) return out;
    const double s2 = detail::weight_power_sum(s.phis, z, 2.0);
    auto direct = [](double k, double c) { return KSolution{k, c, std::log(k), std::log(c)}; };
    if (std::isinf(p)) {
        const double c = std::min(1.0, s2 / pv);
        return direct(1.0 - c, c);
    }
    if (p == 1.0) {
        const double k = std::min(1.0, std::pow(kTwoPi, d) / pv);
        return direct(k, std::max(0.0, 1.0 - std::pow(kTwoPi, d) / pv));
    }
    if (s2 == 0.0) return direct(1.0, 0.0);
    const double L = d * std::log(kTwoPi) + (p - 2.0) * std::log(pv) - (p - 1.0) * std::log(s2);
    return solve_k_log(L, 1.0, p - 1.0);
}

inline double k_fourier_Linf(const ProblemSpec& s, std::span<const double> z) { return k_fourier_Linf_full(s, z).k; }

/** \brief L∞ Fourier target: α(t) = k(ξ₁^{1/(ν+d(1/2−1/p))} t). */
inline FilterSpec fourier_Linf_filter(const ProblemSpec& spec, const RecoveryReport& rep) {
    detail::require_fourier(spec, true);
    FilterSpec f;
    f.kind = "fourier-Linf";
    f.regime = classify_regime(effective_exponents(spec));
    f.psi = spec.psi;
    const double sc = rep.values.at("filter_scale");
    f.scale = sc;
    f.threshold = rep.multipliers.at("xi1");
    f.multiplier = [spec, sc](std::span<const double> t) {
        const detail::ScaledPoint z(t, sc);
        return k_fourier_Linf(spec, z.span());
    };
    f.complement = [spec, sc](std::span<const double> t) {
        const detail::ScaledPoint z(t, sc);
        return k_fourier_Linf_full(spec, z.span()).one_minus_k;
    };
    return f;
}

/** \brief Canonical a(ξ) = (2π)^dλ1/((2π)^dλ1 + λ2Σ|ξ_j|^{2ν}) of the Laplacian family. */
inline Multiplier laplacian_canonical_a(const LaplacianParams& in) {
    const LaplacianParams L = laplacian_multipliers(in);
    const double c = std::pow(kTwoPi, L.d) * L.lambda1;
    const double l2 = L.lambda2, nu = L.nu;
    return [=](std::span<const double> xi) {
        double s = 0.0;
        for (double v : xi) s += std::pow(std::fabs(v), 2.0 * nu);
        return c / (c + l2 * s);
    };
}

/** \brief ψ_θ^{η/2}(ξ) = (Σ|ξ_j|^θ)^{η/θ}. */
inline HomogeneousWeight laplacian_psi(const LaplacianParams& L) { return HomogeneousWeight::theta_norm(L.theta, L.eta); }

/** \brief S(ξ) = ψ_θ^η(ξ)(|1−a|²/(λ2Σ|ξ_j|^{2ν}) + |a|²/((2π)^dλ1)). */
inline double laplacian_S(const LaplacianParams& L, double a, std::span<const double> xi) {
    const double pe = std::pow(laplacian_psi(L)(xi), 2.0);
    if (pe == 0.0) return 0.0;
    double s = 0.0;
    for (double v : xi) s += std::pow(std::fabs(v), 2.0 * L.nu);
    const double t1 = (1.0 - a) * (1.0 - a) / (L.lambda2 * s);
    const double t2 = a * a / (std::pow(kTwoPi, L.d) * L.lambda1);
    return pe * (t1 + t2);
}

/** \brief max S(ξ) over sample points (row-major, d per point). */
inline double check_aa(const Multiplier& a, const LaplacianParams& in, std::span<const double> samples) {
    const LaplacianParams L = laplacian_multipliers(in);
    const std::size_t d = static_cast<std::size_t>(L.d);
    if (samples.size() % d != 0) throw DimensionError("check_aa: sample length must be a multiple of d");
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); i += d) {
        const auto xi = samples.subspan(i, d);
        worst = std::max(worst, laplacian_S(L, a(xi), xi));
    }
    return worst;
}

/**
 * \brief Random frequencies for check_aa: log-uniform radii over 1e−3..1e3 times
 * the equality radius, uniform directions.
 */
inline std::vector<double> laplacian_samples(const LaplacianParams& L, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(-3.0, 3.0);
    const double c = std::pow(std::pow(kTwoPi, L.d) / (L.delta * L.delta), 1.0 / (2.0 * L.nu));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count) * L.d);
    for (int i = 0; i < count; ++i) {
        std::vector<double> g(L.d);
        double n2 = 0.0;
        for (auto& v : g) {
            v = nd(rng);
            n2 += v * v;
        }
        const double rho = c * std::sqrt(double(L.d)) * std::pow(10.0, ud(rng)) / std::sqrt(n2);
        for (double v : g) out.push_back(v * rho);
    }
    return out;
}

/** \brief Point c(1,…,1), c = ((2π)^d/δ²)^{1/(2ν)}, where the canonical S reaches 1. */
inline std::vector<double> laplacian_equality_point(const LaplacianParams& L) {
    const double c = std::pow(std::pow(kTwoPi, L.d) / (L.delta * L.delta), 1.0 / (2.0 * L.nu));
    return std::vector<double>(L.d, c);
}

/**
 * \brief Laplacian method F^{−1}(a ψ_θ^{η/2} y). A user a(·) is validated on
 * the given samples (default: 10⁴ random points).
 * \throws AAViolation when max S exceeds 1 + tol.
 */
inline FilterSpec laplacian_filter(const LaplacianParams& in, const Multiplier& user_a = {},
                                   std::span<const double> samples = {}, double tol = 1e-12) {
    const LaplacianParams L = laplacian_multipliers(in);
    FilterSpec f;
    f.kind = "laplacian";
    f.psi = laplacian_psi(L);
    f.threshold = L.lambda1;
    f.scale = L.lambda2;
    if (user_a) {
        std::vector<double> own;
        if (samples.empty()) {
            own = laplacian_samples(L, 10000, 1);
            samples = own;
        }
        const double worst = check_aa(user_a, L, samples);
        if (worst > 1.0 + tol) throw AAViolation("a(.) violates S <= 1: max S = " + std::to_string(worst));
        f.multiplier = user_a;
    } else {
        f.multiplier = laplacian_canonical_a(L);
        const double c = std::pow(kTwoPi, L.d) * L.lambda1, l2 = L.lambda2, nu = L.nu;
        f.complement = [=](std::span<const double> xi) {
            double s = 0.0;
            for (double v : xi) s += std::pow(std::fabs(v), 2.0 * nu);
            return l2 * s / (c + l2 * s);
        };
    }
    return f;
}

/** \brief α ≡ 1: the naive method ψ·y. */
inline FilterSpec identity_filter(const HomogeneousWeight& psi) {
    FilterSpec f;
    f.kind = "identity";
    f.psi = psi;
    f.multiplier = [](std::span<const double>) { return 1.0; };
    return f;
}

/** \brief The optimal filter for a spec and its report. */
inline FilterSpec optimal_filter(const ProblemSpec& spec, const RecoveryReport& rep) {
    if (spec.normalization == Normalization::FourierPlancherel)
        return std::isinf(spec.exponents.q) ? fourier_Linf_filter(spec, rep) : fourier_L2_filter(spec, rep);
    return multiplier_filter(spec, solution_from_report(spec, rep));
}

} // namespace orec

#endif // OREC_FILTERS_HPP
