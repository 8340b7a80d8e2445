/**
 * @file recovery_engine.hpp
 * @brief Frequency grids, sampled signals, method errors and the adversarial
 * worst-case search.
 */
#ifndef OREC_RECOVERY_ENGINE_HPP
#define OREC_RECOVERY_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
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
#include "filters.hpp"
#include "quadrature.hpp"

namespace orec {

/** \brief Nodes t_i of a cone with quadrature masses μ_i. */
struct FrequencyGrid {
    enum class Kind { TensorLattice, PolarProduct };
    Kind kind = Kind::TensorLattice;
    int d = 1;
    std::vector<double> nodes;   ///< row-major, d per node
    std::vector<double> weights; ///< μ_i > 0

    std::size_t size() const { return weights.size(); }
    std::span<const double> node(std::size_t i) const { return {nodes.data() + i * d, static_cast<std::size_t>(d)}; }
    double total_mass() const {
        KahanSum s;
        for (double w : weights) s.add(w);
        return s.value();
    }
};

/**
 * \brief Midpoint lattice with n nodes per axis on [−L, L]^d ([0, L]^d for the
 * positive orthant); nodes outside the cone are dropped.
 * \throws SizeError above 5·10⁷ nodes.
 */
inline FrequencyGrid tensor_lattice(const ConeDomain& cone, double extent, int n) {
    const int d = cone.dim();
    if (!(extent > 0.0) || n < 1) throw DomainError("tensor lattice: need extent > 0 and n >= 1");
    if (std::pow(double(n), d) > 5e7) throw SizeError("tensor lattice: too many nodes");
    const bool half = cone.kind() == ConeDomain::Kind::PositiveOrthant;
    const double lo = half ? 0.0 : -extent;
    const double h = (extent - lo) / n;
    FrequencyGrid g;
    g.kind = FrequencyGrid::Kind::TensorLattice;
    g.d = d;
    const double w = std::pow(h, d);
    std::vector<int> idx(d, 0);
    std::vector<double> t(d);
    while (true) {
        for (int k = 0; k < d; ++k) t[k] = lo + (idx[k] + 0.5) * h;
        if (cone.contains(t)) {
            g.nodes.insert(g.nodes.end(), t.begin(), t.end());
            g.weights.push_back(w);
        }
        int k = d - 1;
        while (k >= 0 && ++idx[k] >= n) idx[k--] = 0;
        if (k < 0) break;
    }
    return g;
}

/** \brief Radial layout of a polar grid: Gauss panels in s = ln ρ. */
struct PolarGridSpec {
    int radial_order = 8;
    double panel_width = 0.5;
    int angular_panels = 8;  ///< per polar angle (d ≥ 2)
    int angular_order = 8;
};

/** \brief Per-direction s-interval with kinks to align panels to. */
using RayRangeFn = std::function<RayExtent(const Direction&)>;

/**
 * \brief Product grid: Gauss–Legendre panels in s on each ray (edges at the
 * supplied kinks) times a tensor Gauss rule on the angular box.
 * Masses are e^{sd}·J(ω)·(rule weights).
 */
inline FrequencyGrid polar_product(const ConeDomain& cone, const RayRangeFn& range, const PolarGridSpec& ps) {
    const int d = cone.dim();
    FrequencyGrid g;
    g.kind = FrequencyGrid::Kind::PolarProduct;
    g.d = d;
    std::vector<Direction> dirs;
    std::vector<double> dw;
    if (d == 1) {
        for (double s : cone.line_directions()) {
            Direction dir;
            dir.unit[0] = s;
            dirs.push_back(dir);
            dw.push_back(1.0);
        }
    } else {
        const auto dom = cone.angular_domain();
        const GaussRule& gr = gauss_legendre(ps.angular_order);
        const int per = ps.angular_panels * ps.angular_order;
        std::vector<int> idx(d - 1, 0);
        while (true) {
            Direction dir;
            dir.d = d;
            double w = 1.0;
            for (int k = 0; k < d - 1; ++k) {
                const double h = (dom[k].hi - dom[k].lo) / ps.angular_panels;
                const int panel = idx[k] / ps.angular_order, node = idx[k] % ps.angular_order;
                const double a = dom[k].lo + panel * h;
                dir.omega[k] = a + 0.5 * h * (gr.x[node] + 1.0);
                w *= 0.5 * h * gr.w[node];
            }
            ConeDomain::unit_from_angles(d, dir.omega.data(), dir.unit.data());
            const double J = jacobian_J(dir.w(), d);
            if (J > 0.0) {
                dirs.push_back(dir);
                dw.push_back(w * J);
            }
            int k = d - 2;
            while (k >= 0 && ++idx[k] >= per) idx[k--] = 0;
            if (k < 0) break;
        }
    }
    const GaussRule& gr = gauss_legendre(ps.radial_order);
    for (std::size_t a = 0; a < dirs.size(); ++a) {
        const RayExtent ex = range(dirs[a]);
        std::vector<double> edges{ex.lo};
        std::vector<double> kinks;
        for (double b : ex.breaks)
            if (b > ex.lo && b < ex.hi) kinks.push_back(b);
        std::sort(kinks.begin(), kinks.end());
        kinks.push_back(ex.hi);
        for (double stop : kinks) {
            const double from = edges.back();
            const int np = std::max(1, static_cast<int>(std::ceil((stop - from) / ps.panel_width)));
            for (int k = 1; k <= np; ++k) edges.push_back(from + (stop - from) * k / np);
        }
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            const double h = edges[e + 1] - edges[e];
            for (int node = 0; node < ps.radial_order; ++node) {
                const double s = edges[e] + 0.5 * h * (gr.x[node] + 1.0);
                const double rho = std::exp(s);
                const double w = dw[a] * 0.5 * h * gr.w[node] * std::exp(d * s);
                if (!(w > 0.0) || !std::isfinite(w)) continue;
                for (int k = 0; k < d; ++k) g.nodes.push_back(rho * dirs[a].unit[k]);
                g.weights.push_back(w);
            }
        }
    }
    return g;
}

/** \brief Polar grid covering the closed-form extremal profile of a spec. */
inline FrequencyGrid profile_polar_grid(const ProblemSpec& spec, const QuadratureConfig& cfg,
                                        const PolarGridSpec& ps = {}, double rel = 1e-16) {
    if (std::isinf(spec.exponents.p)) {
        // break s* where ψ² = βs₂ (L2 target) or ψ = λs₂ (L∞ target); tails decay like e^{−rate·|s−s*|}
        if (spec.normalization != Normalization::FourierPlancherel)
            throw DomainError("profile grid: p = inf needs a Fourier spec");
        const RecoveryReport rep = recovery_error(spec, cfg);
        const bool linf = std::isinf(spec.exponents.q);
        const double lam = linf ? rep.multipliers.at("lambda") : rep.multipliers.at("beta");
        const double eta = spec.psi.degree();
        const double nu = spec.phis.front().degree();
        const int d = spec.d();
        const double below = std::min(2.0 * eta + d, 2.0 * nu + d);
        const double above = 2.0 * nu - 2.0 * eta - d;
        if (linf && !(above > 0.0)) throw DomainError("profile grid: extremal not integrable (need nu > eta + d/2)");
        const double span = -std::log(rel) + 1.0;
        return polar_product(spec.cone, [&](const Direction& dir) {
            const double lpsi = std::log(spec.psi(dir.u()));
            double s2 = 0.0;
            for (const auto& ph : spec.phis) s2 += std::pow(ph(dir.u()), 2.0);
            const double ls2 = std::log(s2);
            const double star = linf ? (std::log(lam) + ls2 - lpsi) / (eta - 2.0 * nu)
                                     : (std::log(lam) + ls2 - 2.0 * lpsi) / (2.0 * (eta - nu));
            if (!std::isfinite(star)) return RayExtent{-span, span, {}};
            return RayExtent{star - span / below, linf ? star + span / above : star, {star}};
        }, ps);
    }
    const ProblemSpec s = plain_equivalent(spec).spec;
    const PolarData t = polar_data(s, cfg);
    const auto prof = build_profile(s, closed_form_multipliers(s, t.I1, t.I2));
    return polar_product(s.cone, [&](const Direction& dir) { return ray_extent(prof, dir, rel); }, ps);
}

/** \brief Values at the nodes of one grid. */
struct SampledSignal {
    const FrequencyGrid* grid = nullptr;
    std::vector<std::complex<double>> values;

    SampledSignal() = default;
    explicit SampledSignal(const FrequencyGrid& g) : grid(&g), values(g.size()) {}
    std::size_t size() const { return values.size(); }
};

/** \brief Sample f at every node. */
inline SampledSignal sample(const FrequencyGrid& g, const std::function<std::complex<double>(std::span<const double>)>& f) {
    SampledSignal s(g);
    for (std::size_t i = 0; i < g.size(); ++i) s.values[i] = f(g.node(i));
    return s;
}

namespace detail {

inline void require_same_grid(const SampledSignal& a, const FrequencyGrid& g) {
    if (a.grid != &g || a.values.size() != g.size()) throw DimensionError("signal does not belong to this grid");
}

/** \brief Power-mean of |v_i| with masses; max for an infinite exponent. */
inline double mass_norm(const std::vector<double>& absvals, const std::vector<double>& mu, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < absvals.size(); ++i)
            if (mu[i] > 0.0) m = std::max(m, absvals[i]);
        return m;
    }
    const double mx = absvals.empty() ? 0.0 : *std::max_element(absvals.begin(), absvals.end());
    if (mx == 0.0) return 0.0;
    KahanSum s;
    for (std::size_t i = 0; i < absvals.size(); ++i)
        if (absvals[i] > 0.0) s.add(mu[i] * std::pow(absvals[i] / mx, p));
    return mx * std::pow(s.value(), 1.0 / p);
}

} // namespace detail

/** \brief (Σ μ_i |w(t_i) x_i|^p)^{1/p}; max_i |w x_i| for p = ∞. */
inline double weighted_norm(const SampledSignal& x, const HomogeneousWeight& w, double exponent, const FrequencyGrid& g) {
    detail::require_same_grid(x, g);
    if (!(exponent >= 1.0)) throw DomainError("weighted_norm: exponent must lie in [1, inf]");
    std::vector<double> a(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) a[i] = std::abs(x.values[i]) * w(g.node(i));
    return detail::mass_norm(a, g.weights, exponent);
}

/** \brief Unweighted discrete L_p norm. */
inline double plain_norm(const SampledSignal& x, double exponent, const FrequencyGrid& g) {
    detail::require_same_grid(x, g);
    std::vector<double> a(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) a[i] = std::abs(x.values[i]);
    return detail::mass_norm(a, g.weights, exponent);
}

/** \brief Pointwise gain(t)·y(t), i.e. α(t)ψ(t)y(t). */
inline SampledSignal apply_filter(const SampledSignal& y, const FilterSpec& f, const FrequencyGrid& g) {
    detail::require_same_grid(y, g);
    SampledSignal out(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double k = f.gain(g.node(i));
        out.values[i] = k == 0.0 ? 0.0 : k * y.values[i];
    }
    return out;
}

/**
 * \brief How the norms of a spec read on a frequency grid: noise exponent p,
 * target exponent and factor, constraint exponent and factor.
 */
struct ErrorModel {
    double p = 2.0;
    double delta = 1.0;
    HomogeneousWeight psi;
    double target_exponent = 1.0;
    double target_factor = 1.0;
    std::vector<HomogeneousWeight> phis;
    double r = 2.0;
    double constraint_factor = 1.0;
};

/**
 * \brief Plain specs: L_q, L_r norms as they are. Fourier specs: constraints
 * carry (2π)^{−d/2}; the L2 target carries (2π)^{−d/2}; the L∞ target is
 * (2π)^{−d} times the L1 norm of ψ·(Fx − m̂y).
 */
inline ErrorModel error_model(const ProblemSpec& s) {
    ErrorModel m;
    m.p = s.exponents.p;
    m.delta = s.delta;
    m.psi = s.psi;
    m.phis = s.phis;
    m.r = s.exponents.r;
    m.target_exponent = s.exponents.q;
    if (s.normalization == Normalization::FourierPlancherel) {
        const int d = s.d();
        m.constraint_factor = std::pow(kTwoPi, -0.5 * d);
        if (std::isinf(s.exponents.q)) {
            m.target_exponent = 1.0;
            m.target_factor = std::pow(kTwoPi, -double(d));
        } else {
            m.target_factor = std::pow(kTwoPi, -0.5 * d);
        }
    }
    return m;
}

/** \brief Fourier-normalized spec of the Laplacian family: ψ_θ^{η/2}, φ_j = |ξ_j|^ν, p = q = r = 2. */
inline ProblemSpec laplacian_problem(const LaplacianParams& L) {
    check_laplacian(L);
    ProblemSpec s;
    s.cone = ConeDomain::full_space(L.d);
    s.exponents = {2.0, 2.0, 2.0};
    s.delta = L.delta;
    s.normalization = Normalization::FourierPlancherel;
    s.psi = laplacian_psi(L);
    for (int j = 0; j < L.d; ++j) s.phis.push_back(HomogeneousWeight::coordinate(j, L.nu));
    return s;
}

/**
 * \brief Target-side values ψx − αψy reduced to the error norm, evaluated as
 * (1−α)ψx + αψ(x−y) so that α near 1 loses no accuracy.
 */
inline double method_error(const SampledSignal& x, const SampledSignal& y, const FilterSpec& f, const ProblemSpec& spec,
                           const FrequencyGrid& g) {
    detail::require_same_grid(x, g);
    detail::require_same_grid(y, g);
    const ErrorModel m = error_model(spec);
    std::vector<double> a(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto t = g.node(i);
        if (f.apply_psi) {
            const double pv = m.psi(t);
            a[i] = pv == 0.0 ? 0.0
                             : pv * std::abs(f.one_minus_alpha(t) * x.values[i] + f.alpha(t) * (x.values[i] - y.values[i]));
        } else {
            a[i] = std::abs(m.psi(t) * x.values[i] - f.alpha(t) * y.values[i]);
        }
    }
    return m.target_factor * detail::mass_norm(a, g.weights, m.target_exponent);
}

/** \brief Noise size ‖x − y‖_p and the largest constraint norm of x. */
struct Admissibility {
    double noise = 0.0;
    double constraint = 0.0;
    bool ok(double delta, double tol = 1e-9) const {
        return noise <= delta * (1.0 + tol) && constraint <= 1.0 + tol;
    }
};

inline Admissibility admissibility(const SampledSignal& x, const SampledSignal& y, const ProblemSpec& spec,
                                   const FrequencyGrid& g) {
    detail::require_same_grid(x, g);
    detail::require_same_grid(y, g);
    const ErrorModel m = error_model(spec);
    Admissibility a;
    SampledSignal z(g);
    for (std::size_t i = 0; i < g.size(); ++i) z.values[i] = x.values[i] - y.values[i];
    a.noise = plain_norm(z, m.p, g);
    for (const auto& ph : m.phis) a.constraint = std::max(a.constraint, m.constraint_factor * weighted_norm(x, ph, m.r, g));
    return a;
}

/** \brief A pair (x, y) with ‖ψx‖ as a lower-bound certificate. */
struct ExtremalPair {
    SampledSignal x;
    SampledSignal y;
    double certificate = 0.0; ///< target norm of x (error of any linear method at y = 0)
    double rescale = 1.0;     ///< factor applied to land on the constraint boundary
};

namespace detail {

/** \brief Per-node arrays of one spec on one grid. */
struct GridData {
    std::vector<double> mu, psi, sr;
    std::vector<std::vector<double>> phi;
    ErrorModel m;
};

inline GridData grid_data(const ProblemSpec& spec, const FrequencyGrid& g) {
    GridData D;
    D.m = error_model(spec);
    const std::size_t N = g.size();
    D.mu = g.weights;
    D.psi.resize(N);
    D.sr.assign(N, 0.0);
    D.phi.assign(D.m.phis.size(), std::vector<double>(N));
    for (std::size_t i = 0; i < N; ++i) {
        const auto t = g.node(i);
        D.psi[i] = D.m.psi(t);
        for (std::size_t j = 0; j < D.m.phis.size(); ++j) {
            D.phi[j][i] = D.m.constraint_factor * D.m.phis[j](t);
            D.sr[i] += std::pow(D.phi[j][i], D.m.r);
        }
    }
    return D;
}

/** \brief Max over j of (Σμ|φ_j X|^r)^{1/r} with the factors of the model. */
inline double max_constraint(const GridData& D, const std::vector<double>& X) {
    double worst = 0.0;
    for (const auto& ph : D.phi) {
        std::vector<double> a(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) a[i] = ph[i] * X[i];
        worst = std::max(worst, mass_norm(a, D.mu, D.m.r));
    }
    return worst;
}

inline double noise_norm(const GridData& D, const std::vector<double>& Z) { return mass_norm(Z, D.mu, D.m.p); }

/** \brief Scale X ≥ 0 so that ‖X‖_p ≤ δ and every constraint ≤ 1 with one active. */
inline double rescale_admissible(const GridData& D, std::vector<double>& X, bool noise_bound) {
    const double c = max_constraint(D, X);
    const double n = noise_norm(D, X);
    double k = c > 0.0 ? 1.0 / c : kInf;
    if (noise_bound && n > 0.0) k = std::min(k, D.m.delta / n);
    if (!std::isfinite(k)) k = 0.0;
    for (double& v : X) v *= k;
    return k;
}

/** \brief Z ≥ 0 maximizing Σμ w Z over ‖Z‖_p ≤ δ. */
inline void best_noise(const GridData& D, const std::vector<double>& w, std::vector<double>& Z) {
    const double p = D.m.p;
    const std::size_t N = w.size();
    Z.assign(N, 0.0);
    if (std::isinf(p)) {
        for (std::size_t i = 0; i < N; ++i) Z[i] = w[i] > 0.0 ? D.m.delta : 0.0;
        return;
    }
    if (p == 1.0) {
        std::size_t k = 0;
        for (std::size_t i = 1; i < N; ++i)
            if (w[i] > w[k]) k = i;
        if (w[k] > 0.0) Z[k] = D.m.delta / D.mu[k];
        return;
    }
    const double wm = *std::max_element(w.begin(), w.end());
    if (!(wm > 0.0)) return;
    for (std::size_t i = 0; i < N; ++i) Z[i] = w[i] > 0.0 ? std::pow(w[i] / wm, 1.0 / (p - 1.0)) : 0.0;
    const double n = noise_norm(D, Z);
    if (n > 0.0)
        for (double& v : Z) v *= D.m.delta / n;
}

/** \brief X ≥ 0 maximizing Σμ v X under the summed constraint, then rescaled to the boundary. */
inline void best_signal(const GridData& D, const std::vector<double>& v, std::vector<double>& X) {
    const double r = D.m.r;
    const std::size_t N = v.size();
    X.assign(N, 0.0);
    double vm = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        if (D.sr[i] > 0.0) vm = std::max(vm, v[i] / D.sr[i]);
    if (!(vm > 0.0)) return;
    for (std::size_t i = 0; i < N; ++i)
        if (D.sr[i] > 0.0 && v[i] > 0.0) X[i] = std::pow(v[i] / D.sr[i] / vm, 1.0 / (r - 1.0));
    rescale_admissible(D, X, false);
}

} // namespace detail

/**
 * \brief Worst-case pair from the proofs: the closed-form extremal profile x̂
 * (or the p = ∞ indicator constructions) sampled on the grid, rescaled onto
 * the constraint boundary, with y = 0.
 */
inline ExtremalPair extremal_pair(const ProblemSpec& spec, const RecoveryReport& rep, const FrequencyGrid& g,
                                  const QuadratureConfig& cfg = {}) {
    ExtremalPair out{SampledSignal(g), SampledSignal(g), 0.0, 1.0};
    if (spec.delta == 0.0) return out;
    const auto D = detail::grid_data(spec, g);
    std::vector<double> X(g.size(), 0.0);
    const double p = spec.exponents.p;
    const bool fourier = spec.normalization == Normalization::FourierPlancherel;
    if (std::isinf(p) && fourier && !std::isinf(spec.exponents.q)) {
        const double beta = rep.multipliers.at("beta");
        for (std::size_t i = 0; i < g.size(); ++i) {
            double s2 = 0.0;
            for (const auto& ph : spec.phis) s2 += std::pow(ph(g.node(i)), 2.0);
            X[i] = D.psi[i] * D.psi[i] > beta * s2 ? spec.delta : 0.0;
        }
    } else if (std::isinf(p) && fourier) {
        const double lam = rep.multipliers.at("lambda");
        for (std::size_t i = 0; i < g.size(); ++i) {
            double s2 = 0.0;
            for (const auto& ph : spec.phis) s2 += std::pow(ph(g.node(i)), 2.0);
            X[i] = D.psi[i] >= lam * s2 ? spec.delta : spec.delta * D.psi[i] / (lam * s2);
        }
    } else {
        const ProblemSpec s = plain_equivalent(spec).spec;
        const PolarData t = polar_data(s, cfg);
        const auto prof = build_profile(s, closed_form_multipliers(s, t.I1, t.I2));
        for (std::size_t i = 0; i < g.size(); ++i) X[i] = prof.eval(g.node(i));
    }
    out.rescale = detail::rescale_admissible(D, X, true);
    std::vector<double> a(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.x.values[i] = X[i];
        a[i] = D.psi[i] * X[i];
    }
    out.certificate = D.m.target_factor * detail::mass_norm(a, D.mu, D.m.target_exponent);
    return out;
}

/**
 * \brief x_ε of the Laplacian proof on a grid: Fx = δ/√(mes B_ε) on the nodes
 * of the ball B_ε around ξ̃ − ε(1,…,1); the best admissible ε of a halving
 * sequence is kept. Falls back to the best single node when a ball is empty.
 */
inline ExtremalPair laplacian_extremal_pair(const LaplacianParams& L, const FrequencyGrid& g) {
    const ProblemSpec spec = laplacian_problem(L);
    ExtremalPair best{SampledSignal(g), SampledSignal(g), -1.0, 1.0};
    if (L.delta == 0.0) {
        best.certificate = 0.0;
        return best;
    }
    const auto D = detail::grid_data(spec, g);
    const auto c = laplacian_equality_point(L);
    const int d = L.d;
    auto evaluate = [&](std::vector<double> X) {
        const double k = detail::rescale_admissible(D, X, true);
        std::vector<double> a(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) a[i] = D.psi[i] * X[i];
        const double cert = D.m.target_factor * detail::mass_norm(a, D.mu, 2.0);
        if (cert > best.certificate) {
            best.certificate = cert;
            best.rescale = k;
            for (std::size_t i = 0; i < X.size(); ++i) best.x.values[i] = X[i];
        }
    };
    double eps = c[0] / 4.0;
    for (int it = 0; it < 24; ++it, eps *= 0.5) {
        std::vector<double> X(g.size(), 0.0);
        double mes = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto t = g.node(i);
            double r2 = 0.0;
            for (int k = 0; k < d; ++k) r2 += std::pow(t[k] - (c[k] - eps), 2.0);
            if (r2 < eps * eps) {
                X[i] = 1.0;
                mes += g.weights[i];
            }
        }
        if (mes == 0.0) break;
        for (double& v : X) v *= L.delta / std::sqrt(mes);
        evaluate(std::move(X));
    }
    // single node k: certificate ∝ ψ_k·min(1/max_j φ_j(t_k), δ), the mass cancels
    std::size_t k = 0;
    double bv = -1.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double ph = 0.0;
        for (const auto& p : D.phi) ph = std::max(ph, p[i]);
        const double v = D.psi[i] * (ph > 0.0 ? std::min(1.0 / ph, L.delta) : L.delta);
        if (v > bv) {
            bv = v;
            k = i;
        }
    }
    if (bv > 0.0) {
        std::vector<double> X(g.size(), 0.0);
        X[k] = L.delta / std::sqrt(g.weights[k]);
        evaluate(std::move(X));
    }
    if (best.certificate < 0.0) best.certificate = 0.0;
    return best;
}

/** \brief Outcome of the adversarial search. */
struct AdversaryResult {
    double sup_error = 0.0;
    int argmax_trial = -1; ///< −1 for the extremal pair
    std::string argmax_generator;
    SampledSignal x; ///< maximizing pair
    SampledSignal y;
    double extremal_certificate = 0.0;
};

/** \brief Options of the adversary. */
struct AdversaryOptions {
    int trials = 100;
    std::uint64_t seed = 1;
    int ascent_steps = 4;
    int threads = 1;
    bool include_extremal = true;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/** \brief Error value of magnitudes (X, Z) with the worst sign: ψx − gψ(x+z), z = −Z. */
inline double pair_error(const GridData& D, const std::vector<double>& A, const std::vector<double>& B,
                         const std::vector<double>& X, const std::vector<double>& Z) {
    std::vector<double> e(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) e[i] = A[i] * X[i] + B[i] * Z[i];
    return D.m.target_factor * mass_norm(e, D.mu, D.m.target_exponent);
}

/** \brief Alternating linearized ascent over Z (noise) then X (signal). */
inline void ascend(const GridData& D, const std::vector<double>& A, const std::vector<double>& B, std::vector<double>& X,
                   std::vector<double>& Z, int steps) {
    const double q = D.m.target_exponent;
    const std::size_t N = X.size();
    std::vector<double> w(N), e(N);
    for (int s = 0; s < steps; ++s) {
        for (std::size_t i = 0; i < N; ++i) e[i] = A[i] * X[i] + B[i] * Z[i];
        const double em = *std::max_element(e.begin(), e.end());
        if (!(em > 0.0)) return;
        for (std::size_t i = 0; i < N; ++i) w[i] = B[i] * (q == 1.0 ? 1.0 : std::pow(e[i] / em, q - 1.0));
        best_noise(D, w, Z);
        for (std::size_t i = 0; i < N; ++i) e[i] = A[i] * X[i] + B[i] * Z[i];
        for (std::size_t i = 0; i < N; ++i) w[i] = A[i] * (q == 1.0 ? 1.0 : std::pow(e[i] / em, q - 1.0));
        best_signal(D, w, X);
    }
}

} // namespace detail

/**
 * \brief Empirical sup of the method error over admissible pairs. Trial i
 * draws from its own stream (seed, i) and uses generator i mod 3: perturbed
 * extremal profile, filter-transition probes, random admissible signals.
 * Every start is rescaled onto the boundary and improved by a few alternating
 * ascent steps with worst-sign noise.
 */
inline AdversaryResult adversary(const ProblemSpec& spec, const FilterSpec& f, const RecoveryReport& rep,
                                 const FrequencyGrid& g, const AdversaryOptions& opt, const QuadratureConfig& cfg = {},
                                 const ExtremalPair* extremal = nullptr) {
    if (opt.trials < 1) throw DomainError("adversary: trials must be at least 1");
    const auto D = detail::grid_data(spec, g);
    const std::size_t N = g.size();
    std::vector<double> A(N), B(N), alpha(N);
    for (std::size_t i = 0; i < N; ++i) {
        const auto t = g.node(i);
        if (f.apply_psi) {
            alpha[i] = D.psi[i] > 0.0 ? f.alpha(t) : 0.0;
            A[i] = D.psi[i] > 0.0 ? D.psi[i] * std::fabs(f.one_minus_alpha(t)) : 0.0;
            B[i] = D.psi[i] * std::fabs(alpha[i]);
        } else {
            const double gain = f.alpha(t);
            A[i] = std::fabs(D.psi[i] - gain);
            B[i] = std::fabs(gain);
            alpha[i] = D.psi[i] > 0.0 ? gain / D.psi[i] : 0.0;
        }
    }
    std::vector<double> base(N, 0.0);
    ExtremalPair own;
    if (!extremal) {
        try {
            own = extremal_pair(spec, rep, g, cfg);
            extremal = &own;
        } catch (const Error&) {
            extremal = nullptr;
        }
    }
    if (extremal)
        for (std::size_t i = 0; i < N; ++i) base[i] = std::abs(extremal->x.values[i]);
    std::vector<std::size_t> transition;
    for (std::size_t i = 0; i < N; ++i)
        if (alpha[i] > 0.05 && alpha[i] < 0.95) transition.push_back(i);

    AdversaryResult res;
    res.x = SampledSignal(g);
    res.y = SampledSignal(g);
    std::vector<double> bestX(N, 0.0), bestZ(N, 0.0);
    if (extremal) {
        res.extremal_certificate = extremal->certificate;
        if (opt.include_extremal) {
            const std::vector<double> Z = base;
            res.sup_error = detail::pair_error(D, A, B, base, Z);
            res.argmax_trial = -1;
            res.argmax_generator = "extremal";
            bestX = base;
            bestZ = Z;
        }
    }
    std::vector<double> errs(opt.trials, -1.0);
    std::vector<std::vector<double>> Xs(opt.trials), Zs(opt.trials);
    const char* names[3] = {"perturbed-extremal", "transition-probe", "random"};
    parallel_for(opt.trials, opt.threads, [&](int trial) {
        std::mt19937_64 rng(detail::splitmix64(opt.seed ^ detail::splitmix64(static_cast<std::uint64_t>(trial))));
        std::normal_distribution<double> nd;
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        std::vector<double> X(N, 0.0), Z(N, 0.0);
        const int gen = trial % 3;
        if (gen == 0 && extremal) {
            for (std::size_t i = 0; i < N; ++i) {
                X[i] = base[i] * std::exp(0.3 * nd(rng));
                Z[i] = base[i] * std::exp(0.3 * nd(rng));
            }
        } else if (gen == 1 && !transition.empty()) {
            const int k = 1 + static_cast<int>(rng() % 4);
            for (int j = 0; j < k; ++j) {
                const std::size_t i = transition[rng() % transition.size()];
                X[i] += ud(rng) / std::sqrt(D.mu[i]);
                Z[i] += ud(rng) / std::sqrt(D.mu[i]);
            }
        } else {
            const double a = 2.0 * ud(rng);
            for (std::size_t i = 0; i < N; ++i) {
                double r2 = 0.0;
                for (double v : g.node(i)) r2 += v * v;
                const double decay = std::pow(1.0 + r2, -a - 0.5 * D.m.r);
                X[i] = ud(rng) * decay * (D.sr[i] > 0.0 ? 1.0 : 0.0);
                Z[i] = ud(rng) * decay;
            }
        }
        detail::rescale_admissible(D, X, false);
        const double zn = detail::noise_norm(D, Z);
        if (zn > 0.0)
            for (double& v : Z) v *= D.m.delta / zn;
        detail::ascend(D, A, B, X, Z, opt.ascent_steps);
        errs[trial] = detail::pair_error(D, A, B, X, Z);
        Xs[trial] = std::move(X);
        Zs[trial] = std::move(Z);
    });
    for (int t = 0; t < opt.trials; ++t)
        if (errs[t] > res.sup_error) {
            res.sup_error = errs[t];
            res.argmax_trial = t;
            res.argmax_generator = names[t % 3];
            bestX = Xs[t];
            bestZ = Zs[t];
        }
    for (std::size_t i = 0; i < N; ++i) {
        res.x.values[i] = bestX[i];
        res.y.values[i] = bestX[i] - bestZ[i];
    }
    return res;
}

/** \brief One row per node: coordinates, α and α·ψ. */
struct FilterTable {
    int d = 1;
    std::vector<double> nodes;
    std::vector<double> alpha;
    std::vector<double> alpha_psi;
};

inline FilterTable emit_table(const FilterSpec& f, const FrequencyGrid& g) {
    FilterTable t;
    t.d = g.d;
    t.nodes = g.nodes;
    t.alpha.resize(g.size());
    t.alpha_psi.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.node(i);
        t.alpha[i] = f.alpha(x);
        t.alpha_psi[i] = t.alpha[i] * f.psi(x);
    }
    return t;
}

} // namespace orec

#endif // OREC_RECOVERY_ENGINE_HPP
