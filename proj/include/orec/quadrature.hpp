/**
 * @file quadrature.hpp
 * @brief Adaptive tensor Gauss–Legendre cubature on angular boxes, radial
 * integrals over (0,∞) and the angular integrals I and I'_j.
 */
#ifndef OREC_QUADRATURE_HPP
#define OREC_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <span>
#include <thread>
#include <vector>

#include "core_model.hpp"
#include "errors.hpp"

namespace orec {

/** \brief Controls of the adaptive rules. */
struct QuadratureConfig {
    int base_order = 8;          ///< Gauss–Legendre points per axis per panel
    int max_refinements = 6000;  ///< maximal number of panel splits
    double rel_tol = 1e-11;      ///< target relative error
    int panel_split = 2;         ///< children per axis when a panel is split
    int grading_levels = 2;      ///< geometric panels toward each singular face
    int threads = 1;             ///< worker threads for panel evaluation
    bool throw_on_failure = true;
};

/** \brief Integral value with its error estimate. */
struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

/** \brief Compensated (Neumaier) summation. */
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/** \brief Gauss–Legendre nodes and weights on [−1, 1]. */
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

/** \brief Cached n-point Gauss–Legendre rule (Newton on the Legendre recurrence). */
inline const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1 || n > 256) throw DomainError("gauss_legendre: order must lie in [1, 256]");
    GaussRule g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = z;
                p0 = 1.0;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
        }
        g.x[i] = -z;
        g.x[n - 1 - i] = z;
        g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n % 2 == 1) g.x[n / 2] = 0.0;
    return cache.emplace(n, std::move(g)).first->second;
}

/** \brief Run body(i) for i in [0, count) on up to `threads` workers. */
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
    if (threads <= 1 || count < 2) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    const int nt = std::min(threads, count);
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += nt) body(i);
        });
    for (auto& th : pool) th.join();
}

/** \brief Integrand on an m-dimensional box: f(point). */
using BoxIntegrand = std::function<double(const double*)>;

/** \brief Axis-aligned box in up to kMaxDim dimensions. */
struct Box {
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};
};

namespace detail {

inline double box_rule(const BoxIntegrand& f, const Box& b, int m, const GaussRule& g) {
    const int n = static_cast<int>(g.x.size());
    std::array<int, kMaxDim> idx{};
    std::array<double, kMaxDim> pt{};
    std::array<double, kMaxDim> half{}, mid{};
    double vol = 1.0;
    for (int k = 0; k < m; ++k) {
        half[k] = 0.5 * (b.hi[k] - b.lo[k]);
        mid[k] = 0.5 * (b.hi[k] + b.lo[k]);
        vol *= half[k];
    }
    KahanSum acc;
    for (;;) {
        double w = 1.0;
        for (int k = 0; k < m; ++k) {
            pt[k] = mid[k] + half[k] * g.x[idx[k]];
            w *= g.w[idx[k]];
        }
        acc.add(w * f(pt.data()));
        int k = 0;
        while (k < m && ++idx[k] == n) idx[k++] = 0;
        if (k == m) break;
    }
    return vol * acc.value();
}

inline std::vector<Box> split_box(const Box& b, int m, int parts) {
    std::vector<Box> out;
    int total = 1;
    for (int k = 0; k < m; ++k) total *= parts;
    out.reserve(total);
    for (int c = 0; c < total; ++c) {
        Box ch = b;
        int code = c;
        for (int k = 0; k < m; ++k) {
            const int j = code % parts;
            code /= parts;
            const double h = (b.hi[k] - b.lo[k]) / parts;
            ch.lo[k] = b.lo[k] + j * h;
            ch.hi[k] = (j == parts - 1) ? b.hi[k] : b.lo[k] + (j + 1) * h;
        }
        out.push_back(ch);
    }
    return out;
}

struct Leaf {
    Box box;
    double coarse = 0.0;
    double fine = 0.0;
    double err = 0.0;
    long id = 0;
};

} // namespace detail

/**
 * \brief Globally adaptive tensor Gauss–Legendre cubature over a union of boxes.
 *
 * Each panel carries its one-level rule and the rule on its children; the panel
 * with the largest difference is split until the summed estimate meets rel_tol.
 * \throws ConvergenceError when the split budget is exhausted above tolerance.
 */
inline QuadResult cubature(const BoxIntegrand& f, const std::vector<Box>& initial, int m, const QuadratureConfig& cfg) {
    if (cfg.base_order < 4) throw DomainError("quadrature: base_order must be >= 4");
    if (!(cfg.rel_tol > 0.0)) throw DomainError("quadrature: rel_tol must be positive");
    if (m < 1 || m > kMaxDim) throw DimensionError("quadrature: bad box dimension");
    const GaussRule& g = gauss_legendre(cfg.base_order);
    const int parts = std::max(2, cfg.panel_split);
    int evals_per_rule = 1;
    for (int k = 0; k < m; ++k) evals_per_rule *= cfg.base_order;
    int children = 1;
    for (int k = 0; k < m; ++k) children *= parts;

    auto make_leaf = [&](const Box& b, double coarse, bool have_coarse) {
        detail::Leaf lf;
        lf.box = b;
        lf.coarse = have_coarse ? coarse : detail::box_rule(f, b, m, g);
        KahanSum fs;
        for (const auto& c : detail::split_box(b, m, parts)) fs.add(detail::box_rule(f, c, m, g));
        lf.fine = fs.value();
        lf.err = std::fabs(lf.fine - lf.coarse);
        return lf;
    };

    std::vector<detail::Leaf> leaves(initial.size());
    parallel_for(static_cast<int>(initial.size()), cfg.threads,
                 [&](int i) { leaves[i] = make_leaf(initial[i], 0.0, false); });
    long next_id = 0;
    for (auto& lf : leaves) lf.id = next_id++;
    QuadResult res;
    res.evaluations = static_cast<int>(initial.size()) * evals_per_rule * (children + 1);

    auto cmp = [&](int a, int b) {
        if (leaves[a].err != leaves[b].err) return leaves[a].err < leaves[b].err;
        return leaves[a].id > leaves[b].id;
    };
    std::priority_queue<int, std::vector<int>, decltype(cmp)> heap(cmp);
    for (int i = 0; i < static_cast<int>(leaves.size()); ++i) heap.push(i);

    auto totals = [&](double& val, double& err) {
        KahanSum v, e;
        for (const auto& lf : leaves) {
            if (lf.err < 0) continue;
            v.add(lf.fine);
            e.add(lf.err);
        }
        val = v.value();
        err = e.value();
    };
    double val = 0.0, err = 0.0;
    totals(val, err);
    int splits = 0;
    int since_total = 0;
    while (!(err <= cfg.rel_tol * std::fabs(val)) && !(err == 0.0)) {
        if (!std::isfinite(val) || !std::isfinite(err)) {
            if (cfg.throw_on_failure) throw ConvergenceError("quadrature: non-finite integrand or integral");
            break;
        }
        if (splits >= cfg.max_refinements || heap.empty()) {
            if (cfg.throw_on_failure) throw ConvergenceError("quadrature: refinement budget exhausted");
            break;
        }
        const int worst = heap.top();
        heap.pop();
        const detail::Leaf parent = leaves[worst];
        leaves[worst].err = -1.0;
        leaves[worst].fine = 0.0;
        const auto kids = detail::split_box(parent.box, m, parts);
        std::vector<detail::Leaf> made(kids.size());
        parallel_for(static_cast<int>(kids.size()), cfg.threads, [&](int i) {
            made[i] = make_leaf(kids[i], detail::box_rule(f, kids[i], m, g), true);
        });
        res.evaluations += static_cast<int>(kids.size()) * evals_per_rule * (children + 1);
        for (auto& lf : made) {
            lf.id = next_id++;
            leaves.push_back(lf);
            heap.push(static_cast<int>(leaves.size()) - 1);
        }
        ++splits;
        if (++since_total >= 1 + static_cast<int>(leaves.size()) / 64) {
            totals(val, err);
            since_total = 0;
        } else {
            val += -parent.fine;
            err += -parent.err;
            for (const auto& lf : made) {
                val += lf.fine;
                err += lf.err;
            }
        }
        if (err <= cfg.rel_tol * std::fabs(val)) totals(val, err);
    }
    totals(val, err);
    res.value = val;
    res.error_estimate = err;
    return res;
}

/**
 * \brief Breakpoints of [lo, hi]: the multiples of π/2 inside it plus
 * geometric grading toward every breakpoint.
 */
inline std::vector<double> graded_breaks(double lo, double hi, int levels) {
    std::vector<double> cuts{lo};
    const double q = 0.5 * std::numbers::pi;
    for (int k = static_cast<int>(std::ceil(lo / q + 1e-12)); k * q < hi - 1e-12; ++k)
        if (k * q > lo + 1e-12) cuts.push_back(k * q);
    cuts.push_back(hi);
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1], h = b - a;
        out.push_back(a);
        for (int l = levels; l >= 1; --l) out.push_back(a + h * std::ldexp(1.0, -l - 1));
        if (levels >= 0) out.push_back(a + 0.5 * h);
        for (int l = 1; l <= levels; ++l) out.push_back(b - h * std::ldexp(1.0, -l - 1));
    }
    out.push_back(cuts.back());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double x, double y) { return std::fabs(x - y) < 1e-15; }),
              out.end());
    return out;
}

/** \brief Tensor product of per-axis breakpoints. */
inline std::vector<Box> tensor_boxes(const std::vector<std::vector<double>>& breaks) {
    const int m = static_cast<int>(breaks.size());
    std::vector<Box> out;
    std::array<int, kMaxDim> idx{};
    for (;;) {
        Box b;
        for (int k = 0; k < m; ++k) {
            b.lo[k] = breaks[k][idx[k]];
            b.hi[k] = breaks[k][idx[k] + 1];
        }
        out.push_back(b);
        int k = 0;
        while (k < m && ++idx[k] == static_cast<int>(breaks[k].size()) - 1) idx[k++] = 0;
        if (k == m) break;
    }
    return out;
}

/**
 * \brief Adaptive integral of f over [a, b] with optional interior breakpoints.
 */
inline QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b, const QuadratureConfig& cfg,
                               std::vector<double> breaks = {}) {
    std::vector<double> pts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double x : breaks)
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    std::vector<Box> boxes;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Box bx;
        bx.lo[0] = pts[i];
        bx.hi[0] = pts[i + 1];
        boxes.push_back(bx);
    }
    return cubature([&](const double* x) { return f(x[0]); }, boxes, 1, cfg);
}

/** \brief J(ω) = sin^{d−2}ω1 sin^{d−3}ω2 … sin ω_{d−2}; 1 for d ≤ 2. */
inline double jacobian_J(std::span<const double> omega, int d) {
    if (static_cast<int>(omega.size()) != std::max(d - 1, 0)) throw DimensionError("jacobian_J: need d-1 angles");
    double J = 1.0;
    for (int k = 0; k + 2 < d; ++k) J *= std::pow(std::sin(omega[k]), d - 2 - k);
    return J;
}

/** \brief A direction of the cone: polar angles and the unit vector. */
struct Direction {
    int d = 1;
    std::array<double, kMaxDim> omega{};
    std::array<double, kMaxDim> unit{};
    std::span<const double> u() const { return {unit.data(), static_cast<std::size_t>(d)}; }
    std::span<const double> w() const { return {omega.data(), static_cast<std::size_t>(d > 1 ? d - 1 : 0)}; }
};

using AngularIntegrand = std::function<double(const Direction&)>;

/**
 * \brief ∫_Ω f(ω) J(ω) dω; for d = 1 the sum of f over the cone's directions.
 */
inline QuadResult sphere_integral(const AngularIntegrand& f, const ConeDomain& cone, const QuadratureConfig& cfg) {
    const int d = cone.dim();
    if (d == 1) {
        QuadResult r;
        KahanSum acc;
        for (double s : cone.line_directions()) {
            Direction dir;
            dir.d = 1;
            dir.unit[0] = s;
            acc.add(f(dir));
            ++r.evaluations;
        }
        r.value = acc.value();
        return r;
    }
    const auto dom = cone.angular_domain();
    std::vector<std::vector<double>> brk;
    for (const auto& iv : dom) brk.push_back(graded_breaks(iv.lo, iv.hi, cfg.grading_levels));
    auto g = [&](const double* om) {
        Direction dir;
        dir.d = d;
        for (int k = 0; k < d - 1; ++k) dir.omega[k] = om[k];
        ConeDomain::unit_from_angles(d, dir.omega.data(), dir.unit.data());
        double J = 1.0;
        for (int k = 0; k + 2 < d; ++k) J *= std::pow(std::sin(om[k]), d - 2 - k);
        if (J == 0.0) return 0.0;
        return f(dir) * J;
    };
    return cubature(g, tensor_boxes(brk), d - 1, cfg);
}

/**
 * \brief ∫_0^∞ g(ρ) dρ through ρ = u/(1−u) on (0,1).
 * \throws ConvergenceError on divergent refinement.
 */
inline QuadResult radial_integral(const std::function<double(double)>& g, const QuadratureConfig& cfg) {
    auto h = [&](double u) {
        const double om = 1.0 - u;
        if (om <= 0.0) return 0.0;
        return g(u / om) / (om * om);
    };
    const auto brk = graded_breaks(0.0, 1.0, std::max(cfg.grading_levels, 6));
    return integrate_1d(h, 0.0, 1.0, cfg, std::vector<double>(brk.begin() + 1, brk.end() - 1));
}

/**
 * \brief ∫_0^∞ g(ρ) dρ in the variable s = ln ρ, suited to power-law ends.
 *
 * g_log(s) must return g(e^s)·e^s. The range grows from [c−40, c+40] until both
 * ends are negligible; `breaks` lists kinks in s.
 * \throws ConvergenceError when an end does not decay.
 */
inline QuadResult log_radial_integral(const std::function<double(double)>& g_log, const QuadratureConfig& cfg,
                                      double center = 0.0, std::vector<double> breaks = {}, double lo_limit = -700.0,
                                      double hi_limit = 700.0) {
    double lo = std::max(lo_limit, center - 40.0), hi = std::min(hi_limit, center + 40.0);
    for (double b : breaks) {
        if (b - 5.0 < lo) lo = std::max(lo_limit, b - 5.0);
        if (b + 5.0 > hi) hi = std::min(hi_limit, b + 5.0);
    }
    auto peak = [&](double a, double b) {
        double m = 0.0;
        for (int i = 0; i <= 64; ++i) m = std::max(m, std::fabs(g_log(a + (b - a) * i / 64.0)));
        return m;
    };
    for (int grow = 0; grow < 40; ++grow) {
        const double scale = peak(lo, hi);
        if (scale == 0.0) break;
        const double eps = 1e-17 * scale;
        bool moved = false;
        if (lo > lo_limit && std::max(std::fabs(g_log(lo)), std::fabs(g_log(lo + 1.0))) > eps) {
            lo = std::max(lo_limit, lo - 40.0);
            moved = true;
        }
        if (hi < hi_limit && std::max(std::fabs(g_log(hi)), std::fabs(g_log(hi - 1.0))) > eps) {
            hi = std::min(hi_limit, hi + 40.0);
            moved = true;
        }
        if (!moved) break;
    }
    QuadResult r = integrate_1d(g_log, lo, hi, cfg, breaks);
    const double tail_lo = std::fabs(g_log(lo)), tail_hi = std::fabs(g_log(hi));
    if ((tail_lo > 1e-10 * std::fabs(r.value) || tail_hi > 1e-10 * std::fabs(r.value)) && cfg.throw_on_failure)
        throw ConvergenceError("radial integral: integrand does not decay (not integrable)");
    r.error_estimate += tail_lo + tail_hi;
    return r;
}

/** \brief Integrand along a ray: g(u, s) = F(e^s u)·e^{sd}, so that ∫_cone F = ∫_Ω J ∫ g ds. */
using RayIntegrand = std::function<double(const Direction&, double)>;

/** \brief Location hints of a ray integrand in the variable s = ln ρ. */
struct RayHints {
    double center = 0.0;
    std::vector<double> breaks;
};
using RayHintFn = std::function<RayHints(const Direction&)>;

/**
 * \brief ∫ over the cone in polar form: adaptive sphere rule outside, log-radial
 * rule along every ray inside.
 */
inline QuadResult polar_integral(const RayIntegrand& g, const RayHintFn& hints, const ConeDomain& cone,
                                 const QuadratureConfig& cfg) {
    QuadratureConfig inner = cfg;
    inner.rel_tol = std::max(1e-15, 0.1 * cfg.rel_tol);
    inner.threads = 1;
    inner.max_refinements = std::max(cfg.max_refinements, 2000);
    auto ray = [&](const Direction& dir) {
        const RayHints h = hints ? hints(dir) : RayHints{};
        return log_radial_integral([&](double s) { return g(dir, s); }, inner, h.center, h.breaks).value;
    };
    return sphere_integral(ray, cone, cfg);
}

/** \brief Integrals I and I'_1..I'_n with the symmetry defect max_j |I'_j − I/n|/(I/n). */
struct AngularIntegrals {
    double I = 0.0;
    std::vector<double> Ij;
    double symmetry_report = 0.0;
};

namespace detail {

inline double angular_I_density(const ProblemSpec& spec, const Direction& dir, double gamma, double q_star, double r,
                                int j) {
    const auto u = dir.u();
    const double ps = spec.psi.profile(u);
    if (ps == 0.0) return 0.0;
    double sr = 0.0;
    double phj = 0.0;
    for (int k = 0; k < spec.n(); ++k) {
        const double v = std::pow(spec.phis[k].profile(u), r);
        sr += v;
        if (k == j) phj = v;
    }
    const double c = q_star * (1.0 - gamma) / r;
    double lv = q_star * std::log(ps) - c * std::log(sr);
    if (j >= 0) {
        if (phj == 0.0) return 0.0;
        lv += std::log(phj) - std::log(sr);
    }
    return std::exp(lv);
}

inline void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("angular integral: gamma must lie in (0,1)");
}

} // namespace detail

/** \brief I = ∫_Ω ψ̃^{q*} s̃_r^{−q*(1−γ)/r} J dω. */
inline double angular_I(const ProblemSpec& spec, double gamma, double q_star, const QuadratureConfig& cfg) {
    detail::check_gamma(gamma);
    const double r = effective_exponents(spec).r;
    return sphere_integral([&](const Direction& d) { return detail::angular_I_density(spec, d, gamma, q_star, r, -1); },
                           spec.cone, cfg)
        .value;
}

/** \brief I'_j = ∫_Ω ψ̃^{q*} φ̃_j^r s̃_r^{−q*(1−γ)/r−1} J dω (j is 0-based). */
inline double angular_Ij(const ProblemSpec& spec, int j, double gamma, double q_star, const QuadratureConfig& cfg) {
    detail::check_gamma(gamma);
    if (j < 0 || j >= spec.n()) throw DimensionError("angular_Ij: constraint index out of range");
    const double r = effective_exponents(spec).r;
    return sphere_integral([&](const Direction& d) { return detail::angular_I_density(spec, d, gamma, q_star, r, j); },
                           spec.cone, cfg)
        .value;
}

/** \brief I, all I'_j and the symmetry defect. */
inline AngularIntegrals angular_integrals(const ProblemSpec& spec, double gamma, double q_star,
                                          const QuadratureConfig& cfg) {
    AngularIntegrals out;
    out.I = angular_I(spec, gamma, q_star, cfg);
    const double mean = out.I / spec.n();
    for (int j = 0; j < spec.n(); ++j) {
        out.Ij.push_back(spec.n() == 1 ? out.I : angular_Ij(spec, j, gamma, q_star, cfg));
        out.symmetry_report = std::max(out.symmetry_report, std::fabs(out.Ij.back() - mean) / mean);
    }
    return out;
}

} // namespace orec

#endif // OREC_QUADRATURE_HPP
