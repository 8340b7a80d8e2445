/**
 * @file core_model.hpp
 * @brief Domain types: exponent triples, cones, homogeneous weights and problem specs.
 */
#ifndef OREC_CORE_MODEL_HPP
#define OREC_CORE_MODEL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace orec {

/** \brief Positive infinity used for the exponent value p = ∞. */
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/** \brief Largest supported dimension of the cone. */
inline constexpr int kMaxDim = 8;

/** \brief Reciprocal with 1/∞ = 0. */
inline double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

/** \brief Exponents (p, q, r) of the noise, target and constraint norms. */
struct ExponentTriple {
    double p = 2.0;
    double q = 1.0;
    double r = 2.0;
};

/** \brief Exponent regime. */
enum class Regime { P, P1, P2 };

inline const char* regime_name(Regime g) {
    switch (g) {
    case Regime::P: return "P";
    case Regime::P1: return "P1";
    case Regime::P2: return "P2";
    }
    return "?";
}

/**
 * \brief Classify (p,q,r) into P (1≤q<p, q<r), P1 (1≤q=r<p) or P2 (1≤q=p<r).
 * \throws RegimeError when no regime contains the triple.
 */
inline Regime classify_regime(const ExponentTriple& e) {
    const auto ok = [](double x) { return !std::isnan(x) && x >= 1.0; };
    if (!ok(e.p) || !ok(e.q) || !ok(e.r))
        throw RegimeError("no regime: exponents must lie in [1, inf]");
    if (!std::isinf(e.q)) {
        if (e.q < e.p && e.q < e.r) return Regime::P;
        if (e.q == e.r && e.q < e.p) return Regime::P1;
        if (e.q == e.p && e.q < e.r) return Regime::P2;
    }
    throw RegimeError("no regime contains (p,q,r)");
}

/** \brief Closed interval of one polar angle. */
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/** \brief Cone in R^d together with its polar angular domain. */
class ConeDomain {
public:
    enum class Kind { FullSpace, PositiveOrthant, AngularBox };

    ConeDomain() = default;

    static ConeDomain full_space(int d) { return ConeDomain(d, Kind::FullSpace, {}); }
    static ConeDomain positive_orthant(int d) { return ConeDomain(d, Kind::PositiveOrthant, {}); }
    /** \throws DimensionError unless d ≥ 2 and there are d−1 intervals. */
    static ConeDomain angular_box(int d, std::vector<Interval> box) {
        if (d < 2 || static_cast<int>(box.size()) != d - 1)
            throw DimensionError("angular box needs d >= 2 and d-1 intervals");
        return ConeDomain(d, Kind::AngularBox, std::move(box));
    }

    int dim() const { return d_; }
    Kind kind() const { return kind_; }

    /** \brief The box Ω of angles ω1..ω_{d−1}; empty for d = 1. */
    std::vector<Interval> angular_domain() const {
        std::vector<Interval> out;
        if (d_ < 2) return out;
        const double pi = std::numbers::pi;
        for (int k = 0; k < d_ - 1; ++k) {
            switch (kind_) {
            case Kind::FullSpace:
                out.push_back({0.0, k == d_ - 2 ? 2.0 * pi : pi});
                break;
            case Kind::PositiveOrthant:
                out.push_back({0.0, 0.5 * pi});
                break;
            case Kind::AngularBox:
                out.push_back(box_[k]);
                break;
            }
        }
        return out;
    }

    /** \brief Directions of the d = 1 cone: {+1} or {+1, −1}. */
    std::vector<double> line_directions() const {
        if (kind_ == Kind::FullSpace) return {1.0, -1.0};
        return {1.0};
    }

    /** \brief Membership test for a point of R^d. */
    bool contains(std::span<const double> t) const {
        if (static_cast<int>(t.size()) != d_) throw DimensionError("point dimension mismatch");
        if (kind_ == Kind::FullSpace) return true;
        if (kind_ == Kind::PositiveOrthant) {
            for (double v : t)
                if (v < 0.0) return false;
            return true;
        }
        std::array<double, kMaxDim> om{};
        angles_of(t, om.data());
        for (int k = 0; k < d_ - 1; ++k)
            if (om[k] < box_[k].lo || om[k] > box_[k].hi) return false;
        return true;
    }

    /** \brief Unit vector t̃(ω) of the polar transformation. */
    static void unit_from_angles(int d, const double* omega, double* unit) {
        double prod = 1.0;
        for (int k = 0; k < d - 1; ++k) {
            unit[k] = prod * std::cos(omega[k]);
            prod *= std::sin(omega[k]);
        }
        unit[d - 1] = prod;
    }

    /** \brief Polar angles of a nonzero point (inverse of unit_from_angles). */
    void angles_of(std::span<const double> t, double* omega) const {
        const int d = d_;
        if (d < 2) return;
        double tail2 = t[d - 1] * t[d - 1] + t[d - 2] * t[d - 2];
        for (int k = d - 3; k >= 0; --k) {
            omega[k] = std::atan2(std::sqrt(tail2), t[k]);
            tail2 += t[k] * t[k];
        }
        double last = std::atan2(t[d - 1], t[d - 2]);
        if (last < 0.0) last += 2.0 * std::numbers::pi;
        omega[d - 2] = last;
    }

private:
    ConeDomain(int d, Kind kind, std::vector<Interval> box) : d_(d), kind_(kind), box_(std::move(box)) {
        if (d < 1 || d > kMaxDim) throw DimensionError("dimension must lie in [1, 8]");
    }

    int d_ = 1;
    Kind kind_ = Kind::PositiveOrthant;
    std::vector<Interval> box_;
};

/** \brief Angular profile, evaluated on unit vectors. */
using Profile = std::function<double(std::span<const double>)>;

/** \brief Absolute value of a homogeneous weight: |w(t)| = ρ^κ w̃(t/ρ). */
struct HomogeneousWeight {
    enum class Kind { RadialPower, CoordinatePower, ThetaNormPower, Custom };

    Kind kind = Kind::RadialPower;
    double theta = 0.0;        ///< radial exponent, coordinate exponent, or inner θ
    double outer = 0.0;        ///< degree η of a θ-norm power
    int axis = 0;              ///< 0-based coordinate of a coordinate power
    double scale = 1.0;        ///< constant positive factor
    double extra_radial = 0.0; ///< extra factor |t|^extra_radial
    double custom_degree = 0.0;
    Profile custom;
    bool permutation_symmetric = true;

    /** \brief |t|^θ. */
    static HomogeneousWeight radial(double theta) {
        HomogeneousWeight w;
        w.kind = Kind::RadialPower;
        w.theta = theta;
        return w;
    }
    /** \brief |t_axis|^θ (axis is 0-based). */
    static HomogeneousWeight coordinate(int axis, double theta) {
        HomogeneousWeight w;
        w.kind = Kind::CoordinatePower;
        w.axis = axis;
        w.theta = theta;
        w.permutation_symmetric = false;
        return w;
    }
    /** \brief (Σ|t_k|^θ)^{η/θ}, degree η. */
    static HomogeneousWeight theta_norm(double theta, double eta) {
        HomogeneousWeight w;
        w.kind = Kind::ThetaNormPower;
        w.theta = theta;
        w.outer = eta;
        return w;
    }
    /** \brief ρ^κ f(t/ρ) for a user profile f. */
    static HomogeneousWeight custom_weight(double degree, Profile f, bool symmetric = false) {
        HomogeneousWeight w;
        w.kind = Kind::Custom;
        w.custom_degree = degree;
        w.custom = std::move(f);
        w.permutation_symmetric = symmetric;
        return w;
    }

    HomogeneousWeight scaled(double c) const {
        HomogeneousWeight w = *this;
        w.scale *= c;
        return w;
    }
    /** \brief this divided by |t|^θ0. */
    HomogeneousWeight over_radial(double theta0) const {
        HomogeneousWeight w = *this;
        w.extra_radial -= theta0;
        return w;
    }

    double base_degree() const {
        switch (kind) {
        case Kind::RadialPower: return theta;
        case Kind::CoordinatePower: return theta;
        case Kind::ThetaNormPower: return outer;
        case Kind::Custom: return custom_degree;
        }
        return 0.0;
    }
    double degree() const { return base_degree() + extra_radial; }

    /** \brief Angular profile w̃ at a unit vector. */
    double profile(std::span<const double> unit) const {
        switch (kind) {
        case Kind::RadialPower: return scale;
        case Kind::CoordinatePower: return scale * upow(std::fabs(unit[axis]), theta);
        case Kind::ThetaNormPower: return scale * theta_sum(unit);
        case Kind::Custom: return scale * std::fabs(custom(unit));
        }
        return 0.0;
    }

    /** \brief |w(t)| evaluated directly from the Cartesian point. */
    double operator()(std::span<const double> t) const {
        double rho2 = 0.0;
        for (double v : t) rho2 += v * v;
        const double rho = std::sqrt(rho2);
        double base = 0.0;
        switch (kind) {
        case Kind::RadialPower: base = upow(rho, theta); break;
        case Kind::CoordinatePower: base = upow(std::fabs(t[axis]), theta); break;
        case Kind::ThetaNormPower: base = theta_sum(t); break;
        case Kind::Custom: {
            if (rho == 0.0) {
                base = custom_degree > 0 ? 0.0 : (custom_degree < 0 ? kInf : std::fabs(custom(t)));
                break;
            }
            std::array<double, kMaxDim> u{};
            for (std::size_t k = 0; k < t.size(); ++k) u[k] = t[k] / rho;
            base = upow(rho, custom_degree) * std::fabs(custom(std::span<const double>(u.data(), t.size())));
            break;
        }
        }
        return scale * base * upow(rho, extra_radial);
    }

private:
    static double upow(double x, double e) {
        if (e == 0.0) return 1.0;
        return std::pow(x, e);
    }
    double theta_sum(std::span<const double> t) const {
        double s = 0.0;
        for (double v : t) s += upow(std::fabs(v), theta);
        return upow(s, outer / theta);
    }
};

/** \brief Measure convention of the problem. */
enum class Normalization {
    Plain,            ///< Lebesgue measure on the cone
    FourierPlancherel ///< frequency-domain problem with (2π)-factors of the Fourier setting
};

/** \brief Complete recovery or inequality problem on a cone. */
struct ProblemSpec {
    ConeDomain cone = ConeDomain::positive_orthant(1);
    ExponentTriple exponents;
    double delta = 1.0;
    HomogeneousWeight psi = HomogeneousWeight::radial(0.0);
    std::vector<HomogeneousWeight> phis;
    Normalization normalization = Normalization::Plain;

    int d() const { return cone.dim(); }
    int n() const { return static_cast<int>(phis.size()); }
    double eta() const { return psi.degree(); }
    double nu() const { return phis.empty() ? 0.0 : phis.front().degree(); }
};

/** \brief s̃_r on a unit vector: Σ_j φ̃_j^r. */
inline double sum_phi_profiles(const ProblemSpec& s, std::span<const double> unit, double r) {
    double acc = 0.0;
    for (const auto& ph : s.phis) acc += std::pow(ph.profile(unit), r);
    return acc;
}

/**
 * \brief Exponent triple of the plain problem behind a spec.
 *
 * The Fourier L2 target is the plain triple (p,2,2); the Fourier L∞ target
 * reduces to (p,1,2).
 */
inline ExponentTriple effective_exponents(const ProblemSpec& s) {
    if (s.normalization == Normalization::Plain) return s.exponents;
    ExponentTriple e = s.exponents;
    e.r = 2.0;
    e.q = std::isinf(s.exponents.q) ? 1.0 : 2.0;
    return e;
}

/** \brief Output bundle of every closed-form computation. */
struct RecoveryReport {
    double E = 0.0;
    double gamma = 0.0;
    double q_star = 0.0;
    double I = 0.0;
    double constant = 0.0;
    std::string constant_name = "K";
    std::map<std::string, double> multipliers;
    std::map<std::string, double> values;
    std::map<std::string, double> residuals;
    std::vector<std::string> flags;
};

/** \brief Result of validate_spec. */
struct ValidationReport {
    bool valid = true;
    std::vector<std::string> violations;
};

/** \brief Deterministic sample of directions of the cone (unit vectors, row-major). */
inline std::vector<double> sample_directions(const ConeDomain& cone, int count, std::uint64_t seed) {
    const int d = cone.dim();
    std::vector<double> out;
    if (d == 1) {
        for (double s : cone.line_directions()) out.push_back(s);
        return out;
    }
    std::mt19937_64 rng(seed);
    const auto box = cone.angular_domain();
    std::array<double, kMaxDim> om{};
    std::array<double, kMaxDim> u{};
    out.reserve(static_cast<std::size_t>(count) * d);
    for (int i = 0; i < count; ++i) {
        for (int k = 0; k < d - 1; ++k) {
            std::uniform_real_distribution<double> U(box[k].lo, box[k].hi);
            om[k] = U(rng);
        }
        ConeDomain::unit_from_angles(d, om.data(), u.data());
        out.insert(out.end(), u.begin(), u.begin() + d);
    }
    return out;
}

/** \brief Check every ProblemSpec invariant by dense angular sampling. */
inline ValidationReport validate_spec(const ProblemSpec& s) {
    ValidationReport rep;
    auto fail = [&](const std::string& m) {
        rep.valid = false;
        rep.violations.push_back(m);
    };
    if (!(s.delta > 0.0) || !std::isfinite(s.delta)) fail("delta must be positive and finite");
    if (s.phis.empty()) fail("no constraint weights");
    for (const auto& ph : s.phis)
        if (std::fabs(ph.degree() - s.nu()) > 1e-12 * (1.0 + std::fabs(s.nu()))) {
            fail("mixed constraint degrees");
            break;
        }
    for (const auto& ph : s.phis)
        if (ph.kind == HomogeneousWeight::Kind::CoordinatePower && (ph.axis < 0 || ph.axis >= s.d())) {
            fail("coordinate axis out of range");
            return rep;
        }
    if (s.psi.kind == HomogeneousWeight::Kind::CoordinatePower && (s.psi.axis < 0 || s.psi.axis >= s.d())) {
        fail("coordinate axis out of range");
        return rep;
    }
    try {
        (void)classify_regime(effective_exponents(s));
    } catch (const RegimeError&) {
        fail("no regime");
    }
    if (s.normalization == Normalization::FourierPlancherel) {
        if (s.cone.kind() != ConeDomain::Kind::FullSpace) fail("fourier normalization requires the full space");
        if (s.exponents.r != 2.0) fail("fourier normalization requires r = 2");
        if (!(s.exponents.q == 2.0 || std::isinf(s.exponents.q)))
            fail("fourier normalization requires q = 2 or q = inf");
    }
    const int d = s.d();
    const auto dirs = sample_directions(s.cone, 4096, 0x5eed);
    const std::size_t m = dirs.size() / d;
    bool psi_zero = false, phi_zero = false, nonfinite = false;
    for (std::size_t i = 0; i < m; ++i) {
        std::span<const double> u(dirs.data() + i * d, d);
        const double pv = s.psi.profile(u);
        double sv = 0.0;
        for (const auto& ph : s.phis) sv += ph.profile(u);
        if (!std::isfinite(pv) || !std::isfinite(sv)) nonfinite = true;
        if (pv == 0.0) psi_zero = true;
        if (!s.phis.empty() && sv == 0.0) phi_zero = true;
    }
    if (psi_zero) fail("psi vanishes");
    if (phi_zero) fail("constraint weights vanish");
    if (nonfinite) fail("non-finite weight profile");
    return rep;
}

/**
 * \brief Sampled homogeneity defect max |w(st) − s^κ w(t)| / (s^κ w(t)).
 */
inline double homogeneity_check(const HomogeneousWeight& w, int d, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> L(-3.0, 3.0);
    std::array<double, kMaxDim> t{}, st{};
    double worst = 0.0;
    const double kappa = w.degree();
    for (int i = 0; i < samples; ++i) {
        for (int k = 0; k < d; ++k) t[k] = N(rng);
        const double s = std::pow(10.0, L(rng));
        for (int k = 0; k < d; ++k) st[k] = s * t[k];
        const double base = w(std::span<const double>(t.data(), d));
        if (base == 0.0 || !std::isfinite(base)) continue;
        const double ref = std::pow(s, kappa) * base;
        const double err = std::fabs(w(std::span<const double>(st.data(), d)) - ref) / ref;
        worst = std::max(worst, err);
    }
    return worst;
}

} // namespace orec

#endif // OREC_CORE_MODEL_HPP
