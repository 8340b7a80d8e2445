/**
 * @file specialfn.hpp
 * @brief Gamma and beta functions and the scalar root solvers behind the closed forms.
 */
#ifndef OREC_SPECIALFN_HPP
#define OREC_SPECIALFN_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>

#include "errors.hpp"

namespace orec {

inline constexpr double kDefaultTol = 1e-12;
inline constexpr int kDefaultMaxIter = 200;

/**
 * \brief ln Γ(x) for x > 0.
 *
 * Lanczos-type rational approximation (g = 671/128, 14 terms), with the
 * reflection formula below x = 0.5.
 */
inline double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
    if (x < 0.5) {
        const double pi = std::numbers::pi;
        return std::log(pi / std::sin(pi * x)) - log_gamma(1.0 - x);
    }
    static const double cof[14] = {57.1562356658629235,     -59.5979603554754912,
                                   14.1360979747417471,     -0.491913816097620199,
                                   .339946499848118887e-4,  .465236289270485756e-4,
                                   -.983744753048795646e-4, .158088703224912494e-3,
                                   -.210264441724104883e-3, .217439618115212643e-3,
                                   -.164318106536763890e-3, .844182239838527433e-4,
                                   -.261908384015814087e-4, .368991826595316234e-5};
    double y = x;
    double tmp = x + 5.24218750000000000;
    tmp = (x + 0.5) * std::log(tmp) - tmp;
    double ser = 0.999999999999997092;
    for (double c : cof) ser += c / ++y;
    return tmp + std::log(2.5066282746310005 * ser / x);
}

/** \brief ln B(a,b). */
inline double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta: arguments must be positive");
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

/** \brief Euler beta function B(a,b). */
inline double beta(double a, double b) { return std::exp(log_beta(a, b)); }

/** \brief Search interval and stopping rule of a scalar root solve. */
struct RootBracket {
    double lo = 0.0;
    double hi = 1.0;
    double tol = kDefaultTol;
    int max_iter = kDefaultMaxIter;
};

namespace detail {

/**
 * \brief Newton iteration kept inside a sign-change bracket, bisecting when a
 * step leaves it. fd returns (f, f').
 */
template <class FD>
double safeguarded_newton(FD&& fd, double lo, double hi, double x0, double ftol, int max_iter) {
    double flo = fd(lo).first;
    double fhi = fd(hi).first;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo > 0.0) {
        std::swap(lo, hi);
        std::swap(flo, fhi);
    }
    double x = (x0 > std::min(lo, hi) && x0 < std::max(lo, hi)) ? x0 : 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        auto [f, df] = fd(x);
        if (std::fabs(f) <= ftol) return x;
        if (f < 0.0) lo = x;
        else hi = x;
        double xn = (df != 0.0 && std::isfinite(df)) ? x - f / df : 0.5 * (lo + hi);
        const double a = std::min(lo, hi), b = std::max(lo, hi);
        if (!(xn > a && xn < b)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(x))) return xn;
        x = xn;
    }
    return x;
}

inline double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

} // namespace detail

/**
 * \brief Root of f in a bracket by bisection.
 *
 * When f(lo) and f(hi) share a sign the bracket is widened geometrically on
 * both sides (f is assumed monotone).
 * \throws ConvergenceError when no sign change is found.
 */
inline double bracketed_root(const std::function<double(double)>& f, RootBracket br) {
    double lo = br.lo, hi = br.hi;
    if (!(lo < hi)) throw DomainError("bracketed_root: lo must be below hi");
    double flo = f(lo), fhi = f(hi);
    int grow = 0;
    while (flo * fhi > 0.0) {
        if (++grow > br.max_iter) throw ConvergenceError("bracketed_root: no sign change found");
        const double w = hi - lo;
        if (std::fabs(flo) < std::fabs(fhi)) {
            lo -= w;
            flo = f(lo);
        } else {
            hi += w;
            fhi = f(hi);
        }
        if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConvergenceError("bracketed_root: bracket overflow");
    }
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    for (int it = 0; it < br.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || std::fabs(fm) < br.tol || (hi - lo) < br.tol * std::max(1.0, std::fabs(mid))) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/**
 * \brief log û of the unique root of −q + p a u^{p−q} + r b u^{r−q} = 0
 * from ln a and ln b (−∞ allowed for a zero coefficient).
 */
inline double lemma3_log_root(double log_a, double log_b, double p, double q, double r) {
    if (!(q >= 1.0 && q < p && q < r) || std::isinf(p) || std::isinf(r))
        throw DomainError("lemma3_root: need 1 <= q < p, q < r, p and r finite");
    const bool has_a = std::isfinite(log_a), has_b = std::isfinite(log_b);
    if (!has_a && !has_b) throw DomainError("lemma3_root: a + b must be positive");
    const double lq = std::log(q), lp = std::log(p), lr = std::log(r);
    const double ea = p - q, eb = r - q;
    const double inf = std::numeric_limits<double>::infinity();
    const double sa = has_a ? (lq - lp - log_a) / ea : inf;
    const double sb = has_b ? (lq - lr - log_b) / eb : inf;
    const double hi = std::min(sa, sb);
    const double lo = std::min(has_a ? sa - std::numbers::ln2 / ea : inf, has_b ? sb - std::numbers::ln2 / eb : inf);
    auto g = [&](double s) {
        const double ta = has_a ? lp + log_a + ea * s : -inf;
        const double tb = has_b ? lr + log_b + eb * s : -inf;
        const double m = std::max(ta, tb);
        const double wa = std::exp(ta - m), wb = std::exp(tb - m);
        const double val = m + std::log(wa + wb) - lq;
        const double der = (wa * ea + wb * eb) / (wa + wb);
        return std::pair<double, double>(val, der);
    };
    if (lo == hi) return hi;
    return detail::safeguarded_newton(g, lo, hi, hi, 1e-16, kDefaultMaxIter);
}

/**
 * \brief Unique û > 0 with −q + p a û^{p−q} + r b û^{r−q} = 0.
 *
 * The bracket is found by doubling/halving from u = 1, then refined in ln u.
 * \throws DomainError on violated exponent order, ConvergenceError when the
 * bracket leaves the representable range.
 */
inline double lemma3_root(double a, double b, double p, double q, double r) {
    if (!(q >= 1.0 && q < p && q < r) || std::isinf(p) || std::isinf(r))
        throw DomainError("lemma3_root: need 1 <= q < p, q < r, p and r finite");
    if (!(a >= 0.0) || !(b >= 0.0) || !(a + b > 0.0)) throw DomainError("lemma3_root: need a, b >= 0, a + b > 0");
    auto f = [&](double u) { return -q + p * a * std::pow(u, p - q) + r * b * std::pow(u, r - q); };
    double lo = 1.0, hi = 1.0;
    int it = 0;
    if (f(1.0) < 0.0) {
        while (f(hi) < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (++it > 4 * kDefaultMaxIter || !std::isfinite(hi)) throw ConvergenceError("lemma3_root: bracket overflow");
        }
    } else {
        while (f(lo) > 0.0) {
            hi = lo;
            lo *= 0.5;
            if (++it > 4 * kDefaultMaxIter || lo == 0.0) throw ConvergenceError("lemma3_root: bracket underflow");
        }
    }
    const double la = a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
    const double lb = b > 0.0 ? std::log(b) : -std::numeric_limits<double>::infinity();
    const double s = lemma3_log_root(la, lb, p, q, r);
    double u = std::exp(s);
    if (!(u >= lo * (1 - 1e-12) && u <= hi * (1 + 1e-12))) {
        RootBracket br{lo, hi, 1e-15, kDefaultMaxIter};
        u = bracketed_root(f, br);
    }
    return u;
}

/** \brief Root k of A ln k − B ln(1−k) = L, returned with 1−k and ln k. */
struct KSolution {
    double k = 0.0;
    double one_minus_k = 1.0;
    double log_k = -std::numeric_limits<double>::infinity();
    double log_one_minus_k = 0.0;
};

/**
 * \brief Solve k^A / (1−k)^B = e^L for k ∈ (0,1) with A, B > 0, in logit
 * coordinates so that k near 0 or 1 keeps full relative accuracy.
 */
inline KSolution solve_k_log(double L, double A, double B) {
    if (!(A > 0.0) || !(B > 0.0)) throw DomainError("solve_k: exponents must be positive");
    KSolution out;
    if (L == -std::numeric_limits<double>::infinity()) return out;
    if (!std::isfinite(L)) throw DomainError("solve_k: right side must be finite");
    auto G = [&](double x) {
        const double lk = -detail::softplus(-x);
        const double l1k = -detail::softplus(x);
        const double k = std::exp(lk);
        return std::pair<double, double>(A * lk - B * l1k - L, A * (1.0 - k) + B * k);
    };
    const double lo = std::min(0.0, (L - B * std::numbers::ln2) / A - 1.0);
    const double hi = std::max(0.0, (L + A * std::numbers::ln2) / B + 1.0);
    const double x0 = L < 0.0 ? L / A : L / B;
    const double x = detail::safeguarded_newton(G, lo, hi, x0, 1e-15, kDefaultMaxIter);
    out.log_k = -detail::softplus(-x);
    out.log_one_minus_k = -detail::softplus(x);
    out.k = std::exp(out.log_k);
    out.one_minus_k = std::exp(out.log_one_minus_k);
    if (out.k >= 1.0) out.k = std::nextafter(1.0, 0.0);
    return out;
}

/**
 * \brief k ∈ [0,1) with k^{1/(p−q)} / (1−k)^{1/(r−q)} = rhs (regime P).
 * \throws DomainError unless q < p, q < r and all exponents finite.
 */
inline double solve_k_implicit(double rhs, double p, double q, double r) {
    if (!(q >= 1.0 && q < p && q < r) || std::isinf(p) || std::isinf(r))
        throw DomainError("solve_k_implicit: need regime P exponents");
    if (!(rhs >= 0.0)) throw DomainError("solve_k_implicit: rhs must be nonnegative");
    if (rhs == 0.0) return 0.0;
    return solve_k_log(std::log(rhs), 1.0 / (p - q), 1.0 / (r - q)).k;
}

} // namespace orec

#endif // OREC_SPECIALFN_HPP
