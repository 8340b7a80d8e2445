"""Independent reference values for the test suite.

Computes the frozen reference values with mpmath (and a plain Simpson rule for the two angular integrals) without
touching the C++ library, and writes them to tests/reference_values.hpp.

    python3 tests/oracle/reference_values.py
"""
import itertools
import math
import pathlib

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def simpson(f, a, b, n):
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


# angular integral of the power-weight Carlson family, d=2, (p,q,r)=(2,1,2), lambda=mu=1.
# theta=0, theta0=1/2, theta1=3/2 on the quarter circle: gamma=1/2, q*=2, integrand (c^3+s^3)^(-1/2).
def carlson_angular_d2():
    f = lambda w: (mp.cos(w) ** 3 + mp.sin(w) ** 3) ** mp.mpf(-0.5)
    exact = mp.quad(f, [0, mp.pi / 4, mp.pi / 2])
    simp = simpson(lambda w: (np.cos(w) ** 3 + np.sin(w) ** 3) ** -0.5, 0.0, math.pi / 2, 10**6)
    assert abs(simp - float(exact)) < 1e-8 * float(exact)
    return exact


# I of the radial-psi, coordinate-derivative spec, d=2, nu=2, eta=1, p=inf (L2 target).
# gamma = (nu-eta)/(nu+d/2) = 1/3, q* = 6, integrand (c^4+s^4)^(-q*(1-gamma)/2) = (c^4+s^4)^(-2).
def fourier_l2_angular():
    nu, eta, d = 2, 1, 2
    g = mp.mpf(nu - eta) / (nu + mp.mpf(d) / 2)
    qs = 1 / (mp.mpf(1) / 2 - (1 - g) / 2)
    e = qs * (1 - g) / 2
    f = lambda w: (mp.cos(w) ** 4 + mp.sin(w) ** 4) ** (-e)
    exact = mp.quad(f, mp.linspace(0, 2 * mp.pi, 9))
    simp = simpson(lambda w: (np.cos(w) ** 4 + np.sin(w) ** 4) ** float(-e), 0.0, 2 * math.pi, 10**6)
    assert abs(simp - float(exact)) < 1e-8 * float(exact)
    closed = 16 * 2 * mp.pi * 3 / mp.mpf(8) ** 1.5  # 2*pi*a/(a^2-b^2)^(3/2) with a=3, b=1, times 4^2
    assert abs(closed - exact) < mp.mpf(10) ** -30
    return exact


# sharp Carlson constant for d=2, (2,1,2), lambda=mu=1:
# C = d^b/((p a)^a (r b)^b) (I/(lambda+mu) B(a/s, b/s))^s with a=b=1/4, s=1/2.
def carlson_constant_d2(I):
    a = b = mp.mpf(1) / 4
    s = 1 - a - b
    d, p, r = 2, 2, 2
    return mp.mpf(d) ** b / ((p * a) ** a * (r * b) ** b) * (I / 2 * mp.beta(a / s, b / s)) ** s


# E of the same spec at p=inf, delta=1, from the extremal Fx = delta on {|psi| > lam sqrt(s2)}:
# per direction the set is rho < rho*(w) = (lam sqrt(s2(w)))^(-1/(nu-eta)); lam is fixed by the
# constraint (2pi)^-d int |xi_j|^(2nu) |Fx|^2 = 1 (summed over j and divided by d), then
# E^2 = delta^2 (2pi)^-d int |psi|^2 over the set.
def fourier_l2_error():
    nu, eta, d, delta = 2, 1, 2, mp.mpf(1)
    s2 = lambda w: mp.cos(w) ** (2 * nu) + mp.sin(w) ** (2 * nu)
    def constraint(lam):
        rs = lambda w: (lam * mp.sqrt(s2(w))) ** (-mp.mpf(1) / (nu - eta))
        val = mp.quad(lambda w: s2(w) * rs(w) ** (2 * nu + d) / (2 * nu + d), mp.linspace(0, 2 * mp.pi, 9))
        return delta**2 * val / (2 * mp.pi) ** d / d - 1
    # the constraint is K lam^(-(2nu+d)/(nu-eta)) with K its value at lam = 1
    K = constraint(mp.mpf(1)) + 1
    lam = K ** (mp.mpf(nu - eta) / (2 * nu + d))
    assert abs(constraint(lam)) < mp.mpf(10) ** -25
    rs = lambda w: (lam * mp.sqrt(s2(w))) ** (-mp.mpf(1) / (nu - eta))
    E2 = delta**2 / (2 * mp.pi) ** d * mp.quad(lambda w: rs(w) ** (2 * eta + d) / (2 * eta + d), mp.linspace(0, 2 * mp.pi, 9))
    return mp.sqrt(E2)


# L-inf target, d=1, nu=2, eta=0, p=2, delta=1, psi=1, phi=t^2.
# E = sup (2pi)^-1 int |Fx| over int |Fx|^2 <= delta^2, (2pi)^-1 int t^4 |Fx|^2 <= 1; the maximizer is
# Fx = c/(1 + s t^4); s balances the two constraints, c scales them to the boundary.
def fourier_linf_error():
    delta = mp.mpf(1)
    A = lambda s: 2 * mp.quad(lambda t: (1 + s * t**4) ** -2, [0, 1, mp.inf])
    B = lambda s: 2 * mp.quad(lambda t: t**4 * (1 + s * t**4) ** -2, [0, 1, mp.inf]) / (2 * mp.pi)
    # both active: c^2 A = delta^2 and c^2 B = 1, so A/B = delta^2
    ls = mp.findroot(lambda l: mp.log(A(mp.e**l) / B(mp.e**l)) - 2 * mp.log(delta), 0)
    s = mp.e**ls
    c = delta / mp.sqrt(A(s))
    return c * 2 * mp.quad(lambda t: 1 / (1 + s * t**4), [0, 1, mp.inf]) / (2 * mp.pi)


# two atoms, mu=(1,1), psi=(1,2), phi=(1,3), p=2, q=1, r=2, delta=0.8:
# max x1 + 2 x2 on x >= 0, x1^2 + x2^2 <= 0.64, x1^2 + 9 x2^2 <= 1, by enumeration of active sets.
def two_atom_value():
    best = mp.mpf(0)
    cands = []
    # only the noise disc active: x = 0.8 (1,2)/sqrt5
    cands.append((mp.mpf("0.8") / mp.sqrt(5), 2 * mp.mpf("0.8") / mp.sqrt(5)))
    # only the ellipse active: maximize x1 + 2 x2 on x1^2 + 9 x2^2 = 1 -> x ∝ (1, 2/9)
    k = 1 / mp.sqrt(1 + 9 * (mp.mpf(2) / 9) ** 2)
    cands.append((k, k * mp.mpf(2) / 9))
    # both active: x2^2 = (1 - 0.64)/8, x1^2 = 0.64 - x2^2
    x2 = mp.sqrt((1 - mp.mpf("0.64")) / 8)
    cands.append((mp.sqrt(mp.mpf("0.64") - x2**2), x2))
    for x1, x2 in cands:
        if x1 >= 0 and x2 >= 0 and x1**2 + x2**2 <= mp.mpf("0.64") + 1e-30 and x1**2 + 9 * x2**2 <= 1 + 1e-30:
            best = max(best, x1 + 2 * x2)
    return best


def main():
    I1 = carlson_angular_d2()
    vals = {
        "kCarlsonAngularD2": (I1, "angular I, power-weight Carlson family, d=2, (2,1,2), lambda=mu=1"),
        "kFourierL2AngularI": (fourier_l2_angular(), "angular I, Fourier L2 target, d=2, nu=2, eta=1, p=inf"),
        "kCarlsonConstantD2": (carlson_constant_d2(I1), "sharp Carlson constant, d=2, (2,1,2), lambda=mu=1"),
        "kFourierL2Error": (fourier_l2_error(), "E, Fourier L2 target, d=2, nu=2, eta=1, p=inf, delta=1"),
        "kFourierLinfError": (fourier_linf_error(), "E, Fourier L-inf target, d=1, nu=2, eta=0, p=2, delta=1"),
        "kTwoAtomValue": (two_atom_value(), "two-atom discrete value, p=2, q=1, r=2, delta=0.8"),
    }
    out = ["// Generated by tests/oracle/reference_values.py; do not edit.",
           "#pragma once", "", "namespace orec_ref {", ""]
    for k, (v, doc) in vals.items():
        out.append(f"// {doc}")
        out.append(f"inline constexpr double {k} = {mp.nstr(v, 20, strip_zeros=False)};")
        print(k, mp.nstr(v, 20))
    out += ["", "} // namespace orec_ref", ""]
    path = pathlib.Path(__file__).resolve().parents[1] / "reference_values.hpp"
    path.write_text("\n".join(out))


if __name__ == "__main__":
    main()
