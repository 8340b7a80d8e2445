// Problem specs shared by the unit tests and the acceptance binary.
#pragma once

#include <vector>

#include "orec/constants.hpp"

namespace fx {

using namespace orec;

inline ProblemSpec plain(const ConeDomain& cone, ExponentTriple e, HomogeneousWeight psi,
                         std::vector<HomogeneousWeight> phis, double delta = 1.0) {
    ProblemSpec s;
    s.cone = cone;
    s.exponents = e;
    s.psi = psi;
    s.phis = std::move(phis);
    s.delta = delta;
    return s;
}

inline std::vector<HomogeneousWeight> coordinates(int d, double theta) {
    std::vector<HomogeneousWeight> out;
    for (int j = 0; j < d; ++j) out.push_back(HomogeneousWeight::coordinate(j, theta));
    return out;
}

/** d=1 orthant, ψ=1, φ=t, p=r=2, q=1. */
inline ProblemSpec carlson(double delta = 1.0) {
    return plain(ConeDomain::positive_orthant(1), {2, 1, 2}, HomogeneousWeight::radial(0), coordinates(1, 1), delta);
}

/** Fourier problem on R^d. */
inline ProblemSpec fourier(int d, ExponentTriple e, HomogeneousWeight psi, std::vector<HomogeneousWeight> phis,
                           double delta = 1.0) {
    ProblemSpec s = plain(ConeDomain::full_space(d), e, psi, std::move(phis), delta);
    s.normalization = Normalization::FourierPlancherel;
    return s;
}

/** L2 target on R^2, ψ=|ξ|, φ_j=|ξ_j|², p=∞. */
inline ProblemSpec fourier_l2_plane(double delta = 1.0) {
    return fourier(2, {kInf, 2, 2}, HomogeneousWeight::radial(1), coordinates(2, 2), delta);
}

/** L∞ target on R, ψ=1, φ=t², p=2. */
inline ProblemSpec fourier_linf_line(double delta = 1.0) {
    return fourier(1, {2, kInf, 2}, HomogeneousWeight::radial(0), coordinates(1, 2), delta);
}

/** Laplacian parameters d=2, θ=2, η=1, ν=2. */
inline LaplacianParams laplacian(double delta = 1.0) {
    LaplacianParams L;
    L.d = 2;
    L.theta = 2;
    L.eta = 1;
    L.nu = 2;
    L.delta = delta;
    return L;
}

} // namespace fx
