// Generated by tests/oracle/reference_values.py; do not edit.
#pragma once

namespace orec_ref {

// angular I, power-weight Carlson family, d=2, (2,1,2), lambda=mu=1
inline constexpr double kCarlsonAngularD2 = 1.7144404918087592799;
// angular I, Fourier L2 target, d=2, nu=2, eta=1, p=inf
inline constexpr double kFourierL2AngularI = 13.328648814475098741;
// sharp Carlson constant, d=2, (2,1,2), lambda=mu=1
inline constexpr double kCarlsonConstantD2 = 2.7599018840431583121;
// E, Fourier L2 target, d=2, nu=2, eta=1, p=inf, delta=1
inline constexpr double kFourierL2Error = 0.95521577147846177356;
// E, Fourier L-inf target, d=1, nu=2, eta=0, p=2, delta=1
inline constexpr double kFourierLinfError = 0.39538444338459700200;
// two-atom discrete value, p=2, q=1, r=2, delta=0.8
inline constexpr double kTwoAtomValue = 1.1956264997390041391;

} // namespace orec_ref
