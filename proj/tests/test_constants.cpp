#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "orec/constants.hpp"
#include "reference_values.hpp"

using namespace orec;

TEST(GammaExponent, Examples) {
    EXPECT_NEAR(gamma_exponent(2, 1, 1, {kInf, 2, 2}), 0.4, 1e-15);
    // q = r: (ν−η)/(ν+d(1/q−1/p))
    EXPECT_NEAR(gamma_exponent(3, 0.5, 2, {4, 2, 2}), 2.5 / (3 + 2 * 0.25), 1e-15);
    // η = ν − d(1/q − 1/r) gives γ = 0
    EXPECT_NEAR(gamma_exponent(2, 2 - 2 * (1 - 0.5), 2, {3, 1, 2}), 0.0, 1e-15);
    // ν + d(1/r − 1/p) = 0
    EXPECT_THROW(gamma_exponent(0.5, 0, 1, {1, 1, 2}), DegenerateError);
}

TEST(QStar, Examples) {
    EXPECT_NEAR(q_star(0.5, {2, 1, 2}), 2.0, 1e-15);
    const double g = 0.3;
    EXPECT_NEAR(q_star(g, {4, 2, 2}), 1 / (g * (0.5 - 0.25)), 1e-12);
    EXPECT_NEAR(q_star(g, {2, 2, 5}), 1 / ((1 - g) * (0.5 - 0.2)), 1e-12);
    EXPECT_THROW(q_star(1.2, {2, 1, 2}), DomainError);
}

TEST(RecoveryError, DeltaScaling) {
    const QuadratureConfig cfg;
    for (const auto& s : {fx::carlson(0.7),
                          fx::plain(ConeDomain::positive_orthant(1), {3, 2, 2}, HomogeneousWeight::radial(0),
                                    fx::coordinates(1, 1), 0.7),
                          fx::plain(ConeDomain::full_space(2), {3, 1.5, 2.5}, HomogeneousWeight::radial(0.5),
                                    fx::coordinates(2, 2), 0.7)}) {
        auto s2 = s;
        s2.delta *= 2;
        const auto a = recovery_error_homogeneous(s, cfg), b = recovery_error_homogeneous(s2, cfg);
        EXPECT_NEAR(b.E / a.E, std::pow(2.0, a.gamma), 1e-12);
        EXPECT_LT(a.residuals.at("decomposition_vs_closed_form"), 1e-9);
        EXPECT_LT(a.residuals.at("multiplier_value"), 1e-9);
    }
}

TEST(RecoveryError, CarlsonLine) {
    const auto rep = recovery_error_homogeneous(fx::carlson(), QuadratureConfig{});
    EXPECT_NEAR(rep.gamma, 0.5, 1e-15);
    EXPECT_NEAR(rep.constant, std::sqrt(std::numbers::pi), 1e-12);
    EXPECT_NEAR(rep.E, std::sqrt(std::numbers::pi), 1e-12);
}

TEST(RecoveryError, DirectIntegralsAgree) {
    ConstantsOptions opt;
    opt.direct_check = true;
    const auto s = fx::plain(ConeDomain::positive_orthant(2), {3, 1.5, 2.5}, HomogeneousWeight::radial(0.5),
                             fx::coordinates(2, 2), 1.3);
    const auto rep = recovery_error_homogeneous(s, QuadratureConfig{}, opt);
    EXPECT_LT(rep.residuals.at("I1_direct"), 1e-8);
    EXPECT_LT(rep.residuals.at("I2_direct"), 1e-8);
    EXPECT_LT(rep.residuals.at("direct_decomposition_vs_closed_form"), 1e-9);
}

TEST(RecoveryError, AsymmetricSpecRaises) {
    auto phis = fx::coordinates(2, 1);
    phis[1] = phis[1].scaled(2);
    const auto s = fx::plain(ConeDomain::positive_orthant(2), {2, 1, 2}, HomogeneousWeight::radial(-0.5), phis);
    EXPECT_THROW(recovery_error_homogeneous(s, QuadratureConfig{}), SymmetryError);
}

TEST(CarlsonConstant, Line) {
    const auto c = make_carlson_params(1, {2, 1, 2}, 1, 1);
    EXPECT_NEAR(c.alpha, 0.25, 1e-15);
    EXPECT_NEAR(c.beta, 0.25, 1e-15);
    EXPECT_NEAR(carlson_constant(c, QuadratureConfig{}), 1.7724538509055159, 1e-9);
}

TEST(CarlsonConstant, GeneralWeightsMatchThreeWeightForm) {
    for (auto [l, m] : {std::pair{0.5, 2.0}, {2.0, 1.0}, {1.5, 0.7}}) {
        const auto c = make_carlson_params(1, {3, 1, 2}, l, m);
        const auto r = carlson_report(c, QuadratureConfig{});
        EXPECT_LT(r.residual, 1e-10) << l << ' ' << m;
    }
}

TEST(CarlsonConstant, Plane) {
    const auto r = carlson_report(make_carlson_params(2, {2, 1, 2}, 1, 1), QuadratureConfig{});
    EXPECT_NEAR(r.C, orec_ref::kCarlsonConstantD2, 1e-9);
    EXPECT_LT(r.residual, 1e-10);
}

TEST(FourierL2, InfinityConstantAndValue) {
    const auto rep = fourier_L2_error(fx::fourier_l2_plane(), QuadratureConfig{});
    EXPECT_LT(rep.residuals.at("c_inf_vs_limit"), 1e-12);
    EXPECT_LT(rep.residuals.at("lambda_sq_vs_beta"), 1e-12);
    EXPECT_NEAR(rep.gamma, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(rep.E, orec_ref::kFourierL2Error, 1e-9);
    const auto rep2 = fourier_L2_error(fx::fourier_l2_plane(2.0), QuadratureConfig{});
    EXPECT_NEAR(rep2.E / rep.E, std::pow(2.0, rep.gamma), 1e-12);
}

TEST(FourierL2, FiniteNoiseExponentMatchesPlainProblem) {
    const auto s = fx::fourier(1, {4, 2, 2}, HomogeneousWeight::radial(1), fx::coordinates(1, 2));
    const auto rep = fourier_L2_error(s, QuadratureConfig{});
    EXPECT_LT(rep.residuals.at("plain_crosscheck"), 1e-10);
    EXPECT_LT(rep.residuals.at("beta_vs_p1_lambda"), 1e-10);
    EXPECT_THROW(fourier_L2_error(fx::fourier(1, {2, 2, 2}, HomogeneousWeight::radial(1), fx::coordinates(1, 2)),
                                  QuadratureConfig{}),
                 Error);
}

TEST(FourierLinf, Values) {
    const auto rep = fourier_Linf_error(fx::fourier_linf_line(), QuadratureConfig{});
    EXPECT_NEAR(rep.E, orec_ref::kFourierLinfError, 1e-9);
    EXPECT_LT(rep.residuals.at("plain_crosscheck"), 1e-10);
    EXPECT_LT(rep.residuals.at("xi1_vs_plain_scale"), 1e-10);
    const auto rep2 = fourier_Linf_error(fx::fourier_linf_line(2.0), QuadratureConfig{});
    EXPECT_NEAR(rep2.E / rep.E, std::pow(2.0, rep.gamma), 1e-12);
}

TEST(FourierLinf, InfiniteNoiseExponentMatchesE0) {
    const auto s = fx::fourier(1, {kInf, kInf, 2}, HomogeneousWeight::radial(0.5), fx::coordinates(1, 2));
    const auto rep = fourier_Linf_error(s, QuadratureConfig{});
    EXPECT_LT(rep.residuals.at("e0_vs_formula"), 1e-12);
    EXPECT_LT(rep.residuals.at("xi1_vs_lambda"), 1e-12);
}

TEST(Laplacian, Values) {
    EXPECT_NEAR(laplacian_error(fx::laplacian(2 * std::numbers::pi)).E, std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(laplacian_error(fx::laplacian(2 * std::numbers::pi)).gamma, 0.5, 1e-15);
    for (int d : {1, 2, 3}) {
        LaplacianParams L = fx::laplacian(std::pow(2 * std::numbers::pi, 0.5 * d));
        L.d = d;
        L.theta = 1.5;
        EXPECT_NEAR(laplacian_error(L).E, std::pow(d, L.eta / L.theta), 1e-13);
    }
}

TEST(Laplacian, MultiplierIdentity) {
    for (double delta : {0.01, 0.5, 1.0, 7.0, 300.0}) {
        LaplacianParams L = fx::laplacian(delta);
        L.theta = 3;
        L.eta = 0.7;
        L.nu = 2.5;
        const auto rep = laplacian_error(L);
        EXPECT_LT(rep.residuals.at("multiplier_identity"), 1e-12);
    }
}

TEST(Laplacian, Hypotheses) {
    LaplacianParams L = fx::laplacian();
    L.eta = 3;
    EXPECT_THROW(laplacian_error(L), HypothesisError);
    L = fx::laplacian();
    L.theta = 5;
    EXPECT_THROW(laplacian_error(L), HypothesisError);
}
