#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "orec/extremal.hpp"
#include "reference_values.hpp"

using namespace orec;

namespace {

ExtremalProfile profile_of(const ProblemSpec& s) {
    const PolarData t = polar_data(s, QuadratureConfig{});
    return build_profile(s, closed_form_multipliers(s, t.I1, t.I2));
}

/** ∫_0^∞ f(t) dt by composite Simpson in s = ln t over [−60, 60]; fine enough for a kink at the support edge. */
template <class F>
double half_line(F&& f) {
    const int n = 2400000;
    const double a = -60, b = 60, h = (b - a) / n;
    double acc = 0;
    for (int i = 0; i <= n; ++i) {
        const double s = a + i * h, w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        acc += w * f(std::exp(s)) * std::exp(s);
    }
    return acc * h / 3;
}

/** Checks ∫x̂^p = δ^p, ∫|φ x̂|^r = 1 and ‖ψx̂‖_q = E on the half line. */
void expect_active_constraints(const ProblemSpec& s, double tol) {
    const auto prof = profile_of(s);
    const auto e = s.exponents;
    auto x = [&](double t) { return prof.eval(std::span<const double>(&t, 1)); };
    auto w = [](const HomogeneousWeight& h, double t) { return h(std::span<const double>(&t, 1)); };
    const double noise = half_line([&](double t) { return std::pow(x(t), e.p); });
    const double cons = half_line([&](double t) { return std::pow(w(s.phis[0], t) * x(t), e.r); });
    const double target = half_line([&](double t) { return std::pow(w(s.psi, t) * x(t), e.q); });
    EXPECT_NEAR(noise / std::pow(s.delta, e.p), 1.0, tol);
    EXPECT_NEAR(cons, 1.0, tol);
    EXPECT_NEAR(std::pow(target, 1 / e.q) / recovery_error_homogeneous(s, QuadratureConfig{}).E, 1.0, tol);
    const auto pi = profile_integrals(prof, QuadratureConfig{});
    EXPECT_NEAR(pi.noise / std::pow(s.delta, e.p), 1.0, 1e-8);
    EXPECT_NEAR(pi.constraints[0], 1.0, 1e-8);
}

} // namespace

TEST(ClosedFormMultipliers, ScaleHomogeneity) {
    const auto s = fx::plain(ConeDomain::positive_orthant(2), {3, 1.5, 2.5}, HomogeneousWeight::radial(0.5),
                             fx::coordinates(2, 2), 1.0);
    const PolarData t = polar_data(s, QuadratureConfig{});
    auto s3 = s;
    s3.delta = 3.0;
    const auto a = closed_form_multipliers(s, t.I1, t.I2), b = closed_form_multipliers(s3, t.I1, t.I2);
    const double c = s.nu() + 2 * (1 / 2.5 - 1 / 3.0);
    EXPECT_NEAR(b.xi / a.xi, std::pow(3.0, 1 / c), 1e-13);
}

TEST(ClosedFormMultipliers, RejectsGammaOutOfRange) {
    const auto s = fx::plain(ConeDomain::positive_orthant(1), {2, 2, 4}, HomogeneousWeight::radial(0), fx::coordinates(1, 1));
    EXPECT_THROW(closed_form_multipliers(s, 1, 1), DomainError);
}

TEST(ConstraintsActive, CarlsonLine) { expect_active_constraints(fx::carlson(), 1e-8); }

TEST(ConstraintsActive, RegimeP2) {
    expect_active_constraints(
        fx::plain(ConeDomain::positive_orthant(1), {2, 2, 4}, HomogeneousWeight::radial(0.25), fx::coordinates(1, 1)), 1e-8);
}

TEST(ConstraintsActive, RegimeP1) {
    expect_active_constraints(
        fx::plain(ConeDomain::positive_orthant(1), {3, 2, 2}, HomogeneousWeight::radial(0), fx::coordinates(1, 1), 0.6), 1e-8);
}

TEST(BuildProfile, ZeroWherePsiVanishes) {
    const auto s = fx::plain(ConeDomain::positive_orthant(2), {2, 1, 2}, HomogeneousWeight::coordinate(0, 0.5),
                             fx::coordinates(2, 2));
    MultiplierSolution sol;
    sol.lambda0 = sol.lambda = 1;
    const auto prof = build_profile(s, sol);
    EXPECT_EQ(prof.eval(std::vector<double>{0.0, 1.0}), 0.0);
    EXPECT_GT(prof.eval(std::vector<double>{0.5, 1.0}), 0.0);
}

TEST(BuildProfile, RegimeP1Clamp) {
    const auto s = fx::plain(ConeDomain::positive_orthant(1), {3, 2, 2}, HomogeneousWeight::radial(0), fx::coordinates(1, 1));
    MultiplierSolution sol;
    sol.regime = Regime::P1;
    sol.lambda0 = sol.lambda = 1;
    const auto prof = build_profile(s, sol);
    EXPECT_EQ(prof.eval(std::vector<double>{2.0}), 0.0);  // λ t² = 4 ≥ ψ² = 1
    EXPECT_EQ(prof.eval(std::vector<double>{1.0}), 0.0);
    EXPECT_GT(prof.eval(std::vector<double>{0.5}), 0.0);
}

TEST(BuildProfile, ScalarReduction) {
    const auto s = fx::carlson();
    MultiplierSolution sol;
    sol.lambda0 = sol.lambda = 1;
    const auto prof = build_profile(s, sol);
    EXPECT_NEAR(prof.eval(std::vector<double>{1.0}), 0.25, 1e-15);
}

TEST(BuildProfile, Stationarity) {
    const std::vector<ProblemSpec> specs{
        fx::plain(ConeDomain::positive_orthant(2), {3, 1.5, 2.5}, HomogeneousWeight::radial(0.5), fx::coordinates(2, 2)),
        fx::plain(ConeDomain::full_space(2), {4, 2, 2}, HomogeneousWeight::radial(0.25), fx::coordinates(2, 1)),
        fx::plain(ConeDomain::positive_orthant(1), {2, 2, 4}, HomogeneousWeight::radial(0.25), fx::coordinates(1, 1)),
    };
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> L(-4, 4);
    std::normal_distribution<double> N;
    for (const auto& s : specs) {
        const auto prof = profile_of(s);
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            std::vector<double> t(s.d());
            double n2 = 0;
            for (auto& v : t) {
                v = s.cone.kind() == ConeDomain::Kind::PositiveOrthant ? std::fabs(N(rng)) : N(rng);
                n2 += v * v;
            }
            const double rho = std::exp(L(rng)) / std::sqrt(n2);
            for (auto& v : t) v *= rho;
            worst = std::max(worst, stationarity_residual(prof, t));
        }
        EXPECT_LT(worst, 1e-10);
    }
}

TEST(ExtremalValue, MatchesValueFormulas) {
    const std::vector<ProblemSpec> specs{
        fx::carlson(0.8),
        fx::plain(ConeDomain::positive_orthant(1), {3, 2, 2}, HomogeneousWeight::radial(0), fx::coordinates(1, 1), 0.6),
        fx::plain(ConeDomain::positive_orthant(1), {2, 2, 4}, HomogeneousWeight::radial(0.25), fx::coordinates(1, 1), 1.7),
        fx::plain(ConeDomain::positive_orthant(2), {3, 1.5, 2.5}, HomogeneousWeight::radial(0.5), fx::coordinates(2, 2)),
    };
    for (const auto& s : specs) {
        const auto prof = profile_of(s);
        const auto& m = prof.solution;
        const double formula = multiplier_value(m.regime, s.exponents, m.lambda0, s.n() * m.lambda, s.delta);
        EXPECT_NEAR(extremal_value(prof, QuadratureConfig{}) / formula, 1.0, 1e-8);
    }
}

TEST(ValueFormula, RegimeForms) {
    EXPECT_NEAR(multiplier_value(Regime::P, {2, 1, 2}, 0.3, 0.4, 2.0), (2 * 0.3 * 4 + 2 * 0.4) / 1.0, 1e-15);
    EXPECT_NEAR(multiplier_value(Regime::P1, {3, 2, 2}, 0.3, 0.4, 2.0), std::sqrt(1.5 * 0.3 * 8 + 0.4), 1e-15);
    EXPECT_NEAR(multiplier_value(Regime::P2, {2, 2, 4}, 0.3, 0.4, 2.0), std::sqrt(0.3 * 4 + 2 * 0.4), 1e-15);
}

namespace {

DiscreteInstance two_atoms(double delta, std::vector<double> phi) {
    DiscreteInstance in;
    in.mu = {1, 1};
    in.psi = {1, 2};
    in.phi = {std::move(phi)};
    in.exponents = {2, 1, 2};
    in.delta = delta;
    return in;
}

} // namespace

TEST(DiscreteSolver, SingleAtom) {
    DiscreteInstance in;
    in.mu = {1};
    in.psi = {1};
    in.phi = {{1}};
    in.exponents = {2, 1, 2};
    in.delta = 1;
    const auto sol = discrete_multiplier_solver(in);
    EXPECT_NEAR(sol.E, 1.0, 1e-8);
    EXPECT_NEAR(sol.x[0], 1.0, 1e-8);
}

TEST(DiscreteSolver, SlackNoise) {
    const auto sol = discrete_multiplier_solver(two_atoms(1e6, {1, 1}));
    EXPECT_EQ(sol.lambda0, 0.0);
    EXPECT_NEAR(sol.E, std::sqrt(5.0), 1e-8);
}

TEST(DiscreteSolver, TwoAtoms) {
    const auto in = two_atoms(0.8, {1, 3});
    const auto sol = discrete_multiplier_solver(in);
    EXPECT_NEAR(sol.E, orec_ref::kTwoAtomValue, 1e-7);
    EXPECT_NEAR(discrete_objective(in, sol.x), sol.E, 1e-8);
    EXPECT_LT(sol.residuals.at("noise_constraint"), 1e-8);
    EXPECT_LT(sol.residuals.at("unit_constraints"), 1e-8);
    EXPECT_LT(sol.residuals.at("slackness"), 1e-8);
}

TEST(DiscreteSolver, AsymmetricConstraints) {
    DiscreteInstance in = two_atoms(0.8, {1, 3});
    in.phi.push_back({5, 0.1});
    EXPECT_THROW(discrete_multiplier_solver(in), AsymmetryError);
}

TEST(DiscreteSolver, MalformedInstance) {
    DiscreteInstance in = two_atoms(0.8, {1});
    EXPECT_THROW(discrete_multiplier_solver(in), DimensionError);
}
