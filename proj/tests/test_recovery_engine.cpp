#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "orec/recovery_engine.hpp"

using namespace orec;

namespace {

FrequencyGrid three_nodes() {
    FrequencyGrid g;
    g.d = 1;
    g.nodes = {1, 2, 3};
    g.weights = {0.5, 1.5, 2.0};
    return g;
}

FrequencyGrid grid_for(const ProblemSpec& s) {
    PolarGridSpec ps;
    ps.radial_order = 16;
    ps.panel_width = 0.25;
    return profile_polar_grid(s, QuadratureConfig{}, ps);
}

const ProblemSpec kP = fx::plain(ConeDomain::positive_orthant(1), {3, 2, 4}, HomogeneousWeight::radial(0),
                                 fx::coordinates(1, 1), 0.7);

} // namespace

TEST(WeightedNorm, Examples) {
    const auto g = three_nodes();
    const auto one = sample(g, [](auto) { return 1.0; });
    const auto w1 = HomogeneousWeight::radial(0);
    EXPECT_NEAR(weighted_norm(one, w1, 2, g), std::sqrt(g.total_mass()), 1e-15);
    SampledSignal x(g);
    x.values = {1.0, 3.0, 2.0};
    EXPECT_EQ(weighted_norm(x, w1, kInf, g), 3.0);
    SampledSignal cx(g);
    for (std::size_t i = 0; i < 3; ++i) cx.values[i] = std::complex<double>(0, -2.5) * x.values[i];
    for (double p : {1.0, 2.0, 3.5, kInf})
        EXPECT_NEAR(weighted_norm(cx, HomogeneousWeight::radial(1), p, g), 2.5 * weighted_norm(x, HomogeneousWeight::radial(1), p, g), 1e-14);
    EXPECT_NEAR(weighted_norm(x, HomogeneousWeight::radial(1), 1, g), 0.5 * 1 + 1.5 * 6 + 2.0 * 6, 1e-14);
    EXPECT_THROW(weighted_norm(x, w1, 0.5, g), DomainError);
    const auto other = three_nodes();
    EXPECT_THROW(weighted_norm(x, w1, 2, other), DimensionError);
}

TEST(ApplyFilter, IdentityZeroLinear) {
    const auto g = three_nodes();
    SampledSignal y1(g), y2(g), y12(g);
    y1.values = {1.0, std::complex<double>(0, 2), -3.0};
    y2.values = {0.5, 4.0, std::complex<double>(1, 1)};
    for (int i = 0; i < 3; ++i) y12.values[i] = y1.values[i] + y2.values[i];
    const auto id = identity_filter(HomogeneousWeight::radial(0));
    EXPECT_EQ(apply_filter(y1, id, g).values, y1.values);
    FilterSpec zero = id;
    zero.multiplier = [](std::span<const double>) { return 0.0; };
    for (auto v : apply_filter(y1, zero, g).values) EXPECT_EQ(v, 0.0);
    const auto f = optimal_filter(fx::carlson(), recovery_error(fx::carlson(), QuadratureConfig{}));
    const auto a = apply_filter(y1, f, g), b = apply_filter(y2, f, g), c = apply_filter(y12, f, g);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(c.values[i] - a.values[i] - b.values[i]), 0.0, 1e-15);
}

TEST(MethodError, Examples) {
    const auto g = three_nodes();
    const auto s = fx::carlson();
    SampledSignal x(g), zero(g);
    x.values = {1.0, -2.0, 0.5};
    const auto id = identity_filter(s.psi);
    EXPECT_EQ(method_error(x, x, id, s, g), 0.0);
    const auto f = optimal_filter(s, recovery_error(s, QuadratureConfig{}));
    const auto m = apply_filter(x, f, g);
    EXPECT_NEAR(method_error(zero, x, f, s, g), weighted_norm(m, HomogeneousWeight::radial(0), 1, g), 1e-14);
}

TEST(ExtremalPair, ZeroNoise) {
    auto s = kP;
    const auto rep = recovery_error(s, QuadratureConfig{});
    const auto g = grid_for(s);
    s.delta = 0;
    const auto ep = extremal_pair(s, rep, g);
    EXPECT_EQ(ep.certificate, 0.0);
    EXPECT_EQ(ep.x.values, ep.y.values);
}

TEST(ExtremalPair, FourierIndicatorSitsOnConstraint) {
    const auto s = fx::fourier(1, {kInf, 2, 2}, HomogeneousWeight::radial(0.5), fx::coordinates(1, 2));
    const auto rep = recovery_error(s, QuadratureConfig{});
    const auto g = grid_for(s);
    const auto ep = extremal_pair(s, rep, g);
    EXPECT_NEAR(ep.rescale, 1.0, 1e-6);
    const auto adm = admissibility(ep.x, ep.y, s, g);
    EXPECT_NEAR(adm.constraint, 1.0, 1e-9);
    EXPECT_LE(adm.noise, s.delta * (1 + 1e-12));
    EXPECT_GE(ep.certificate, 0.99 * rep.E);
}

TEST(ExtremalPair, LaplacianBallLine) {
    LaplacianParams L = fx::laplacian(1.0);
    L.d = 1;
    const auto rep = laplacian_error(L);
    const double c0 = laplacian_equality_point(L)[0];
    const int n = 4096, k = 3 * n / 4;
    const auto g = tensor_lattice(ConeDomain::full_space(1), c0 * n / (2.0 * k + 1 - n), n);
    const auto ep = laplacian_extremal_pair(L, g);
    const auto adm = admissibility(ep.x, ep.y, laplacian_problem(L), g);
    EXPECT_TRUE(adm.ok(L.delta));
    EXPECT_GE(ep.certificate, 0.99 * rep.E);
    EXPECT_LE(ep.certificate, rep.E * (1 + 1e-6));
}

TEST(Adversary, SandwichOnLine) {
    for (const auto& s : {kP, fx::carlson(), fx::fourier_linf_line()}) {
        const auto rep = recovery_error(s, QuadratureConfig{});
        const auto f = optimal_filter(s, rep);
        const auto g = grid_for(s);
        const auto ep = extremal_pair(s, rep, g);
        AdversaryOptions o;
        o.trials = 1000;
        o.threads = 4;
        const auto ar = adversary(s, f, rep, g, o, QuadratureConfig{}, &ep);
        EXPECT_LE(ar.sup_error, rep.E * (1 + 1e-6));
        EXPECT_GE(ar.sup_error, 0.99 * rep.E);
        EXPECT_TRUE(admissibility(ar.x, ar.y, s, g).ok(s.delta, 1e-9));
    }
}

TEST(Adversary, DeterministicAcrossThreads) {
    const auto rep = recovery_error(kP, QuadratureConfig{});
    const auto f = optimal_filter(kP, rep);
    const auto g = grid_for(kP);
    AdversaryOptions o;
    o.trials = 60;
    o.threads = 1;
    const auto a = adversary(kP, f, rep, g, o);
    o.threads = 6;
    const auto b = adversary(kP, f, rep, g, o);
    EXPECT_EQ(a.sup_error, b.sup_error);
    EXPECT_EQ(a.argmax_trial, b.argmax_trial);
}

TEST(Adversary, NaiveFilterIsSuboptimal) {
    const auto s = fx::plain(ConeDomain::positive_orthant(1), {3, 2, 2}, HomogeneousWeight::radial(0),
                             fx::coordinates(1, 1), 4.0);
    const auto rep = recovery_error(s, QuadratureConfig{});
    const auto g = grid_for(s);
    AdversaryOptions o;
    o.trials = 200;
    const auto ar = adversary(s, identity_filter(s.psi), rep, g, o);
    EXPECT_GT(ar.sup_error, 1.1 * rep.E);
}

TEST(EmitTable, RowsMatchFilter) {
    const auto rep = recovery_error(kP, QuadratureConfig{});
    const auto f = optimal_filter(kP, rep);
    const auto g = grid_for(kP);
    const auto t = emit_table(f, g);
    ASSERT_EQ(t.alpha.size(), g.size());
    for (std::size_t i = 0; i < g.size(); i += 17) {
        EXPECT_EQ(t.alpha[i], f.alpha(g.node(i)));
        EXPECT_GE(t.alpha[i], 0.0);
        EXPECT_LE(t.alpha[i], 1.0);
    }
}

TEST(TensorLattice, MassAndOrthant) {
    const auto g = tensor_lattice(ConeDomain::full_space(2), 2.0, 40);
    EXPECT_EQ(g.size(), 1600u);
    EXPECT_NEAR(g.total_mass(), 16.0, 1e-12);
    const auto h = tensor_lattice(ConeDomain::positive_orthant(2), 2.0, 40);
    EXPECT_NEAR(h.total_mass(), 4.0, 1e-12);
    EXPECT_THROW(tensor_lattice(ConeDomain::full_space(3), 1.0, 1000), SizeError);
}
