#include <gtest/gtest.h>

#include "orec/config.hpp"

using namespace orec;
using nlohmann::json;

namespace {

json minimal() {
    return json::parse(R"({"problem": {"exponents": [2, 1, 2], "phis": [{"kind": "coordinate", "axis": 0, "degree": 1}]}})");
}

} // namespace

TEST(ParseConfig, DefaultsAreRecorded) {
    const Config c = parse_config(minimal());
    EXPECT_EQ(c.family, Family::Homogeneous);
    EXPECT_EQ(c.spec.d(), 1);
    EXPECT_EQ(c.spec.cone.kind(), ConeDomain::Kind::PositiveOrthant);
    EXPECT_EQ(c.spec.delta, 1.0);
    EXPECT_EQ(c.spec.psi.degree(), 0.0);
    EXPECT_FALSE(c.notices.empty());
    bool psi_notice = false;
    for (const auto& n : c.notices) psi_notice = psi_notice || n.find("problem.psi") != std::string::npos;
    EXPECT_TRUE(psi_notice);
}

TEST(ParseConfig, UnknownKeysAreRejected) {
    json j = minimal();
    j["problem"]["dleta"] = 1;
    EXPECT_THROW(parse_config(j), ParseError);
    j = minimal();
    j["extra"] = json::object();
    EXPECT_THROW(parse_config(j), ParseError);
    j = minimal();
    j["problem"]["phis"][0]["degre"] = 1;
    EXPECT_THROW(parse_config(j), ParseError);
}

TEST(ParseConfig, InfinityAndWeights) {
    const json j = json::parse(R"({"problem": {"family": "fourier", "dimension": 2, "exponents": ["inf", 2, 2],
        "psi": {"kind": "theta_norm", "theta": 1.5, "degree": 1},
        "phis": [{"kind": "coordinate", "axis": 0, "degree": 2, "scale": 3},
                 {"kind": "coordinate", "axis": 1, "degree": 2, "scale": 3}]}})");
    const Config c = parse_config(j);
    EXPECT_TRUE(std::isinf(c.spec.exponents.p));
    EXPECT_EQ(c.spec.normalization, Normalization::FourierPlancherel);
    EXPECT_EQ(c.spec.cone.kind(), ConeDomain::Kind::FullSpace);
    EXPECT_EQ(c.spec.psi.kind, HomogeneousWeight::Kind::ThetaNormPower);
    EXPECT_EQ(c.spec.phis[1].axis, 1);
    EXPECT_EQ(c.spec.phis[1].scale, 3.0);
}

TEST(ParseConfig, FamiliesAndSections) {
    const Config lap = parse_config(json::parse(
        R"({"problem": {"family": "laplacian", "dimension": 2, "delta": 0.5, "laplacian": {"theta": 2, "eta": 1, "nu": 2}},
            "experiment": {"deltas": [1, 2], "trials": 7, "seed": 9, "grid": {"n": 64}}})"));
    EXPECT_EQ(lap.family, Family::Laplacian);
    EXPECT_EQ(lap.laplacian.delta, 0.5);
    EXPECT_EQ(lap.deltas, (std::vector<double>{1, 2}));
    EXPECT_EQ(lap.trials, 7);
    EXPECT_EQ(lap.seed, 9u);
    EXPECT_EQ(lap.grid.n, 64);
    EXPECT_THROW(parse_config(json::parse(R"({"problem": {"family": "laplacian", "phis": []}})")), ParseError);
    const Config car = parse_config(json::parse(R"({"problem": {"family": "carlson", "dimension": 2, "exponents": [2, 1, 2]}})"));
    EXPECT_EQ(car.family, Family::Carlson);
    EXPECT_EQ(car.spec.n(), 2);
    EXPECT_THROW(parse_config(json::parse(R"({"problem": {"family": "nope"}})")), ParseError);
    json bad = minimal();
    bad["output"] = {{"format", "xml"}};
    EXPECT_THROW(parse_config(bad), ParseError);
}

TEST(ParseConfig, OracleInstance) {
    json j = minimal();
    j["oracle"] = json::parse(R"({"instance": {"mu": [1, 1], "psi": [1, 2], "phi": [[1, 3]], "exponents": [2, 1, 2], "delta": 0.8}})");
    const Config c = parse_config(j);
    ASSERT_TRUE(c.has_instance);
    EXPECT_EQ(c.instance.atoms(), 2);
    EXPECT_EQ(c.instance.phi[0][1], 3.0);
    EXPECT_EQ(instance_json(c.instance)["delta"], 0.8);
}

TEST(ReportJson, RoundTrip) {
    RecoveryReport r;
    r.E = 1.25;
    r.gamma = 0.5;
    r.q_star = kInf;
    r.I = 3;
    r.constant = 2;
    r.constant_name = "C";
    r.multipliers["lambda"] = 0.1;
    r.values["x"] = -kInf;
    r.residuals["a"] = 1e-17;
    r.flags = {"f"};
    const json j = report_json(r);
    EXPECT_EQ(j["q_star"], "inf");
    const RecoveryReport b = report_from_json(json::parse(j.dump()));
    EXPECT_EQ(b.E, r.E);
    EXPECT_TRUE(std::isinf(b.q_star));
    EXPECT_EQ(b.values.at("x"), -kInf);
    EXPECT_EQ(b.residuals.at("a"), 1e-17);
    EXPECT_EQ(b.flags, r.flags);
}

TEST(LoadConfig, ShippedConfigsParse) {
    const std::string dir = std::string(OREC_SOURCE_DIR) + "/configs/";
    for (const char* name : {"carlson", "carlson_d2", "laplacian", "laplacian_2pi", "oracle_two_atoms", "fourier_l2", "fourier_linf",
                             "fourier_l2_pinf", "cone_p", "cone_p1", "cone_p2", "polar_d2"})
        EXPECT_NO_THROW(load_config(dir + name + ".json")) << name;
    EXPECT_THROW(load_config(dir + "faults/unknown_key.json"), ParseError);
    EXPECT_THROW(load_config(dir + "does_not_exist.json"), ParseError);
}
