#include <gtest/gtest.h>

#include <sstream>

#include "orec/cli.hpp"

using namespace orec;
using nlohmann::json;

namespace {

Config shipped(const std::string& name) { return load_config(std::string(OREC_SOURCE_DIR) + "/configs/" + name + ".json"); }

struct Invocation {
    int code;
    std::string out, err;
};

Invocation run(const std::string& cmd, const Config& c, RunOptions o = {}) {
    std::ostringstream out, err;
    const int code = run_command(cmd, c, o, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> rows(const std::string& text) {
    std::vector<std::vector<std::string>> r;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        r.push_back(cells);
    }
    return r;
}

} // namespace

TEST(Csv, NumbersAndQuoting) {
    EXPECT_EQ(csv::num(0.1), "0.10000000000000001");
    EXPECT_EQ(csv::num(kInf), "inf");
    EXPECT_EQ(csv::field("plain"), "plain");
    EXPECT_EQ(csv::field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv::field("say \"hi\""), "\"say \"\"hi\"\"\"");
    std::ostringstream os;
    csv::row(os, {"x", "1,2", ""});
    EXPECT_EQ(os.str(), "x,\"1,2\",\n");
}

TEST(Cli, CarlsonConstant) {
    const Invocation r = run("constants", shipped("carlson"));
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["constant"].get<double>(), 1.7724538509055159, 1e-9);
    EXPECT_NEAR(j["E"].get<double>(), 1.7724538509055159, 1e-9);
}

TEST(Cli, LaplacianTwoPi) {
    const Invocation r = run("constants", shipped("laplacian_2pi"));
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NEAR(json::parse(r.out)["E"].get<double>(), 1.4142135623730951, 1e-9);
}

TEST(Cli, ConstantsCsv) {
    RunOptions o;
    o.format = "csv";
    const Invocation r = run("constants", shipped("fourier_l2"), o);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto t = rows(r.out);
    ASSERT_GE(t.size(), 6u);
    EXPECT_EQ(t[0], (std::vector<std::string>{"key", "value"}));
    EXPECT_EQ(t[1][0], "E");
}

TEST(Cli, NoRegimeIsDomainError) {
    const Invocation r = run("constants", shipped("faults/no_regime"));
    EXPECT_EQ(r.code, kExitDomain);
    EXPECT_NE(r.err.find("no regime"), std::string::npos) << r.err;
}

TEST(Cli, FilterP2InUnitInterval) {
    const Invocation r = run("filter", shipped("cone_p2"));
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto t = rows(r.out);
    ASSERT_GT(t.size(), 10u);
    EXPECT_EQ(t[0], (std::vector<std::string>{"t1", "alpha", "alpha_psi"}));
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double a = std::stod(t[i][1]);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 1.0);
    }
}

TEST(Cli, FilterFourierL2VanishesOutsideSupport) {
    const Config c = shipped("fourier_l2");
    const Invocation r = run("filter", c);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json rep = json::parse(run("constants", c).out);
    const double beta = rep["multipliers"]["beta"].get<double>();
    const auto t = rows(r.out);
    int outside = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double x = std::stod(t[i][0]);
        const double a = std::stod(t[i][1]);
        // psi = |t|, s_2 = |t|^4: support is beta t^2 < 1
        if (beta * x * x >= 1.0 + 1e-9) {
            ++outside;
            EXPECT_EQ(a, 0.0) << x;
        }
    }
    EXPECT_GT(outside, 0);
}

TEST(Cli, FilterIsDeterministic) {
    const Config c = shipped("cone_p2");
    RunOptions one, two;
    one.threads = 1;
    two.threads = 2;
    EXPECT_EQ(run("filter", c, one).out, run("filter", c, two).out);
}

TEST(Cli, VerifyShippedConfigs) {
    for (const char* name : {"carlson", "cone_p", "fourier_linf"}) {
        const Invocation r = run("verify", shipped(name));
        EXPECT_EQ(r.code, kExitOk) << name << "\n" << r.out << r.err;
        EXPECT_TRUE(json::parse(r.out)["pass"].get<bool>());
    }
}

TEST(Cli, VerifyCatchesCorruptMultiplier) {
    const Invocation r = run("verify", shipped("faults/corrupt_lambda0"));
    EXPECT_EQ(r.code, kExitVerify);
    bool flagged = false;
    const json j = json::parse(r.out);
    for (const auto& ch : j["checks"])
        if (ch["name"] == "extremal.stationarity") flagged = !ch["pass"].get<bool>();
    EXPECT_TRUE(flagged);
}

TEST(Cli, VerifyRejectsAsymmetricSpec) {
    const Invocation r = run("verify", shipped("faults/asymmetric"));
    EXPECT_EQ(r.code, kExitDomain);
    EXPECT_NE(r.err.find("I'"), std::string::npos) << r.err;
}

TEST(Cli, SimulateSingleDeltaLeavesSlopeEmpty) {
    Config c = shipped("cone_p");
    c.deltas = {1.0};
    c.trials = 10;
    const Invocation r = run("simulate", c);
    ASSERT_EQ(r.code, kExitOk) << r.out << r.err;
    const auto t = rows(r.out);
    ASSERT_EQ(t.size(), 2u);
    ASSERT_EQ(t[1].size(), 7u);
    EXPECT_EQ(t[1][4], "");
    EXPECT_EQ(t[1][5], "");
}

TEST(Cli, OracleTwoAtoms) {
    const Invocation r = run("oracle", shipped("oracle_two_atoms"));
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json j = json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_LE(j["rel_gap"].get<double>(), 2e-4);
}

TEST(Cli, UnknownCommand) { EXPECT_EQ(run("bogus", shipped("carlson")).code, kExitParse); }
