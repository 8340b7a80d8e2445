/**
 * @file config.hpp
 * @brief JSON configuration shared by every command, and JSON forms of the
 * library types.
 */
#ifndef OREC_CONFIG_HPP
#define OREC_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "constants.hpp"
#include "core_model.hpp"
#include "errors.hpp"
#include "extremal.hpp"
#include "quadrature.hpp"
#include "recovery_engine.hpp"

namespace orec {

using json = nlohmann::json;

/** \brief Problem family named in the config. */
enum class Family { Homogeneous, Fourier, Carlson, Laplacian };

/** \brief Grid block of the experiment section. */
struct GridConfig {
    std::string kind = "auto"; ///< auto | lattice | polar
    int n = 256;               ///< lattice nodes per axis
    double extent = 0.0;       ///< lattice half-width; 0 picks one from the problem
    PolarGridSpec polar{16, 0.25, 8, 8};
};

/** \brief Everything a command needs. */
struct Config {
    Family family = Family::Homogeneous;
    ProblemSpec spec;
    LaplacianParams laplacian;
    CarlsonParams carlson;
    QuadratureConfig quadrature;
    ConstantsOptions options;

    std::vector<double> deltas{0.5, 1.0, 2.0, 4.0};
    int trials = 200;
    std::uint64_t seed = 1;
    GridConfig grid;
    std::string suite = "default";
    double corrupt_lambda0 = 1.0; ///< fault injection for verify
    double tol = 1e-9;

    bool has_instance = false;
    DiscreteInstance instance;
    double oracle_resolution = 1e-3;
    int oracle_rounds = 3;

    std::string out_path;
    std::string format; ///< empty: the command's default
    std::vector<std::string> notices;
};

namespace detail {

inline void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ParseError(where + ": unknown key '" + it.key() + "'");
}

/** \brief Number, or the strings "inf" / "infinity". */
inline double as_real(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity" || s == "Infinity") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::nan("");
    }
    throw ParseError(where + ": expected a number or \"inf\"");
}

inline json real_json(double x) {
    if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
    if (std::isnan(x)) return json("nan");
    return x;
}

template <class T>
T get_or(const json& j, const char* key, const T& fallback, const std::string& where, std::vector<std::string>* notices) {
    if (j.contains(key)) {
        try {
            return j.at(key).get<T>();
        } catch (const json::exception&) {
            throw ParseError(where + "." + key + ": wrong type");
        }
    }
    if (notices) {
        std::ostringstream os;
        os << where << "." << key << " defaulted to " << json(fallback).dump();
        notices->push_back(os.str());
    }
    return fallback;
}

inline double real_or(const json& j, const char* key, double fallback, const std::string& where,
                      std::vector<std::string>* notices) {
    if (j.contains(key)) return as_real(j.at(key), where + "." + key);
    if (notices) notices->push_back(where + "." + key + " defaulted to " + real_json(fallback).dump());
    return fallback;
}

inline HomogeneousWeight parse_weight(const json& j, const std::string& where, int d) {
    reject_unknown(j, where, {"kind", "degree", "axis", "theta", "scale"});
    if (!j.contains("kind")) throw ParseError(where + ": missing 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    const double deg = real_or(j, "degree", 0.0, where, nullptr);
    HomogeneousWeight w;
    if (kind == "radial") {
        w = HomogeneousWeight::radial(deg);
    } else if (kind == "coordinate") {
        const int axis = get_or<int>(j, "axis", 0, where, nullptr);
        if (axis < 0 || axis >= d) throw ParseError(where + ".axis: out of range");
        w = HomogeneousWeight::coordinate(axis, deg);
    } else if (kind == "theta_norm") {
        w = HomogeneousWeight::theta_norm(real_or(j, "theta", 2.0, where, nullptr), deg);
    } else {
        throw ParseError(where + ".kind: expected radial, coordinate or theta_norm");
    }
    const double sc = real_or(j, "scale", 1.0, where, nullptr);
    if (!(sc > 0.0)) throw ParseError(where + ".scale: must be positive");
    return w.scaled(sc);
}

inline json weight_json(const HomogeneousWeight& w) {
    json j;
    switch (w.kind) {
    case HomogeneousWeight::Kind::RadialPower: j = {{"kind", "radial"}, {"degree", w.theta}}; break;
    case HomogeneousWeight::Kind::CoordinatePower: j = {{"kind", "coordinate"}, {"axis", w.axis}, {"degree", w.theta}}; break;
    case HomogeneousWeight::Kind::ThetaNormPower: j = {{"kind", "theta_norm"}, {"theta", w.theta}, {"degree", w.outer}}; break;
    case HomogeneousWeight::Kind::Custom: j = {{"kind", "custom"}, {"degree", w.custom_degree}}; break;
    }
    if (w.scale != 1.0) j["scale"] = w.scale;
    return j;
}

inline ConeDomain parse_cone(const json& j, int d) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "full" || s == "full_space") return ConeDomain::full_space(d);
        if (s == "orthant" || s == "positive_orthant") return ConeDomain::positive_orthant(d);
        throw ParseError("problem.cone: expected \"full\", \"orthant\" or {\"angles\": ...}");
    }
    reject_unknown(j, "problem.cone", {"angles"});
    std::vector<Interval> box;
    for (const auto& a : j.at("angles")) {
        if (!a.is_array() || a.size() != 2) throw ParseError("problem.cone.angles: expected [lo, hi] pairs");
        box.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return ConeDomain::angular_box(d, box);
}

inline ExponentTriple parse_exponents(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("problem.exponents: expected [p, q, r]");
    return {as_real(j[0], "problem.exponents[0]"), as_real(j[1], "problem.exponents[1]"),
            as_real(j[2], "problem.exponents[2]")};
}

inline DiscreteInstance parse_instance(const json& j) {
    reject_unknown(j, "oracle.instance", {"mu", "psi", "phi", "exponents", "delta", "t0_mask", "points"});
    DiscreteInstance in;
    try {
        in.mu = j.at("mu").get<std::vector<double>>();
        in.psi = j.at("psi").get<std::vector<double>>();
        in.phi = j.at("phi").get<std::vector<std::vector<double>>>();
        in.exponents = parse_exponents(j.at("exponents"));
        in.delta = as_real(j.at("delta"), "oracle.instance.delta");
        if (j.contains("t0_mask")) in.t0_mask = j.at("t0_mask").get<std::vector<bool>>();
        if (j.contains("points")) in.points = j.at("points").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("oracle.instance: ") + e.what());
    }
    return in;
}

} // namespace detail

/** \brief Parse a config document. \throws ParseError on schema violations. */
inline Config parse_config(const json& root) {
    using namespace detail;
    Config c;
    reject_unknown(root, "config", {"problem", "quadrature", "options", "experiment", "oracle", "output"});
    auto* N = &c.notices;
    const json empty = json::object();
    const json& pr = root.contains("problem") ? root.at("problem") : empty;
    const json& ex = root.contains("experiment") ? root.at("experiment") : empty;
    const json& qd = root.contains("quadrature") ? root.at("quadrature") : empty;
    const json& op = root.contains("options") ? root.at("options") : empty;
    const json& orc = root.contains("oracle") ? root.at("oracle") : empty;
    const json& out = root.contains("output") ? root.at("output") : empty;

    reject_unknown(pr, "problem",
                   {"family", "dimension", "cone", "exponents", "delta", "psi", "phis", "carlson", "laplacian"});
    const auto fam = get_or<std::string>(pr, "family", "homogeneous", "problem", N);
    if (fam == "homogeneous") c.family = Family::Homogeneous;
    else if (fam == "fourier") c.family = Family::Fourier;
    else if (fam == "carlson") c.family = Family::Carlson;
    else if (fam == "laplacian") c.family = Family::Laplacian;
    else throw ParseError("problem.family: expected homogeneous, fourier, carlson or laplacian");

    const int d = get_or<int>(pr, "dimension", 1, "problem", N);
    if (d < 1 || d > kMaxDim) throw ParseError("problem.dimension: must lie in [1, 8]");
    const double delta = real_or(pr, "delta", 1.0, "problem", N);

    if (c.family == Family::Laplacian) {
        for (const char* k : {"cone", "exponents", "psi", "phis", "carlson"})
            if (pr.contains(k)) throw ParseError(std::string("problem.") + k + ": not used by the laplacian family");
        const json& lp = pr.contains("laplacian") ? pr.at("laplacian") : empty;
        reject_unknown(lp, "problem.laplacian", {"theta", "eta", "nu"});
        c.laplacian.d = d;
        c.laplacian.delta = delta;
        c.laplacian.theta = real_or(lp, "theta", 2.0, "problem.laplacian", N);
        c.laplacian.eta = real_or(lp, "eta", 1.0, "problem.laplacian", N);
        c.laplacian.nu = real_or(lp, "nu", 2.0, "problem.laplacian", N);
        c.spec = laplacian_problem(c.laplacian);
    } else if (c.family == Family::Carlson) {
        for (const char* k : {"cone", "psi", "phis", "laplacian"})
            if (pr.contains(k)) throw ParseError(std::string("problem.") + k + ": not used by the carlson family");
        const json& cp = pr.contains("carlson") ? pr.at("carlson") : empty;
        reject_unknown(cp, "problem.carlson", {"lambda", "mu"});
        if (!pr.contains("exponents")) throw ParseError("problem.exponents: required");
        const ExponentTriple e = parse_exponents(pr.at("exponents"));
        const double lam = real_or(cp, "lambda", 1.0, "problem.carlson", N);
        const double mu = real_or(cp, "mu", 1.0, "problem.carlson", N);
        c.carlson = make_carlson_params(d, e, lam, mu);
        c.spec = to_problem_spec(carlson_three_weight(c.carlson), delta);
    } else {
        for (const char* k : {"carlson", "laplacian"})
            if (pr.contains(k)) throw ParseError(std::string("problem.") + k + ": not used by this family");
        if (!pr.contains("exponents")) throw ParseError("problem.exponents: required");
        if (!pr.contains("phis") || !pr.at("phis").is_array() || pr.at("phis").empty())
            throw ParseError("problem.phis: required non-empty array");
        c.spec.cone = pr.contains("cone") ? parse_cone(pr.at("cone"), d)
                                          : (c.family == Family::Fourier ? ConeDomain::full_space(d)
                                                                         : ConeDomain::positive_orthant(d));
        if (!pr.contains("cone")) N->push_back(std::string("problem.cone defaulted to ") +
                                               (c.family == Family::Fourier ? "\"full\"" : "\"orthant\""));
        c.spec.exponents = parse_exponents(pr.at("exponents"));
        c.spec.delta = delta;
        c.spec.normalization = c.family == Family::Fourier ? Normalization::FourierPlancherel : Normalization::Plain;
        if (pr.contains("psi")) {
            c.spec.psi = parse_weight(pr.at("psi"), "problem.psi", d);
        } else {
            N->push_back("problem.psi defaulted to {\"kind\":\"radial\",\"degree\":0}");
        }
        int k = 0;
        for (const auto& w : pr.at("phis")) c.spec.phis.push_back(parse_weight(w, "problem.phis[" + std::to_string(k++) + "]", d));
    }

    reject_unknown(qd, "quadrature", {"order", "rel_tol", "max_refinements", "grading_levels"});
    c.quadrature.base_order = get_or<int>(qd, "order", c.quadrature.base_order, "quadrature", nullptr);
    c.quadrature.rel_tol = real_or(qd, "rel_tol", c.quadrature.rel_tol, "quadrature", nullptr);
    c.quadrature.max_refinements = get_or<int>(qd, "max_refinements", c.quadrature.max_refinements, "quadrature", nullptr);
    c.quadrature.grading_levels = get_or<int>(qd, "grading_levels", c.quadrature.grading_levels, "quadrature", nullptr);

    reject_unknown(op, "options", {"symmetry_tol", "direct_check", "literal_linf_exponent", "literal_power_weight_exponent"});
    c.options.symmetry_tol = real_or(op, "symmetry_tol", c.options.symmetry_tol, "options", nullptr);
    c.options.direct_check = get_or<bool>(op, "direct_check", false, "options", nullptr);
    c.options.literal_linf_exponent = get_or<bool>(op, "literal_linf_exponent", false, "options", nullptr);
    c.options.literal_power_weight_exponent = get_or<bool>(op, "literal_power_weight_exponent", false, "options", nullptr);

    reject_unknown(ex, "experiment", {"deltas", "trials", "seed", "grid", "suite", "corrupt_lambda0", "tol"});
    if (ex.contains("deltas")) {
        c.deltas.clear();
        for (const auto& v : ex.at("deltas")) c.deltas.push_back(as_real(v, "experiment.deltas"));
        if (c.deltas.empty()) throw ParseError("experiment.deltas: must not be empty");
    }
    c.trials = get_or<int>(ex, "trials", c.trials, "experiment", nullptr);
    c.seed = get_or<std::uint64_t>(ex, "seed", c.seed, "experiment", nullptr);
    c.suite = get_or<std::string>(ex, "suite", c.suite, "experiment", nullptr);
    c.corrupt_lambda0 = real_or(ex, "corrupt_lambda0", 1.0, "experiment", nullptr);
    c.tol = real_or(ex, "tol", c.tol, "experiment", nullptr);
    if (ex.contains("grid")) {
        const json& g = ex.at("grid");
        reject_unknown(g, "experiment.grid", {"kind", "n", "extent", "radial_order", "panel_width", "angular_panels", "angular_order"});
        c.grid.kind = get_or<std::string>(g, "kind", c.grid.kind, "experiment.grid", nullptr);
        if (c.grid.kind != "auto" && c.grid.kind != "lattice" && c.grid.kind != "polar")
            throw ParseError("experiment.grid.kind: expected auto, lattice or polar");
        c.grid.n = get_or<int>(g, "n", c.grid.n, "experiment.grid", nullptr);
        c.grid.extent = real_or(g, "extent", c.grid.extent, "experiment.grid", nullptr);
        c.grid.polar.radial_order = get_or<int>(g, "radial_order", c.grid.polar.radial_order, "experiment.grid", nullptr);
        c.grid.polar.panel_width = real_or(g, "panel_width", c.grid.polar.panel_width, "experiment.grid", nullptr);
        c.grid.polar.angular_panels = get_or<int>(g, "angular_panels", c.grid.polar.angular_panels, "experiment.grid", nullptr);
        c.grid.polar.angular_order = get_or<int>(g, "angular_order", c.grid.polar.angular_order, "experiment.grid", nullptr);
    }

    reject_unknown(orc, "oracle", {"instance", "resolution", "refine_rounds"});
    if (orc.contains("instance")) {
        c.has_instance = true;
        c.instance = parse_instance(orc.at("instance"));
    }
    c.oracle_resolution = real_or(orc, "resolution", c.oracle_resolution, "oracle", nullptr);
    c.oracle_rounds = get_or<int>(orc, "refine_rounds", c.oracle_rounds, "oracle", nullptr);

    reject_unknown(out, "output", {"path", "format"});
    c.out_path = get_or<std::string>(out, "path", "", "output", nullptr);
    c.format = get_or<std::string>(out, "format", "", "output", nullptr);
    if (!c.format.empty() && c.format != "json" && c.format != "csv")
        throw ParseError("output.format: expected json or csv");
    return c;
}

/** \brief Read and parse a config file. \throws ParseError. */
inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

/** \brief JSON form of a report; infinities become "inf". */
inline json report_json(const RecoveryReport& r) {
    using detail::real_json;
    json j;
    j["E"] = real_json(r.E);
    j["gamma"] = real_json(r.gamma);
    j["q_star"] = real_json(r.q_star);
    j["I"] = real_json(r.I);
    j["constant"] = real_json(r.constant);
    j["constant_name"] = r.constant_name;
    for (const char* sec : {"multipliers", "values", "residuals"}) j[sec] = json::object();
    for (const auto& [k, v] : r.multipliers) j["multipliers"][k] = real_json(v);
    for (const auto& [k, v] : r.values) j["values"][k] = real_json(v);
    for (const auto& [k, v] : r.residuals) j["residuals"][k] = real_json(v);
    j["flags"] = r.flags;
    return j;
}

/** \brief Inverse of report_json. \throws ParseError on unknown keys. */
inline RecoveryReport report_from_json(const json& j) {
    using detail::as_real;
    detail::reject_unknown(j, "report",
                           {"E", "gamma", "q_star", "I", "constant", "constant_name", "multipliers", "values", "residuals", "flags"});
    RecoveryReport r;
    r.E = as_real(j.at("E"), "report.E");
    r.gamma = as_real(j.at("gamma"), "report.gamma");
    r.q_star = as_real(j.at("q_star"), "report.q_star");
    r.I = as_real(j.at("I"), "report.I");
    r.constant = as_real(j.at("constant"), "report.constant");
    r.constant_name = j.at("constant_name").get<std::string>();
    for (auto it = j.at("multipliers").begin(); it != j.at("multipliers").end(); ++it) r.multipliers[it.key()] = as_real(*it, it.key());
    for (auto it = j.at("values").begin(); it != j.at("values").end(); ++it) r.values[it.key()] = as_real(*it, it.key());
    for (auto it = j.at("residuals").begin(); it != j.at("residuals").end(); ++it) r.residuals[it.key()] = as_real(*it, it.key());
    r.flags = j.at("flags").get<std::vector<std::string>>();
    return r;
}

inline json instance_json(const DiscreteInstance& in) {
    using detail::real_json;
    json j;
    j["mu"] = in.mu;
    j["psi"] = in.psi;
    j["phi"] = in.phi;
    j["exponents"] = {real_json(in.exponents.p), real_json(in.exponents.q), real_json(in.exponents.r)};
    j["delta"] = in.delta;
    if (!in.t0_mask.empty()) j["t0_mask"] = in.t0_mask;
    if (!in.points.empty()) j["points"] = in.points;
    return j;
}

} // namespace orec

#endif // OREC_CONFIG_HPP
