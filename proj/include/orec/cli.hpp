/**
 * @file cli.hpp
 * @brief The five commands (constants, filter, verify, simulate, oracle)
 * behind the orec executable.
 */
#ifndef OREC_CLI_HPP
#define OREC_CLI_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "extremal.hpp"
#include "filters.hpp"
#include "oracle.hpp"
#include "recovery_engine.hpp"
#include "specialfn.hpp"

namespace orec {

/** \brief Process exit codes. */
enum ExitCode : int { kExitOk = 0, kExitParse = 1, kExitDomain = 2, kExitVerify = 3 };

/** \brief Flags that override the config. */
struct RunOptions {
    std::string format;                  ///< empty: per-command default
    int threads = 0;                     ///< 0: hardware count
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

namespace csv {

inline std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char c : s) {
        if (c == '"') o += '"';
        o += c;
    }
    return o + '"';
}

inline void row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << field(cells[i]);
    os << '\n';
}

} // namespace csv

namespace detail {

inline int thread_count(const RunOptions& o) {
    if (o.threads > 0) return o.threads;
    const unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : static_cast<int>(h);
}

inline std::string format_of(const RunOptions& o, const Config& c, const char* fallback) {
    if (!o.format.empty()) return o.format;
    if (!c.format.empty()) return c.format;
    return fallback;
}

/** \brief Copy of the config at another δ. */
inline Config with_delta(Config c, double delta) {
    c.spec.delta = delta;
    c.laplacian.delta = delta;
    return c;
}

inline double lattice_extent(const Config& c) {
    if (c.grid.extent > 0.0) return c.grid.extent;
    if (c.family == Family::Laplacian) {
        // puts the equality point c0(1,…,1) on node 3n/4 of each axis
        const double c0 = laplacian_equality_point(c.laplacian)[0];
        const int n = c.grid.n;
        const int k = (3 * n) / 4;
        return c0 * n / (2.0 * k + 1.0 - n);
    }
    return 10.0;
}

inline FrequencyGrid make_grid(const Config& c) {
    const bool lattice = c.grid.kind == "lattice" || (c.grid.kind == "auto" && c.family == Family::Laplacian);
    if (lattice) return tensor_lattice(c.spec.cone, lattice_extent(c), c.grid.n);
    if (c.family == Family::Laplacian) throw DomainError("laplacian family: use a lattice grid");
    return profile_polar_grid(c.spec, c.quadrature, c.grid.polar);
}

} // namespace detail

/** \brief Closed-form report of the configured problem. */
inline RecoveryReport compute_report(const Config& c) {
    switch (c.family) {
    case Family::Laplacian: return laplacian_error(c.laplacian);
    case Family::Carlson: {
        RecoveryReport rep = recovery_error_homogeneous(c.spec, c.quadrature, c.options);
        const CarlsonResult cr = carlson_report(c.carlson, c.quadrature, c.options);
        rep.values["K"] = rep.constant;
        rep.values["C_general"] = cr.C_general;
        rep.values["angular_exponent"] = cr.exponent;
        rep.constant = cr.C;
        rep.constant_name = "C";
        rep.residuals["carlson_vs_general"] = cr.residual;
        return rep;
    }
    default: return recovery_error(c.spec, c.quadrature, c.options);
    }
}

/** \brief Optimal method of the configured problem. */
inline FilterSpec compute_filter(const Config& c, const RecoveryReport& rep) {
    if (c.family == Family::Laplacian) return laplacian_filter(c.laplacian);
    return optimal_filter(c.spec, rep);
}

/** \brief E, γ, q*, I, the named constant, multipliers and residuals. */
inline int cmd_constants(const Config& c, const RunOptions& o, std::ostream& out) {
    const RecoveryReport rep = compute_report(c);
    if (detail::format_of(o, c, "json") == "csv") {
        csv::row(out, {"key", "value"});
        csv::row(out, {"E", csv::num(rep.E)});
        csv::row(out, {"gamma", csv::num(rep.gamma)});
        csv::row(out, {"q_star", csv::num(rep.q_star)});
        csv::row(out, {"I", csv::num(rep.I)});
        csv::row(out, {"constant", csv::num(rep.constant)});
        csv::row(out, {"constant_name", rep.constant_name});
        for (const auto& [k, v] : rep.multipliers) csv::row(out, {"multipliers." + k, csv::num(v)});
        for (const auto& [k, v] : rep.values) csv::row(out, {"values." + k, csv::num(v)});
        for (const auto& [k, v] : rep.residuals) csv::row(out, {"residuals." + k, csv::num(v)});
        for (const auto& f : rep.flags) csv::row(out, {"flag", f});
    } else {
        out << report_json(rep).dump(2) << '\n';
    }
    return kExitOk;
}

/** \brief Filter table: t₁..t_d, alpha, alpha·psi, one row per grid node. */
inline int cmd_filter(const Config& c, const RunOptions& o, std::ostream& out) {
    const RecoveryReport rep = compute_report(c);
    const FilterSpec f = compute_filter(c, rep);
    const FrequencyGrid g = detail::make_grid(c);
    const FilterTable t = emit_table(f, g);
    for (double a : t.alpha)
        if (!(a >= 0.0 && a <= 1.0)) throw DomainError("filter: multiplier outside [0, 1]");
    if (detail::format_of(o, c, "csv") == "json") {
        json j;
        j["kind"] = f.kind;
        j["dimension"] = t.d;
        j["nodes"] = t.nodes;
        j["alpha"] = t.alpha;
        j["alpha_psi"] = t.alpha_psi;
        out << j.dump() << '\n';
        return kExitOk;
    }
    std::vector<std::string> head;
    for (int k = 0; k < t.d; ++k) head.push_back("t" + std::to_string(k + 1));
    head.push_back("alpha");
    head.push_back("alpha_psi");
    csv::row(out, head);
    for (std::size_t i = 0; i < t.alpha.size(); ++i) {
        std::vector<std::string> r;
        for (int k = 0; k < t.d; ++k) r.push_back(csv::num(t.nodes[i * t.d + k]));
        r.push_back(csv::num(t.alpha[i]));
        r.push_back(csv::num(t.alpha_psi[i]));
        csv::row(out, r);
    }
    return kExitOk;
}

/** \brief One line of a verification report. */
struct Check {
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::string note;
};

namespace detail {

inline Check at_most(std::string name, double v, double tol, std::string note = {}) {
    return {std::move(name), v, tol, std::isfinite(v) && v <= tol, std::move(note)};
}

/** \brief Relative deviation of the extremal profile's noise and constraint integrals from δ^p and 1. */
inline double stationarity_residual_of(const ProblemSpec& spec, const QuadratureConfig& cfg, double corrupt) {
    const ProblemSpec s = plain_equivalent(spec).spec;
    const PolarData t = polar_data(s, cfg);
    MultiplierSolution sol = closed_form_multipliers(s, t.I1, t.I2);
    sol.lambda0 *= corrupt;
    const ExtremalProfile prof = build_profile(s, sol);
    const ProfileIntegrals pi = profile_integrals(prof, cfg);
    double worst = rel_diff(pi.noise, std::pow(s.delta, s.exponents.p));
    for (double v : pi.constraints) worst = std::max(worst, rel_diff(v, 1.0));
    return worst;
}

inline double sphere_area_expected(const ConeDomain& cone) {
    const int d = cone.dim();
    const double full = 2.0 * std::exp(0.5 * d * std::log(std::numbers::pi) - log_gamma(0.5 * d));
    if (cone.kind() == ConeDomain::Kind::FullSpace) return full;
    if (cone.kind() == ConeDomain::Kind::PositiveOrthant) return full / std::pow(2.0, d);
    return std::nan("");
}

} // namespace detail

/** \brief Run every check of the suite on the configured problem. */
inline std::vector<Check> verification_checks(const Config& c, const RunOptions& o) {
    const double tol = o.tol.value_or(c.tol);
    const int threads = detail::thread_count(o);
    std::vector<Check> out;
    const RecoveryReport rep = compute_report(c);
    for (const auto& [k, v] : rep.residuals) {
        const double t = k == "multiplier_identity" ? std::min(tol, 1e-12) : tol;
        out.push_back(detail::at_most("residual." + k, v, t));
    }
    QuadratureConfig q = c.quadrature;
    q.threads = threads;

    if (c.family != Family::Laplacian) {
        if (c.spec.cone.kind() != ConeDomain::Kind::AngularBox && c.spec.d() >= 2) {
            const double got = sphere_integral([](const Direction&) { return 1.0; }, c.spec.cone, q).value;
            out.push_back(detail::at_most("quadrature.sphere_area", std::fabs(got - detail::sphere_area_expected(c.spec.cone)), 1e-10));
        }
        if (!std::isinf(c.spec.exponents.p)) {
            const double r = detail::stationarity_residual_of(c.spec, q, c.corrupt_lambda0);
            out.push_back(detail::at_most("extremal.stationarity", r, 1e-7,
                                          c.corrupt_lambda0 != 1.0 ? "lambda0 scaled by " + csv::num(c.corrupt_lambda0) : ""));
        }
        const ExponentTriple e = effective_exponents(c.spec);
        if (classify_regime(e) == Regime::P && !std::isinf(e.p) && !std::isinf(e.r)) {
            out.push_back(detail::at_most("lemma3.min_check", lemma3_min_check(1.0, 1.0, e.p, e.q, e.r, 10000, c.seed), 1e-12));
            out.push_back(detail::at_most("lemma3.root_residual", lemma3_residual(1.0, 1.0, e.p, e.q, e.r), 1e-12 * e.q));
        }
    } else {
        const FilterSpec f = laplacian_filter(c.laplacian);
        const auto smp = laplacian_samples(c.laplacian, 100000, c.seed);
        out.push_back(detail::at_most("filter.check_aa_excess", check_aa(f.multiplier, c.laplacian, smp) - 1.0, 1e-12));
    }

    const FilterSpec f = compute_filter(c, rep);
    const FrequencyGrid g = detail::make_grid(c);
    const ExtremalPair ep = c.family == Family::Laplacian ? laplacian_extremal_pair(c.laplacian, g)
                                                         : extremal_pair(c.spec, rep, g, q);
    if (c.family != Family::Laplacian)
        out.push_back(detail::at_most("extremal.rescale", std::fabs(ep.rescale - 1.0), 1e-6));
    AdversaryOptions ao;
    ao.trials = c.trials;
    ao.seed = o.seed.value_or(c.seed);
    ao.threads = threads;
    const AdversaryResult ar = adversary(c.spec, f, rep, g, ao, q, &ep);
    out.push_back(detail::at_most("sandwich.lower", 0.99 - ar.sup_error / rep.E, 0.0, "sup/E, needs >= 0.99"));
    out.push_back(detail::at_most("sandwich.upper", ar.sup_error / rep.E - 1.0, 1e-6, "sup/E - 1"));
    return out;
}

inline int cmd_verify(const Config& c, const RunOptions& o, std::ostream& out) {
    const auto checks = verification_checks(c, o);
    bool all = true;
    for (const auto& ch : checks) all = all && ch.pass;
    if (detail::format_of(o, c, "json") == "csv") {
        csv::row(out, {"check", "value", "tol", "pass", "note"});
        for (const auto& ch : checks) csv::row(out, {ch.name, csv::num(ch.value), csv::num(ch.tol), ch.pass ? "1" : "0", ch.note});
    } else {
        json j;
        j["pass"] = all;
        j["checks"] = json::array();
        for (const auto& ch : checks)
            j["checks"].push_back({{"name", ch.name}, {"value", detail::real_json(ch.value)}, {"tol", ch.tol}, {"pass", ch.pass}, {"note", ch.note}});
        out << j.dump(2) << '\n';
    }
    return all ? kExitOk : kExitVerify;
}

/** \brief One row of a simulation. */
struct SimulationRow {
    double delta = 0.0, E = 0.0, sup = 0.0, ratio = 0.0;
};

/** \brief Least-squares slope of ln y against ln x; NaN for fewer than two points. */
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return std::nan("");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxx > 0.0 ? sxy / sxx : std::nan("");
}

struct Simulation {
    std::vector<SimulationRow> rows;
    double slope = std::nan("");
    double slope_E = std::nan("");
    double gamma = 0.0;
};

inline Simulation simulate(const Config& base, const RunOptions& o) {
    Simulation sim;
    const int threads = detail::thread_count(o);
    std::vector<double> ds, sups, es;
    for (double delta : base.deltas) {
        const Config c = detail::with_delta(base, delta);
        QuadratureConfig q = c.quadrature;
        q.threads = threads;
        const RecoveryReport rep = compute_report(c);
        const FilterSpec f = compute_filter(c, rep);
        const FrequencyGrid g = detail::make_grid(c);
        const ExtremalPair ep = c.family == Family::Laplacian ? laplacian_extremal_pair(c.laplacian, g)
                                                             : extremal_pair(c.spec, rep, g, q);
        AdversaryOptions ao;
        ao.trials = c.trials;
        ao.seed = o.seed.value_or(c.seed);
        ao.threads = threads;
        const AdversaryResult ar = adversary(c.spec, f, rep, g, ao, q, &ep);
        sim.rows.push_back({delta, rep.E, ar.sup_error, ar.sup_error / rep.E});
        sim.gamma = rep.gamma;
        ds.push_back(delta);
        sups.push_back(ar.sup_error);
        es.push_back(rep.E);
    }
    sim.slope = loglog_slope(ds, sups);
    sim.slope_E = loglog_slope(ds, es);
    return sim;
}

/** \brief δ, E_formula, sup_error, ratio per δ, with slopes against γ; exit 3 on a ratio or slope violation. */
inline int cmd_simulate(const Config& c, const RunOptions& o, std::ostream& out) {
    const Simulation sim = simulate(c, o);
    bool ok = true;
    for (const auto& r : sim.rows) ok = ok && r.ratio >= 0.99 && r.ratio <= 1.0 + 1e-6;
    if (std::isfinite(sim.slope)) ok = ok && std::fabs(sim.slope - sim.gamma) <= 1e-2;
    auto opt = [](double v) { return std::isfinite(v) ? csv::num(v) : std::string(); };
    if (detail::format_of(o, c, "csv") == "json") {
        json j;
        j["rows"] = json::array();
        for (const auto& r : sim.rows) j["rows"].push_back({{"delta", r.delta}, {"E_formula", r.E}, {"sup_error", r.sup}, {"ratio", r.ratio}});
        j["slope"] = std::isfinite(sim.slope) ? json(sim.slope) : json(nullptr);
        j["slope_E"] = std::isfinite(sim.slope_E) ? json(sim.slope_E) : json(nullptr);
        j["gamma"] = sim.gamma;
        j["pass"] = ok;
        out << j.dump(2) << '\n';
    } else {
        csv::row(out, {"delta", "E_formula", "sup_error", "ratio", "slope", "slope_E", "gamma"});
        for (const auto& r : sim.rows)
            csv::row(out, {csv::num(r.delta), csv::num(r.E), csv::num(r.sup), csv::num(r.ratio), opt(sim.slope),
                           opt(sim.slope_E), csv::num(sim.gamma)});
    }
    return ok ? kExitOk : kExitVerify;
}

/** \brief Brute-force vs KKT on the configured instance, or continuum extrapolation of the problem. */
inline int cmd_oracle(const Config& c, const RunOptions& o, std::ostream& out) {
    const std::string fmt = detail::format_of(o, c, "json");
    const double tol = o.tol.value_or(2e-4);
    if (c.has_instance) {
        const OracleReport r = oracle_report(c.instance, c.oracle_resolution, c.oracle_rounds, detail::thread_count(o));
        const bool ok = r.rel_gap <= tol;
        if (fmt == "csv") {
            csv::row(out, {"brute_value", "kkt_value", "rel_gap", "resolution", "refine_rounds"});
            csv::row(out, {csv::num(r.brute_value), csv::num(r.kkt_value), csv::num(r.rel_gap), csv::num(r.resolution),
                           std::to_string(r.refine_rounds)});
        } else {
            json j{{"instance", instance_json(c.instance)},
                   {"brute_value", r.brute_value},
                   {"kkt_value", r.kkt_value},
                   {"rel_gap", r.rel_gap},
                   {"resolution", r.resolution},
                   {"refine_rounds", r.refine_rounds},
                   {"pass", ok}};
            out << j.dump(2) << '\n';
        }
        return ok ? kExitOk : kExitVerify;
    }
    if (c.family == Family::Laplacian) throw DomainError("oracle: laplacian family has no discrete oracle");
    const std::vector<int> counts = c.spec.d() == 1 ? std::vector<int>{64, 128, 256} : std::vector<int>{8, 16, 32};
    const ContinuumResult r = continuum_extrapolation(c.spec, counts, c.quadrature);
    const bool ok = r.stable && r.rel_error <= 1e-3;
    if (fmt == "csv") {
        csv::row(out, {"atoms", "value"});
        for (std::size_t i = 0; i < r.values.size(); ++i) csv::row(out, {std::to_string(r.counts[i]), csv::num(r.values[i])});
        csv::row(out, {"extrapolated", csv::num(r.extrapolated)});
        csv::row(out, {"reference", csv::num(r.reference)});
        csv::row(out, {"rel_error", csv::num(r.rel_error)});
    } else {
        json j{{"counts", r.counts}, {"values", r.values}, {"extrapolated", r.extrapolated}, {"order", r.order},
               {"reference", r.reference}, {"rel_error", r.rel_error}, {"stable", r.stable}, {"note", r.note}, {"pass", ok}};
        out << j.dump(2) << '\n';
    }
    return ok ? kExitOk : kExitVerify;
}

/** \brief Dispatch a command; library errors map to exit codes 1 and 2 with the message on err. */
inline int run_command(const std::string& cmd, const Config& c, const RunOptions& o, std::ostream& out, std::ostream& err) {
    try {
        if (cmd == "constants") return cmd_constants(c, o, out);
        if (cmd == "filter") return cmd_filter(c, o, out);
        if (cmd == "verify") return cmd_verify(c, o, out);
        if (cmd == "simulate") return cmd_simulate(c, o, out);
        if (cmd == "oracle") return cmd_oracle(c, o, out);
        err << "error: unknown command '" << cmd << "'\n";
        return kExitParse;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitParse;
    } catch (const Error& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitDomain;
    }
}

} // namespace orec

#endif // OREC_CLI_HPP
