// orec: optimal recovery constants, filters and verification from a JSON config.
//
//   orec constants --config problem.json
//   orec filter    --config problem.json --out alpha.csv
//   orec verify    --config problem.json --threads 8
//   orec simulate  --config problem.json --seed 7
//   orec oracle    --config instance.json

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "orec/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Optimal recovery of operators from noisy data"};
    app.require_subcommand(1, 1);

    std::string config_path, out_path, format;
    int threads = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "write the result here instead of stdout");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", threads, "worker threads (default: hardware count)")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", seed, "seed of the adversary and samplers");
        sub->add_option("--tol", tol, "tolerance of residual checks")->check(CLI::PositiveNumber);
    };
    for (const char* name : {"constants", "filter", "verify", "simulate", "oracle"}) {
        static const std::map<std::string, std::string> help{
            {"constants", "optimal error E, exponent, sharp constant and multipliers"},
            {"filter", "table of the optimal multiplier on a frequency grid"},
            {"verify", "residual, oracle and sandwich checks (exit 3 on failure)"},
            {"simulate", "adversarial worst-case error across a delta grid"},
            {"oracle", "brute-force vs KKT value, or continuum extrapolation"}};
        add_common(app.add_subcommand(name, help.at(name)));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : orec::kExitParse;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    const CLI::App* sub = app.get_subcommands().front();

    orec::RunOptions opt;
    opt.format = format;
    opt.threads = threads;
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--tol")) opt.tol = tol;

    orec::Config cfg;
    try {
        cfg = orec::load_config(config_path);
    } catch (const orec::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return orec::kExitParse;
    } catch (const orec::Error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return orec::kExitDomain;
    }
    for (const auto& n : cfg.notices) std::cerr << "notice: " << n << '\n';
    if (out_path.empty()) out_path = cfg.out_path;

    std::ostringstream buf;
    const int code = orec::run_command(cmd, cfg, opt, buf, std::cerr);
    if (out_path.empty()) {
        std::cout << buf.str();
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return orec::kExitParse;
        }
        f << buf.str();
    }
    return code;
}
