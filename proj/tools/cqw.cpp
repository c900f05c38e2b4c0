// cqw: design, simulate and analyze a cascaded-quantum-well photon source.
//
//   cqw design   --config well.json --out runs/design
//   cqw simulate --n 22 --ch 0.70710678 --cl 0.70710678 --branching symmetric
//   cqw verify   --n 12 --branching symmetric --seed 7 --samples 200000

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cqw/cli_io.hpp"
#include "cqw/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cascaded quantum well multiphoton source"};
    app.set_help_flag("-h,--help");

    cqw::FlagOverrides flags;
    std::string command;
    app.add_option("command", command, "design | levels | simulate | analyze | verify | audit")
        ->required()
        ->check(CLI::IsMember({"design", "levels", "simulate", "analyze", "verify", "audit"}));

    auto opt = [&](auto& target, const char* name, const char* help) {
        return app.add_option_function<typename std::decay_t<decltype(target)>::value_type>(
            name, [&target](const auto& v) { target = v; }, help);
    };
    opt(flags.config_path, "--config", "JSON config file");
    opt(flags.out, "--out", "output directory");
    opt(flags.format, "--format", "json | csv | both");
    opt(flags.n, "--n", "total photon number N");
    opt(flags.ch, "--ch", "initial amplitude of the upper sublevel");
    opt(flags.cl, "--cl", "initial amplitude of the lower sublevel");
    opt(flags.branching, "--branching", "symmetric | dipole-only | physical | manual");
    opt(flags.seed, "--seed", "sampling seed (verify)");
    opt(flags.samples, "--samples", "Monte Carlo walks (verify)");
    opt(flags.sign_mode, "--sign-mode", "all-positive | cmt-signs (audit, verify)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        auto report = cqw::JsonValue::object();
        report.set("error", "validation").set("message", std::string(e.what()));
        std::cerr << report.dump(false) << '\n';
        return cqw::kExitValidation;
    }
    flags.mode = command;
    return cqw::run_guarded(flags, std::cerr);
}
