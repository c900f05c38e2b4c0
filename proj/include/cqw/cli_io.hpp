#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cqw/cascade.hpp"
#include "cqw/coupled_modes.hpp"
#include "cqw/errors.hpp"
#include "cqw/path_oracle.hpp"

// Configuration ingestion and the per-command pipelines of the `cqw` tool.
//
// Config document (every key optional unless the command needs it):
//   mode          design | levels | simulate | analyze | verify | audit
//   well          {v1, v2, b, d, period}
//   n_total       integer >= 1
//   init          {ch, cl}
//   branching     {kind, p_hh, p_hl, p_lh, p_ll}
//   output        {dir, format: json | csv | both}
//   seed          unsigned integer
//   sample_count  unsigned integer
//   sign_mode     all-positive | cmt-signs
//   tolerances    {energy, design}
// Unknown keys are rejected with their full path.

namespace cqw {

enum class Command { design, levels, simulate, analyze, verify, audit };

std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

enum class OutputFormat { json, csv, both };

struct WellConfig {
    std::optional<double> v1, v2, b, d, period;
};

struct BranchingConfig {
    std::optional<Weighting> kind;
    std::optional<double> p_hh, p_hl, p_lh, p_ll;
};

struct RunConfig {
    Command mode = Command::simulate;
    WellConfig well;
    std::optional<int> n_total;
    InitialExcitation init;
    BranchingConfig branching;
    std::filesystem::path out_dir = ".";
    OutputFormat format = OutputFormat::both;
    std::uint64_t seed = 0;
    std::uint64_t sample_count = 100000;
    SignMode sign_mode = SignMode::all_positive;
    double energy_tol = kDefaultEnergyTol;
    double design_tol = kDefaultDesignTol;
};

// Command-line values; each one replaces the matching config entry.
struct FlagOverrides {
    std::optional<std::string> mode;
    std::optional<std::string> config_path;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> branching;
    std::optional<std::string> sign_mode;
    std::optional<int> n;
    std::optional<double> ch;
    std::optional<double> cl;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
};

// Parses a JSON document (may be empty) with flag overrides applied.
// ValidationError names the offending key path.
RunConfig parse_config(const std::string& json_text, const FlagOverrides& flags = {});

// Reads flags.config_path when set, then parse_config.
RunConfig load_config(const FlagOverrides& flags);

// Branching model for a config: manual entries, symmetric, or derived from
// the designed well for dipole-only / physical.
BranchingModel resolve_branching(const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitVerifyFailed = 4;
inline constexpr double kVerifyTolerance = 1e-10;

int exit_code_for(const Error& e);

// Runs the pipeline and writes its files. Library errors propagate; the
// return value is 0 or kExitVerifyFailed.
int run(const RunConfig& config);

// Config load plus run, with errors reported as one-line JSON on `err`.
int run_guarded(const FlagOverrides& flags, std::ostream& err);

}  // namespace cqw
