#include "cqw/cli_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "cqw/analysis.hpp"
#include "cqw/report.hpp"

namespace cqw {

using nlohmann::json;

std::string to_string(Command c) {
    switch (c) {
        case Command::design: return "design";
        case Command::levels: return "levels";
        case Command::simulate: return "simulate";
        case Command::analyze: return "analyze";
        case Command::verify: return "verify";
        case Command::audit: return "audit";
    }
    return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
    for (Command c : {Command::design, Command::levels, Command::simulate, Command::analyze,
                      Command::verify, Command::audit}) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
    throw ValidationError(path + ": " + what);
}

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            invalid(join(path, key), "unknown key");
        }
    }
}

const json* member(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& object_at(const json& obj, const char* key, const std::string& path) {
    static const json empty = json::object();
    const json* v = member(obj, key);
    if (!v) return empty;
    if (!v->is_object()) invalid(join(path, key), "must be an object");
    return *v;
}

std::optional<double> number_at(const json& obj, const char* key, const std::string& path) {
    const json* v = member(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_number()) invalid(join(path, key), "must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) invalid(join(path, key), "must be finite");
    return x;
}

std::optional<std::int64_t> integer_at(const json& obj, const char* key, const std::string& path) {
    const json* v = member(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) invalid(join(path, key), "must be an integer");
    if (v->is_number_unsigned() && v->get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
        invalid(join(path, key), "out of range");
    }
    return v->get<std::int64_t>();
}

std::optional<std::string> string_at(const json& obj, const char* key, const std::string& path) {
    const json* v = member(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_string()) invalid(join(path, key), "must be a string");
    return v->get<std::string>();
}

void forbid(const json& obj, const char* key, const std::string& path, const std::string& why) {
    if (member(obj, key)) invalid(join(path, key), why);
}

json& child(json& doc, const char* key) {
    json& c = doc[key];
    if (c.is_null()) c = json::object();
    if (!c.is_object()) invalid(key, "must be an object");
    return c;
}

// Flags win over file values. Setting one of ch/cl on the command line
// drops the other from the file so it is rederived from normalization.
void apply_flags(json& doc, const FlagOverrides& f) {
    if (f.mode) doc["mode"] = *f.mode;
    if (f.out) child(doc, "output")["dir"] = *f.out;
    if (f.format) child(doc, "output")["format"] = *f.format;
    if (f.branching) child(doc, "branching")["kind"] = *f.branching;
    if (f.sign_mode) doc["sign_mode"] = *f.sign_mode;
    if (f.n) doc["n_total"] = *f.n;
    if (f.seed) doc["seed"] = *f.seed;
    if (f.samples) doc["sample_count"] = *f.samples;
    if (f.ch || f.cl) {
        json& init = child(doc, "init");
        if (f.ch) init["ch"] = *f.ch; else init.erase("ch");
        if (f.cl) init["cl"] = *f.cl; else init.erase("cl");
    }
}

InitialExcitation parse_init(const json& doc) {
    const json& init = object_at(doc, "init", "");
    check_keys(init, "init", {"ch", "cl"});
    auto ch = number_at(init, "ch", "init");
    auto cl = number_at(init, "cl", "init");
    if (!ch && !cl) return {};
    for (auto [name, v] : {std::pair{"init.ch", ch}, std::pair{"init.cl", cl}}) {
        if (v && !(*v >= 0.0 && *v <= 1.0)) invalid(name, "must lie in [0, 1]");
    }
    if (!cl) cl = std::sqrt(std::max(0.0, 1.0 - *ch * *ch));
    if (!ch) ch = std::sqrt(std::max(0.0, 1.0 - *cl * *cl));
    const double norm = *ch * *ch + *cl * *cl;
    // Accept the usual 8-digit spellings of 1/sqrt(2) and renormalize.
    if (std::abs(norm - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "ch^2 + cl^2 = " << norm << ", expected 1";
        invalid("init", msg.str());
    }
    const double s = std::sqrt(norm);
    return InitialExcitation::make(*ch / s, *cl / s);
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const FlagOverrides& flags) {
    json doc;
    const bool blank = std::all_of(json_text.begin(), json_text.end(),
                                   [](unsigned char c) { return std::isspace(c) != 0; });
    if (blank) {
        doc = json::object();
    } else {
        try {
            doc = json::parse(json_text);
        } catch (const json::parse_error& e) {
            throw ValidationError(std::string("config is not valid JSON: ") + e.what());
        }
    }
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    apply_flags(doc, flags);

    check_keys(doc, "", {"mode", "well", "n_total", "init", "branching", "output", "seed",
                         "sample_count", "sign_mode", "tolerances"});

    RunConfig cfg;
    const auto mode_name = string_at(doc, "mode", "");
    if (!mode_name) invalid("mode", "required");
    const auto mode = parse_command(*mode_name);
    if (!mode) invalid("mode", "unknown mode '" + *mode_name + "'");
    cfg.mode = *mode;
    const std::string mode_label = "not used by " + *mode_name;

    // output
    const json& out = object_at(doc, "output", "");
    check_keys(out, "output", {"dir", "format"});
    if (auto dir = string_at(out, "dir", "output")) {
        if (dir->empty()) invalid("output.dir", "must not be empty");
        cfg.out_dir = *dir;
    }
    if (auto fmt = string_at(out, "format", "output")) {
        if (*fmt == "json") cfg.format = OutputFormat::json;
        else if (*fmt == "csv") cfg.format = OutputFormat::csv;
        else if (*fmt == "both") cfg.format = OutputFormat::both;
        else invalid("output.format", "expected json, csv or both");
        if ((cfg.mode == Command::verify || cfg.mode == Command::audit) && cfg.format == OutputFormat::csv) {
            invalid("output.format", *mode_name + " writes JSON only");
        }
    }

    // tolerances
    const json& tol = object_at(doc, "tolerances", "");
    check_keys(tol, "tolerances", {"energy", "design"});
    if (auto e = number_at(tol, "energy", "tolerances")) {
        if (!(*e > 0.0)) invalid("tolerances.energy", "must be positive");
        cfg.energy_tol = *e;
    }
    if (auto d = number_at(tol, "design", "tolerances")) {
        if (!(*d > 0.0)) invalid("tolerances.design", "must be positive");
        cfg.design_tol = *d;
    }

    // branching
    const json& br = object_at(doc, "branching", "");
    check_keys(br, "branching", {"kind", "p_hh", "p_hl", "p_lh", "p_ll"});
    if (auto kind = string_at(br, "kind", "branching")) {
        cfg.branching.kind = parse_weighting(*kind);
        if (!cfg.branching.kind) invalid("branching.kind", "expected symmetric, dipole-only, physical or manual");
    }
    cfg.branching.p_hh = number_at(br, "p_hh", "branching");
    cfg.branching.p_hl = number_at(br, "p_hl", "branching");
    cfg.branching.p_lh = number_at(br, "p_lh", "branching");
    cfg.branching.p_ll = number_at(br, "p_ll", "branching");
    const bool any_manual_entry = cfg.branching.p_hh || cfg.branching.p_hl || cfg.branching.p_lh || cfg.branching.p_ll;

    // well
    const json& well = object_at(doc, "well", "");
    check_keys(well, "well", {"v1", "v2", "b", "d", "period"});
    forbid(well, "b", "well", "set by the alignment design, not an input");
    cfg.well.v1 = number_at(well, "v1", "well");
    cfg.well.v2 = number_at(well, "v2", "well");
    cfg.well.d = number_at(well, "d", "well");
    cfg.well.period = number_at(well, "period", "well");

    auto require_well = [&] {
        for (auto [name, v] : {std::pair{"well.v1", cfg.well.v1}, std::pair{"well.v2", cfg.well.v2},
                               std::pair{"well.d", cfg.well.d}}) {
            if (!v) invalid(name, "required");
        }
        if (!(*cfg.well.v2 < *cfg.well.v1)) invalid("well.v2", "must be below well.v1");
        if (!(*cfg.well.d > 0.0)) invalid("well.d", "must be positive");
        if (cfg.well.period && !(*cfg.well.period > *cfg.well.d)) invalid("well.period", "must exceed well.d");
    };

    if (cfg.mode == Command::design || cfg.mode == Command::levels) {
        require_well();
        for (const char* key : {"n_total", "init", "seed", "sample_count", "sign_mode"}) {
            forbid(doc, key, "", mode_label);
        }
        if (cfg.mode == Command::design) {
            forbid(doc, "branching", "", mode_label);
        } else {
            if (!cfg.branching.kind) cfg.branching.kind = Weighting::physical;
            if (*cfg.branching.kind == Weighting::manual) {
                invalid("branching.kind", "levels derives branching; manual is not applicable");
            }
            if (any_manual_entry) invalid("branching", "manual entries are not used by levels");
        }
        return cfg;
    }

    // Cascade commands.
    const auto n = integer_at(doc, "n_total", "");
    if (!n) invalid("n_total", "required");
    if (*n < 1 || *n > 100000) invalid("n_total", "must lie in [1, 100000]");
    cfg.n_total = static_cast<int>(*n);
    cfg.init = parse_init(doc);

    if (!cfg.branching.kind) invalid("branching.kind", "required");
    const Weighting kind = *cfg.branching.kind;
    if (kind == Weighting::manual) {
        for (auto [name, v] : {std::pair{"branching.p_hh", cfg.branching.p_hh},
                               std::pair{"branching.p_hl", cfg.branching.p_hl},
                               std::pair{"branching.p_lh", cfg.branching.p_lh},
                               std::pair{"branching.p_ll", cfg.branching.p_ll}}) {
            if (!v) invalid(name, "required for manual branching");
        }
        // Row checks; the result is rebuilt by resolve_branching.
        BranchingModel::manual(*cfg.branching.p_hh, *cfg.branching.p_hl, *cfg.branching.p_lh,
                               *cfg.branching.p_ll);
    } else if (any_manual_entry) {
        invalid("branching", "p_* entries need kind = manual");
    }
    if (kind == Weighting::physical || kind == Weighting::dipole_only) {
        require_well();
    } else {
        forbid(doc, "well", "", "only used by dipole-only and physical branching");
        forbid(doc, "tolerances", "", "only used by dipole-only and physical branching");
    }

    if (cfg.mode != Command::verify) {
        forbid(doc, "seed", "", mode_label);
        forbid(doc, "sample_count", "", mode_label);
    }
    if (cfg.mode != Command::audit && cfg.mode != Command::verify) forbid(doc, "sign_mode", "", mode_label);

    if (auto seed = member(doc, "seed")) {
        if (!seed->is_number_unsigned()) invalid("seed", "must be a nonnegative integer");
        cfg.seed = seed->get<std::uint64_t>();
    }
    if (auto count = member(doc, "sample_count")) {
        if (!count->is_number_unsigned() || count->get<std::uint64_t>() == 0) {
            invalid("sample_count", "must be a positive integer");
        }
        cfg.sample_count = count->get<std::uint64_t>();
    }
    if (auto sm = string_at(doc, "sign_mode", "")) {
        if (*sm == "all-positive") cfg.sign_mode = SignMode::all_positive;
        else if (*sm == "cmt-signs") cfg.sign_mode = SignMode::cmt_signs;
        else invalid("sign_mode", "expected all-positive or cmt-signs");
    }
    return cfg;
}

RunConfig load_config(const FlagOverrides& flags) {
    std::string text;
    if (flags.config_path) {
        std::ifstream in(*flags.config_path, std::ios::binary);
        if (!in) throw ValidationError("config: cannot read '" + *flags.config_path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    return parse_config(text, flags);
}

namespace {

AlignmentDesign design_for(const RunConfig& cfg) {
    return design_alignment(*cfg.well.v1, *cfg.well.v2, *cfg.well.d, cfg.design_tol,
                            cfg.well.period.value_or(0.0));
}

}  // namespace

BranchingModel resolve_branching(const RunConfig& cfg) {
    const Weighting kind = cfg.branching.kind.value_or(Weighting::symmetric);
    switch (kind) {
        case Weighting::symmetric: return BranchingModel::symmetric();
        case Weighting::manual:
            return BranchingModel::manual(cfg.branching.p_hh.value_or(0.5), cfg.branching.p_hl.value_or(0.5),
                                          cfg.branching.p_lh.value_or(0.5), cfg.branching.p_ll.value_or(0.5));
        case Weighting::dipole_only:
        case Weighting::physical: return derive_levels(design_for(cfg), kind).branching;
    }
    throw ValidationError("branching.kind: unsupported");
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ConfigError*>(&e)) return kExitValidation;
    return kExitNumeric;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

bool wants_json(const RunConfig& c) { return c.format != OutputFormat::csv; }
bool wants_csv(const RunConfig& c) { return c.format != OutputFormat::json; }

}  // namespace

int run(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir.string() + "': " + ec.message());
    const auto& dir = cfg.out_dir;

    switch (cfg.mode) {
        case Command::design: {
            const auto design = design_for(cfg);
            if (wants_json(cfg)) write_file(dir / "design.json", design_json(design).dump());
            if (wants_csv(cfg)) write_file(dir / "levels.csv", levels_csv(solve_bound_states(design.params, cfg.energy_tol)));
            return kExitOk;
        }
        case Command::levels: {
            const auto report = derive_levels(design_for(cfg), *cfg.branching.kind);
            if (wants_csv(cfg)) {
                write_file(dir / "levels.csv", levels_csv(solve_bound_states(report.design.params, cfg.energy_tol)));
            }
            if (wants_json(cfg)) {
                write_file(dir / "coupled.json", coupled_json(report).dump());
                write_file(dir / "branching.json", branching_json(report.branching).dump());
            }
            return kExitOk;
        }
        default: break;
    }

    const int n = *cfg.n_total;
    const BranchingModel branching = resolve_branching(cfg);

    switch (cfg.mode) {
        case Command::simulate: {
            const auto dist = run_cascade(n, cfg.init, branching);
            if (wants_json(cfg)) write_file(dir / "distribution.json", distribution_json(dist, cfg.init, branching).dump());
            if (wants_csv(cfg)) write_file(dir / "distribution.csv", distribution_csv(dist));
            return kExitOk;
        }
        case Command::analyze: {
            const auto dist = run_cascade(n, cfg.init, branching);
            if (wants_json(cfg)) write_file(dir / "analysis.json", analysis_json(dist, cfg.init).dump());
            if (wants_csv(cfg)) write_file(dir / "heatmap.csv", heatmap_csv(dist));
            return kExitOk;
        }
        case Command::verify: {
            const auto exact = run_cascade(n, cfg.init, branching);
            const auto enumerated = enumerate_paths(n, cfg.init, branching);
            const auto sampled = sample_walks(n, cfg.init, branching, cfg.sample_count, cfg.seed);
            OracleReport report;
            report.max_abs_diff = max_abs_difference(exact, enumerated);
            report.tv_distance = total_variation(sampled, exact);
            if (n <= kMaxAuditN) report.coherence = coherence_audit(n, cfg.init, branching, cfg.sign_mode);
            write_file(dir / "oracle_report.json", oracle_json(report).dump());
            return report.max_abs_diff > kVerifyTolerance ? kExitVerifyFailed : kExitOk;
        }
        case Command::audit: {
            const auto report = coherence_audit(n, cfg.init, branching, cfg.sign_mode);
            write_file(dir / "audit.json", audit_json(n, cfg.sign_mode, report).dump());
            return kExitOk;
        }
        default: break;
    }
    throw ValidationError("mode: unhandled");
}

int run_guarded(const FlagOverrides& flags, std::ostream& err) {
    auto report = [&](const std::string& kind, const std::string& message) {
        auto o = JsonValue::object();
        o.set("error", kind).set("message", message);
        err << o.dump(false) << '\n';
    };
    try {
        return run(load_config(flags));
    } catch (const Error& e) {
        report(e.kind(), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        report("internal", e.what());
        return kExitNumeric;
    }
}

}  // namespace cqw
