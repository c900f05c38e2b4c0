#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "cqw/cli_io.hpp"
#include "test_support.hpp"

using namespace cqw;

namespace {

std::string validation_message(const std::string& doc, const FlagOverrides& flags = {}) {
    try {
        parse_config(doc, flags);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

int run_binary(const std::string& args, const std::filesystem::path& err_file) {
    const std::string cmd = std::string(CQW_BINARY) + " " + args + " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("documented simulate config is valid") {
    const auto cfg = parse_config(
        R"({"mode":"simulate","n_total":22,"init":{"ch":0.70710678,"cl":0.70710678},"branching":{"kind":"symmetric"}})");
    CHECK(cfg.mode == Command::simulate);
    CHECK(cfg.n_total == 22);
    CHECK(cfg.init.c_h * cfg.init.c_h + cfg.init.c_l * cfg.init.c_l == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cfg.branching.kind == Weighting::symmetric);
    CHECK(cfg.format == OutputFormat::both);
}

TEST_CASE("validation errors name the key") {
    CHECK(validation_message(R"({"mode":"simulate","branching":{"kind":"symmetric"}})").find("n_total") == 0);
    CHECK(validation_message(R"({"mode":"simulate","n_total":3,"branching":{"kind":"symmetric"},"colour":1})")
              .find("colour") == 0);
    CHECK(validation_message(R"({"mode":"simulate","n_total":3,"branching":{"kind":"symmetric","p":1}})")
              .find("branching.p") == 0);
    CHECK(validation_message(R"({"mode":"simulate","n_total":3,"branching":{"kind":"manual","p_hh":0.6,"p_hl":0.5,"p_lh":0.5,"p_ll":0.5}})")
              .find("branching.p_hh") == 0);
    CHECK(validation_message(R"({"mode":"simulate","n_total":3,"branching":{"kind":"manual","p_hh":0.5,"p_hl":0.5}})")
              .find("branching.p_lh") == 0);
    CHECK(validation_message(R"({"mode":"simulate","n_total":2.5,"branching":{"kind":"symmetric"}})").find("n_total") == 0);
    CHECK(validation_message(R"({"mode":"simulate","n_total":3,"init":{"ch":0.7,"cl":0.5},"branching":{"kind":"symmetric"}})")
              .find("init") == 0);
    CHECK(validation_message(R"({"mode":"design","well":{"v1":10,"v2":0,"d":2,"b":1}})").find("well.b") == 0);
    CHECK(validation_message(R"({"mode":"design","well":{"v1":10,"d":2}})").find("well.v2") == 0);
    CHECK(validation_message(R"({"mode":"design","n_total":3,"well":{"v1":10,"v2":0,"d":2}})").find("n_total") == 0);
    CHECK(validation_message(R"({"mode":"simulate","n_total":3,"branching":{"kind":"physical"}})").find("well.v1") == 0);
    CHECK(validation_message(R"({"mode":"simulate","n_total":3,"seed":4,"branching":{"kind":"symmetric"}})").find("seed") == 0);
    CHECK(validation_message(R"({"mode":"verify","n_total":3,"branching":{"kind":"symmetric"},"output":{"format":"csv"}})")
              .find("output.format") == 0);
    CHECK(validation_message(R"({"mode":"teleport"})").find("mode") == 0);
    CHECK(validation_message("[1, 2]").find("config") == 0);
    CHECK(validation_message("{not json").find("config") == 0);
}

TEST_CASE("flags override the file") {
    FlagOverrides f;
    f.n = 9;
    f.ch = 0.6;
    f.branching = "manual";
    const auto cfg = parse_config(
        R"({"mode":"simulate","n_total":22,"init":{"ch":1,"cl":0},"branching":{"kind":"symmetric","p_hh":0.5,"p_hl":0.5,"p_lh":0.1,"p_ll":0.9}})",
        f);
    CHECK(cfg.n_total == 9);
    CHECK(cfg.init.c_h == doctest::Approx(0.6));
    CHECK(cfg.init.c_l == doctest::Approx(0.8));
    CHECK(cfg.branching.kind == Weighting::manual);
    const auto br = resolve_branching(cfg);
    CHECK(br.p_lh == doctest::Approx(0.1));
}

TEST_CASE("init defaults to the upper sublevel") {
    const auto cfg = parse_config(R"({"mode":"audit","n_total":3,"branching":{"kind":"symmetric"}})");
    CHECK(cfg.init.c_h == 1.0);
    CHECK(cfg.init.c_l == 0.0);
    CHECK(cfg.sign_mode == SignMode::all_positive);
}

TEST_CASE("run writes byte-identical files") {
    testing::TempDir a("run_a"), b("run_b");
    for (const auto* dir : {&a, &b}) {
        FlagOverrides f;
        f.out = dir->path().string();
        const auto cfg = parse_config(
            R"({"mode":"analyze","n_total":12,"init":{"ch":0.6,"cl":0.8},"branching":{"kind":"manual","p_hh":0.3,"p_hl":0.7,"p_lh":0.45,"p_ll":0.55}})",
            f);
        CHECK(run(cfg) == kExitOk);
    }
    for (const char* name : {"analysis.json", "heatmap.csv"}) {
        const auto x = testing::slurp(a.path() / name);
        CHECK(!x.empty());
        CHECK(x == testing::slurp(b.path() / name));
    }
    const auto doc = nlohmann::json::parse(testing::slurp(a.path() / "analysis.json"));
    CHECK(doc["parity"]["all_hold"] == true);
    CHECK(doc["conditional"].size() == 13);
}

TEST_CASE("simulate output layout") {
    testing::TempDir dir("sim");
    FlagOverrides f;
    f.out = dir.path().string();
    f.format = "csv";
    CHECK(run(parse_config(R"({"mode":"simulate","n_total":3,"branching":{"kind":"symmetric"}})", f)) == kExitOk);
    CHECK_FALSE(std::filesystem::exists(dir.path() / "distribution.json"));
    CHECK(testing::slurp(dir.path() / "distribution.csv") ==
          "l,m,n,f,amp\n0,2,1,0.25,0.5\n1,0,2,0.25,0.5\n1,1,1,0.5,0.70710678118654757\n");
}

TEST_CASE("exit code mapping") {
    CHECK(exit_code_for(ValidationError("x")) == 2);
    CHECK(exit_code_for(ConfigError("x")) == 2);
    CHECK(exit_code_for(InfeasibleDesign("x")) == 3);
    CHECK(exit_code_for(NumericError("x")) == 3);
    CHECK(exit_code_for(SizeError("x")) == 3);
    CHECK(exit_code_for(DomainError("x")) == 3);
}

TEST_CASE("binary: exit statuses and error report") {
    testing::TempDir dir("bin");
    const auto err = dir.path() / "stderr.txt";
    const std::string out = " --out " + dir.path().string();

    CHECK(run_binary("simulate --n 5 --branching symmetric" + out, err) == 0);
    CHECK(std::filesystem::exists(dir.path() / "distribution.json"));

    CHECK(run_binary("simulate --branching symmetric" + out, err) == 2);
    const auto report = nlohmann::json::parse(testing::slurp(err));
    CHECK(report["error"] == "validation");
    CHECK(report["message"].get<std::string>().find("n_total") == 0);

    const auto cfg = dir.path() / "infeasible.json";
    std::ofstream(cfg) << R"({"well":{"v1":0.5,"v2":0,"d":0.1}})";
    CHECK(run_binary("design --config " + cfg.string() + out, err) == 3);
    CHECK(nlohmann::json::parse(testing::slurp(err))["error"] == "infeasible-design");

    CHECK(run_binary("verify --n 21 --branching symmetric" + out, err) == 3);
    CHECK(run_binary("verify --n 10 --branching symmetric --seed 3 --samples 5000" + out, err) == 0);
    const auto oracle = nlohmann::json::parse(testing::slurp(dir.path() / "oracle_report.json"));
    CHECK(oracle["max_abs_diff"].get<double>() < 1e-12);

    CHECK(run_binary("simulate --n notanumber" + out, err) == 2);
    CHECK(run_binary("bogus" + out, err) == 2);
}

TEST_CASE("binary: verify on a randomized N = 12 instance") {
    testing::TempDir dir("verify");
    const auto cfg = dir.path() / "v.json";
    std::ofstream(cfg) << R"({"mode":"verify","n_total":12,"init":{"ch":0.28,"cl":0.96},)"
                       << R"("branching":{"kind":"manual","p_hh":0.137,"p_hl":0.863,"p_lh":0.711,"p_ll":0.289},)"
                       << R"("seed":17,"sample_count":20000})";
    CHECK(run_binary("verify --config " + cfg.string() + " --out " + dir.path().string(), dir.path() / "e") == 0);
    const auto oracle = nlohmann::json::parse(testing::slurp(dir.path() / "oracle_report.json"));
    CHECK(oracle["max_abs_diff"].get<double>() < 1e-12);
    CHECK(oracle["final_norm"].is_number());
}

}
