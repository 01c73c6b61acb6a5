#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("kms_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int kms_run(const std::string& args, const fs::path& out, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(KMS_CLI_PATH) + " " + args + " --out " + out.string() + " > " +
                            (out / "stdout.txt").string() + " 2> " + (out / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

std::string cfg(const std::string& name) { return "--config " + kms::test::config_path(name); }

}  // namespace

TEST(Cli, SolveReferenceK2) {
    const auto out = scratch("solve_k2");
    ASSERT_EQ(kms_run("solve " + cfg("section3_k2_1d.json"), out), 0) << slurp(out / "stderr.txt");
    const json report = load(out / "theorem.json");
    EXPECT_EQ(report["solutions"], 4);
    EXPECT_TRUE(report["chain_holds"].get<bool>());
    EXPECT_TRUE(report["all_ok"].get<bool>());
    EXPECT_EQ(report, json::parse(slurp(out / "stdout.txt")));
    for (const char* f : {"curve_k1.csv", "curve_k2.csv", "solution_k1_1.csv", "solution_k2_2.csv"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
    const json manifest = load(out / "manifest.json");
    EXPECT_EQ(manifest["exit_status"], 0);
    EXPECT_EQ(manifest["subcommand"], "solve");
    EXPECT_EQ(manifest["version"], kms::version);
    EXPECT_TRUE(manifest.contains("wall_time_seconds"));
    EXPECT_EQ(kms::parse_config(manifest["config"]), kms::parse_config_file(kms::test::config_path("section3_k2_1d.json")));
}

TEST(Cli, CheckIsAdvisory) {
    const auto out = scratch("check_h3");
    ASSERT_EQ(kms_run("check " + cfg("h3_violation.json"), out), 0);
    const json report = load(out / "check.json");
    EXPECT_FALSE(report["hypotheses"]["H3"]["holds"].get<bool>());
    EXPECT_FALSE(report["all_hold"].get<bool>());
}

TEST(Cli, SolveVetoesWithoutForce) {
    const auto out = scratch("veto");
    EXPECT_EQ(kms_run("solve " + cfg("h3_violation.json"), out), 2);
    EXPECT_NE(slurp(out / "stderr.txt").find("H3"), std::string::npos);
    EXPECT_EQ(load(out / "manifest.json")["exit_status"], 2);
    EXPECT_FALSE(fs::exists(out / "theorem.json"));
}

TEST(Cli, ConfigErrorsExitOne) {
    const auto out = scratch("bad_config");
    std::ofstream(out / "bad.json") << R"({"domain": {"dimension": 3}})";
    EXPECT_EQ(kms_run("check --config " + (out / "bad.json").string(), out), 1);
    EXPECT_NE(slurp(out / "stderr.txt").find("$.domain"), std::string::npos);
    EXPECT_NE(kms_run("frobnicate", out), 0);
}

TEST(Cli, LocalAndEigen) {
    const auto out = scratch("local");
    ASSERT_EQ(kms_run("solve-local " + cfg("analytic_cosh.json") + " --alpha 0.5 --force", out), 0);
    const json local = load(out / "local.json");
    EXPECT_NEAR(local["P"].get<double>(), M_PI - 2 * std::tanh(M_PI / 2), 1e-3);
    EXPECT_TRUE(fs::exists(out / "u_alpha.csv"));
    EXPECT_EQ(kms_run("solve-local " + cfg("analytic_cosh.json") + " --alpha 1.5 --force", out), 1);

    const auto eig_out = scratch("eigen");
    ASSERT_EQ(kms_run("eigen " + cfg("section3_k2_1d.json"), eig_out), 0);
    const json eig = load(eig_out / "eigen.json");
    EXPECT_NEAR(eig["lambda1"].get<double>(), 1.0, 1e-3);
    EXPECT_NEAR(eig["C1"].get<double>(), std::sqrt(std::pow(M_PI, 3) / 12), 1e-3);
    EXPECT_TRUE(fs::exists(eig_out / "phi1.csv"));
}

TEST(Cli, ExampleEmitsReusableConfig) {
    const auto out = scratch("example");
    ASSERT_EQ(kms_run("example " + cfg("section3_k1_1d.json"), out), 0);
    const json ex = load(out / "example.json");
    EXPECT_TRUE(ex["report"]["all_hold"].get<bool>());
    EXPECT_GT(ex["construction"]["c"].get<double>(), 0.0);
    const auto check = scratch("example_check");
    ASSERT_EQ(kms_run("check --config " + (out / "model_config.json").string(), check), 0);
    EXPECT_TRUE(load(check / "check.json")["all_hold"].get<bool>());
}

TEST(Cli, ScanWritesCurve) {
    const auto out = scratch("scan");
    ASSERT_EQ(kms_run("scan " + cfg("section3_k2_1d.json") + " --k 2", out), 0);
    const std::string csv = slurp(out / "scan_k2.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "alpha,P,g,a_alpha,lower_bound,upper_bound");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 65);
    EXPECT_EQ(kms_run("scan " + cfg("section3_k2_1d.json") + " --k 3", out), 1);
}

// Repeated runs, with different thread counts, give byte-identical artifacts.
TEST(Cli, Deterministic) {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    ASSERT_EQ(kms_run("solve " + cfg("section3_k1_1d.json"), a, "KMS_THREADS=1"), 0);
    ASSERT_EQ(kms_run("solve " + cfg("section3_k1_1d.json"), b, "KMS_THREADS=3"), 0);
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        if (name == "manifest.json" || name == "stderr.txt") continue;
        EXPECT_EQ(slurp(entry.path()), slurp(b / name)) << name;
        ++compared;
    }
    EXPECT_GE(compared, 5);
}
