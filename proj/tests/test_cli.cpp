#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "auxeng/cli.hpp"

using namespace auxeng;
using namespace auxeng::cli;

namespace {

std::string out_dir(const std::string& name) {
    const auto p = std::filesystem::path(AUXENG_TEST_TMP) / "cli" / name;
    std::filesystem::remove_all(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string write_config(const std::string& name, const std::string& text) {
    const auto dir = std::filesystem::path(AUXENG_TEST_TMP) / "configs";
    std::filesystem::create_directories(dir);
    const auto p = (dir / name).string();
    write_text(p, text);
    return p;
}

int run_quiet(const RunConfig& rc, std::string* out = nullptr, std::string* err = nullptr) {
    std::ostringstream o, e;
    const int status = run(rc, o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return status;
}

}  // namespace

TEST(Config, CommutingCaseExpands) {
    RunConfig rc;
    rc.command = "expand";
    rc.config_path = write_config("diag.json", R"({"h0": {"diagonal": [0, 1, 2]}, "v": {"diagonal": [0.3, -0.2, 0.1]}, "levels": [1], "max_order": 3})");
    rc.output_dir = out_dir("diag");
    ASSERT_EQ(run_quiet(rc), kExitOk);
    const auto recs = read_lines(rc.output_dir + "/expand.jsonl");
    const auto s = recs.at(0).get<ExpansionSeries>();
    EXPECT_EQ(s[0], 1.0);
    EXPECT_NEAR(s[1], -0.2, 1e-15);
    EXPECT_EQ(s[2], 0.0);
    EXPECT_EQ(s[3], 0.0);
    const auto csv = slurp(rc.output_dir + "/expand.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "level,order,coefficient,imaginary,uncertainty");
}

TEST(Config, PauliAndUnitsParse) {
    const auto c = parse_config_text(R"({
      "h0": {"pauli": [{"coefficient": 1, "factors": "XI"}, {"coefficient": 0.5, "factors": "IX"}]},
      "v": {"pauli": [{"coefficient": 1.682, "factors": "ZI"}, {"coefficient": 1.189, "factors": "IZ"}]},
      "delta_per_s": 1e9, "mu_per_s": 1e8, "levels": [1, 2],
      "noise": {"sigma": 0.02, "samples": 10, "dofs": "XZ"},
      "decay": {"gamma": 0.002, "bases": ["charge"]},
      "dynamics": {"n_max": 20, "omega_per_s": 6.28e8, "t_final_s": 1e-6}
    })");
    ASSERT_TRUE(c.aux.has_value());
    EXPECT_EQ(c.aux->delta, 1e9);
    EXPECT_NEAR(c.aux->epsilon(), 0.1, 1e-15);
    EXPECT_EQ(c.noise.per_qubit_dof.size(), 2u);
    EXPECT_EQ(c.decay_bases, std::vector<DecayBasis>{DecayBasis::charge});
    EXPECT_EQ(c.dynamics.omega, 6.28e8);
    EXPECT_EQ(*c.dynamics.t_final, 1e-6);
}

TEST(Config, UnknownKeyRejected) {
    EXPECT_THROW(parse_config_text(R"({"h0": {"diagonal": [0, 1]}, "v": {"diagonal": [0, 1]}, "colour": 1})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"noise": {"sigma": 0.1, "extra": 2}})"), ConfigError);
}

TEST(Config, ParseErrorHasLineAndColumn) {
    try {
        parse_config_text("{\n  \"levels\": [1,\n  ]\n}", "cfg.json");
        FAIL() << "expected a parse error";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("cfg.json:3:"), std::string::npos) << e.what();
    }
}

TEST(Config, BadConfigExitsOne) {
    RunConfig rc;
    rc.command = "expand";
    rc.config_path = write_config("broken.json", "{\"h0\": ");
    rc.output_dir = out_dir("broken");
    std::string err;
    EXPECT_EQ(run_quiet(rc, nullptr, &err), kExitError);
    EXPECT_NE(err.find("broken.json:1:"), std::string::npos);
}

TEST(Run, UnknownCommandExitsOne) {
    RunConfig rc;
    rc.command = "frobnicate";
    rc.output_dir = out_dir("unknown");
    EXPECT_EQ(run_quiet(rc), kExitError);
}

TEST(Run, ManifestRecord) {
    RunConfig rc;
    rc.command = "expand";
    rc.fixture = "single_qubit_x2";
    rc.seed = 7;
    rc.output_dir = out_dir("manifest");
    ASSERT_EQ(run_quiet(rc), kExitOk);
    const auto m = read_lines(rc.output_dir + "/manifest.jsonl").at(0);
    EXPECT_EQ(m["command"], "expand");
    EXPECT_EQ(m["seed"], 7);
    EXPECT_EQ(m["exit_status"], 0);
    EXPECT_TRUE(m.contains("wall_time_s"));
    EXPECT_TRUE(m.contains("version"));
    EXPECT_EQ(m["files"].size(), 2u);
}

TEST(Run, FormatSelection) {
    RunConfig rc;
    rc.command = "expand";
    rc.fixture = "qutrit_x3";
    rc.format = OutputFormat::csv;
    rc.output_dir = out_dir("csv_only");
    ASSERT_EQ(run_quiet(rc), kExitOk);
    EXPECT_TRUE(std::filesystem::exists(rc.output_dir + "/expand.csv"));
    EXPECT_FALSE(std::filesystem::exists(rc.output_dir + "/expand.jsonl"));
}

TEST(Run, ConditionsExitCodes) {
    RunConfig rc;
    rc.command = "conditions";
    rc.fixture = "twoqubit_probe";
    rc.output_dir = out_dir("cond_ok");
    std::string out;
    EXPECT_EQ(run_quiet(rc, &out), kExitOk);
    EXPECT_NE(out.find("closed-form"), std::string::npos);
    rc.fixture = "";
    rc.config_path = write_config("present.json", R"({"h0": {"diagonal": [-0.5, 0.5]}, "v": {"pauli": [{"coefficient": 1, "factors": "X"}]},
        "constraints": {"target_levels": [1], "engineer_order": 4, "eliminate_orders": [2]}})");
    rc.output_dir = out_dir("cond_fail");
    EXPECT_EQ(run_quiet(rc), kExitVerification);
}

TEST(Run, OutputsAreBitStable) {
    RunConfig rc;
    rc.command = "robustness";
    rc.fixture = "twoqubit_probe";
    rc.samples = 200;
    rc.seed = 5;
    rc.output_dir = out_dir("stable_a");
    ASSERT_EQ(run_quiet(rc), kExitOk);
    const auto a = slurp(rc.output_dir + "/sensitivity.csv") + slurp(rc.output_dir + "/robustness.jsonl");
    rc.output_dir = out_dir("stable_b");
    rc.threads = 1;
    ASSERT_EQ(run_quiet(rc), kExitOk);
    const auto b = slurp(rc.output_dir + "/sensitivity.csv") + slurp(rc.output_dir + "/robustness.jsonl");
    EXPECT_EQ(a, b);
    EXPECT_EQ(slurp(rc.output_dir + "/sensitivity.csv").substr(0, 21), "order,sigma_m,stderr\n");
}

TEST(Run, SearchLogReloadsInReproduce) {
    const auto cfg = write_config("search.json", R"({"search": {"budget": 2500, "starts": 2}})");
    RunConfig rc;
    rc.command = "search";
    rc.fixture = "twoqubit_probe";
    rc.config_path = cfg;
    rc.seed = 4;
    rc.output_dir = out_dir("search");
    ASSERT_EQ(run_quiet(rc), kExitOk);
    RunConfig again;
    again.command = "reproduce";
    again.candidates_path = rc.output_dir + "/search.jsonl";
    again.output_dir = out_dir("search_reproduce");
    std::string out;
    EXPECT_EQ(run_quiet(again, &out), kExitOk);
    EXPECT_NE(out.find("candidate 0: pass"), std::string::npos);
}

TEST(Run, ReproduceSingleFixtures) {
    for (const std::string name : {"single_qubit_x2", "qutrit_x3", "twoqubit_probe", "cpb_realization"}) {
        RunConfig rc;
        rc.command = "reproduce";
        rc.fixture = name;
        rc.output_dir = out_dir("rep_" + name);
        std::string out;
        EXPECT_EQ(run_quiet(rc, &out), kExitOk) << out;
        EXPECT_NE(out.find(name + ": PASS"), std::string::npos);
    }
}

TEST(Run, ReproduceLadderFixtureReportsTable) {
    RunConfig rc;
    rc.command = "reproduce";
    rc.fixture = "twoqubit_x4";
    rc.output_dir = out_dir("rep_x4");
    std::string out;
    const int status = run_quiet(rc, &out);
    EXPECT_NE(out.find("E1^(2)"), std::string::npos);
    EXPECT_NE(out.find("E1^(4)"), std::string::npos);
    EXPECT_NE(out.find("E1^(6)"), std::string::npos);
    EXPECT_EQ(status, out.find("FAIL") == std::string::npos ? kExitOk : kExitVerification);
}

TEST(Run, ReproduceAllFixturesPass) {
    RunConfig rc;
    rc.command = "reproduce";
    rc.all = true;
    rc.output_dir = out_dir("rep_all");
    std::string out;
    EXPECT_EQ(run_quiet(rc, &out), kExitOk) << out;
}

TEST(Run, DynamicsDemoIsValid) {
    RunConfig rc;
    rc.command = "dynamics";
    rc.fixture = "twoqubit_probe";
    rc.output_dir = out_dir("dynamics");
    ASSERT_EQ(run_quiet(rc), kExitOk);
    const auto csv = slurp(rc.output_dir + "/dynamics.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,fidelity,leakage");
}
