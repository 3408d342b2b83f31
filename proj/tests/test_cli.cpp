#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "capacity_rct/cli.hpp"
#include "capacity_rct/config.hpp"

using namespace capacity_rct;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string write_file(const fs::path& where, const std::string& content) {
    std::ofstream out(where);
    out << content;
    return where.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ParsedTable parse_file(const std::string& path) {
    std::ifstream in(path);
    return parse_result_csv(in);
}

double cell(const ParsedTable& table, std::size_t row, const std::string& column) {
    for (std::size_t c = 0; c < table.header.size(); ++c)
        if (table.header[c] == column) return std::stod(table.rows.at(row).at(c));
    throw std::runtime_error("missing column " + column);
}

std::string text_cell(const ParsedTable& table, std::size_t row, const std::string& column) {
    for (std::size_t c = 0; c < table.header.size(); ++c)
        if (table.header[c] == column) return table.rows.at(row).at(c);
    throw std::runtime_error("missing column " + column);
}

int run_binary(const std::string& args) {
    const int status = std::system((std::string(CAPACITY_RCT_BIN) + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config files parse with comments and report line numbers on errors") {
    TempDir dir("capacity_rct_config_test");
    SECTION("well-formed file") {
        const std::string path = write_file(dir.path / "ok.ini",
                                            "# model\n"
                                            "lambda = 0.5\n"
                                            "tau=0.2  # inline comment\n"
                                            "m_list = 4, 8\n"
                                            "pairs = 2:10, 5:20\n"
                                            "checkpoint_times = 10, 50\n");
        ScenarioConfig config;
        load_config_file(config, path);
        CHECK(config.lambda == Approx(0.5));
        CHECK(config.tau == Approx(0.2));
        REQUIRE(config.m_list == std::vector<int>{4, 8});
        REQUIRE(config.pairs.size() == 2);
        CHECK(config.pairs[1] == std::pair{5, 20});
    }
    SECTION("unknown key errors carry file and line") {
        const std::string path = write_file(dir.path / "bad.ini", "lambda = 0.5\nbogus = 1\n");
        ScenarioConfig config;
        try {
            load_config_file(config, path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
            CHECK(std::string(e.what()).find("bogus") != std::string::npos);
        }
    }
    SECTION("malformed numbers are rejected") {
        const std::string path = write_file(dir.path / "nan.ini", "lambda = fast\n");
        ScenarioConfig config;
        CHECK_THROWS_AS(load_config_file(config, path), ConfigError);
    }
    SECTION("missing file") {
        ScenarioConfig config;
        CHECK_THROWS_AS(load_config_file(config, dir.path / "absent.ini"), ConfigError);
    }
    SECTION("flag overrides win over file values") {
        const std::string path = write_file(dir.path / "base.ini", "lambda = 0.5\n");
        ScenarioConfig config;
        load_config_file(config, path);
        apply_key(config, "lambda", "0.7", "--lambda");
        CHECK(config.lambda == Approx(0.7));
    }
}

TEST_CASE("analyze emits the stationary summary") {
    TempDir dir("capacity_rct_analyze_test");
    ScenarioConfig config;
    config.servers = 0;
    config.users = 1;
    config.out_dir = (dir.path / "out").string();
    const auto written = run_subcommand("analyze", config);
    REQUIRE(written.size() == 2);

    const ParsedTable summary = parse_file(written[1]);
    REQUIRE(summary.rows.size() == 1);
    CHECK(cell(summary, 0, "mean_queue_length") == Approx(0.4 / 0.75).epsilon(1e-9));
    CHECK(summary.metadata.at("subcommand") == "analyze");
    CHECK(summary.metadata.count("config_hash") == 1);
    CHECK(summary.metadata.at("tool").find("capacity-rct") == 0);

    const ParsedTable dist = parse_file(written[0]);
    REQUIRE(dist.rows.size() == 2);
    CHECK(cell(dist, 0, "probability") + cell(dist, 1, "probability") == Approx(1.0));
}

TEST_CASE("policy-compare reproduces the reference policy table") {
    TempDir dir("capacity_rct_policy_test");
    ScenarioConfig config;  // defaults are the small-pilot scenario
    config.out_dir = (dir.path / "out").string();
    const auto written = run_subcommand("policy-compare", config);
    REQUIRE(written.size() == 1);
    const ParsedTable table = parse_file(written[0]);
    REQUIRE(table.rows.size() == 3);

    CHECK(text_cell(table, 0, "policy") == "NaiveNoScaleUp");
    CHECK(cell(table, 0, "m1") == 5);
    CHECK(cell(table, 0, "n1") == 35);
    CHECK(cell(table, 0, "achieved_power") < 0.8);

    CHECK(text_cell(table, 1, "policy") == "NaiveProportional");
    CHECK(cell(table, 1, "m1") == 18);
    CHECK(cell(table, 1, "n1") == 35);
    CHECK(cell(table, 1, "achieved_power") >= 0.8);

    CHECK(text_cell(table, 2, "policy") == "SqrtStaffing");
    CHECK(cell(table, 2, "m1") == 16);
    CHECK(cell(table, 2, "achieved_power") >= 0.8);

    CHECK(table.metadata.count("pilot_power") == 1);
}

TEST_CASE("identical configs yield byte-identical outputs") {
    TempDir dir("capacity_rct_determinism_test");
    ScenarioConfig config;
    config.n_max = 60;
    config.m_list = {5};

    config.out_dir = (dir.path / "a").string();
    const auto first = run_subcommand("sweep-power", config);
    config.out_dir = (dir.path / "b").string();
    const auto second = run_subcommand("sweep-power", config);
    CHECK(read_file(first[0]) == read_file(second[0]));

    ScenarioConfig changed = config;
    changed.seed = config.seed + 1;
    changed.out_dir = (dir.path / "c").string();
    const auto third = run_subcommand("sweep-power", changed);
    const ParsedTable t1 = parse_file(first[0]);
    const ParsedTable t3 = parse_file(third[0]);
    CHECK(t1.metadata.at("config_hash") != t3.metadata.at("config_hash"));
}

TEST_CASE("every emitted table re-parses under the documented schema") {
    TempDir dir("capacity_rct_roundtrip_test");
    ScenarioConfig config;
    config.out_dir = (dir.path / "out").string();
    config.n_max = 40;
    config.m_list = {3, 5};
    config.replications = 40;
    config.sim_horizon = 30.0;
    config.checkpoint_times = {10.0, 30.0};
    config.pairs = {{2, 10}};
    config.vary = "lambda";
    config.vary_values = {0.3, 0.4};
    config.n_min = 2;
    config.trajectory = true;

    for (const std::string& name :
         {"analyze", "fluid", "power", "policy-compare", "simulate", "sweep-effect",
          "sweep-power", "sweep-optimal-n"}) {
        const auto written = run_subcommand(name, config);
        for (const std::string& path : written) {
            const ParsedTable table = parse_file(path);
            REQUIRE(!table.header.empty());
            REQUIRE(!table.rows.empty());
            CHECK(table.metadata.at("subcommand") == name);
            CHECK(table.metadata.count("config_hash") == 1);
            for (const auto& row : table.rows) CHECK(row.size() == table.header.size());
        }
    }
}

TEST_CASE("simulate output matches the frozen golden file") {
    // Generated once from this configuration and frozen; guards the whole
    // chain (seeding, event clock, bootstrap, formatting) against drift.
    TempDir dir("capacity_rct_golden_test");
    ScenarioConfig config;
    config.lambda = 0.185;
    config.tau = 0.16;
    config.mu = 7.0;
    config.p = 0.085;
    config.pairs = {{2, 4}};
    config.seed = 7;
    config.replications = 12;
    config.sim_horizon = 10.0;
    config.checkpoint_times = {5.0, 10.0};
    config.out_dir = (dir.path / "out").string();

    const auto written = run_subcommand("simulate", config);
    const std::string expected =
        "# config_hash=0xbffc5cd963000ed0\n"
        "# subcommand=simulate\n"
        "# tool=capacity-rct 0.1.0\n"
        "servers,users,checkpoint,sim_mean,sim_variance,boot_lo,boot_hi,analytic_mean,"
        "clt_variance,fluid_mean,clt_mean_flagged,fluid_flagged\n"
        "2,4,5,0.739559709,0.268090952,0.473826371,1.03225596,0.812246185,0.323354979,"
        "0.787234043,0,0\n"
        "2,4,10,0.690810844,0.065879945,0.56026194,0.837792305,0.812246185,0.161677489,"
        "0.787234043,0,0\n";
    CHECK(read_file(written[0]) == expected);
}

TEST_CASE("fluid trajectory emission is optional") {
    TempDir dir("capacity_rct_fluid_test");
    ScenarioConfig config;
    config.out_dir = (dir.path / "out").string();
    config.trajectory = false;
    CHECK(run_subcommand("fluid", config).size() == 1);
    config.trajectory = true;
    config.sim_horizon = 20.0;
    const auto written = run_subcommand("fluid", config);
    REQUIRE(written.size() == 2);
    const ParsedTable traj = parse_file(written[1]);
    CHECK(cell(traj, 0, "time") == Approx(0.0));
    CHECK(cell(traj, traj.rows.size() - 1, "time") == Approx(20.0));
}

TEST_CASE("sweep-optimal-n requires a parameter grid") {
    ScenarioConfig config;
    config.vary_values = {};
    CHECK_THROWS_AS(run_subcommand("sweep-optimal-n", config), ConfigError);
    config.vary = "speed";
    config.vary_values = {0.1};
    CHECK_THROWS_AS(run_subcommand("sweep-optimal-n", config), ConfigError);
}

TEST_CASE("unknown subcommand is a config error") {
    ScenarioConfig config;
    CHECK_THROWS_AS(run_subcommand("frobnicate", config), ConfigError);
}

TEST_CASE("binary exit codes") {
    TempDir dir("capacity_rct_exit_test");
    SECTION("success") {
        CHECK(run_binary("analyze --servers 2 --users 4 --out " + (dir.path / "ok").string()) == 0);
    }
    SECTION("config errors exit 2") {
        CHECK(run_binary("analyze --config /nonexistent.ini") == 2);
        CHECK(run_binary("sweep-optimal-n --vary speed --vary_values 0.1") == 2);
        CHECK(run_binary("definitely-not-a-subcommand") == 2);
    }
    SECTION("infeasible search exits 3") {
        CHECK(run_binary("policy-compare --m1p 0 --out " + (dir.path / "i").string()) == 3);
    }
    SECTION("numeric precondition failures exit 4") {
        CHECK(run_binary("analyze --lambda -1 --out " + (dir.path / "n").string()) == 4);
    }
}
