#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "ionmod/csv.hpp"
#include "ionmod/errors.hpp"
#include "ionmod/experiments.hpp"

using namespace ionmod;
namespace ex = ionmod::experiments;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ionmod_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + IONMOD_CLI + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("numbers round-trip through CSV") {
    const auto dir = scratch("csv");
    const std::vector<std::vector<double>> rows = {{0.1, 1e-300, -3.5}, {2.0 / 3.0, 1e22, 0.0}};
    write_csv(dir / "a.csv", {"x", "y", "z"}, rows);
    const auto t = read_csv(dir / "a.csv");
    CHECK(t.header == std::vector<std::string>{"x", "y", "z"});
    CHECK(t.rows == rows);
    CHECK(format_number(0.5) == "0.5");
    CHECK_FALSE(fs::exists(dir / "a.csv.tmp"));
    CHECK_THROWS_AS(read_csv(dir / "missing.csv"), IoError);
    // A regular file cannot serve as a directory.
    CHECK_THROWS_AS(write_csv(dir / "a.csv" / "b.csv", {"x"}, {{1.0}}), IoError);
}

TEST_CASE("overrides") {
    ex::ExperimentConfig cfg;
    ex::apply_assignment(cfg, "N=500");
    ex::apply_assignment(cfg, "trials=12");
    ex::apply_assignment(cfg, "seed=0xff");
    ex::apply_assignment(cfg, "talbot_nodes=64");
    ex::apply_assignment(cfg, "scenario=fig5-bound");
    CHECK(cfg.spec.N == 500);
    CHECK(cfg.pbs.n_trials == 12);
    CHECK(cfg.pbs.base_seed == 255);
    CHECK(cfg.talbot.n_nodes == 64);
    CHECK(cfg.scenario == ex::Scenario::Fig5Bound);
    CHECK(cfg.overrides.at("trials") == "12");
    CHECK_THROWS_AS(ex::apply_assignment(cfg, "nonsense=1"), ConfigError);
    CHECK_THROWS_AS(ex::apply_assignment(cfg, "N"), ConfigError);
    CHECK_THROWS_AS(ex::apply_assignment(cfg, "trials=-3"), ConfigError);
    CHECK_THROWS_AS(ex::apply_assignment(cfg, "v_on=abc"), ConfigError);
    CHECK_THROWS_AS(ex::apply_assignment(cfg, "scenario=fig9"), ConfigError);
}

TEST_CASE("config files") {
    const auto dir = scratch("cfg");
    {
        std::ofstream(dir / "c.json") << R"({"N": 10000000, "pbs_dt": 1e-5, "seed": 18446744073709551615, "output_dir": "x"})";
    }
    ex::ExperimentConfig cfg;
    ex::load_config_file(cfg, dir / "c.json");
    CHECK(cfg.spec.N == 10'000'000);
    CHECK(cfg.pbs.dt == 1e-5);
    CHECK(cfg.pbs.base_seed == 18446744073709551615ULL);
    CHECK(cfg.output_dir == fs::path("x"));

    { std::ofstream(dir / "bad.json") << "{ not json"; }
    CHECK_THROWS_AS(ex::load_config_file(cfg, dir / "bad.json"), ConfigError);
    { std::ofstream(dir / "arr.json") << "[1, 2]"; }
    CHECK_THROWS_AS(ex::load_config_file(cfg, dir / "arr.json"), ConfigError);
    CHECK_THROWS_AS(ex::load_config_file(cfg, dir / "none.json"), ConfigError);
}

TEST_CASE("quick mode and validation") {
    ex::ExperimentConfig cfg;
    ex::apply_quick(cfg);
    CHECK(cfg.quick);
    CHECK(cfg.pbs.n_trials == 100);
    CHECK(cfg.grid_points == 20);
    CHECK_NOTHROW(ex::validate(cfg));
    cfg.p_open = 2.0;
    CHECK_THROWS_AS(ex::validate(cfg), ConfigError);
    CHECK(ex::scenario_name(ex::parse_scenario("fig4-compare")) == "fig4-compare");
}

TEST_CASE("gating figure files") {
    ex::ExperimentConfig cfg;
    cfg.output_dir = scratch("fig3");
    const auto files = ex::run_fig3(cfg);
    REQUIRE(files.size() == 4);
    for (const auto& f : files) {
        const auto t = read_csv(f);
        CHECK(t.header == std::vector<std::string>{"t_ms", "p_open"});
        CHECK(t.rows.size() == 401);  // 400 uniform steps + start; T1 lies on the grid
    }
    const auto on200 = read_csv(cfg.output_dir / "fig3_von_200mV.csv");
    for (const auto& r : on200.rows) {
        if (r[0] == 20.0) CHECK(r[1] == doctest::Approx(0.995).epsilon(1e-3));
    }
    for (const auto& r : read_csv(cfg.output_dir / "fig3_von_-200mV.csv").rows) CHECK(r[1] <= 1e-8);
}

TEST_CASE("bound figure files") {
    ex::ExperimentConfig cfg;
    cfg.output_dir = scratch("fig5");
    ex::run_fig5(cfg);
    const auto t = read_csv(cfg.output_dir / "fig5_bound.csv");
    CHECK(t.header == std::vector<std::string>{"N", "t_s", "M_mo", "M_u_mo"});
    std::set<double> ns;
    for (const auto& r : t.rows) {
        ns.insert(r[0]);
        CHECK(r[3] >= r[2] * (1.0 - 1e-3));
        if (r[1] == 0.0) {
            CHECK(r[2] == 0.0);
            CHECK(r[3] == 0.0);
        }
    }
    CHECK(ns == std::set<double>{100.0, 500.0, 1e7});
    const auto gap = read_csv(cfg.output_dir / "fig5_gap.csv");
    REQUIRE(gap.rows.size() == 3);
    CHECK(gap.rows[0][0] == 100.0);
    CHECK(gap.rows[2][0] == 1e7);
    // Regression values of (M_u - M) / M_u at T1. Both models are saturating
    // by then for N = 1e7, so its gap is the smaller one at this time.
    CHECK(gap.rows[0][2] == doctest::Approx(0.102184).epsilon(1e-3));
    CHECK(gap.rows[1][2] == doctest::Approx(0.116662).epsilon(1e-3));
    CHECK(gap.rows[2][2] == doctest::Approx(0.0827225).epsilon(1e-3));
    // Earlier in the slot the bound is tighter for fewer channels.
    auto gap_at = [&](double n, double when) {
        for (const auto& r : t.rows)
            if (r[0] == n && r[1] >= when) return (r[3] - r[2]) / r[3];
        return -1.0;
    };
    CHECK(gap_at(100.0, 2e-3) < gap_at(1e7, 2e-3));
}

TEST_CASE("comparison figure files") {
    ex::ExperimentConfig cfg;
    cfg.output_dir = scratch("fig4");
    cfg.pbs.n_trials = 3;
    ex::run_fig4(cfg);
    const auto an = read_csv(cfg.output_dir / "fig4_analytic.csv");
    std::set<double> ns;
    for (const auto& r : an.rows) ns.insert(r[0]);
    CHECK(ns == std::set<double>{100.0, 500.0, 1e7});

    const auto joined = read_csv(cfg.output_dir / "fig4_compare.csv");
    CHECK(joined.header.size() == 6);
    std::set<double> dts;
    std::size_t per_dt = 0;
    for (const auto& r : joined.rows) {
        dts.insert(r[0]);
        if (r[0] == 1e-6) ++per_dt;
        CHECK((r[5] == 0.0 || r[5] == 1.0));
    }
    CHECK(dts == std::set<double>{1e-5, 1e-6});
    const auto pbs = read_csv(cfg.output_dir / "fig4_pbs_dt1e-06.csv");
    CHECK(pbs.header == std::vector<std::string>{"t_s", "w_hat_mo_per_s", "ci_mo_per_s", "M_hat_mo"});
    CHECK(per_dt == pbs.rows.size());
    CHECK(per_dt == 40);
}

TEST_CASE("command line") {
    const auto dir = scratch("cli");
    const std::string out = " --out " + dir.string();
    CHECK(run_cli("gating --segment 5:200 --segment 5:-200 --dt-ms 0.5" + out) == 0);
    const auto g = read_csv(dir / "gating.csv");
    CHECK(g.rows.size() == 21);
    CHECK(g.rows.back()[0] == doctest::Approx(10.0));

    CHECK(run_cli("analytic --set N=500 --quick" + out) == 0);
    CHECK(read_csv(dir / "analytic.csv").header == std::vector<std::string>{"t_s", "w_mo_per_s", "M_mo"});
    CHECK(run_cli("bound --n-terms 300 --tail-tol 1e-13 --quick" + out) == 0);
    CHECK(read_csv(dir / "bound.csv").header == std::vector<std::string>{"t_s", "w_u_mo_per_s", "M_u_mo"});

    CHECK(run_cli("pbs --set N=10000000 --trials 2 --dt 1e-5 --bins 10 --seed 99" + out) == 0);
    const auto a = slurp(dir / "pbs.csv");
    CHECK(read_csv(dir / "pbs.csv").rows.size() == 10);
    CHECK(run_cli("pbs --set N=10000000 --trials 2 --dt 1e-5 --bins 10" + out, "IONMOD_SEED=99") == 0);
    CHECK(slurp(dir / "pbs.csv") == a);
    CHECK(run_cli("pbs --set N=10000000 --trials 2 --dt 1e-5 --bins 10 --seed 1000" + out, "IONMOD_SEED=99") == 0);
    CHECK(slurp(dir / "pbs.csv") != a);

    CHECK(run_cli("laplace-dump --points 5" + out) == 0);
    CHECK(read_csv(dir / "laplace_dump.csv").rows.size() == 5);

    CHECK(run_cli("compare --scenario fig3-gating" + out) == 0);
    CHECK(fs::exists(dir / "fig3_von_25mV.csv"));

    // Exit codes.
    CHECK(run_cli("analytic --set bogus=1" + out) == 2);
    CHECK(run_cli("gating --segment 5" + out) == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("pbs --seed notanumber" + out) == 2);
    CHECK(run_cli("bound --set T1=1e-7 --set T_slot=1e-6" + out) == 3);
    CHECK(run_cli("analytic --out " + (dir / "gating.csv").string() + "/sub") == 4);
}
