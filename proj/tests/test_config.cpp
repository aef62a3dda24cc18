#include "sscmg/cli.hpp"
#include "sscmg/config.hpp"
#include "sscmg/mesh_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sscmg;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream is(path);
    REQUIRE(is.good());
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return buffer.str();
}

std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("sscmg_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

constexpr const char* kNestedConfig = R"(
[problem]
application = local_nested
coarse_n = 2
levels = 2
rhs = manufactured

[schedule]
kind = constant:1

[solve]
rel_tol = 1e-9
max_cycles = 100
)";

}  // namespace

TEST_CASE("config parsing covers every section") {
    const ExperimentConfig config = parse_config_text(R"(
# comment
[problem]
application = local_nonnested
coarse_n = 4
levels = 2
theta = 2 0.5 3
rhs = constant

[subdomains]
rows = 2
cols = 2

[refinement]
corner_size = 0.5
shrink = false

[schedule]
kind = optimal:2

[solve]
rel_tol = 1e-8
max_cycles = 42

[sweep]
schedules = constant:1 increasing
j_min = 1
j_max = 2
)");
    CHECK(config.application == Application::local_nonnested);
    CHECK(config.coarse_n == 4);
    CHECK(config.levels == 2);
    CHECK(config.theta(0, 1) == 0.5);
    CHECK(config.rhs == RhsKind::constant);
    CHECK(config.schedule.kind == ScheduleKind::optimal_quadratic);
    CHECK(config.schedule.q == 2);
    CHECK(config.rel_tol == 1e-8);
    CHECK(config.max_cycles == 42);
    CHECK(config.sweep_schedules.size() == 2);
    CHECK(config.sweep_j_max == 2);
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_AS(parse_config_text("[problem]\napplication = upside_down\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[problem]\nmystery = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[problem]\ncoarse_n = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[problem]\ntheta = 1 5 1\n"), ConfigError);  // not SPD
    CHECK_THROWS_AS(parse_config_text("[solve]\nrel_tol = 2\n"), ConfigError);
    // misaligned subdomain grid names the constraint
    try {
        parse_config_text("[problem]\ncoarse_n = 4\n[subdomains]\nrows = 3\ncols = 3\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("grid") != std::string::npos);
    }
}

TEST_CASE("explicit per-level regions") {
    const ExperimentConfig config = parse_config_text(R"(
[problem]
application = local_nested
coarse_n = 2
levels = 2

[refinement]
region_1 = 0 1
region_2 = 0 1 2 3
)");
    REQUIRE(config.region.explicit_sets.size() == 2);
    CHECK(config.region.explicit_sets[0] == std::vector<int>{0, 1});
    CHECK(config.region.explicit_sets[1].size() == 4);
    // builds a hierarchy whose level-1 refinement is exactly cells 0 and 1
    const Hierarchy h = build_hierarchy(config.hierarchy_config());
    CHECK(h.levels[1].refined_parents == std::vector<char>{1, 1, 0, 0, 0, 0, 0, 0});
}

TEST_CASE("mesh command writes the level files") {
    const auto dir = fresh_dir("mesh");
    const ExperimentConfig config = parse_config_text(
        "[problem]\napplication = uniform\ncoarse_n = 2\nlevels = 2\n");
    std::ostringstream log;
    CHECK(cli::run_mesh(config, dir.string(), log) == cli::kExitOk);

    const auto [m0, r0] = read_mesh_file((dir / "level_0.mesh").string());
    const auto [m1, r1] = read_mesh_file((dir / "level_1.mesh").string());
    const auto [m2, r2] = read_mesh_file((dir / "level_2.mesh").string());
    CHECK(m0.num_triangles() == 8);
    CHECK(m1.num_triangles() == 32);
    CHECK(m2.num_triangles() == 128);
    CHECK(r2.empty());

    // hanging nodes are reported for local refinement
    const auto dir2 = fresh_dir("mesh_local");
    std::ostringstream log2;
    CHECK(cli::run_mesh(parse_config_text(kNestedConfig), dir2.string(), log2) == cli::kExitOk);
    const auto [lm, lr] = read_mesh_file((dir2 / "level_1.mesh").string());
    CHECK(!lr.empty());
    CHECK(log2.str().find("hanging") != std::string::npos);
}

TEST_CASE("solve command emits the cycle log and solution") {
    const auto dir = fresh_dir("solve");
    std::ostringstream log;
    CHECK(cli::run_solve(parse_config_text(kNestedConfig), dir.string(), log) == cli::kExitOk);
    const std::string csv = slurp(dir / "cycles.csv");
    CHECK(csv.rfind("cycle,residual,energy_error,ratio", 0) == 0);
    CHECK(std::filesystem::exists(dir / "solution.txt"));

    // non-convergence exits with the dedicated code but still writes the log
    auto config = parse_config_text(kNestedConfig);
    config.rel_tol = 1e-12;
    config.max_cycles = 1;
    const auto dir2 = fresh_dir("solve_nc");
    std::ostringstream log2;
    CHECK(cli::run_solve(config, dir2.string(), log2) == cli::kExitNonConvergence);
    CHECK(std::filesystem::exists(dir2 / "cycles.csv"));
}

TEST_CASE("verify command reports and exits by assumption status") {
    const auto dir = fresh_dir("verify");
    std::ostringstream log;
    CHECK(cli::run_verify(parse_config_text(kNestedConfig), dir.string(), log) == cli::kExitOk);
    const std::string json = slurp(dir / "verify.json");
    CHECK(json.find("\"schema\": 1") != std::string::npos);
    CHECK(json.find("\"all_pass\": true") != std::string::npos);
    CHECK(slurp(dir / "levels.csv").find("k,dim,m,delta") == 0);
}

TEST_CASE("identical config and seed reproduce bit-identical reports") {
    const auto dir1 = fresh_dir("det1");
    const auto dir2 = fresh_dir("det2");
    const auto config = parse_config_text(kNestedConfig);
    std::ostringstream log;
    REQUIRE(cli::run_verify(config, dir1.string(), log) == cli::kExitOk);
    REQUIRE(cli::run_verify(config, dir2.string(), log) == cli::kExitOk);
    CHECK(slurp(dir1 / "verify.json") == slurp(dir2 / "verify.json"));
    CHECK(slurp(dir1 / "levels.csv") == slurp(dir2 / "levels.csv"));

    const auto dir3 = fresh_dir("det3");
    const auto dir4 = fresh_dir("det4");
    REQUIRE(cli::run_solve(config, dir3.string(), log) == cli::kExitOk);
    REQUIRE(cli::run_solve(config, dir4.string(), log) == cli::kExitOk);
    CHECK(slurp(dir3 / "cycles.csv") == slurp(dir4 / "cycles.csv"));
    CHECK(slurp(dir3 / "solution.txt") == slurp(dir4 / "solution.txt"));
}

TEST_CASE("sweep command compares schedules") {
    auto config = parse_config_text(R"(
[problem]
application = local_nested
coarse_n = 2
levels = 2

[sweep]
schedules = constant:1 optimal:1
j_min = 1
j_max = 2
)");
    const auto dir = fresh_dir("sweep");
    std::ostringstream log;
    CHECK(cli::run_sweep(config, dir.string(), log) == cli::kExitOk);
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("application,schedule,J,rho_E,contraction,cycles", 0) == 0);
    // 2 schedules x 2 level counts
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("rhs file round trip") {
    const auto dir = fresh_dir("rhs");
    auto config = parse_config_text(kNestedConfig);
    const Hierarchy h = build_hierarchy(config.hierarchy_config());

    const auto path = dir / "load.txt";
    {
        std::ofstream os(path);
        for (int i = 0; i < h.dim(h.J()); ++i) os << 1.0 << '\n';
    }
    config.rhs = RhsKind::file;
    config.rhs_file = path.string();
    const Vector f = cli::build_rhs(config, h);
    CHECK(f.size() == h.dim(h.J()));
    CHECK(f.cwiseAbs().maxCoeff() == 1.0);

    config.rhs_file = (dir / "missing.txt").string();
    CHECK_THROWS_AS(cli::build_rhs(config, h), ConfigError);
}
