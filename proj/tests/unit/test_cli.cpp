#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "crawlsim/app/commands.hpp"
#include "crawlsim/app/config.hpp"
#include "crawlsim/app/csv_io.hpp"
#include "crawlsim/app/svg_plot.hpp"
#include "crawlsim/errors.hpp"

using namespace crawlsim;
using namespace crawlsim::app;
namespace fs = std::filesystem;

namespace {

const fs::path kData = CRAWLSIM_TEST_DATA;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("crawlsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(const std::string& cmd, const fs::path& config, const fs::path& out_dir,
            std::optional<fs::path> trajectory = std::nullopt) {
    CommandOptions o;
    o.config = config;
    o.out = out_dir;
    o.trajectory = trajectory;
    std::ostringstream out, err;
    const int code = run_command(cmd, o, out, err);
    return {code, out.str(), err.str()};
}

std::string config_error(std::string_view text) {
    try {
        parse_config(text);
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, ParsesBenchmark) {
    const auto cfg = load_config(kData / "benchmark.json");
    ASSERT_TRUE(cfg.params.has_value());
    EXPECT_EQ(cfg.params->f2(), 0.3);
    EXPECT_EQ(cfg.horizon, 5.0);
    EXPECT_EQ(cfg.refinement.k_max, 6);
    EXPECT_EQ(cfg.solver.output_grid, 0.01);
    EXPECT_DOUBLE_EQ(*cfg.gait->period(), 1.0);
}

TEST(Config, ErrorsNameTheField) {
    EXPECT_NE(config_error(slurp(kData / "negative_mass.json")).find("params.m1"), std::string::npos);
    EXPECT_NE(config_error(slurp(kData / "unknown_key.json")).find("solver.step"), std::string::npos);
    EXPECT_NE(config_error(R"({"params":{"m1":1,"m2":1,"f1":0,"f2":0},"gait":{"kind":"constant","length":1}})")
                  .find("horizon"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"params":{"m1":1,"m2":1,"f1":0,"f2":0},"gait":{"kind":"wave"},"horizon":1})")
                  .find("gait.kind"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"params":{"m1":1,"m2":1,"f1":0,"f2":0},"gait":{"kind":"constant","length":1},"horizon":1,"refinement":{"n0":[1]}})")
                  .find("refinement.n0"),
              std::string::npos);
    EXPECT_NE(config_error("{not json").find("JSON"), std::string::npos);
}

TEST(Config, ChainScenario) {
    const auto cfg = load_config(kData / "chain3.json");
    ASSERT_TRUE(cfg.is_chain());
    EXPECT_EQ(cfg.chain->bodies(), 3u);
    EXPECT_EQ(cfg.chain_n0, (std::vector<std::int64_t>{100, 100, 100}));
}

TEST(Csv, RoundTripIsExact) {
    TrajectoryTable t;
    t.t = {0.0, 0.1, 0.30000000000000004};
    t.y = {1.0 / 3.0, -2e-300, 5e300};
    t.x1 = {0, 1, 2};
    t.x2 = {1, 2, 3};
    t.k = {{0, 0.1, 0.2}, {-0.5, std::nextafter(-0.5, 0.0), 0.7}, {1, 2, 3}};
    t.F1 = {0.1, 0.1, -0.1};
    t.F2 = {0.3, 0.2, 0.1};
    t.G2 = {0, 0, 0};
    t.regime1 = {"stick", "slip+", "slip-"};
    t.regime2 = {"slip-", "stick", "slip+"};
    const auto dir = scratch("csv");
    write_trajectory_csv(dir / "t.csv", t);
    const auto back = read_trajectory_csv(dir / "t.csv");
    EXPECT_EQ(back.t, t.t);
    EXPECT_EQ(back.y, t.y);
    EXPECT_EQ(back.k, t.k);
    EXPECT_EQ(back.regime1, t.regime1);
    EXPECT_EQ(slurp(dir / "t.csv").substr(0, 51), "t,y,x1,x2,k1,k2,F1,F2,G2,regime1,regime2,k3\n0,0.333");
}

TEST(Csv, RejectsMalformedFiles) {
    const auto dir = scratch("csvbad");
    std::ofstream(dir / "a.csv") << "t,y\n0,1\n";
    EXPECT_THROW(read_trajectory_csv(dir / "a.csv"), InvalidInput);
    std::ofstream(dir / "b.csv") << "t,y,x1,x2,k1,k2,F1,F2,G2,regime1,regime2\n0,1,0,0,0,0,0,0,0,stick,stick\n"
                                    "0.1,abc,0,0,0,0,0,0,0,stick,stick\n";
    EXPECT_THROW(read_trajectory_csv(dir / "b.csv"), InvalidInput);
    EXPECT_THROW(read_trajectory_csv(dir / "missing.csv"), InvalidInput);
}

TEST(Svg, RendersSeriesAndBands) {
    const auto svg = render_svg({"title <x>", "t", "y", {{"a", {0, 1, 2}, {0, 1, 0}}}, {{0.5, 1.0, "#ccc", "b"}}});
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_NE(svg.find("title &lt;x&gt;"), std::string::npos);
    EXPECT_NE(svg.find("fill-opacity"), std::string::npos);
}

TEST(Commands, EquilibriumSimulateWritesConstantColumns) {
    const auto dir = scratch("equilibrium");
    const auto r = run("simulate", kData / "equilibrium.json", dir);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto tab = read_trajectory_csv(dir / "trajectory.csv");
    for (std::size_t j = 0; j < tab.size(); ++j) {
        EXPECT_EQ(tab.y[j], 0.0);
        EXPECT_EQ(tab.x1[j], 0.0);
        EXPECT_EQ(tab.k[0][j], 0.0);
        EXPECT_EQ(tab.k[1][j], 0.0);
        EXPECT_EQ(tab.regime1[j], "stick");
    }
}

TEST(Commands, NegativeMassIsConfigError) {
    const auto r = run("simulate", kData / "negative_mass.json", scratch("neg"));
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_NE(r.err.find("params.m1"), std::string::npos);
}

TEST(Commands, ZenoGuardIsSolverFailure) {
    const auto r = run("oracle", kData / "zeno.json", scratch("zeno"));
    EXPECT_EQ(r.code, kExitSolver);
}

TEST(Commands, SimulateMatchesGoldenAndIsReproducible) {
    const auto a = scratch("golden_a"), b = scratch("golden_b");
    ASSERT_EQ(run("simulate", kData / "benchmark.json", a).code, kExitOk);
    ASSERT_EQ(run("simulate", kData / "benchmark.json", b).code, kExitOk);
    const auto produced = slurp(a / "trajectory.csv");
    EXPECT_EQ(produced, slurp(b / "trajectory.csv"));
    EXPECT_EQ(produced, slurp(kData / "golden" / "benchmark_trajectory.csv"));
}

TEST(Commands, SimulateThenVerifyRoundTrip) {
    const auto dir = scratch("roundtrip");
    ASSERT_EQ(run("simulate", kData / "benchmark.json", dir).code, kExitOk);
    const auto r = run("verify", kData / "benchmark.json", dir, dir / "trajectory.csv");
    EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
    EXPECT_TRUE(fs::exists(dir / "verify_report.txt"));
    EXPECT_TRUE(fs::exists(dir / "verify_summary.csv"));
}

TEST(Commands, VerifyFlagsCorruptedImpulse) {
    const auto dir = scratch("corrupt");
    ASSERT_EQ(run("simulate", kData / "benchmark.json", dir).code, kExitOk);
    auto tab = read_trajectory_csv(dir / "trajectory.csv");
    for (std::size_t j = tab.size() / 3; j < tab.size(); ++j) tab.k[0][j] += 0.02;
    write_trajectory_csv(dir / "corrupt.csv", tab);
    const auto r = run("verify", kData / "benchmark.json", dir, dir / "corrupt.csv");
    EXPECT_EQ(r.code, kExitVerify);
    EXPECT_NE(r.out.find("linear_relation"), std::string::npos) << r.out;
}

TEST(Commands, VerifyEquilibrium) {
    EXPECT_EQ(run("verify", kData / "equilibrium.json", scratch("veq")).code, kExitOk);
}

TEST(Commands, OracleWritesEvents) {
    const auto dir = scratch("oracle");
    ASSERT_EQ(run("oracle", kData / "benchmark.json", dir).code, kExitOk);
    const auto tab = read_trajectory_csv(dir / "oracle.csv");
    EXPECT_EQ(tab.size(), 501u);
    EXPECT_NE(slurp(dir / "events.csv").find("time,before1,before2,after1,after2\n"), std::string::npos);
}

TEST(Commands, ConvergeTables) {
    const auto dir = scratch("converge");
    ASSERT_EQ(run("converge", kData / "benchmark.json", dir).code, kExitOk);
    std::istringstream table(slurp(dir / "convergence.csv"));
    std::string line;
    std::getline(table, line);
    EXPECT_EQ(line, "n,r,bound,measured_sup2,pass");
    int rows = 0;
    while (std::getline(table, line)) {
        ++rows;
        EXPECT_NE(line.find(",pass"), std::string::npos) << line;
    }
    EXPECT_EQ(rows, 6);

    const auto fl = scratch("converge_fl");
    ASSERT_EQ(run("converge", kData / "frictionless.json", fl).code, kExitOk);
    const auto text = slurp(fl / "convergence.csv");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(Commands, CompareBenchmarkAndConstant) {
    const auto dir = scratch("compare");
    CommandOptions o;
    o.config = kData / "benchmark.json";
    o.out = dir;
    o.plots = true;
    std::ostringstream out, err;
    EXPECT_EQ(run_command("compare", o, out, err), kExitOk) << out.str() << err.str();
    EXPECT_TRUE(fs::exists(dir / "compare_y.svg"));
    EXPECT_TRUE(fs::exists(dir / "compare.csv"));
    EXPECT_EQ(run("compare", kData / "equilibrium.json", scratch("compare_eq")).code, kExitOk);
    EXPECT_EQ(run("compare", kData / "symmetric.json", scratch("compare_sym")).code, kExitOk);
}

TEST(Commands, ChainSimulateAppendsChannels) {
    const auto dir = scratch("chain");
    const auto r = run("simulate", kData / "chain3.json", dir);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto tab = read_trajectory_csv(dir / "trajectory.csv");
    EXPECT_EQ(tab.k.size(), 3u);
    EXPECT_EQ(run("oracle", kData / "chain3.json", scratch("chain_oracle")).code, kExitConfig);
}

TEST(Commands, OutputDirectoryResolution) {
    ScenarioConfig cfg;
    CommandOptions o;
    ::unsetenv(kOutDirEnv);
    EXPECT_EQ(output_dir(o, cfg), fs::path("crawlsim-out"));
    ::setenv(kOutDirEnv, "/tmp/env_dir", 1);
    EXPECT_EQ(output_dir(o, cfg), fs::path("/tmp/env_dir"));
    cfg.outputs.dir = "cfg_dir";
    EXPECT_EQ(output_dir(o, cfg), fs::path("cfg_dir"));
    o.out = "flag_dir";
    EXPECT_EQ(output_dir(o, cfg), fs::path("flag_dir"));
    ::unsetenv(kOutDirEnv);
}

TEST(Executable, ExitCodes) {
    const std::string exe = CRAWLSIM_CLI;
    const auto dir = scratch("exe");
    auto status = [&](const std::string& args) {
        const int raw = std::system((exe + " " + args + " --quiet > /dev/null 2>&1").c_str());
        return WEXITSTATUS(raw);
    };
    EXPECT_EQ(status("simulate --config " + (kData / "equilibrium.json").string() + " --out " + dir.string()), 0);
    EXPECT_EQ(status("simulate --config " + (kData / "negative_mass.json").string() + " --out " + dir.string()), 2);
    EXPECT_EQ(status("oracle --config " + (kData / "zeno.json").string() + " --out " + dir.string()), 3);
    EXPECT_EQ(status("simulate --bogus"), 2);
    EXPECT_EQ(status("verify --config " + (kData / "equilibrium.json").string() + " --seed 7 --out " + dir.string()), 0);
}
