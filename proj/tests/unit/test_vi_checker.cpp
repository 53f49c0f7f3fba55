#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "crawlsim/errors.hpp"
#include "crawlsim/penalized_solver.hpp"
#include "crawlsim/vi_checker.hpp"

using namespace crawlsim;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const PhysicalParams kBench(1, 1, 0.1, 0.3);
const GaitProgram kBenchGait = GaitProgram::sinusoid(1.0, 0.25, kTwoPi);

Trajectory equilibrium(std::size_t n = 101) {
    Trajectory t;
    for (std::size_t j = 0; j < n; ++j) t.grid.push_back(0.01 * static_cast<double>(j));
    t.y.assign(n, 0.0);
    t.k.assign(2, std::vector<double>(n, 0.0));
    return t;
}

Trajectory benchmark_run() {
    return integrate(kBench, kBenchGait, {}, RegularizationIndex(3200, 3200), 5.0, {}).to_trajectory();
}

}  // namespace

TEST(Stieltjes, Examples) {
    const std::vector<double> c(11, 2.5);
    std::vector<double> k, t;
    for (int j = 0; j <= 10; ++j) k.push_back(std::sin(0.3 * j));
    EXPECT_NEAR(stieltjes(c, k), 2.5 * (k.back() - k.front()), 1e-15);
    EXPECT_EQ(stieltjes(k, c), 0.0);
    for (int j = 0; j <= 100; ++j) t.push_back(0.01 * j);
    EXPECT_NEAR(stieltjes(t, t), 0.5, 1e-15);
    EXPECT_THROW(stieltjes(t, c), InvalidInput);
}

TEST(LinearRelation, EquilibriumAndCorruption) {
    const auto eq = equilibrium();
    const auto gait = GaitProgram::constant(1.0);
    EXPECT_EQ(check_linear_relation(eq, kBench, gait), 0.0);
    auto bad = eq;
    for (double& v : bad.k[0]) v += 0.125;
    EXPECT_EQ(check_linear_relation(bad, kBench, gait), 0.125);
}

TEST(LinearRelation, GaugeInvariance) {
    auto traj = benchmark_run();
    const double base = check_linear_relation(traj, kBench, kBenchGait);
    for (double& v : traj.k[0]) v += 0.7;
    for (double& v : traj.k[1]) v -= 0.7;
    EXPECT_NEAR(check_linear_relation(traj, kBench, kBenchGait), base, 1e-12);
}

TEST(ViResidual, EqualityTestFunctionsGiveZero) {
    const auto traj = benchmark_run();
    EXPECT_EQ(vi_residual_1(traj, kBench, traj.y, 0.0, 5.0), 0.0);
    EXPECT_EQ(vi_residual_2(traj, kBench, kBenchGait, body2_velocity(traj, kBenchGait), 0.3, 4.1), 0.0);
}

TEST(ViResidual, EquilibriumConstants) {
    const auto eq = equilibrium();
    const auto gait = GaitProgram::constant(1.0);
    const std::vector<double> z(eq.size(), -0.4);
    EXPECT_NEAR(vi_residual_1(eq, kBench, z, 0.2, 0.7), -0.1 * 0.4 * 0.5, 1e-15);
    EXPECT_NEAR(vi_residual_2(eq, kBench, gait, z, 0.0, 1.0), -0.3 * 0.4 * 1.0, 1e-15);
}

TEST(ViResidual, AdditiveOverAdjacentWindows) {
    const auto traj = benchmark_run();
    std::vector<double> z(traj.size());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = std::cos(3.0 * traj.grid[j]);
    const auto i0 = window_index(traj.grid, 0.4), iu = window_index(traj.grid, 2.2),
               i1 = window_index(traj.grid, 4.9);
    const double whole = vi_residual(traj.grid, traj.y, traj.k1(), 0.1, z, i0, i1);
    const double parts = vi_residual(traj.grid, traj.y, traj.k1(), 0.1, z, i0, iu) +
                         vi_residual(traj.grid, traj.y, traj.k1(), 0.1, z, iu, i1);
    EXPECT_NEAR(whole, parts, 1e-14);
}

TEST(WindowIndex, NearestAndOutOfRange) {
    const std::vector<double> g{0, 0.1, 0.2, 0.3};
    EXPECT_EQ(window_index(g, 0.14), 1u);
    EXPECT_EQ(window_index(g, 0.16), 2u);
    EXPECT_EQ(window_index(g, 0.3), 3u);
    EXPECT_THROW(window_index(g, 0.5), InvalidInput);
    EXPECT_THROW(window_index(g, -0.1), InvalidInput);
}

TEST(TestFamily, ContainsBaseZeroAndIsBounded) {
    const auto traj = benchmark_run();
    const double bound = 3.0;
    const auto fam = TestFunctionFamily::build(traj.grid, traj.y, bound, 42);
    ASSERT_GE(fam.size(), 30u);
    EXPECT_EQ(fam.members()[0].values, traj.y);
    for (double v : fam.members()[1].values) EXPECT_EQ(v, 0.0);
    for (const auto& m : fam.members()) {
        for (double v : m.values) EXPECT_LE(std::abs(v), bound);
    }
    const auto again = TestFunctionFamily::build(traj.grid, traj.y, bound, 42);
    EXPECT_EQ(again.members().back().values, fam.members().back().values);
}

TEST(Uniqueness, IdenticalAndShifted) {
    const auto a = benchmark_run();
    const auto same = uniqueness_compare(a, a);
    EXPECT_EQ(same.y, 0.0);
    EXPECT_EQ(same.k_sum, 0.0);
    EXPECT_EQ(same.k1, 0.0);
    auto b = a;
    for (double& v : b.y) v += 0.03;
    EXPECT_NEAR(uniqueness_compare(a, b).y, 0.03, 1e-15);
}

TEST(Uniqueness, DisjointRangesRejected) {
    auto a = equilibrium(11);
    auto b = equilibrium(11);
    for (double& t : b.grid) t += 5.0;
    EXPECT_THROW(uniqueness_compare(a, b), InvalidInput);
}

TEST(Tolerance, Formula) {
    EXPECT_DOUBLE_EQ(vi_tolerance(0.3, 4.0, 5.0, 1e-3, 1e-2), 0.3 * 5.0 * 0.011);
}

TEST(Verify, BenchmarkRunPasses) {
    const auto traj = benchmark_run();
    VerifyOptions o;
    o.epsilon = std::sqrt(cauchy_bound(0.1, 0.3, {1600, 1600}, {3200, 3200}, 5.0));
    const auto rep = verify_trajectory(traj, kBench, kBenchGait, o);
    EXPECT_TRUE(rep.all_pass) << rep.worst().name;
    // 4 fixed lines + 2 per window over 3 canonical and 100 random windows.
    EXPECT_EQ(rep.lines.size(), 4u + 2u * 103u);
}

TEST(Verify, CorruptedImpulseFailsLinearRelation) {
    auto traj = benchmark_run();
    for (std::size_t j = traj.size() / 2; j < traj.size(); ++j) traj.k[0][j] += 0.05;
    const auto rep = verify_trajectory(traj, kBench, kBenchGait, {});
    EXPECT_FALSE(rep.all_pass);
    EXPECT_EQ(rep.lines.front().name, "linear_relation");
    EXPECT_FALSE(rep.lines.front().pass);
}
