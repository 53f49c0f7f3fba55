#pragma once

// Discrete checks that a trajectory (y, k1, k2) solves the crawler system:
//
//   M y + k1 + k2 = -m2 l'                                   (linear relation)
//   int (z - y) dk1 + int phi1(y) <= int phi1(z)             (body 1)
//   int (z - y - l') dk2 + int phi2(y + l') <= int phi2(z)   (body 2)
//
// for every window [s, t] and continuous z. Stieltjes integrals use the
// midpoint pairing sum 0.5 (v_j + v_j+1)(k_j+1 - k_j); Lebesgue integrals use
// the trapezoid rule on the same grid.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crawlsim/model.hpp"
#include "crawlsim/trajectory.hpp"

namespace crawlsim {

struct TestFunction {
    std::string label;
    std::vector<double> values;
};

struct TestFamilyOptions {
    int constants = 9;        ///< constants spread over [-bound, bound], zero always included
    int bumps = 4;            ///< base + smooth bumps of height +-bound/4
    int random_linear = 16;   ///< random piecewise-linear functions
    int random_knots = 12;    ///< breakpoints per random function
};

/// Finite family of continuous test functions sampled on a trajectory grid.
/// `base` is the function the inequality compares against (y for body 1,
/// y + l' for body 2); it is always a member, as is z = 0.
class TestFunctionFamily {
public:
    static TestFunctionFamily build(std::span<const double> grid, std::span<const double> base,
                                    double bound, std::uint64_t seed,
                                    const TestFamilyOptions& opts = {});

    const std::vector<TestFunction>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }

private:
    std::vector<TestFunction> members_;
};

/// max over the grid of |M y + k1 + k2 + m2 l'|.
double check_linear_relation(const Trajectory& traj, const PhysicalParams& params,
                             const GaitProgram& gait);

/// Midpoint Stieltjes sum of `values` against increments of `k`.
double stieltjes(std::span<const double> values, std::span<const double> k);

/// Residual of one variational inequality for velocity samples `v`, impulse
/// `k`, friction f and test function z over grid indices [i0, i1]:
/// int (z - v) dk + int f|v| - int f|z|. Non-positive for a solution.
double vi_residual(std::span<const double> grid, std::span<const double> v,
                   std::span<const double> k, double f, std::span<const double> z,
                   std::size_t i0, std::size_t i1);

/// Grid index nearest to time t; throws InvalidInput outside the grid.
std::size_t window_index(std::span<const double> grid, double t);

double vi_residual_1(const Trajectory& traj, const PhysicalParams& params,
                     std::span<const double> z, double s, double t);

double vi_residual_2(const Trajectory& traj, const PhysicalParams& params, const GaitProgram& gait,
                     std::span<const double> z, double s, double t);

/// y + l' sampled on the trajectory grid.
std::vector<double> body2_velocity(const Trajectory& traj, const GaitProgram& gait);

struct UniquenessGap {
    double y;       ///< sup |y_a - y_b|
    double k_sum;   ///< sup |(k1 + k2)_a - (k1 + k2)_b|
    double k1;      ///< sup |k1_a - k1_b|
};

/// Compares b against a on a's grid, interpolating b linearly; only the
/// overlapping time range is used.
UniquenessGap uniqueness_compare(const Trajectory& a, const Trajectory& b);

/// Residual tolerance for the inequality sweep, C (h + eps) with
/// C = max(f1, f2) max(B, T), where B bounds the test functions, h is the
/// grid spacing and eps the convergence certificate of the trajectory.
double vi_tolerance(double f_max, double test_bound, double horizon, double grid_spacing,
                    double epsilon);

struct CheckLine {
    std::string name;
    double s;
    double t;
    double residual;
    double tolerance;
    bool pass;
};

struct VerifyOptions {
    int random_windows = 100;
    std::uint64_t seed = 20240607;
    double epsilon = 0.0;  ///< convergence certificate of the trajectory
    TestFamilyOptions family;
};

struct VerificationReport {
    std::vector<CheckLine> lines;
    bool all_pass = true;
    double vi_tol = 0.0;

    /// The failing line with the largest residual excess, or the line with
    /// the largest residual when everything passed.
    const CheckLine& worst() const;
    std::string to_text() const;
};

/// Linear relation, k1(0) = 0, the equality test functions and the full
/// inequality sweep over canonical and seeded random windows.
VerificationReport verify_trajectory(const Trajectory& traj, const PhysicalParams& params,
                                     const GaitProgram& gait, const VerifyOptions& opts);

}  // namespace crawlsim
