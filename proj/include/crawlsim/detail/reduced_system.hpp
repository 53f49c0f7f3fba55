#pragma once

// Shared core of the two-body and chain solvers: p bodies on a line whose
// positions are x_i = x_1 + L_i(t), driven through the single velocity y = x_1'.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "crawlsim/model.hpp"
#include "crawlsim/moreau_yosida.hpp"
#include "crawlsim/penalized_solver.hpp"

namespace crawlsim::detail {

struct ReducedSystem {
    std::vector<double> masses;
    std::vector<FrictionPotential> potentials;
    /// Fills offsets[i] = (L_i, L_i', L_i'') for i = 0..p-1; offsets[0] is zero.
    std::function<void(double t, std::span<GaitState> offsets)> kinematics;

    std::size_t bodies() const noexcept { return masses.size(); }
    double total_mass() const;
};

/// y' for the reduced system; `clamps` (size p) receives phi_i'(y + L_i').
double reduced_accel(const ReducedSystem& sys, std::span<const std::int64_t> n, double t,
                     double y, std::span<GaitState> offsets, std::span<double> clamps);

PenalizedTrajectory integrate_reduced(const ReducedSystem& sys, std::span<const std::int64_t> n,
                                      double y0, double horizon, const SolverConfig& cfg);

}  // namespace crawlsim::detail
