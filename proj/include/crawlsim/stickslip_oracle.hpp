#pragma once

// Event-driven Coulomb stick-slip solver for the two-body crawler.
//
// Between events the motion is one of four modes, each integrable in closed
// form because the gait supplies l, l' and l'' analytically:
//   slip/slip    M y' = -m2 l'' - f1 s1 - f2 s2
//   body 1 stuck y = 0,     F1 = -m2 l'' - f2 s2
//   body 2 stuck y = -l',   F2 =  m1 l'' - f1 s1
//   both stuck   y = 0, l' = 0 (only possible while l'' = 0)
// Mode changes are located by bisection on switching functions sampled on a
// scan grid, and the next mode is chosen with classify_regime.

#include <string>
#include <vector>

#include "crawlsim/model.hpp"
#include "crawlsim/penalized_solver.hpp"
#include "crawlsim/trajectory.hpp"

namespace crawlsim {

struct OracleOptions {
    double v_stick = kDefaultStickBand;  ///< velocity band treated as rest [m/s]
    double a_stick = 1e-9;               ///< |l''| below which both bodies may rest [m/s^2]
    double event_scan = 1e-4;            ///< switching functions are sampled this often [s]
    double event_tol = 1e-10;            ///< event time tolerance, relative to the horizon
    std::size_t zeno_cap = 64;           ///< max events inside one Zeno window
    double zeno_window = 1e-6;           ///< Zeno window, relative to the horizon

    void validate() const;
};

struct RegimeEvent {
    double time;
    Regime before;
    Regime after;

    std::string description() const;
};

struct EventTrajectory {
    std::vector<double> grid;
    std::vector<double> y;
    std::vector<double> x1;  ///< exact integral of y
    std::vector<double> k1;
    std::vector<double> k2;
    std::vector<double> F1;
    std::vector<double> F2;
    std::vector<Regime> regimes;
    std::vector<RegimeEvent> events;
    /// Largest amount by which a stuck body's constraint force exceeded its
    /// friction magnitude at a sample (0 when the force law held everywhere).
    double max_stick_excess = 0.0;

    Trajectory to_trajectory() const;
};

/// Regime the Coulomb law selects for velocity y of body 1 (body 2 moves at
/// y + rate) under link acceleration `accel`. Resting bodies whose constraint
/// force would exceed the friction bound are reported as breaking away.
Regime classify_regime(const PhysicalParams& params, double y, double rate, double accel,
                       double v_stick = kDefaultStickBand, double a_stick = 1e-9);

/// Throws SolverError when more than zeno_cap events accumulate inside one
/// Zeno window.
EventTrajectory simulate_events(const PhysicalParams& params, const GaitProgram& gait,
                                const InitialConditions& ic, double horizon,
                                const SolverConfig& cfg, const OracleOptions& opts = {});

/// Displacement of body 1 over the last full gait period, with the first
/// period discarded as transient. Needs a periodic gait and >= 2 periods.
double net_displacement_per_period(std::span<const double> grid, std::span<const double> x1,
                                   const GaitProgram& gait);
double net_displacement_per_period(const EventTrajectory& traj, const GaitProgram& gait);
/// Positions are reconstructed from y by the trapezoid rule.
double net_displacement_per_period(const Trajectory& traj, const GaitProgram& gait);

}  // namespace crawlsim
