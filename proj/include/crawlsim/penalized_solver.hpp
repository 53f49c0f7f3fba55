#pragma once

// Penalised (Moreau-Yosida regularised) crawler dynamics
//
//   M y' + phi_{1,n1}'(y) + phi_{2,n2}'(y + l') = -m2 l''
//
// integrated with an adaptive Dormand-Prince 5(4) pair. The impulses
// k1(t) = int phi_{1,n1}'(y) and k2(t) = c2 + int phi_{2,n2}'(y + l') are
// carried as extra state components so that M y + k1 + k2 = -m2 l' holds to
// integrator tolerance.

#include <cstdint>
#include <optional>
#include <vector>

#include "crawlsim/model.hpp"
#include "crawlsim/moreau_yosida.hpp"
#include "crawlsim/trajectory.hpp"

namespace crawlsim {

struct SolverConfig {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_max = 1e-2;           ///< largest internal step [s]
    double output_grid = 1e-3;     ///< spacing of the returned samples [s]
    double stiffness_guard = 1.0;  ///< internal steps satisfy h * max(n) <= guard

    void validate() const;
};

struct IntegrationStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
};

struct PenalizedTrajectory {
    std::vector<std::int64_t> n;  ///< one penalisation index per body
    std::vector<double> grid;
    std::vector<double> y;
    std::vector<std::vector<double>> k;  ///< impulse channels, the last one carries c
    double impulse_offset = 0.0;         ///< c2 = -M y0 - m2 l'(0) (two bodies)
    double linear_residual = 0.0;        ///< max_t |M y + sum k + m2 l'|
    IntegrationStats stats;

    const std::vector<double>& k1() const { return k.at(0); }
    const std::vector<double>& k2() const { return k.at(1); }
    RegularizationIndex index() const { return {n.at(0), n.at(1)}; }

    Trajectory to_trajectory() const;
};

/// Uniform grid 0, h, 2h, ... ending exactly at `horizon`.
std::vector<double> make_output_grid(double horizon, double spacing);

/// Right-hand side of the regularised equation, returns y'.
double rhs(const PhysicalParams& params, const GaitProgram& gait, const RegularizationIndex& n,
           double t, double y);

/// Integrates the regularised problem on [0, horizon]. Throws SolverError on
/// step-size underflow, a non-finite state, or when the linear relation drifts
/// beyond 10 (atol + rtol max|y|).
PenalizedTrajectory integrate(const PhysicalParams& params, const GaitProgram& gait,
                              const InitialConditions& ic, const RegularizationIndex& n,
                              double horizon, const SolverConfig& cfg);

/// f1^2 (1/n1 + 1/r1) t + f2^2 (1/n2 + 1/r2) t, the a priori bound on
/// sup_[0,t] |y^n - y^r|^2.
double cauchy_bound(double f1, double f2, const RegularizationIndex& n,
                    const RegularizationIndex& r, double t);

struct RefineOptions {
    RegularizationIndex n0{100, 100};
    double epsilon = 1e-2;  ///< target on sup |y^n - y^r| [m/s]
    int k_max = 6;          ///< at most k_max doublings, k_max + 1 runs
    bool parallel = true;
};

struct PairCheck {
    RegularizationIndex n;
    RegularizationIndex r;
    double bound;          ///< cauchy_bound(n, r, T)
    double measured_sup;   ///< sup over the grid of |y^n - y^r|
    bool within_bound;     ///< measured_sup^2 <= bound + kCauchySlack
};

/// Additive slack on the Cauchy comparison for integration error.
inline constexpr double kCauchySlack = 1e-6;

struct Certificate {
    double theoretical_bound = 0.0;  ///< bound of the last adjacent pair
    double measured_sup = 0.0;       ///< measured sup |y| difference of that pair
    double epsilon = 0.0;            ///< sqrt(theoretical_bound)
    bool converged = false;          ///< theoretical_bound <= epsilon^2 requested
    std::vector<PairCheck> pairs;
};

struct RefineResult {
    Trajectory limit;
    std::vector<PenalizedTrajectory> runs;
    Certificate certificate;
};

/// Indices refine will run: n0, n0 2, ..., n0 2^(K+1) where K is the first k
/// with cauchy_bound(n0 2^k, n0 2^(k+1), T) <= eps^2, capped so that at most
/// k_max doublings happen. A frictionless problem needs only n0.
struct SchedulePlan {
    std::vector<RegularizationIndex> stages;
    bool meets_bound;  ///< false when the cap was hit first
};
SchedulePlan plan_schedule(double f1, double f2, double horizon, const RefineOptions& opts);

/// Runs integrate over the doubling schedule n0 2^k until the a priori bound
/// certifies the requested epsilon or the budget is exhausted. The finest run
/// is returned as the limit candidate; when the budget runs out the result is
/// still returned with certificate.converged == false.
RefineResult refine(const PhysicalParams& params, const GaitProgram& gait,
                    const InitialConditions& ic, double horizon, const SolverConfig& cfg,
                    const RefineOptions& opts);

/// sup_j |a[j] - b[j]| for equally long sample vectors.
double sup_difference(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace crawlsim
