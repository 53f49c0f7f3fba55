#pragma once

// p >= 2 bodies on a line joined by p - 1 prescribed links l_j = x_{j+1} - x_j.
// With L_i = l_1 + ... + l_{i-1} (L_1 = 0) every body moves at y + L_i', so
//
//   M_tot y' + sum_i phi_{i,n_i}'(y + L_i') = -sum_i m_i L_i''
//
// and the impulses satisfy M_tot y + sum_i k_i = -sum_i m_i L_i', with the
// initial constant carried by k_p.

#include <cstdint>
#include <span>
#include <vector>

#include "crawlsim/model.hpp"
#include "crawlsim/penalized_solver.hpp"

namespace crawlsim {

class ChainSpec {
public:
    /// Throws InvalidInput on p < 2, inconsistent list lengths, a mass <= 0 or
    /// a friction < 0.
    ChainSpec(std::vector<double> masses, std::vector<double> frictions,
              std::vector<GaitProgram> links);

    /// The two-body crawler as a chain of length 2.
    static ChainSpec from_two_body(const PhysicalParams& params, const GaitProgram& gait);

    std::size_t bodies() const noexcept { return masses_.size(); }
    const std::vector<double>& masses() const noexcept { return masses_; }
    const std::vector<double>& frictions() const noexcept { return frictions_; }
    const std::vector<GaitProgram>& links() const noexcept { return links_; }
    double total_mass() const noexcept;

    /// (L_i, L_i', L_i'') for i = 0..p-1.
    void offsets(double t, std::span<GaitState> out) const;

private:
    std::vector<double> masses_;
    std::vector<double> frictions_;
    std::vector<GaitProgram> links_;
};

/// y' of the regularised chain; bit-identical to rhs() when p = 2.
double chain_rhs(const ChainSpec& spec, std::span<const std::int64_t> n, double t, double y);

/// Integrates the regularised chain with p impulse channels.
PenalizedTrajectory chain_integrate(const ChainSpec& spec, const InitialConditions& ic,
                                    std::span<const std::int64_t> n, double horizon,
                                    const SolverConfig& cfg);

/// sum_i f_i^2 (1/n_i + 1/r_i) t.
double chain_cauchy_bound(const ChainSpec& spec, std::span<const std::int64_t> n,
                          std::span<const std::int64_t> r, double t);

struct ChainPairCheck {
    std::vector<std::int64_t> n;
    std::vector<std::int64_t> r;
    double bound;
    double measured_sup;
    bool within_bound;  ///< measured_sup^2 <= bound + kCauchySlack
};

struct ChainStudy {
    std::vector<PenalizedTrajectory> runs;
    std::vector<ChainPairCheck> pairs;
};

/// Runs n0, 2 n0, ..., 2^doublings n0 and checks every adjacent pair.
ChainStudy chain_doubling_study(const ChainSpec& spec, const InitialConditions& ic,
                                std::span<const std::int64_t> n0, int doublings, double horizon,
                                const SolverConfig& cfg, bool parallel = true);

}  // namespace crawlsim
