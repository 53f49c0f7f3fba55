#include "crawlsim/chain.hpp"

#include <cmath>
#include <future>

#include "crawlsim/detail/reduced_system.hpp"
#include "crawlsim/errors.hpp"

namespace crawlsim {

ChainSpec::ChainSpec(std::vector<double> masses, std::vector<double> frictions,
                     std::vector<GaitProgram> links)
    : masses_(std::move(masses)), frictions_(std::move(frictions)), links_(std::move(links)) {
    const std::size_t p = masses_.size();
    if (p < 2) throw InvalidInput("chain.masses needs at least 2 bodies");
    if (frictions_.size() != p) {
        throw InvalidInput("chain.frictions has " + std::to_string(frictions_.size()) +
                           " entries, expected " + std::to_string(p));
    }
    if (links_.size() != p - 1) {
        throw InvalidInput("chain.links has " + std::to_string(links_.size()) +
                           " entries, expected " + std::to_string(p - 1));
    }
    for (std::size_t i = 0; i < p; ++i) {
        if (!(masses_[i] > 0.0) || !std::isfinite(masses_[i])) {
            throw InvalidInput("chain.masses[" + std::to_string(i) + "] must be a finite mass > 0");
        }
        if (!(frictions_[i] >= 0.0) || !std::isfinite(frictions_[i])) {
            throw InvalidInput("chain.frictions[" + std::to_string(i) + "] must be finite and >= 0");
        }
    }
}

ChainSpec ChainSpec::from_two_body(const PhysicalParams& params, const GaitProgram& gait) {
    return ChainSpec({params.m1(), params.m2()}, {params.f1(), params.f2()}, {gait});
}

double ChainSpec::total_mass() const noexcept {
    double m = 0.0;
    for (double mi : masses_) m += mi;
    return m;
}

void ChainSpec::offsets(double t, std::span<GaitState> out) const {
    out[0] = {};
    if (out.size() > 1) out[1] = links_[0].evaluate(t);
    for (std::size_t i = 2; i < out.size(); ++i) {
        const GaitState l = links_[i - 1].evaluate(t);
        out[i] = {out[i - 1].length + l.length, out[i - 1].rate + l.rate,
                  out[i - 1].accel + l.accel};
    }
}

namespace {

detail::ReducedSystem chain_system(const ChainSpec& spec) {
    detail::ReducedSystem sys;
    sys.masses = spec.masses();
    for (double f : spec.frictions()) sys.potentials.emplace_back(f);
    sys.kinematics = [&spec](double t, std::span<GaitState> offsets) { spec.offsets(t, offsets); };
    return sys;
}

void require_indices(const ChainSpec& spec, std::span<const std::int64_t> n, const char* what) {
    if (n.size() != spec.bodies()) {
        throw InvalidInput(std::string(what) + " has " + std::to_string(n.size()) +
                           " indices, expected " + std::to_string(spec.bodies()));
    }
    for (std::int64_t v : n) {
        if (v < 1) throw InvalidInput(std::string(what) + " indices must be >= 1");
    }
}

}  // namespace

double chain_rhs(const ChainSpec& spec, std::span<const std::int64_t> n, double t, double y) {
    require_indices(spec, n, "chain index");
    const auto sys = chain_system(spec);
    std::vector<GaitState> offsets(spec.bodies());
    std::vector<double> clamps(spec.bodies());
    return detail::reduced_accel(sys, n, t, y, offsets, clamps);
}

PenalizedTrajectory chain_integrate(const ChainSpec& spec, const InitialConditions& ic,
                                    std::span<const std::int64_t> n, double horizon,
                                    const SolverConfig& cfg) {
    ic.validate();
    require_indices(spec, n, "chain index");
    const auto sys = chain_system(spec);
    return detail::integrate_reduced(sys, n, ic.y0, horizon, cfg);
}

double chain_cauchy_bound(const ChainSpec& spec, std::span<const std::int64_t> n,
                          std::span<const std::int64_t> r, double t) {
    require_indices(spec, n, "chain index n");
    require_indices(spec, r, "chain index r");
    if (!(t >= 0.0)) throw InvalidInput("chain_cauchy_bound horizon must be >= 0");
    double b = 0.0;
    for (std::size_t i = 0; i < spec.bodies(); ++i) {
        const double f = spec.frictions()[i];
        b += f * f * (1.0 / static_cast<double>(n[i]) + 1.0 / static_cast<double>(r[i])) * t;
    }
    return b;
}

ChainStudy chain_doubling_study(const ChainSpec& spec, const InitialConditions& ic,
                                std::span<const std::int64_t> n0, int doublings, double horizon,
                                const SolverConfig& cfg, bool parallel) {
    require_indices(spec, n0, "chain n0");
    if (doublings < 0 || doublings > 30) throw InvalidInput("chain doublings must be in [0, 30]");

    std::vector<std::vector<std::int64_t>> stages;
    for (int k = 0; k <= doublings; ++k) {
        std::vector<std::int64_t> idx(n0.begin(), n0.end());
        for (auto& v : idx) v <<= k;
        stages.push_back(std::move(idx));
    }

    ChainStudy study;
    if (parallel && stages.size() > 1) {
        std::vector<std::future<PenalizedTrajectory>> jobs;
        for (const auto& idx : stages) {
            jobs.push_back(std::async(std::launch::async, [&, idx] {
                return chain_integrate(spec, ic, idx, horizon, cfg);
            }));
        }
        for (auto& job : jobs) study.runs.push_back(job.get());
    } else {
        for (const auto& idx : stages) study.runs.push_back(chain_integrate(spec, ic, idx, horizon, cfg));
    }

    for (std::size_t i = 0; i + 1 < study.runs.size(); ++i) {
        ChainPairCheck pc{stages[i], stages[i + 1],
                          chain_cauchy_bound(spec, stages[i], stages[i + 1], horizon),
                          sup_difference(study.runs[i].y, study.runs[i + 1].y), false};
        pc.within_bound = pc.measured_sup * pc.measured_sup <= pc.bound + kCauchySlack;
        study.pairs.push_back(std::move(pc));
    }
    return study;
}

}  // namespace crawlsim
