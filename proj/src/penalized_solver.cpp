#include "crawlsim/penalized_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "crawlsim/detail/reduced_system.hpp"
#include "crawlsim/errors.hpp"

namespace crawlsim {

void SolverConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidInput(std::string("solver.") + name + " must be > 0");
        }
    };
    positive(rtol, "rtol");
    positive(atol, "atol");
    positive(h_max, "h_max");
    positive(output_grid, "output_grid");
    positive(stiffness_guard, "stiffness_guard");
}

void Trajectory::validate() const {
    require_monotone_grid(grid, "trajectory grid");
    if (y.size() != grid.size()) throw InvalidInput("trajectory y does not match the grid");
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i].size() != grid.size()) {
            throw InvalidInput("trajectory k" + std::to_string(i + 1) + " does not match the grid");
        }
    }
}

Trajectory PenalizedTrajectory::to_trajectory() const {
    std::ostringstream name;
    name << "penalized n=(";
    for (std::size_t i = 0; i < n.size(); ++i) name << (i ? "," : "") << n[i];
    name << ")";
    return {grid, y, k, name.str()};
}

std::vector<double> make_output_grid(double horizon, double spacing) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidInput("horizon must be > 0");
    if (!(spacing > 0.0)) throw InvalidInput("solver.output_grid must be > 0");
    const auto intervals = static_cast<std::size_t>(std::floor(horizon / spacing + 1e-9));
    std::vector<double> grid;
    grid.reserve(intervals + 2);
    for (std::size_t i = 0; i <= intervals; ++i) {
        grid.push_back(std::min(horizon, static_cast<double>(i) * spacing));
    }
    if (horizon - grid.back() > 1e-9 * spacing) {
        grid.push_back(horizon);
    } else {
        grid.back() = horizon;
    }
    return grid;
}

namespace detail {

double ReducedSystem::total_mass() const {
    double m = 0.0;
    for (double mi : masses) m += mi;
    return m;
}

double reduced_accel(const ReducedSystem& sys, std::span<const std::int64_t> n, double t,
                     double y, std::span<GaitState> offsets, std::span<double> clamps) {
    sys.kinematics(t, offsets);
    const std::size_t p = sys.bodies();
    double forcing = 0.0;
    for (std::size_t i = 1; i < p; ++i) forcing += sys.masses[i] * offsets[i].accel;
    double acc = -forcing;
    for (std::size_t i = 0; i < p; ++i) {
        clamps[i] = gradient(sys.potentials[i], n[i], y + offsets[i].rate);
        acc -= clamps[i];
    }
    return acc / sys.total_mass();
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// b - b_hat (error weights).
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

}  // namespace

PenalizedTrajectory integrate_reduced(const ReducedSystem& sys, std::span<const std::int64_t> n,
                                      double y0, double horizon, const SolverConfig& cfg) {
    cfg.validate();
    const std::size_t p = sys.bodies();
    if (p < 2 || sys.potentials.size() != p || n.size() != p) {
        throw InvalidInput("reduced system needs matching masses, frictions and indices");
    }
    for (std::int64_t ni : n) {
        if (ni < 1) throw InvalidInput("penalisation indices must be >= 1");
    }
    if (!std::isfinite(y0)) throw InvalidInput("initial.y0 must be finite");

    const std::size_t dim = p + 1;
    const double mass = sys.total_mass();
    std::vector<GaitState> offsets(p);
    std::vector<double> clamps(p);
    std::size_t evaluations = 0;

    auto deriv = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
        dx[0] = reduced_accel(sys, n, t, x[0], offsets, clamps);
        for (std::size_t i = 0; i < p; ++i) dx[i + 1] = clamps[i];
        ++evaluations;
    };

    // -sum_{i>=2} m_i L_i'(t): the right-hand side of the linear relation.
    auto linear_rhs = [&](double t) {
        sys.kinematics(t, offsets);
        double s = 0.0;
        for (std::size_t i = 1; i < p; ++i) s += sys.masses[i] * offsets[i].rate;
        return -s;
    };

    PenalizedTrajectory out;
    out.n.assign(n.begin(), n.end());
    out.grid = make_output_grid(horizon, cfg.output_grid);
    out.impulse_offset = -mass * y0 + linear_rhs(0.0);
    out.y.reserve(out.grid.size());
    out.k.assign(p, {});
    for (auto& ch : out.k) ch.reserve(out.grid.size());

    std::int64_t n_stiff = 0;
    for (std::size_t i = 0; i < p; ++i) {
        if (sys.potentials[i].friction() > 0.0) n_stiff = std::max(n_stiff, n[i]);
    }
    const double h_cap =
        n_stiff > 0 ? std::min(cfg.h_max, cfg.stiffness_guard / static_cast<double>(n_stiff))
                    : cfg.h_max;

    std::vector<double> x(dim, 0.0), xn(dim), tmp(dim);
    std::array<std::vector<double>, 7> K;
    for (auto& v : K) v.assign(dim, 0.0);
    x[0] = y0;

    auto record = [&](const std::vector<double>& state) {
        out.y.push_back(state[0]);
        for (std::size_t i = 0; i < p; ++i) {
            out.k[i].push_back(i + 1 == p ? state[i + 1] + out.impulse_offset : state[i + 1]);
        }
    };
    record(x);

    double t = 0.0;
    double h = std::min(h_cap, cfg.output_grid);
    deriv(t, x, K[0]);

    for (std::size_t j = 1; j < out.grid.size(); ++j) {
        const double t_target = out.grid[j];
        while (t < t_target) {
            // Stretch a step by a hair rather than leave a sliver before the grid point.
            const bool last = h * (1.0 + 1e-6) >= t_target - t;
            const double step = last ? t_target - t : h;
            if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
                throw SolverError("step size underflow at t = " + std::to_string(t) +
                                      " (penalisation index too large for the tolerances)",
                                  t);
            }

            auto stage = [&](std::size_t s, double c, std::initializer_list<double> a) {
                for (std::size_t d = 0; d < dim; ++d) {
                    double acc = 0.0;
                    std::size_t m = 0;
                    for (double aij : a) acc += aij * K[m++][d];
                    tmp[d] = x[d] + step * acc;
                }
                deriv(t + c * step, tmp, K[s]);
            };
            stage(1, c2, {a21});
            stage(2, c3, {a31, a32});
            stage(3, c4, {a41, a42, a43});
            stage(4, c5, {a51, a52, a53, a54});
            stage(5, 1.0, {a61, a62, a63, a64, a65});
            for (std::size_t d = 0; d < dim; ++d) {
                xn[d] = x[d] + step * (b1 * K[0][d] + b3 * K[2][d] + b4 * K[3][d] + b5 * K[4][d] +
                                       b6 * K[5][d]);
            }
            const double t_new = last ? t_target : t + step;
            deriv(t_new, xn, K[6]);

            double err = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double e = step * (e1 * K[0][d] + e3 * K[2][d] + e4 * K[3][d] +
                                         e5 * K[4][d] + e6 * K[5][d] + e7 * K[6][d]);
                const double scale = cfg.atol + cfg.rtol * std::max(std::abs(x[d]), std::abs(xn[d]));
                err = std::max(err, std::abs(e) / scale);
            }
            if (!std::isfinite(err) || !std::isfinite(xn[0])) {
                throw SolverError("non-finite state at t = " + std::to_string(t), t);
            }

            const double factor =
                err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                t = t_new;
                x.swap(xn);
                std::swap(K[0], K[6]);
                ++out.stats.accepted;
                // A step shortened to land on the grid says nothing about h.
                if (!last || step >= h) h = std::min(h_cap, step * factor);
            } else {
                ++out.stats.rejected;
                h = std::min(h_cap, step * std::min(1.0, factor));
            }
        }
        record(x);
    }
    out.stats.rhs_evaluations = evaluations;

    double max_abs_y = 0.0;
    for (double v : out.y) max_abs_y = std::max(max_abs_y, std::abs(v));
    for (std::size_t j = 0; j < out.grid.size(); ++j) {
        double lhs = mass * out.y[j];
        for (std::size_t i = 0; i < p; ++i) lhs += out.k[i][j];
        out.linear_residual = std::max(out.linear_residual, std::abs(lhs - linear_rhs(out.grid[j])));
    }
    const double allowed = 10.0 * (cfg.atol + cfg.rtol * max_abs_y);
    if (out.linear_residual > allowed) {
        std::ostringstream msg;
        msg << "linear relation residual " << out.linear_residual << " exceeds " << allowed;
        throw SolverError(msg.str(), horizon);
    }
    return out;
}

}  // namespace detail

namespace {

detail::ReducedSystem two_body_system(const PhysicalParams& params, const GaitProgram& gait) {
    detail::ReducedSystem sys;
    sys.masses = {params.m1(), params.m2()};
    sys.potentials = {FrictionPotential(params.f1()), FrictionPotential(params.f2())};
    sys.kinematics = [&gait](double t, std::span<GaitState> offsets) {
        offsets[0] = {};
        offsets[1] = gait.evaluate(t);
    };
    return sys;
}

}  // namespace

double rhs(const PhysicalParams& params, const GaitProgram& gait, const RegularizationIndex& n,
           double t, double y) {
    const auto sys = two_body_system(params, gait);
    const std::array<std::int64_t, 2> idx{n.n1(), n.n2()};
    std::array<GaitState, 2> offsets;
    std::array<double, 2> clamps;
    return detail::reduced_accel(sys, idx, t, y, offsets, clamps);
}

PenalizedTrajectory integrate(const PhysicalParams& params, const GaitProgram& gait,
                              const InitialConditions& ic, const RegularizationIndex& n,
                              double horizon, const SolverConfig& cfg) {
    ic.validate();
    const auto sys = two_body_system(params, gait);
    const std::array<std::int64_t, 2> idx{n.n1(), n.n2()};
    return detail::integrate_reduced(sys, idx, ic.y0, horizon, cfg);
}

double cauchy_bound(double f1, double f2, const RegularizationIndex& n,
                    const RegularizationIndex& r, double t) {
    if (!(t >= 0.0)) throw InvalidInput("cauchy_bound horizon must be >= 0");
    auto inv = [](std::int64_t v) { return 1.0 / static_cast<double>(v); };
    return f1 * f1 * (inv(n.n1()) + inv(r.n1())) * t + f2 * f2 * (inv(n.n2()) + inv(r.n2())) * t;
}

double sup_difference(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InvalidInput("sample vectors differ in length");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

SchedulePlan plan_schedule(double f1, double f2, double horizon, const RefineOptions& opts) {
    if (!(opts.epsilon > 0.0)) throw InvalidInput("refinement.epsilon must be > 0");
    if (opts.k_max < 0 || opts.k_max > 30) throw InvalidInput("refinement.k_max must be in [0, 30]");

    SchedulePlan plan{{opts.n0}, false};
    const double target = opts.epsilon * opts.epsilon;
    if (f1 == 0.0 && f2 == 0.0) {
        plan.meets_bound = true;
        return plan;
    }
    for (int k = 0; k < opts.k_max; ++k) {
        const auto next = opts.n0.doubled(k + 1);
        plan.stages.push_back(next);
        if (cauchy_bound(f1, f2, opts.n0.doubled(k), next, horizon) <= target) {
            plan.meets_bound = true;
            break;
        }
    }
    return plan;
}

RefineResult refine(const PhysicalParams& params, const GaitProgram& gait,
                    const InitialConditions& ic, double horizon, const SolverConfig& cfg,
                    const RefineOptions& opts) {
    cfg.validate();
    const SchedulePlan plan = plan_schedule(params.f1(), params.f2(), horizon, opts);

    RefineResult result;
    result.runs.reserve(plan.stages.size());
    if (opts.parallel && plan.stages.size() > 1) {
        std::vector<std::future<PenalizedTrajectory>> jobs;
        for (const auto& n : plan.stages) {
            jobs.push_back(std::async(std::launch::async, [&, n] {
                return integrate(params, gait, ic, n, horizon, cfg);
            }));
        }
        for (auto& job : jobs) result.runs.push_back(job.get());
    } else {
        for (const auto& n : plan.stages) {
            result.runs.push_back(integrate(params, gait, ic, n, horizon, cfg));
        }
    }

    Certificate& cert = result.certificate;
    for (std::size_t i = 0; i + 1 < result.runs.size(); ++i) {
        const auto& a = result.runs[i];
        const auto& b = result.runs[i + 1];
        PairCheck pc{a.index(), b.index(),
                     cauchy_bound(params.f1(), params.f2(), a.index(), b.index(), horizon),
                     sup_difference(a.y, b.y), false};
        pc.within_bound = pc.measured_sup * pc.measured_sup <= pc.bound + kCauchySlack;
        cert.pairs.push_back(pc);
    }
    if (!cert.pairs.empty()) {
        cert.theoretical_bound = cert.pairs.back().bound;
        cert.measured_sup = cert.pairs.back().measured_sup;
    } else {
        // A single run: distance to the limit is bounded by the r -> infinity
        // form of the bound.
        const auto& n = plan.stages.front();
        cert.theoretical_bound = params.f1() * params.f1() * horizon / static_cast<double>(n.n1()) +
                                 params.f2() * params.f2() * horizon / static_cast<double>(n.n2());
    }
    cert.epsilon = std::sqrt(cert.theoretical_bound);
    cert.converged = plan.meets_bound;
    result.limit = result.runs.back().to_trajectory();
    return result;
}

}  // namespace crawlsim
