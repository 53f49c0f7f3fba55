#include "crawlsim/vi_checker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "crawlsim/errors.hpp"

namespace crawlsim {

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double interp(std::span<const double> grid, std::span<const double> v, double t) {
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    if (it == grid.begin()) return v.front();
    if (it == grid.end()) return v.back();
    const auto i = static_cast<std::size_t>(std::distance(grid.begin(), it));
    const double w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return (1.0 - w) * v[i - 1] + w * v[i];
}

}  // namespace

TestFunctionFamily TestFunctionFamily::build(std::span<const double> grid,
                                             std::span<const double> base, double bound,
                                             std::uint64_t seed, const TestFamilyOptions& opts) {
    require_monotone_grid(grid);
    if (base.size() != grid.size()) throw InvalidInput("test family base does not match the grid");
    if (!(bound > 0.0)) throw InvalidInput("test function bound must be > 0");

    TestFunctionFamily fam;
    const std::size_t n = grid.size();
    fam.members_.push_back({"base", {base.begin(), base.end()}});
    fam.members_.push_back({"zero", std::vector<double>(n, 0.0)});

    for (int i = 0; i < opts.constants; ++i) {
        const double c = opts.constants == 1
                             ? bound
                             : -bound + 2.0 * bound * i / static_cast<double>(opts.constants - 1);
        if (c == 0.0) continue;
        char label[48];
        std::snprintf(label, sizeof label, "const(%.6g)", c);
        fam.members_.push_back({label, std::vector<double>(n, c)});
    }

    const double t0 = grid.front();
    const double span = grid.back() - t0;
    for (int i = 0; i < opts.bumps; ++i) {
        const double centre = t0 + span * (i + 0.5) / opts.bumps;
        const double width = span / 10.0;
        const double height = (i % 2 == 0 ? 0.25 : -0.25) * bound;
        TestFunction fn{"base+bump" + std::to_string(i), std::vector<double>(n)};
        for (std::size_t j = 0; j < n; ++j) {
            const double u = (grid[j] - centre) / width;
            fn.values[j] = base[j] + height * std::exp(-u * u);
        }
        fam.members_.push_back(std::move(fn));
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> value(-bound, bound);
    std::uniform_real_distribution<double> when(t0, t0 + span);
    for (int i = 0; i < opts.random_linear; ++i) {
        std::vector<double> knots{t0, t0 + span};
        for (int q = 0; q < opts.random_knots; ++q) knots.push_back(when(rng));
        std::sort(knots.begin(), knots.end());
        std::vector<double> vals(knots.size());
        for (double& v : vals) v = value(rng);
        TestFunction fn{"random" + std::to_string(i), std::vector<double>(n)};
        for (std::size_t j = 0; j < n; ++j) fn.values[j] = interp(knots, vals, grid[j]);
        fam.members_.push_back(std::move(fn));
    }
    return fam;
}

double check_linear_relation(const Trajectory& traj, const PhysicalParams& params,
                             const GaitProgram& gait) {
    traj.validate();
    if (traj.bodies() != 2) throw InvalidInput("linear relation check needs k1 and k2");
    const double M = params.total_mass();
    double worst = 0.0;
    for (std::size_t j = 0; j < traj.size(); ++j) {
        const double rate = gait.evaluate(traj.grid[j]).rate;
        const double r = M * traj.y[j] + traj.k1()[j] + traj.k2()[j] + params.m2() * rate;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double stieltjes(std::span<const double> values, std::span<const double> k) {
    if (values.size() != k.size()) throw InvalidInput("Stieltjes sum needs a common grid");
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < values.size(); ++j) {
        sum += 0.5 * (values[j] + values[j + 1]) * (k[j + 1] - k[j]);
    }
    return sum;
}

double vi_residual(std::span<const double> grid, std::span<const double> v,
                   std::span<const double> k, double f, std::span<const double> z,
                   std::size_t i0, std::size_t i1) {
    const std::size_t n = grid.size();
    if (v.size() != n || k.size() != n || z.size() != n) {
        throw InvalidInput("variational residual needs samples on a common grid");
    }
    if (i0 > i1 || i1 >= n) throw InvalidInput("variational residual window out of range");

    double pairing = 0.0, phi_v = 0.0, phi_z = 0.0;
    for (std::size_t j = i0; j < i1; ++j) {
        const double dt = grid[j + 1] - grid[j];
        pairing += 0.5 * ((z[j] + z[j + 1]) - (v[j] + v[j + 1])) * (k[j + 1] - k[j]);
        phi_v += 0.5 * dt * (f * std::abs(v[j]) + f * std::abs(v[j + 1]));
        phi_z += 0.5 * dt * (f * std::abs(z[j]) + f * std::abs(z[j + 1]));
    }
    return pairing + phi_v - phi_z;
}

std::size_t window_index(std::span<const double> grid, double t) {
    if (grid.empty()) throw InvalidInput("empty grid");
    const double tol = 1e-9 * std::max(1.0, std::abs(grid.back()));
    if (t < grid.front() - tol || t > grid.back() + tol) {
        throw InvalidInput("window end " + std::to_string(t) + " lies outside the grid");
    }
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it == grid.end()) return grid.size() - 1;
    auto i = static_cast<std::size_t>(std::distance(grid.begin(), it));
    if (i > 0 && t - grid[i - 1] < grid[i] - t) --i;
    return i;
}

double vi_residual_1(const Trajectory& traj, const PhysicalParams& params,
                     std::span<const double> z, double s, double t) {
    traj.validate();
    return vi_residual(traj.grid, traj.y, traj.k1(), params.f1(), z, window_index(traj.grid, s),
                       window_index(traj.grid, t));
}

std::vector<double> body2_velocity(const Trajectory& traj, const GaitProgram& gait) {
    std::vector<double> v(traj.size());
    for (std::size_t j = 0; j < traj.size(); ++j) v[j] = traj.y[j] + gait.evaluate(traj.grid[j]).rate;
    return v;
}

double vi_residual_2(const Trajectory& traj, const PhysicalParams& params, const GaitProgram& gait,
                     std::span<const double> z, double s, double t) {
    traj.validate();
    const auto v = body2_velocity(traj, gait);
    return vi_residual(traj.grid, v, traj.k2(), params.f2(), z, window_index(traj.grid, s),
                       window_index(traj.grid, t));
}

UniquenessGap uniqueness_compare(const Trajectory& a, const Trajectory& b) {
    a.validate();
    b.validate();
    if (a.bodies() < 2 || b.bodies() < 2) throw InvalidInput("comparison needs k1 and k2");
    const double lo = std::max(a.grid.front(), b.grid.front());
    const double hi = std::min(a.grid.back(), b.grid.back());
    if (lo > hi) throw InvalidInput("trajectories cover disjoint time ranges");

    std::vector<double> b_sum(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) b_sum[j] = b.k1()[j] + b.k2()[j];

    UniquenessGap gap{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double t = a.grid[j];
        if (t < lo || t > hi) continue;
        gap.y = std::max(gap.y, std::abs(a.y[j] - interp(b.grid, b.y, t)));
        gap.k_sum = std::max(gap.k_sum, std::abs(a.k1()[j] + a.k2()[j] - interp(b.grid, b_sum, t)));
        gap.k1 = std::max(gap.k1, std::abs(a.k1()[j] - interp(b.grid, b.k1(), t)));
    }
    return gap;
}

double vi_tolerance(double f_max, double test_bound, double horizon, double grid_spacing,
                    double epsilon) {
    return f_max * std::max(test_bound, horizon) * (grid_spacing + epsilon);
}

const CheckLine& VerificationReport::worst() const {
    if (lines.empty()) throw InvalidInput("empty verification report");
    const CheckLine* best = &lines.front();
    for (const auto& line : lines) {
        const double excess = line.residual - line.tolerance;
        const double best_excess = best->residual - best->tolerance;
        if (line.pass != best->pass) {
            if (!line.pass) best = &line;
            continue;
        }
        if (excess > best_excess) best = &line;
    }
    return *best;
}

std::string VerificationReport::to_text() const {
    std::ostringstream out;
    char buf[256];
    for (const auto& l : lines) {
        std::snprintf(buf, sizeof buf, "%-28s [%.6f, %.6f] residual=%.6e tol=%.6e %s\n",
                      l.name.c_str(), l.s, l.t, l.residual, l.tolerance, l.pass ? "PASS" : "FAIL");
        out << buf;
    }
    return out.str();
}

VerificationReport verify_trajectory(const Trajectory& traj, const PhysicalParams& params,
                                     const GaitProgram& gait, const VerifyOptions& opts) {
    traj.validate();
    if (traj.bodies() != 2) throw InvalidInput("verification needs a two-body trajectory");

    VerificationReport rep;
    const double t0 = traj.grid.front();
    const double t1 = traj.grid.back();
    auto add = [&](std::string name, double s, double t, double residual, double tol) {
        const bool pass = residual <= tol;
        rep.all_pass = rep.all_pass && pass;
        rep.lines.push_back({std::move(name), s, t, residual, tol, pass});
    };

    const double max_y = max_abs(traj.y);
    add("linear_relation", t0, t1, check_linear_relation(traj, params, gait),
        1e-6 * std::max(1.0, max_y));
    add("k1_initial", t0, t0, std::abs(traj.k1().front()), 0.0);

    const auto v2 = body2_velocity(traj, gait);
    double max_rate = 0.0;
    for (double t : traj.grid) max_rate = std::max(max_rate, std::abs(gait.evaluate(t).rate));
    const double bound = 2.0 * (max_y + max_rate + 1.0);

    double spacing = 0.0;
    for (std::size_t j = 0; j + 1 < traj.size(); ++j) {
        spacing = std::max(spacing, traj.grid[j + 1] - traj.grid[j]);
    }
    rep.vi_tol = vi_tolerance(std::max(params.f1(), params.f2()), bound, t1 - t0, spacing,
                              opts.epsilon);

    const std::size_t last = traj.size() - 1;
    add("vi1_equality", t0, t1,
        std::abs(vi_residual(traj.grid, traj.y, traj.k1(), params.f1(), traj.y, 0, last)), 0.0);
    add("vi2_equality", t0, t1,
        std::abs(vi_residual(traj.grid, v2, traj.k2(), params.f2(), v2, 0, last)), 0.0);

    const auto fam1 = TestFunctionFamily::build(traj.grid, traj.y, bound, opts.seed, opts.family);
    const auto fam2 = TestFunctionFamily::build(traj.grid, v2, bound, opts.seed + 1, opts.family);

    std::vector<std::pair<std::size_t, std::size_t>> windows{
        {0, last}, {0, window_index(traj.grid, 0.5 * (t0 + t1))},
        {window_index(traj.grid, 0.5 * (t0 + t1)), last}};
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::size_t> pick(0, last);
    for (int w = 0; w < opts.random_windows; ++w) {
        std::size_t a = pick(rng), b = pick(rng);
        if (a > b) std::swap(a, b);
        windows.emplace_back(a, b);
    }

    auto sweep = [&](const char* name, std::span<const double> v, std::span<const double> k,
                     double f, const TestFunctionFamily& fam, std::size_t i0, std::size_t i1) {
        double worst = -INFINITY;
        std::string worst_label;
        for (const auto& z : fam.members()) {
            const double r = vi_residual(traj.grid, v, k, f, z.values, i0, i1);
            if (r > worst) {
                worst = r;
                worst_label = z.label;
            }
        }
        add(std::string(name) + "[" + worst_label + "]", traj.grid[i0], traj.grid[i1], worst,
            rep.vi_tol);
    };
    for (const auto& [i0, i1] : windows) {
        sweep("vi1", traj.y, traj.k1(), params.f1(), fam1, i0, i1);
        sweep("vi2", v2, traj.k2(), params.f2(), fam2, i0, i1);
    }
    return rep;
}

}  // namespace crawlsim
