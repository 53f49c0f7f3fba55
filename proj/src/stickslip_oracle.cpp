#include "crawlsim/stickslip_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "crawlsim/errors.hpp"

namespace crawlsim {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

BodyRegime moving(int sigma, bool breakaway) {
    return {sigma > 0 ? BodyState::SlipPlus : BodyState::SlipMinus, sigma, breakaway};
}

constexpr BodyRegime kStuck{BodyState::Stick, 0, false};

enum class Mode { SlipSlip, Stick1, Stick2, BothStick };

// One analytic piece of the motion, anchored at t0.
struct Piece {
    Mode mode;
    int s1 = 0;
    int s2 = 0;
    double t0 = 0.0;
    double y0 = 0.0;
    double x10 = 0.0;
    double k10 = 0.0;
    double k20 = 0.0;
    GaitState g0;
    double rest_band = 0.0;  // both-stick holds while |l'| <= rest_band
};

struct Sample {
    double y, x1, k1, k2, F1, F2;
};

class Dynamics {
public:
    Dynamics(const PhysicalParams& params, const GaitProgram& gait)
        : m1_(params.m1()), m2_(params.m2()), M_(params.total_mass()), f1_(params.f1()),
          f2_(params.f2()), gait_(gait) {}

    Sample eval(const Piece& p, double t) const {
        const GaitState g = gait_.evaluate(t);
        const double dt = t - p.t0;
        const double dl = g.length - p.g0.length;
        const double drate = g.rate - p.g0.rate;
        switch (p.mode) {
            case Mode::SlipSlip: {
                const double drag = f1_ * p.s1 + f2_ * p.s2;
                return {p.y0 - m2_ * drate / M_ - drag * dt / M_,
                        p.x10 + p.y0 * dt - m2_ * (dl - p.g0.rate * dt) / M_ -
                            0.5 * drag * dt * dt / M_,
                        p.k10 + f1_ * p.s1 * dt,
                        p.k20 + f2_ * p.s2 * dt,
                        f1_ * p.s1,
                        f2_ * p.s2};
            }
            case Mode::Stick1:
                return {0.0,
                        p.x10,
                        p.k10 - m2_ * drate - f2_ * p.s2 * dt,
                        p.k20 + f2_ * p.s2 * dt,
                        -m2_ * g.accel - f2_ * p.s2,
                        f2_ * p.s2};
            case Mode::Stick2:
                return {-g.rate,
                        p.x10 - dl,
                        p.k10 + f1_ * p.s1 * dt,
                        p.k20 + m1_ * drate - f1_ * p.s1 * dt,
                        f1_ * p.s1,
                        m1_ * g.accel - f1_ * p.s1};
            case Mode::BothStick:
                // Any split of -m2 l'' (which is ~0 here) is admissible.
                return {0.0, p.x10, p.k10, p.k20 - m2_ * drate, 0.0, -m2_ * g.accel};
        }
        return {};
    }

    // Smallest switching function value; negative once the piece is invalid.
    double margin(const Piece& p, double t, double v_stick) const {
        const GaitState g = gait_.evaluate(t);
        double a = 0.0, b = 0.0;
        switch (p.mode) {
            case Mode::SlipSlip: {
                const double y = eval(p, t).y;
                a = p.s1 * y;
                b = p.s2 * (y + g.rate);
                break;
            }
            case Mode::Stick1:
                a = f1_ - std::abs(m2_ * g.accel + f2_ * p.s2);
                b = p.s2 * g.rate;
                break;
            case Mode::Stick2:
                a = p.s1 * -g.rate;
                b = f2_ - std::abs(m1_ * g.accel - f1_ * p.s1);
                break;
            case Mode::BothStick:
                a = b = std::max(v_stick, p.rest_band) - std::abs(g.rate);
                break;
        }
        return std::min(a, b);
    }

    double f1() const { return f1_; }
    double f2() const { return f2_; }

private:
    double m1_, m2_, M_, f1_, f2_;
    const GaitProgram& gait_;
};

Regime regime_of(const Piece& p) {
    switch (p.mode) {
        case Mode::SlipSlip: return {moving(p.s1, false), moving(p.s2, false)};
        case Mode::Stick1: return {kStuck, moving(p.s2, false)};
        case Mode::Stick2: return {moving(p.s1, false), kStuck};
        case Mode::BothStick: return {kStuck, kStuck};
    }
    return {};
}

Piece piece_for(const Regime& r) {
    Piece p;
    const bool stick1 = r.body1.state == BodyState::Stick;
    const bool stick2 = r.body2.state == BodyState::Stick;
    if (stick1 && stick2) {
        p.mode = Mode::BothStick;
    } else if (stick1) {
        p.mode = Mode::Stick1;
        p.s2 = r.body2.sigma;
    } else if (stick2) {
        p.mode = Mode::Stick2;
        p.s1 = r.body1.sigma;
    } else {
        p.mode = Mode::SlipSlip;
        p.s1 = r.body1.sigma;
        p.s2 = r.body2.sigma;
    }
    return p;
}

}  // namespace

void OracleOptions::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidInput(std::string("oracle.") + name + " must be > 0");
        }
    };
    positive(v_stick, "v_stick");
    positive(a_stick, "a_stick");
    positive(event_scan, "event_scan");
    positive(event_tol, "event_tol");
    positive(zeno_window, "zeno_window");
    if (zeno_cap < 1) throw InvalidInput("oracle.zeno_cap must be >= 1");
}

std::string RegimeEvent::description() const {
    std::ostringstream s;
    s << "body1 " << to_string(before.body1.state) << "->" << to_string(after.body1.state)
      << " body2 " << to_string(before.body2.state) << "->" << to_string(after.body2.state);
    return s.str();
}

Trajectory EventTrajectory::to_trajectory() const { return {grid, y, {k1, k2}, "event-driven"}; }

Regime classify_regime(const PhysicalParams& params, double y, double rate, double accel,
                       double v_stick, double a_stick) {
    const double m1 = params.m1(), m2 = params.m2(), f1 = params.f1(), f2 = params.f2();
    const double v1 = y;
    const double v2 = y + rate;
    const bool rest1 = std::abs(v1) <= v_stick;
    const bool rest2 = std::abs(v2) <= v_stick;

    if (!rest1 && !rest2) return {moving(sign_of(v1), false), moving(sign_of(v2), false)};

    if (rest1 && !rest2) {
        // Body 2 slides with F2 = f2 s2; body 1 must supply F1 = -m2 l'' - F2.
        const int s2 = sign_of(v2);
        const auto r1 = coulomb_force(-m2 * accel - f2 * s2, 0.0, f1, v_stick);
        return {r1.regime, moving(s2, false)};
    }
    if (!rest1 && rest2) {
        const int s1 = sign_of(v1);
        const auto r2 = coulomb_force(m1 * accel - f1 * s1, 0.0, f2, v_stick);
        return {moving(s1, false), r2.regime};
    }

    // Both at rest. Keeping both at rest forces l'' = 0 (the link cannot
    // change length while neither body moves); then lambda1 = lambda2 = 0 is
    // a feasible force pair.
    if (std::abs(accel) <= a_stick) return {kStuck, kStuck};
    const int sa = sign_of(accel);
    // Body 1 holds while the link carries body 2 along in direction sa.
    if (std::abs(-m2 * accel - f2 * sa) <= f1) return {kStuck, moving(sa, true)};
    // Body 2 holds while body 1 is pushed in direction -sa.
    if (std::abs(m1 * accel + f1 * sa) <= f2) return {moving(-sa, true), kStuck};
    return {moving(-sa, true), moving(sa, true)};
}

EventTrajectory simulate_events(const PhysicalParams& params, const GaitProgram& gait,
                                const InitialConditions& ic, double horizon,
                                const SolverConfig& cfg, const OracleOptions& opts) {
    cfg.validate();
    opts.validate();
    ic.validate();

    const Dynamics dyn(params, gait);
    const double M = params.total_mass();
    const double t_tol = opts.event_tol * horizon;
    const double zeno_span = opts.zeno_window * horizon;

    EventTrajectory out;
    out.grid = make_output_grid(horizon, cfg.output_grid);

    auto start_piece = [&](double t, double y, double x1, double k1, double k2) {
        const GaitState g = gait.evaluate(t);
        Piece p = piece_for(classify_regime(params, y, g.rate, g.accel, opts.v_stick, opts.a_stick));
        p.t0 = t;
        p.y0 = y;
        p.x10 = x1;
        p.k10 = k1;
        p.k20 = k2;
        p.g0 = g;
        p.rest_band = opts.v_stick;
        return p;
    };

    const GaitState g_init = gait.evaluate(0.0);
    Piece piece = start_piece(0.0, ic.y0, ic.x10, 0.0, -M * ic.y0 - params.m2() * g_init.rate);

    std::size_t next_sample = 0;
    auto emit_until = [&](double t_end, bool inclusive) {
        while (next_sample < out.grid.size() &&
               (out.grid[next_sample] < t_end || (inclusive && out.grid[next_sample] <= t_end))) {
            const double t = out.grid[next_sample];
            const Sample s = dyn.eval(piece, t);
            out.y.push_back(s.y);
            out.x1.push_back(s.x1);
            out.k1.push_back(s.k1);
            out.k2.push_back(s.k2);
            out.F1.push_back(s.F1);
            out.F2.push_back(s.F2);
            const Regime r = regime_of(piece);
            out.regimes.push_back(r);
            if (r.body1.state == BodyState::Stick) {
                out.max_stick_excess = std::max(out.max_stick_excess, std::abs(s.F1) - dyn.f1());
            }
            if (r.body2.state == BodyState::Stick) {
                out.max_stick_excess = std::max(out.max_stick_excess, std::abs(s.F2) - dyn.f2());
            }
            ++next_sample;
        }
    };

    std::deque<double> recent;
    double t = 0.0;
    while (true) {
        // Scan forward for the first sign change of the switching functions.
        double lo = t;
        double hi = t;
        bool found = false;
        while (hi < horizon) {
            lo = hi;
            hi = std::min(horizon, hi + opts.event_scan);
            if (dyn.margin(piece, hi, opts.v_stick) < 0.0) {
                found = true;
                break;
            }
        }
        if (!found) {
            emit_until(horizon, true);
            break;
        }
        while (hi - lo > t_tol) {
            const double mid = 0.5 * (lo + hi);
            if (dyn.margin(piece, mid, opts.v_stick) < 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }

        emit_until(hi, false);

        // Bodies whose velocity is within the bisection error of zero are
        // put exactly at rest before the next regime is chosen. A frictionless
        // body cannot stick, so snapping it would only shift its velocity.
        const Sample s = dyn.eval(piece, hi);
        const GaitState g = gait.evaluate(hi);
        const double accel_scale =
            std::abs(g.accel) + (params.f1() + params.f2() + params.m2() * std::abs(g.accel)) / M;
        const double band = std::max(opts.v_stick, 10.0 * t_tol * accel_scale);
        double y = s.y;
        const bool rest1 = params.f1() > 0.0 && std::abs(y) <= band;
        const bool rest2 = params.f2() > 0.0 && std::abs(y + g.rate) <= band;
        if (rest1) {
            y = 0.0;
        } else if (rest2) {
            y = -g.rate;
        }
        const double rate = rest1 && rest2 ? 0.0 : g.rate;

        const Regime before = regime_of(piece);
        Piece next = piece_for(classify_regime(params, y, rate, g.accel, opts.v_stick, opts.a_stick));
        next.t0 = hi;
        next.y0 = y;
        next.x10 = s.x1;
        // The body put at rest absorbs the velocity jump so M y + k1 + k2 is unchanged.
        next.k10 = rest1 ? s.k1 - M * (y - s.y) : s.k1;
        next.k20 = !rest1 && rest2 ? s.k2 - M * (y - s.y) : s.k2;
        next.g0 = g;
        next.rest_band = band;
        out.events.push_back({hi, before, regime_of(next)});
        piece = next;
        t = hi;

        recent.push_back(hi);
        while (!recent.empty() && recent.front() < hi - zeno_span) recent.pop_front();
        if (recent.size() > opts.zeno_cap) {
            std::ostringstream msg;
            msg << "Zeno accumulation: " << recent.size() << " events within " << zeno_span
                << " s near t = " << hi;
            throw SolverError(msg.str(), hi);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

double interpolate(std::span<const double> grid, std::span<const double> v, double t) {
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it == grid.end()) return v.back();
    auto i = static_cast<std::size_t>(std::distance(grid.begin(), it));
    if (std::abs(grid[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return v[i];
    if (i > 0 && std::abs(grid[i - 1] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return v[i - 1];
    if (i == 0) return v.front();
    const double w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return (1.0 - w) * v[i - 1] + w * v[i];
}

}  // namespace

double net_displacement_per_period(std::span<const double> grid, std::span<const double> x1,
                                   const GaitProgram& gait) {
    const auto period = gait.period();
    if (!period) throw InvalidInput("net displacement needs a periodic gait");
    require_monotone_grid(grid);
    if (x1.size() != grid.size()) throw InvalidInput("positions do not match the grid");
    const double span = grid.back() - grid.front();
    const double full = std::floor(span / *period + 1e-9);
    if (full < 2.0) throw InvalidInput("trajectory must cover at least two gait periods");
    const double t_end = grid.front() + full * *period;
    return interpolate(grid, x1, t_end) - interpolate(grid, x1, t_end - *period);
}

double net_displacement_per_period(const EventTrajectory& traj, const GaitProgram& gait) {
    return net_displacement_per_period(traj.grid, traj.x1, gait);
}

double net_displacement_per_period(const Trajectory& traj, const GaitProgram& gait) {
    const Positions pos = reconstruct_positions(traj.grid, traj.y, 0.0, gait);
    return net_displacement_per_period(traj.grid, pos.x1, gait);
}

}  // namespace crawlsim
