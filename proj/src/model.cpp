#include "crawlsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crawlsim/errors.hpp"

namespace crawlsim {

namespace {

void require_finite(double v, std::string_view field) {
    if (!std::isfinite(v)) {
        throw InvalidInput(std::string(field) + " must be finite");
    }
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

PhysicalParams::PhysicalParams(double m1, double m2, double f1, double f2)
    : m1_(m1), m2_(m2), f1_(f1), f2_(f2) {
    if (!(m1 > 0.0) || !std::isfinite(m1)) throw InvalidInput("params.m1 must be a finite mass > 0");
    if (!(m2 > 0.0) || !std::isfinite(m2)) throw InvalidInput("params.m2 must be a finite mass > 0");
    if (!(f1 >= 0.0) || !std::isfinite(f1)) throw InvalidInput("params.f1 must be a finite friction >= 0");
    if (!(f2 >= 0.0) || !std::isfinite(f2)) throw InvalidInput("params.f2 must be a finite friction >= 0");
}

void InitialConditions::validate() const {
    require_finite(y0, "initial.y0");
    require_finite(x10, "initial.x10");
}

// ---------------------------------------------------------------------------
// Piecewise parabolic gait

ParabolicGait::ParabolicGait(double start_length, double start_rate,
                             std::vector<ParabolicSegment> segments)
    : start_length_(start_length), start_rate_(start_rate), segments_(std::move(segments)) {
    require_finite(start_length, "gait.start_length");
    require_finite(start_rate, "gait.start_rate");
    if (segments_.empty()) throw InvalidInput("gait.segments must not be empty");

    double max_accel = 0.0;
    GaitState state{start_length, start_rate, 0.0};
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& seg = segments_[i];
        if (!(seg.duration > 0.0) || !std::isfinite(seg.duration)) {
            throw InvalidInput("gait.segments[" + std::to_string(i) + "].duration must be > 0");
        }
        require_finite(seg.accel, "gait.segments[].accel");
        max_accel = std::max(max_accel, std::abs(seg.accel));

        state.accel = seg.accel;
        knot_times_.push_back(period_);
        knot_states_.push_back(state);
        const double d = seg.duration;
        state.length += state.rate * d + 0.5 * seg.accel * d * d;
        state.rate += seg.accel * d;
        period_ += d;
    }

    const double scale = std::max(1.0, max_accel);
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const std::size_t next = (i + 1) % segments_.size();
        if (std::abs(segments_[i].accel - segments_[next].accel) > 1e-8 * scale) {
            std::ostringstream msg;
            msg << "gait is not C2: acceleration jumps from " << segments_[i].accel << " to "
                << segments_[next].accel << " at knot " << next;
            throw InvalidInput(msg.str());
        }
    }
    const double len_scale = std::max({1.0, std::abs(start_length), std::abs(start_rate) * period_});
    if (std::abs(state.rate - start_rate) > 1e-8 * std::max(1.0, std::abs(start_rate)) ||
        std::abs(state.length - start_length) > 1e-8 * len_scale) {
        throw InvalidInput("gait is not periodic: arcs do not close up over one period");
    }
}

GaitState ParabolicGait::evaluate(double t) const {
    double tau = std::fmod(t, period_);
    if (tau < 0.0) tau += period_;
    auto it = std::upper_bound(knot_times_.begin(), knot_times_.end(), tau);
    const auto i = static_cast<std::size_t>(std::distance(knot_times_.begin(), it)) - 1;
    const GaitState& k = knot_states_[i];
    const double s = tau - knot_times_[i];
    return {k.length + k.rate * s + 0.5 * k.accel * s * s, k.rate + k.accel * s, k.accel};
}

// ---------------------------------------------------------------------------
// Clamped cubic spline gait

SplineGait::SplineGait(std::vector<SplineSample> samples, double start_slope, double end_slope)
    : samples_(std::move(samples)), start_slope_(start_slope), end_slope_(end_slope) {
    require_finite(start_slope, "gait.start_slope");
    require_finite(end_slope, "gait.end_slope");
    if (samples_.size() < 2) throw InvalidInput("gait.samples needs at least two points");
    if (samples_.front().t != 0.0) throw InvalidInput("gait.samples must start at t = 0");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        require_finite(samples_[i].t, "gait.samples[].t");
        require_finite(samples_[i].length, "gait.samples[].length");
        if (i > 0 && !(samples_[i].t > samples_[i - 1].t)) {
            throw InvalidInput("gait.samples times must be strictly increasing");
        }
    }

    const std::size_t n = samples_.size();
    std::vector<double> h(n - 1), slope(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = samples_[i + 1].t - samples_[i].t;
        slope[i] = (samples_[i + 1].length - samples_[i].length) / h[i];
    }

    // Tridiagonal system for the knot second derivatives (Thomas algorithm).
    std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0), rhs(n);
    diag[0] = 2.0 * h[0];
    upper[0] = h[0];
    rhs[0] = 6.0 * (slope[0] - start_slope);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        lower[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        upper[i] = h[i];
        rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
    }
    lower[n - 1] = h[n - 2];
    diag[n - 1] = 2.0 * h[n - 2];
    rhs[n - 1] = 6.0 * (end_slope - slope[n - 2]);

    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> moment(n);
    moment[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        moment[i] = (rhs[i] - upper[i] * moment[i + 1]) / diag[i];
    }

    double max_moment = 0.0;
    pieces_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        pieces_[i] = {samples_[i].length,
                      slope[i] - h[i] * (2.0 * moment[i] + moment[i + 1]) / 6.0,
                      0.5 * moment[i],
                      (moment[i + 1] - moment[i]) / (6.0 * h[i])};
        max_moment = std::max(max_moment, std::abs(moment[i]));
    }
    max_moment = std::max(max_moment, std::abs(moment[n - 1]));

    // Verify value, slope and curvature continuity of the assembled pieces.
    const double tol = 1e-8 * std::max(1.0, max_moment);
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const Cubic& p = pieces_[i];
        const Cubic& q = pieces_[i + 1];
        const double s = h[i];
        const double left_accel = 2.0 * p.c + 6.0 * p.d * s;
        const double left_rate = p.b + 2.0 * p.c * s + 3.0 * p.d * s * s;
        if (std::abs(left_accel - 2.0 * q.c) > tol ||
            std::abs(left_rate - q.b) > 1e-8 * std::max(1.0, std::abs(q.b))) {
            throw InvalidInput("gait spline is not C2 at knot t = " + std::to_string(samples_[i + 1].t));
        }
    }

    const Cubic& last = pieces_.back();
    const double s = h.back();
    end_state_ = {last.a + s * (last.b + s * (last.c + s * last.d)),
                  last.b + s * (2.0 * last.c + 3.0 * last.d * s), 2.0 * last.c + 6.0 * last.d * s};
}

GaitState SplineGait::evaluate(double t) const {
    const double t_end = samples_.back().t;
    if (t >= t_end) {
        const double s = t - t_end;
        return {end_state_.length + end_state_.rate * s + 0.5 * end_state_.accel * s * s,
                end_state_.rate + end_state_.accel * s, end_state_.accel};
    }
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double v, const SplineSample& smp) { return v < smp.t; });
    const auto i = static_cast<std::size_t>(std::distance(samples_.begin(), it)) - 1;
    const Cubic& p = pieces_[i];
    const double s = t - samples_[i].t;
    return {p.a + s * (p.b + s * (p.c + s * p.d)), p.b + s * (2.0 * p.c + 3.0 * p.d * s),
            2.0 * p.c + 6.0 * p.d * s};
}

// ---------------------------------------------------------------------------
// GaitProgram

GaitProgram GaitProgram::constant(double length) {
    require_finite(length, "gait.length");
    return GaitProgram(ConstantGait{length});
}

GaitProgram GaitProgram::sinusoid(double length, double amplitude, double omega, double phase) {
    require_finite(length, "gait.length");
    require_finite(amplitude, "gait.amplitude");
    require_finite(phase, "gait.phase");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidInput("gait.omega must be > 0");
    return GaitProgram(SinusoidGait{length, amplitude, omega, phase});
}

GaitProgram GaitProgram::parabolic(double start_length, double start_rate,
                                   std::vector<ParabolicSegment> segments) {
    return GaitProgram(ParabolicGait(start_length, start_rate, std::move(segments)));
}

GaitProgram GaitProgram::spline(std::vector<SplineSample> samples, double start_slope,
                                double end_slope) {
    return GaitProgram(SplineGait(std::move(samples), start_slope, end_slope));
}

GaitState GaitProgram::evaluate(double t) const {
    return std::visit(
        Overloaded{
            [](const ConstantGait& g) { return GaitState{g.length, 0.0, 0.0}; },
            [t](const SinusoidGait& g) {
                const double arg = g.omega * t + g.phase;
                const double s = std::sin(arg);
                const double c = std::cos(arg);
                return GaitState{g.length + g.amplitude * s, g.amplitude * g.omega * c,
                                 -g.amplitude * g.omega * g.omega * s};
            },
            [t](const ParabolicGait& g) { return g.evaluate(t); },
            [t](const SplineGait& g) { return g.evaluate(t); },
        },
        gait_);
}

std::optional<double> GaitProgram::period() const {
    return std::visit(
        Overloaded{
            [](const ConstantGait&) -> std::optional<double> { return 1.0; },
            [](const SinusoidGait& g) -> std::optional<double> {
                return 2.0 * 3.14159265358979323846 / g.omega;
            },
            [](const ParabolicGait& g) -> std::optional<double> { return g.period(); },
            [](const SplineGait&) -> std::optional<double> { return std::nullopt; },
        },
        gait_);
}

std::string_view GaitProgram::kind() const {
    static constexpr std::string_view names[] = {"constant", "sinusoid", "parabolic", "spline"};
    return names[gait_.index()];
}

// ---------------------------------------------------------------------------
// Force law

std::string_view to_string(BodyState s) {
    switch (s) {
        case BodyState::Stick: return "stick";
        case BodyState::SlipPlus: return "slip+";
        case BodyState::SlipMinus: return "slip-";
    }
    return "?";
}

BodyState parse_body_state(std::string_view label) {
    if (label == "stick") return BodyState::Stick;
    if (label == "slip+") return BodyState::SlipPlus;
    if (label == "slip-") return BodyState::SlipMinus;
    throw InvalidInput("unknown regime label '" + std::string(label) + "'");
}

double contact_force(const PhysicalParams& params, double accel, double F1, double F2) {
    const double m1 = params.m1();
    const double m2 = params.m2();
    return (m1 * m2 / params.total_mass()) * (accel + F2 / m2 - F1 / m1);
}

FrictionResponse coulomb_force(double G, double v, double f, double v_stick) {
    if (std::abs(v) <= v_stick) {
        if (std::abs(G) <= f) return {G, {BodyState::Stick, 0, false}};
        const int sigma = sign_of(G);
        return {f * sigma, {sigma > 0 ? BodyState::SlipPlus : BodyState::SlipMinus, sigma, true}};
    }
    const int sigma = sign_of(v);
    return {f * sigma, {sigma > 0 ? BodyState::SlipPlus : BodyState::SlipMinus, sigma, false}};
}

void require_monotone_grid(std::span<const double> grid, std::string_view what) {
    if (grid.empty()) throw InvalidInput(std::string(what) + " is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw InvalidInput(std::string(what) + " is not strictly increasing at index " +
                               std::to_string(i));
        }
    }
}

Positions reconstruct_positions(std::span<const double> grid, std::span<const double> y,
                                double x10, const GaitProgram& gait) {
    require_monotone_grid(grid);
    if (y.size() != grid.size()) throw InvalidInput("velocity samples do not match the grid");

    Positions out;
    out.x1.resize(grid.size());
    out.x2.resize(grid.size());
    double x = x10;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0) x += 0.5 * (grid[i] - grid[i - 1]) * (y[i] + y[i - 1]);
        out.x1[i] = x;
        out.x2[i] = x + gait.evaluate(grid[i]).length;
    }
    return out;
}

}  // namespace crawlsim
