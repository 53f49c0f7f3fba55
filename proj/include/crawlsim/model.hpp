#pragma once

// Two-body crawler: physical parameters, gait programs, the Coulomb force
// law and reconstruction of body positions from the reduced velocity.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace crawlsim {

/// Velocities with |v| <= kDefaultStickBand are treated as zero.
inline constexpr double kDefaultStickBand = 1e-9;

class PhysicalParams {
public:
    /// Throws InvalidInput naming the field when m1, m2 <= 0 or f1, f2 < 0.
    PhysicalParams(double m1, double m2, double f1, double f2);

    double m1() const noexcept { return m1_; }
    double m2() const noexcept { return m2_; }
    double f1() const noexcept { return f1_; }
    double f2() const noexcept { return f2_; }
    double total_mass() const noexcept { return m1_ + m2_; }

private:
    double m1_, m2_, f1_, f2_;
};

struct InitialConditions {
    double y0 = 0.0;   ///< velocity of body 1 [m/s]
    double x10 = 0.0;  ///< position of body 1 [m]

    void validate() const;
};

/// Value and analytic derivatives of the link length at one instant.
struct GaitState {
    double length = 0.0;
    double rate = 0.0;
    double accel = 0.0;
};

struct ConstantGait {
    double length;
};

/// length + amplitude * sin(omega * t + phase)
struct SinusoidGait {
    double length;
    double amplitude;
    double omega;
    double phase = 0.0;
};

/// One constant-acceleration segment of a piecewise parabolic gait.
struct ParabolicSegment {
    double duration;
    double accel;
};

/// Periodic gait made of parabolic arcs. Construction checks that the arcs
/// close up over one period and that the acceleration is continuous across
/// every knot, including the wrap-around knot.
class ParabolicGait {
public:
    ParabolicGait(double start_length, double start_rate, std::vector<ParabolicSegment> segments);

    GaitState evaluate(double t) const;
    double period() const noexcept { return period_; }
    const std::vector<ParabolicSegment>& segments() const noexcept { return segments_; }

private:
    double start_length_;
    double start_rate_;
    std::vector<ParabolicSegment> segments_;
    std::vector<double> knot_times_;
    std::vector<GaitState> knot_states_;
    double period_ = 0.0;
};

struct SplineSample {
    double t;
    double length;
};

/// Clamped cubic spline through tabulated samples starting at t = 0.
/// Past the last sample the gait continues as the quadratic Taylor expansion
/// at the end knot, which keeps it C2.
class SplineGait {
public:
    SplineGait(std::vector<SplineSample> samples, double start_slope = 0.0, double end_slope = 0.0);

    GaitState evaluate(double t) const;
    const std::vector<SplineSample>& samples() const noexcept { return samples_; }
    double start_slope() const noexcept { return start_slope_; }
    double end_slope() const noexcept { return end_slope_; }

private:
    struct Cubic {
        double a, b, c, d;  // a + b s + c s^2 + d s^3, s = t - t_i
    };

    std::vector<SplineSample> samples_;
    double start_slope_;
    double end_slope_;
    std::vector<Cubic> pieces_;
    GaitState end_state_;
};

/// Prescribed link length l(t) = x2 - x1, twice continuously differentiable.
class GaitProgram {
public:
    using Variant = std::variant<ConstantGait, SinusoidGait, ParabolicGait, SplineGait>;

    static GaitProgram constant(double length);
    static GaitProgram sinusoid(double length, double amplitude, double omega, double phase = 0.0);
    static GaitProgram parabolic(double start_length, double start_rate,
                                 std::vector<ParabolicSegment> segments);
    static GaitProgram spline(std::vector<SplineSample> samples, double start_slope = 0.0,
                              double end_slope = 0.0);

    /// Requires t >= 0.
    GaitState evaluate(double t) const;

    /// Period of a periodic gait. A constant gait is periodic with every
    /// period and reports 1 s; tabulated splines are not periodic.
    std::optional<double> period() const;

    std::string_view kind() const;
    const Variant& variant() const noexcept { return gait_; }

private:
    explicit GaitProgram(Variant gait) : gait_(std::move(gait)) {}

    Variant gait_;
};

enum class BodyState { Stick, SlipPlus, SlipMinus };

std::string_view to_string(BodyState s);
/// Inverse of to_string; throws InvalidInput on unknown labels.
BodyState parse_body_state(std::string_view label);

struct BodyRegime {
    BodyState state = BodyState::Stick;
    int sigma = 0;           ///< +1/-1 when slipping, 0 when stuck
    bool breakaway = false;  ///< at rest but |G| > f, so sigma = sign(G)
};

struct Regime {
    BodyRegime body1;
    BodyRegime body2;
};

struct FrictionResponse {
    double force;
    BodyRegime regime;
};

/// Contact force on body 2 induced by the linkage; the force on body 1 is
/// its negative.
double contact_force(const PhysicalParams& params, double accel, double F1, double F2);

/// Coulomb law for one body: stick with F = G while at rest and |G| <= f,
/// otherwise F = f * sigma.
FrictionResponse coulomb_force(double G, double v, double f, double v_stick = kDefaultStickBand);

struct Positions {
    std::vector<double> x1;
    std::vector<double> x2;
};

/// x1 by composite trapezoid of y on the sample grid, x2 = x1 + l.
Positions reconstruct_positions(std::span<const double> grid, std::span<const double> y,
                                double x10, const GaitProgram& gait);

/// Throws InvalidInput unless `grid` is non-empty and strictly increasing.
void require_monotone_grid(std::span<const double> grid, std::string_view what = "grid");

}  // namespace crawlsim
