#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "crawlsim/errors.hpp"
#include "crawlsim/model.hpp"

using namespace crawlsim;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return {};
}

// Max |second central difference - analytic l''| over a grid of probe times.
double second_difference_error(const GaitProgram& g, double h, double t0, double t1) {
    double worst = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double t = t0 + (t1 - t0) * i / 40.0;
        const double fd = (g.evaluate(t + h).length - 2.0 * g.evaluate(t).length +
                           g.evaluate(t - h).length) /
                          (h * h);
        worst = std::max(worst, std::abs(fd - g.evaluate(t).accel));
    }
    return worst;
}

}  // namespace

TEST(PhysicalParams, RejectsBadFieldsByName) {
    EXPECT_NE(message_of([] { PhysicalParams(-1, 1, 0, 0); }).find("m1"), std::string::npos);
    EXPECT_NE(message_of([] { PhysicalParams(1, 0, 0, 0); }).find("m2"), std::string::npos);
    EXPECT_NE(message_of([] { PhysicalParams(1, 1, -0.1, 0); }).find("f1"), std::string::npos);
    EXPECT_NE(message_of([] { PhysicalParams(1, 1, 0, NAN); }).find("f2"), std::string::npos);
    EXPECT_NO_THROW(PhysicalParams(1, 1, 0, 0));
}

TEST(PhysicalParams, TotalMassIsSum) {
    const PhysicalParams p(0.3, 0.7, 0.1, 0.2);
    EXPECT_EQ(p.total_mass(), 0.3 + 0.7);
}

TEST(InitialConditions, RejectsNonFinite) {
    EXPECT_THROW((InitialConditions{NAN, 0.0}.validate()), InvalidInput);
    EXPECT_THROW((InitialConditions{0.0, INFINITY}.validate()), InvalidInput);
    EXPECT_NO_THROW((InitialConditions{0.5, -2.0}.validate()));
}

TEST(Gait, ConstantExample) {
    const auto s = GaitProgram::constant(1.0).evaluate(5.0);
    EXPECT_EQ(s.length, 1.0);
    EXPECT_EQ(s.rate, 0.0);
    EXPECT_EQ(s.accel, 0.0);
}

TEST(Gait, SinusoidExamples) {
    const auto g = GaitProgram::sinusoid(1.0, 0.5, kTwoPi);
    const auto a = g.evaluate(0.0);
    EXPECT_DOUBLE_EQ(a.length, 1.0);
    EXPECT_DOUBLE_EQ(a.rate, 0.5 * kTwoPi);
    EXPECT_NEAR(a.accel, 0.0, 1e-15);
    const auto b = g.evaluate(0.25);
    EXPECT_DOUBLE_EQ(b.length, 1.5);
    EXPECT_NEAR(b.rate, 0.0, 1e-14);
    EXPECT_DOUBLE_EQ(b.accel, -0.5 * kTwoPi * kTwoPi);
    ASSERT_TRUE(g.period().has_value());
    EXPECT_DOUBLE_EQ(*g.period(), 1.0);
}

TEST(Gait, SinusoidSecondDifferenceConvergesAtOrderTwo) {
    const auto g = GaitProgram::sinusoid(1.0, 0.25, kTwoPi, 0.3);
    const double e1 = second_difference_error(g, 1e-2, 0.05, 2.0);
    const double e2 = second_difference_error(g, 5e-3, 0.05, 2.0);
    EXPECT_GE(std::log2(e1 / e2), 1.9);
}

TEST(Gait, SplineInterpolatesAndIsSecondOrderSmooth) {
    std::vector<SplineSample> samples;
    for (int i = 0; i <= 10; ++i) {
        const double t = 0.1 * i;
        samples.push_back({t, 1.0 + 0.2 * std::sin(kTwoPi * t)});
    }
    const auto g = GaitProgram::spline(samples, 0.2 * kTwoPi, 0.2 * kTwoPi);
    for (const auto& s : samples) EXPECT_NEAR(g.evaluate(s.t).length, s.length, 1e-14);
    // Cubic pieces: the central difference is exact up to rounding inside a piece,
    // and l'' is continuous across knots.
    EXPECT_LE(second_difference_error(g, 1e-4, 0.01, 0.99), 1e-3);
    for (int i = 1; i < 10; ++i) {
        const double t = 0.1 * i;
        EXPECT_NEAR(g.evaluate(t - 1e-9).accel, g.evaluate(t + 1e-9).accel, 1e-5);
        EXPECT_NEAR(g.evaluate(t - 1e-9).rate, g.evaluate(t + 1e-9).rate, 1e-7);
    }
    EXPECT_FALSE(g.period().has_value());
}

TEST(Gait, SplineExtendsPastLastSampleSmoothly) {
    const auto g = GaitProgram::spline({{0, 1}, {0.5, 1.2}, {1, 1.1}});
    const auto in = g.evaluate(1.0 - 1e-9), out = g.evaluate(1.0 + 1e-9);
    EXPECT_NEAR(in.length, out.length, 1e-8);
    EXPECT_NEAR(in.rate, out.rate, 1e-7);
    EXPECT_NEAR(in.accel, out.accel, 1e-6);
    EXPECT_EQ(g.evaluate(3.0).accel, g.evaluate(2.0).accel);
}

TEST(Gait, SplineRejectsBadSamples) {
    EXPECT_THROW(GaitProgram::spline({{0.1, 1}, {1, 1}}), InvalidInput);
    EXPECT_THROW(GaitProgram::spline({{0, 1}, {1, 1}, {1, 2}}), InvalidInput);
    EXPECT_THROW(GaitProgram::spline({{0, 1}}), InvalidInput);
}

TEST(Gait, ParabolicRejectsAccelerationJumps) {
    // Two arcs with opposite accelerations: C1 and periodic but not C2.
    const std::string msg = message_of([] {
        GaitProgram::parabolic(1.0, 0.0, {{0.5, 1.0}, {0.5, -1.0}});
    });
    EXPECT_FALSE(msg.empty());
    EXPECT_NE(msg.find("C2"), std::string::npos) << msg;
}

TEST(Gait, ParabolicRejectsOpenArcs) {
    EXPECT_THROW(GaitProgram::parabolic(1.0, 0.3, {{0.5, 0.0}, {0.5, 0.0}}), InvalidInput);
}

TEST(Gait, ParabolicAcceptsClosedC2Program) {
    const auto g = GaitProgram::parabolic(1.0, 0.0, {{0.4, 0.0}, {0.6, 0.0}});
    EXPECT_DOUBLE_EQ(*g.period(), 1.0);
    EXPECT_EQ(g.evaluate(2.7).length, 1.0);
}

TEST(Gait, ConstantReportsUnitPeriod) {
    EXPECT_EQ(GaitProgram::constant(1.0).period(), 1.0);
}

TEST(ContactForce, Examples) {
    EXPECT_DOUBLE_EQ(contact_force(PhysicalParams(1, 1, 0, 0), 2.0, 0.0, 0.0), 1.0);
    EXPECT_EQ(contact_force(PhysicalParams(3, 5, 0.1, 0.2), 0.0, 0.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(contact_force(PhysicalParams(2, 1, 0, 0), 0.0, 3.0, 0.0), -1.0);
}

TEST(ContactForce, MatchesBodyTwoBalance) {
    // m2 x2'' = G2 - F2 with x2'' = y' + l'' and M y' = -m2 l'' - F1 - F2.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0), m(0.1, 4.0);
    for (int i = 0; i < 1000; ++i) {
        const PhysicalParams p(m(rng), m(rng), 0.0, 0.0);
        const double a = u(rng), F1 = u(rng), F2 = u(rng);
        const double ydot = (-p.m2() * a - F1 - F2) / p.total_mass();
        const double expect = p.m2() * (ydot + a) + F2;
        EXPECT_NEAR(contact_force(p, a, F1, F2), expect, 1e-12);
    }
}

TEST(CoulombForce, Examples) {
    const auto a = coulomb_force(0.3, 0.0, 0.5);
    EXPECT_EQ(a.force, 0.3);
    EXPECT_EQ(a.regime.state, BodyState::Stick);
    EXPECT_FALSE(a.regime.breakaway);

    const auto b = coulomb_force(0.9, 0.0, 0.5);
    EXPECT_EQ(b.force, 0.5);
    EXPECT_TRUE(b.regime.breakaway);
    EXPECT_EQ(b.regime.sigma, 1);

    const auto c = coulomb_force(-0.2, 1.0, 0.5);
    EXPECT_EQ(c.force, 0.5);
    EXPECT_EQ(c.regime.state, BodyState::SlipPlus);
    EXPECT_EQ(c.regime.sigma, 1);
}

TEST(CoulombForce, MagnitudeNeverExceedsFriction) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> G(-5, 5), v(-1e-8, 1e-8), f(0, 2);
    for (int i = 0; i < 10000; ++i) {
        const double fi = f(rng);
        EXPECT_LE(std::abs(coulomb_force(G(rng), i % 2 ? v(rng) : 0.0, fi).force), fi);
    }
}

TEST(Positions, Examples) {
    const auto g = GaitProgram::constant(2.0);
    const std::vector<double> grid{0, 0.5, 1, 1.5, 2};
    const auto zero = reconstruct_positions(grid, std::vector<double>(5, 0.0), 3.0, g);
    for (double x : zero.x1) EXPECT_EQ(x, 3.0);

    const auto ones = reconstruct_positions(grid, std::vector<double>(5, 1.0), 0.0, g);
    EXPECT_EQ(ones.x1.back(), 2.0);

    std::vector<double> t, y;
    for (int i = 0; i <= 10; ++i) {
        t.push_back(0.1 * i);
        y.push_back(0.1 * i);
    }
    EXPECT_NEAR(reconstruct_positions(t, y, 0.0, g).x1.back(), 0.5, 1e-15);
}

TEST(Positions, SecondBodyOffsetIsGaitLength) {
    const auto g = GaitProgram::sinusoid(1.0, 0.25, kTwoPi);
    std::vector<double> t, y;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(0.01 * i);
        y.push_back(std::cos(t.back()));
    }
    const auto pos = reconstruct_positions(t, y, 0.2, g);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double l = g.evaluate(t[i]).length;
        EXPECT_NEAR(pos.x2[i] - pos.x1[i], l, 4.0 * std::numeric_limits<double>::epsilon() * 2.0);
    }
}

TEST(Positions, RejectsBadGrids) {
    const auto g = GaitProgram::constant(1.0);
    EXPECT_THROW(reconstruct_positions(std::vector<double>{}, std::vector<double>{}, 0, g), InvalidInput);
    EXPECT_THROW(reconstruct_positions(std::vector<double>{0, 1, 1}, std::vector<double>{0, 0, 0}, 0, g),
                 InvalidInput);
}

TEST(BodyState, LabelsRoundTrip) {
    for (auto s : {BodyState::Stick, BodyState::SlipPlus, BodyState::SlipMinus}) {
        EXPECT_EQ(parse_body_state(to_string(s)), s);
    }
    EXPECT_THROW(parse_body_state("sliding"), InvalidInput);
}
