#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "crawlsim/errors.hpp"
#include "crawlsim/moreau_yosida.hpp"

using namespace crawlsim;

TEST(FrictionPotential, Values) {
    const FrictionPotential p(0.3);
    EXPECT_DOUBLE_EQ(p(-2.0), 0.6);
    EXPECT_EQ(p(0.0), 0.0);
    EXPECT_THROW(FrictionPotential(-1.0), InvalidInput);
}

TEST(RegularizationIndex, OrderingAndDoubling) {
    const RegularizationIndex n(100, 300);
    EXPECT_EQ(n.min(), 100);
    EXPECT_EQ(n.max(), 300);
    EXPECT_EQ(n.doubled(3), RegularizationIndex(800, 2400));
    EXPECT_THROW(RegularizationIndex(0, 5), InvalidInput);
}

TEST(Envelope, Examples) {
    const FrictionPotential p(1.0);
    EXPECT_DOUBLE_EQ(envelope(p, 2, 0.25), 0.0625);
    EXPECT_DOUBLE_EQ(envelope(p, 2, 1.0), 0.75);
    EXPECT_EQ(envelope(FrictionPotential(0.7), 13, 0.0), 0.0);
}

TEST(Envelope, IncreasesToPotential) {
    const FrictionPotential p(0.4);
    for (double y : {-3.0, -0.01, 0.002, 0.5, 7.0}) {
        double prev = -1.0;
        for (std::int64_t n = 1; n <= (1 << 20); n *= 2) {
            const double e = envelope(p, n, y);
            EXPECT_GE(e, prev);
            EXPECT_LE(e, p(y));
            if (static_cast<double>(n) * std::abs(y) > 0.4) {
                EXPECT_NEAR(e, p(y) - 0.4 * 0.4 / (2.0 * static_cast<double>(n)), 1e-15);
            }
            prev = e;
        }
    }
}

// inf over y' of (n/2)(y - y')^2 + f|y'| by ternary search; the objective is
// convex and its minimiser lies in [-|y|, |y|].
double inf_convolution(double f, double n, double y) {
    auto obj = [&](double yp) { return 0.5 * n * (y - yp) * (y - yp) + f * std::abs(yp); };
    double lo = -std::abs(y), hi = std::abs(y);
    for (int i = 0; i < 300; ++i) {
        const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
        if (obj(a) < obj(b)) hi = b; else lo = a;
    }
    return std::min({obj(0.5 * (lo + hi)), obj(0.0), obj(y)});
}

TEST(Envelope, MatchesInfConvolution) {
    for (double f : {0.0, 0.3, 1.0, 2.5}) {
        for (std::int64_t n : {1, 3, 16, 250}) {
            for (double y : {-1.7, -0.02, 0.0, 0.004, 0.31, 4.0}) {
                const double ref = inf_convolution(f, static_cast<double>(n), y);
                EXPECT_NEAR(envelope(FrictionPotential(f), n, y), ref, 1e-9 * (1.0 + ref))
                    << "f=" << f << " n=" << n << " y=" << y;
            }
        }
    }
}

TEST(Gradient, Examples) {
    const FrictionPotential p(0.5);
    EXPECT_DOUBLE_EQ(gradient(p, 10, 0.02), 0.2);
    EXPECT_EQ(gradient(p, 10, 1.0), 0.5);
    EXPECT_EQ(gradient(p, 10, -0.3), -0.5);
}

TEST(Gradient, IsDerivativeOfEnvelope) {
    const FrictionPotential p(0.8);
    const std::int64_t n = 16;
    const double h = 1e-4, kink = 0.8 / 16.0;
    for (int i = -200; i <= 200; ++i) {
        const double y = 0.0013 * i;
        const double fd = (envelope(p, n, y + h) - envelope(p, n, y - h)) / (2.0 * h);
        const bool near_kink = std::abs(std::abs(y) - kink) <= 2.0 * h;
        EXPECT_LE(std::abs(fd - gradient(p, n, y)), near_kink ? n * h : 1e-9) << "y=" << y;
    }
}

TEST(Gradient, OddBoundedMonotone) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> y(-5, 5), f(0, 3);
    std::uniform_int_distribution<std::int64_t> n(1, 10000);
    for (int i = 0; i < 20000; ++i) {
        const FrictionPotential p(f(rng));
        const std::int64_t ni = n(rng);
        const double a = y(rng), b = y(rng);
        EXPECT_EQ(gradient(p, ni, -a), -gradient(p, ni, a));
        EXPECT_LE(std::abs(gradient(p, ni, a)), p.friction());
        EXPECT_GE((a - b) * (gradient(p, ni, a) - gradient(p, ni, b)), 0.0);
    }
}

TEST(Resolvent, Examples) {
    const FrictionPotential p(1.0);
    EXPECT_DOUBLE_EQ(resolvent(p, 4, 2.0), 1.75);
    EXPECT_EQ(gradient(p, 4, 2.0), 1.0);
    EXPECT_EQ(resolvent(p, 4, 0.1), 0.0);
    EXPECT_DOUBLE_EQ(gradient(p, 4, 0.1), 0.4);
    EXPECT_EQ(resolvent(FrictionPotential(0.3), 9, 0.0), 0.0);
}

TEST(Subdifferential, Examples) {
    const FrictionPotential p(0.3);
    const auto a = subdifferential(p, 2.0);
    EXPECT_TRUE(a.singleton());
    EXPECT_EQ(a.lo, 0.3);
    const auto b = subdifferential(p, 0.0);
    EXPECT_EQ(b.lo, -0.3);
    EXPECT_EQ(b.hi, 0.3);
    const auto c = subdifferential(FrictionPotential(0.0), -4.0);
    EXPECT_TRUE(c.singleton());
    EXPECT_EQ(c.lo, 0.0);
}

TEST(LemmaMargin, Examples) {
    const FrictionPotential p(0.7);
    EXPECT_GE(lemma_bound_margin(p, 0.3, 0.3, 50, 50), 0.0);
    EXPECT_EQ(lemma_bound_margin(FrictionPotential(0.0), 3.0, -1.0, 5, 9), 0.0);
}

TEST(LemmaMargin, RandomSweepSmall) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> y(-10, 10), f(0, 5);
    std::uniform_int_distribution<std::int64_t> n(1, 10000);
    for (int i = 0; i < 20000; ++i) {
        EXPECT_GE(lemma_bound_margin(FrictionPotential(f(rng)), y(rng), y(rng), n(rng), n(rng)), 0.0);
    }
}
