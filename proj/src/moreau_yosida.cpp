#include "crawlsim/moreau_yosida.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crawlsim/errors.hpp"

namespace crawlsim {

namespace {

void require_index(std::int64_t n, const char* what) {
    if (n < 1) throw InvalidInput(std::string(what) + " must be a positive integer");
}

}  // namespace

FrictionPotential::FrictionPotential(double f) : f_(f) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw InvalidInput("friction magnitude must be >= 0");
}

double FrictionPotential::operator()(double y) const noexcept { return f_ * std::abs(y); }

RegularizationIndex::RegularizationIndex(std::int64_t n1, std::int64_t n2) : n1_(n1), n2_(n2) {
    require_index(n1, "n1");
    require_index(n2, "n2");
}

RegularizationIndex RegularizationIndex::doubled(int k) const {
    if (k < 0 || k > 40) throw InvalidInput("doubling exponent out of range");
    return {n1_ << k, n2_ << k};
}

double envelope(const FrictionPotential& pot, std::int64_t n, double y) {
    require_index(n, "n");
    const double f = pot.friction();
    const double nd = static_cast<double>(n);
    const double a = std::abs(y);
    // Inf-convolution of f|.| with (n/2)(.)^2; its derivative is clamp(n y, -f, f).
    if (nd * a <= f) return 0.5 * nd * y * y;
    return f * a - 0.5 * f * f / nd;
}

double gradient(const FrictionPotential& pot, std::int64_t n, double y) {
    const double f = pot.friction();
    return std::clamp(static_cast<double>(n) * y, -f, f);
}

double resolvent(const FrictionPotential& pot, std::int64_t n, double xi) {
    require_index(n, "n");
    const double f = pot.friction();
    const double nd = static_cast<double>(n);
    // Unsaturated branch: xi - (n xi)/n is zero in exact arithmetic.
    if (nd * std::abs(xi) <= f) return 0.0;
    const double j = xi - std::copysign(f / nd, xi);
    // n|xi| within an ulp of f can round j across zero.
    return j * xi < 0.0 ? 0.0 : j;
}

ForceInterval subdifferential(const FrictionPotential& pot, double y, double v_stick) {
    const double f = pot.friction();
    if (std::abs(y) > v_stick) {
        const double v = y > 0.0 ? f : -f;
        return {v, v};
    }
    return {-f, f};
}

double lemma_bound_margin(const FrictionPotential& pot, double y1, double y2, std::int64_t n,
                          std::int64_t r) {
    require_index(n, "n");
    require_index(r, "r");
    const double f = pot.friction();
    const double bound = f * f * (1.0 / static_cast<double>(n) + 1.0 / static_cast<double>(r));
    return bound + (y1 - y2) * (gradient(pot, n, y1) - gradient(pot, r, y2));
}

}  // namespace crawlsim
