#pragma once

// Moreau-Yosida regularisation of the friction potential phi(y) = f |y|.

#include <cstdint>

#include "crawlsim/model.hpp"

namespace crawlsim {

/// phi(y) = f |y| for a friction magnitude f >= 0.
class FrictionPotential {
public:
    explicit FrictionPotential(double f);

    double friction() const noexcept { return f_; }
    double operator()(double y) const noexcept;

private:
    double f_;
};

/// Penalisation indices (n1, n2), both >= 1.
class RegularizationIndex {
public:
    RegularizationIndex(std::int64_t n1, std::int64_t n2);

    std::int64_t n1() const noexcept { return n1_; }
    std::int64_t n2() const noexcept { return n2_; }
    std::int64_t min() const noexcept { return n1_ < n2_ ? n1_ : n2_; }
    std::int64_t max() const noexcept { return n1_ < n2_ ? n2_ : n1_; }

    /// Both indices multiplied by 2^k.
    RegularizationIndex doubled(int k) const;

    friend bool operator==(const RegularizationIndex&, const RegularizationIndex&) = default;

private:
    std::int64_t n1_, n2_;
};

/// Closed interval of forces [lo, hi]; a singleton when lo == hi.
struct ForceInterval {
    double lo;
    double hi;

    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    bool singleton() const noexcept { return lo == hi; }
};

/// Envelope phi_n(y): (n/2) y^2 when n|y| <= f, else f |y| - f^2 / (2n).
double envelope(const FrictionPotential& pot, std::int64_t n, double y);

/// phi_n'(y) = clamp(n y, -f, f).
double gradient(const FrictionPotential& pot, std::int64_t n, double y);

/// J_n(xi) = xi - phi_n'(xi) / n.
double resolvent(const FrictionPotential& pot, std::int64_t n, double xi);

/// {f sign(y)} for |y| > v_stick, [-f, f] otherwise.
ForceInterval subdifferential(const FrictionPotential& pot, double y,
                              double v_stick = kDefaultStickBand);

/// f^2 (1/n + 1/r) + (y1 - y2)(phi_n'(y1) - phi_r'(y2)); never negative.
double lemma_bound_margin(const FrictionPotential& pot, double y1, double y2, std::int64_t n,
                          std::int64_t r);

}  // namespace crawlsim
