#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace crawlsim {

/// Sampled solution candidate: reduced velocity y and one force impulse
/// channel per body (k[0] = k1, k[1] = k2, ...), all on a common grid.
struct Trajectory {
    std::vector<double> grid;
    std::vector<double> y;
    std::vector<std::vector<double>> k;
    std::string provenance;

    std::size_t size() const noexcept { return grid.size(); }
    std::size_t bodies() const noexcept { return k.size(); }
    const std::vector<double>& k1() const { return k.at(0); }
    const std::vector<double>& k2() const { return k.at(1); }

    /// Throws InvalidInput when the grid is not strictly increasing or the
    /// channel lengths disagree with it.
    void validate() const;
};

}  // namespace crawlsim
