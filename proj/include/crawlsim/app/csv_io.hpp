#pragma once

// Trajectory CSV files. Header t,y,x1,x2,k1,k2,F1,F2,G2,regime1,regime2 with
// k3..kp appended for chains; numbers are written with 17 significant digits
// so a read-back reproduces every value exactly.

#include <filesystem>
#include <string>
#include <vector>

#include "crawlsim/stickslip_oracle.hpp"
#include "crawlsim/trajectory.hpp"

namespace crawlsim::app {

struct TrajectoryTable {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> x1;
    std::vector<double> x2;
    std::vector<std::vector<double>> k;  ///< k1..kp
    std::vector<double> F1;
    std::vector<double> F2;
    std::vector<double> G2;
    std::vector<std::string> regime1;
    std::vector<std::string> regime2;

    std::size_t size() const noexcept { return t.size(); }
    Trajectory to_trajectory(std::string provenance) const;
};

std::string format_number(double v);

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryTable& table);

/// Throws InvalidInput on a malformed header, a short row or an unparsable field.
TrajectoryTable read_trajectory_csv(const std::filesystem::path& path);

void write_events_csv(const std::filesystem::path& path, const std::vector<RegimeEvent>& events);

/// Plain CSV: header line then rows, no quoting.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace crawlsim::app
