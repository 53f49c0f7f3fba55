#include "crawlsim/app/csv_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "crawlsim/errors.hpp"

namespace crawlsim::app {

namespace {

const std::vector<std::string> kBaseColumns{"t",  "y",  "x1", "x2",      "k1",     "k2",
                                            "F1", "F2", "G2", "regime1", "regime2"};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Trajectory TrajectoryTable::to_trajectory(std::string provenance) const {
    Trajectory traj{t, y, k, std::move(provenance)};
    traj.validate();
    return traj;
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryTable& tab) {
    if (tab.k.size() < 2) throw InvalidInput("trajectory table needs at least k1 and k2");
    auto out = open_out(path);
    for (std::size_t c = 0; c < kBaseColumns.size(); ++c) out << (c ? "," : "") << kBaseColumns[c];
    for (std::size_t i = 2; i < tab.k.size(); ++i) out << ",k" << i + 1;
    out << '\n';
    for (std::size_t j = 0; j < tab.size(); ++j) {
        out << format_number(tab.t[j]) << ',' << format_number(tab.y[j]) << ','
            << format_number(tab.x1[j]) << ',' << format_number(tab.x2[j]) << ','
            << format_number(tab.k[0][j]) << ',' << format_number(tab.k[1][j]) << ','
            << format_number(tab.F1[j]) << ',' << format_number(tab.F2[j]) << ','
            << format_number(tab.G2[j]) << ',' << tab.regime1[j] << ',' << tab.regime2[j];
        for (std::size_t i = 2; i < tab.k.size(); ++i) out << ',' << format_number(tab.k[i][j]);
        out << '\n';
    }
}

TrajectoryTable read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("trajectory file " + path.string() + " cannot be opened");
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput(path.string() + ": empty file");
    const auto header = split(line);
    if (header.size() < kBaseColumns.size() ||
        !std::equal(kBaseColumns.begin(), kBaseColumns.end(), header.begin())) {
        throw InvalidInput(path.string() + ": header must start with t,y,x1,x2,k1,k2,F1,F2,G2,regime1,regime2");
    }
    for (std::size_t c = kBaseColumns.size(); c < header.size(); ++c) {
        const std::string expect = "k" + std::to_string(c - kBaseColumns.size() + 3);
        if (header[c] != expect) {
            throw InvalidInput(path.string() + ": column " + std::to_string(c + 1) + " must be " + expect);
        }
    }

    TrajectoryTable tab;
    tab.k.assign(2 + header.size() - kBaseColumns.size(), {});
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto f = split(line);
        const std::string where = path.string() + ":" + std::to_string(row);
        if (f.size() != header.size()) {
            throw InvalidInput(where + ": expected " + std::to_string(header.size()) + " fields");
        }
        auto num = [&](std::size_t c) {
            const char* s = f[c].c_str();
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(s, &end);
            if (end == s || *end != '\0' || errno == ERANGE) {
                throw InvalidInput(where + ": column " + header[c] + " is not a number");
            }
            return v;
        };
        tab.t.push_back(num(0));
        tab.y.push_back(num(1));
        tab.x1.push_back(num(2));
        tab.x2.push_back(num(3));
        tab.k[0].push_back(num(4));
        tab.k[1].push_back(num(5));
        tab.F1.push_back(num(6));
        tab.F2.push_back(num(7));
        tab.G2.push_back(num(8));
        tab.regime1.push_back(std::string(to_string(parse_body_state(f[9]))));
        tab.regime2.push_back(std::string(to_string(parse_body_state(f[10]))));
        for (std::size_t c = kBaseColumns.size(); c < header.size(); ++c) {
            tab.k[c - kBaseColumns.size() + 2].push_back(num(c));
        }
    }
    if (tab.size() < 2) throw InvalidInput(path.string() + ": needs at least two samples");
    return tab;
}

void write_events_csv(const std::filesystem::path& path, const std::vector<RegimeEvent>& events) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : events) {
        rows.push_back({format_number(e.time), std::string(to_string(e.before.body1.state)),
                        std::string(to_string(e.before.body2.state)),
                        std::string(to_string(e.after.body1.state)),
                        std::string(to_string(e.after.body2.state))});
    }
    write_csv(path, {"time", "before1", "before2", "after1", "after2"}, rows);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    auto out = open_out(path);
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << r[c];
        out << '\n';
    }
}

}  // namespace crawlsim::app
