#include "quapi/output.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "quapi/errors.hpp"

namespace quapi {

void write_trajectory_csv(const Trajectory& trajectory, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open trajectory output '" + path + "' for writing");
    const Eigen::Index m = trajectory.rhos.empty() ? 0 : trajectory.rhos.front().rows();
    out << "t";
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) out << fmt::format(",re_rho_{0}_{1},im_rho_{0}_{1}", a, b);
    out << ",trace_re\n";
    for (std::size_t k = 0; k < trajectory.rhos.size(); ++k) {
        const Matrix& rho = trajectory.rhos[k];
        out << fmt::format("{:.17g}", trajectory.times[k]);
        for (Eigen::Index a = 0; a < m; ++a)
            for (Eigen::Index b = 0; b < m; ++b)
                out << fmt::format(",{:.17g},{:.17g}", rho(a, b).real(), rho(a, b).imag());
        out << fmt::format(",{:.17g}\n", rho.trace().real());
    }
    if (!out) throw IoError("failed writing trajectory output '" + path + "'");
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectory '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty trajectory file '" + path + "'");
    const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    // t, 2·M² matrix columns, trace
    const auto m = static_cast<Eigen::Index>(std::lround(std::sqrt((columns - 2) / 2.0)));
    if (columns != static_cast<std::size_t>(2 * m * m + 2))
        throw IoError("malformed trajectory header in '" + path + "'");

    Trajectory trajectory;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
        if (values.size() != columns) throw IoError("malformed trajectory row in '" + path + "'");
        trajectory.times.push_back(values[0]);
        Matrix rho(m, m);
        for (Eigen::Index a = 0; a < m; ++a)
            for (Eigen::Index b = 0; b < m; ++b) {
                const auto i = static_cast<std::size_t>(1 + 2 * (a * m + b));
                rho(a, b) = {values[i], values[i + 1]};
            }
        trajectory.rhos.push_back(std::move(rho));
    }
    return trajectory;
}

std::string format_bytes(std::uint64_t bytes) {
    static constexpr std::array<const char*, 7> units{"B", "KB", "MB", "GB", "TB", "PB", "EB"};
    double value = static_cast<double>(bytes);
    std::size_t unit = 0;
    while (unit + 1 < units.size() && std::stod(fmt::format("{:.4g}", value)) >= 1000.0) {
        value /= 1000.0;
        ++unit;
    }
    return fmt::format("{:.4g} {}", value, units[unit]);
}

}  // namespace quapi
