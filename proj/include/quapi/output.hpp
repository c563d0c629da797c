// output.hpp: trajectory CSV and human-readable byte counts

#pragma once

#include <cstdint>
#include <string>

#include "quapi/dynamics.hpp"

namespace quapi {

/// Header `t,re_rho_0_0,im_rho_0_0,…,trace_re`; 17 significant digits.
void write_trajectory_csv(const Trajectory& trajectory, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

/// Decimal SI units rounded to 4 significant figures, e.g. 4096 → "4.096 KB".
std::string format_bytes(std::uint64_t bytes);

}  // namespace quapi
