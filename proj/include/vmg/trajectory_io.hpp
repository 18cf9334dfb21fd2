#pragma once

#include <filesystem>
#include <iosfwd>

#include "vmg/solver.hpp"

namespace vmg {

/// CSV with header `t,Phi,Psi,gamma,phi_min,phi_max[,phi_0,...,phi_{N-1}]`,
/// every float printed with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, bool full_profile);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          bool full_profile);

/// Reads a CSV written with `full_profile = true`. Only samples are restored;
/// metadata keeps its defaults.
Trajectory read_trajectory_csv(std::istream& is);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// `t,phase,gamma_command,gamma_applied,err_Phi,err_Psi`.
void write_control_log_csv(std::ostream& os, const Trajectory& traj);
void write_control_log_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

}  // namespace vmg
