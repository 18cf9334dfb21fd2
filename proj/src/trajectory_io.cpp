#include "vmg/trajectory_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace vmg {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, bool full_profile) {
  const std::size_t n = traj.samples.empty() ? 0 : traj.samples.front().state.grid_size();
  os << "t,Phi,Psi,gamma,phi_min,phi_max";
  if (full_profile) {
    for (std::size_t i = 0; i < n; ++i) os << ",phi_" << i;
  }
  os << '\n';
  for (const auto& s : traj.samples) {
    const auto& phi = s.state.phi;
    const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
    os << format_double(s.state.time) << ',' << format_double(s.state.avg_flow) << ','
       << format_double(s.state.pressure_rise) << ',' << format_double(s.gamma) << ','
       << format_double(phi.empty() ? 0.0 : *lo) << ',' << format_double(phi.empty() ? 0.0 : *hi);
    if (full_profile) {
      for (double v : phi) os << ',' << format_double(v);
    }
    os << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          bool full_profile) {
  std::ofstream os(path);
  if (!os) throw Error("IOError", "cannot open " + path.string() + " for writing");
  write_trajectory_csv(os, traj, full_profile);
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("IOError", "empty trajectory CSV");
  std::size_t columns = 1 + static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (line.rfind("t,Phi,Psi,gamma,phi_min,phi_max", 0) != 0) {
    throw Error("IOError", "unexpected trajectory CSV header");
  }
  if (columns <= 6) throw Error("IOError", "trajectory CSV has no profile columns");
  const std::size_t n = columns - 6;

  Trajectory traj;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    vals.reserve(columns);
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      vals.push_back(std::stod(line.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    if (vals.size() != columns) throw Error("IOError", "ragged trajectory CSV row");
    TrajectorySample s;
    s.state.time = vals[0];
    s.state.avg_flow = vals[1];
    s.state.pressure_rise = vals[2];
    s.gamma = vals[3];
    s.state.phi.assign(vals.begin() + 6, vals.begin() + 6 + static_cast<std::ptrdiff_t>(n));
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("IOError", "cannot open " + path.string());
  return read_trajectory_csv(is);
}

void write_control_log_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,phase,gamma_command,gamma_applied,err_Phi,err_Psi\n";
  for (const auto& r : traj.control_log) {
    os << format_double(r.t) << ',' << r.phase << ',' << format_double(r.gamma_command) << ','
       << format_double(r.gamma_applied) << ',' << format_double(r.err_flow) << ','
       << format_double(r.err_pressure) << '\n';
  }
}

void write_control_log_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) throw Error("IOError", "cannot open " + path.string() + " for writing");
  write_control_log_csv(os, traj);
}

}  // namespace vmg
