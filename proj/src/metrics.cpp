#include "vmg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vmg {

namespace {

double cross(const std::array<double, 2>& o, const std::array<double, 2>& a,
             const std::array<double, 2>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

double convex_hull_area(std::span<const std::array<double, 2>> points) {
  std::vector<std::array<double, 2>> p(points.begin(), points.end());
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return 0.0;

  std::vector<std::array<double, 2>> hull(2 * p.size());
  std::size_t k = 0;
  for (const auto& q : p) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], q) <= 0.0) --k;
    hull[k++] = q;
  }
  for (std::size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], p[i]) <= 0.0) --k;
    hull[k++] = p[i];
  }
  hull.resize(k - 1);

  double twice = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    twice += a[0] * b[1] - a[1] * b[0];
  }
  return 0.5 * std::abs(twice);
}

std::vector<std::array<double, 2>> phase_orbit(const Trajectory& traj) {
  std::vector<std::array<double, 2>> pts;
  pts.reserve(traj.samples.size());
  for (const auto& s : traj.samples) pts.push_back({s.state.avg_flow, s.state.pressure_rise});
  return pts;
}

double excursion_area(const Trajectory& traj) {
  const auto pts = phase_orbit(traj);
  return convex_hull_area(pts);
}

double min_pressure(const Trajectory& traj) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) m = std::min(m, s.state.pressure_rise);
  return m;
}

std::optional<double> recovery_time(const Trajectory& traj, const Equilibrium& target,
                                    const RecoveryTolerance& tol) {
  std::optional<double> since;
  for (const auto& s : traj.samples) {
    const bool inside =
        s.state.phi_sup() < tol.phi_sup &&
        std::hypot(s.state.avg_flow - target.flow, s.state.pressure_rise - target.pressure) < tol.state;
    if (!inside) {
      since.reset();
    } else if (!since) {
      since = s.state.time;
    }
  }
  return since;
}

double max_mean_drift(const Trajectory& traj) {
  double worst = 0.0;
  for (const auto& s : traj.samples) worst = std::max(worst, std::abs(grid_mean(s.state.phi)));
  return worst;
}

}  // namespace vmg
