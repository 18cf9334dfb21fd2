#pragma once

// Summary numbers for control experiments.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "vmg/model.hpp"
#include "vmg/solver.hpp"

namespace vmg {

/// Area of the convex hull of a planar point set (Andrew's monotone chain).
double convex_hull_area(std::span<const std::array<double, 2>> points);

/// (Phi, Psi) orbit of a trajectory.
std::vector<std::array<double, 2>> phase_orbit(const Trajectory& traj);

double excursion_area(const Trajectory& traj);

double min_pressure(const Trajectory& traj);

struct RecoveryTolerance {
  double phi_sup = 1e-3;  ///< |phi|_inf
  double state = 1e-3;    ///< Euclidean distance of (Phi, Psi) to the target
};

/// Earliest sample time after which every sample stays within tolerance of
/// the target. Empty when the final sample is outside.
std::optional<double> recovery_time(const Trajectory& traj, const Equilibrium& target,
                                    const RecoveryTolerance& tol = {});

/// Largest |mean phi| over all samples.
double max_mean_drift(const Trajectory& traj);

}  // namespace vmg
