#pragma once

#include <filesystem>
#include <iosfwd>

#include "vmg/solver.hpp"

namespace vmg {

/// Self-contained SVG of the (Phi, Psi) orbit over the compressor
/// characteristic and the throttle parabola Phi = gamma sqrt(Psi) at the
/// final throttle. Output depends only on the inputs.
void emit_phase_plot(std::ostream& os, const Trajectory& traj);
void emit_phase_plot(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace vmg
