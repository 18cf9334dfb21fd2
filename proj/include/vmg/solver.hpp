#pragma once

// Time stepping for the coupled PDE/ODE system.
//
// LaxWendroff: two-step Richtmyer Lax-Wendroff for the disturbance with
// explicit centred diffusion and a midpoint-sampled source, coupled to a
// classical RK4 step for (Phi, Psi). MethodOfLinesRK4: RK4 on the whole
// semi-discrete system with centred differences; the verification oracle.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vmg/control_law.hpp"
#include "vmg/errors.hpp"
#include "vmg/model.hpp"

namespace vmg {

enum class Scheme { LaxWendroff, MethodOfLinesRK4 };

struct SolverConfig {
  std::size_t n_grid = 128;
  double dt = 0.0;
  Frame frame = Frame::Lab;
  Scheme scheme = Scheme::LaxWendroff;
  double t_end = 1.0;
  std::size_t record_every = 1;

  /// Throws ConfigError when n_grid < 8, t_end <= 0, record_every == 0 or
  /// dt exceeds cfl_check(params, n_grid, frame).
  void validate(const CompressorParams& params) const;
};

/// Largest admissible step:
///   min(0.8 min(dtheta / c_adv, dtheta^2 / (2 nu)), 0.5 / max|psi_c'|)
/// where the reaction bound takes max|psi_c'| over flows in [-W, 3W].
double cfl_check(const CompressorParams& params, std::size_t n_grid, Frame frame = Frame::Lab);

/// Config with dt set to the CFL limit.
SolverConfig make_solver_config(const CompressorParams& params, std::size_t n_grid, double t_end,
                                Frame frame = Frame::Lab,
                                Scheme scheme = Scheme::LaxWendroff,
                                std::size_t record_every = 1);

struct TrajectorySample {
  AnnulusState state;
  /// Throttle held over the step that starts at this sample (for the last
  /// sample, the throttle of the step that produced it).
  double gamma = 0.0;
};

struct ControlRecord {
  double t = 0.0;
  int phase = 0;
  double gamma_command = 0.0;
  double gamma_applied = 0.0;
  double err_flow = 0.0;
  double err_pressure = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<ControlRecord> control_log;
  SolverConfig config{};
  CompressorParams params{};
  std::string controller;

  bool empty() const noexcept { return samples.empty(); }
  double duration() const noexcept;
  /// Samples with time >= t_last - duration.
  Trajectory tail(double duration) const;
};

class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, AnnulusState last_valid, Trajectory partial = {})
      : Error("NonFinite", what), last_valid_(std::move(last_valid)), partial_(std::move(partial)) {}
  const AnnulusState& last_valid() const noexcept { return last_valid_; }
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  AnnulusState last_valid_;
  Trajectory partial_;
};

/// One step of size config.dt. Re-projects phi to zero mean afterwards.
AnnulusState step(const CompressorParams& params, const AnnulusState& state, ThrottleSetting gamma,
                  const SolverConfig& config);

/// Sample-and-hold integration to state0.time + t_end. The step is shortened
/// to t_end / ceil(t_end / dt) so the run ends exactly at t_end.
Trajectory integrate(const CompressorParams& params, const AnnulusState& state0, ControlLaw& law,
                     const SolverConfig& config);

/// (n, |phi_n|) for n = 1..n_max where |phi_n| is the amplitude of the
/// cos/sin pair at wavenumber n (so 3 cos 2 theta has amplitude 3 at n = 2).
std::vector<std::pair<int, double>> fourier_mode_amplitudes(const AnnulusState& state,
                                                            std::size_t n_max);

namespace detail {

/// Half-step values of the Richtmyer predictor: `node` at theta_i, `face`
/// at theta_{i+1/2}.
struct HalfStep {
  std::vector<double> node;
  std::vector<double> face;
};

/// Predictor for phi_t = -c phi_theta + nu phi_thetatheta + reaction.
HalfStep lax_wendroff_predict(std::span<const double> phi, std::span<const double> reaction,
                              double dt, double dx, double speed, double nu);

/// Corrector: conservative flux difference of the face values plus diffusion
/// and `reaction_half` evaluated at the node half step.
void lax_wendroff_correct(std::span<double> phi, const HalfStep& half,
                          std::span<const double> reaction_half, double dt, double dx,
                          double speed, double nu);

void remove_mean(std::span<double> phi) noexcept;

}  // namespace detail

}  // namespace vmg
