#pragma once

// Components of the basic attractor: design flow, rotating stall, surge.

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vmg/errors.hpp"
#include "vmg/model.hpp"
#include "vmg/solver.hpp"

namespace vmg {

// ---------------------------------------------------------------------------
// Regime classification

enum class Regime { Design, Stall, Surge, Transient };

std::string_view to_string(Regime regime) noexcept;

struct RegimeLabel {
  Regime regime = Regime::Transient;
  double wave_amplitude = 0.0;    ///< sup over the tail of |phi|_inf
  double flow_oscillation = 0.0;  ///< peak-to-peak of Phi over the tail
  double wave_speed = 0.0;        ///< lab frame, 0 when no coherent wave
  double period = 0.0;            ///< 0 when no period was detected
};

struct ClassifierOptions {
  double eps_phi = 0.05;
  double eps_flow = 0.02;
  double min_tail = 20.0;
  /// Largest max-min spread of per-interval speeds still called coherent.
  double speed_spread = 0.05;
};

class TailTooShort : public Error {
 public:
  explicit TailTooShort(const std::string& what) : Error("TailTooShort", what) {}
};

RegimeLabel classify_regime(const Trajectory& tail, const ClassifierOptions& options = {});

/// Angular shift s in (-pi, pi] such that after(theta) ~ before(theta - s):
/// integer cross-correlation peak refined by the phase of the dominant
/// Fourier mode.
double measure_drift(std::span<const double> before, std::span<const double> after);

/// Lab-frame speeds between consecutive samples of a trajectory.
std::vector<double> wave_speeds(const Trajectory& traj);

// ---------------------------------------------------------------------------
// Rotating stall

struct StallWave {
  std::vector<double> profile;  ///< settled phi over eta = theta - t/2
  double wave_speed = 0.5;      ///< lab frame
  double drift_speed = 0.0;     ///< residual drift in the rotating frame
  double flow = 0.0;
  double pressure = 0.0;
  double residual = 0.0;        ///< |rotating-frame rhs|_inf at the profile
  double settle_time = 0.0;

  double amplitude() const noexcept;
  AnnulusState state() const;
};

struct StallSearchOptions {
  std::size_t n_grid = 128;
  double dt = 0.0;                ///< 0 selects the CFL limit
  double window = 1.0;            ///< stationarity is checked over this span
  double tolerance = 1e-8;        ///< |state(t + window) - state(t)|_inf
  double polish_switch = 1e-4;    ///< start Newton polishing below this change
  double decay_floor = 1e-8;      ///< |phi|_inf below this means no stall
  double time_budget = 20000.0;
};

class NoStall : public Error {
 public:
  NoStall(const std::string& what, double final_amplitude, bool budget_exhausted)
      : Error("NoStall", what), final_amplitude_(final_amplitude), budget_(budget_exhausted) {}
  double final_amplitude() const noexcept { return final_amplitude_; }
  bool budget_exhausted() const noexcept { return budget_; }

 private:
  double final_amplitude_;
  bool budget_;
};

/// Settles a cos(theta) seed of the given amplitude, superposed on the
/// design equilibrium, in the rotating frame.
StallWave find_stall_wave(const CompressorParams& params, double gamma, double seed_amplitude,
                          const StallSearchOptions& options = {});

/// Same, from an explicit seed state (continuation).
StallWave find_stall_wave(const CompressorParams& params, double gamma, const AnnulusState& seed,
                          const StallSearchOptions& options = {});

// ---------------------------------------------------------------------------
// Surge

struct SurgeCycle {
  double period = 0.0;
  /// One cycle as (t, Phi, Psi), starting and ending on the section.
  std::vector<std::array<double, 3>> samples;
  double section_flow = 0.0;
  double flow_min = 0.0, flow_max = 0.0;
  double pressure_min = 0.0, pressure_max = 0.0;
};

struct SurgeSearchOptions {
  double dt = 0.05;
  double t_max = 20000.0;
  double tolerance = 1e-6;
  /// Initial (Phi, Psi); defaults to (0, Psi_0), a large reversed-flow kick.
  std::optional<Equilibrium> seed;
};

class NoCycle : public Error {
 public:
  explicit NoCycle(const std::string& what) : Error("NoCycle", what) {}
};

/// Integrates the phi = 0 subsystem and returns the attracting cycle found
/// on the upward Poincare section Phi = Phi_0(gamma).
SurgeCycle find_surge_cycle(const CompressorParams& params, double gamma,
                            const SurgeSearchOptions& options = {});

/// RK4 step of the phi = 0 subsystem.
std::array<double, 2> surge_subsystem_step(const CompressorParams& params, double gamma,
                                           std::array<double, 2> y, double dt);

// ---------------------------------------------------------------------------
// Linear stability of design flow

Eigen::Matrix2d jacobian_2d(const CompressorParams& params, const Equilibrium& equilibrium,
                            double gamma);

std::array<std::complex<double>, 2> eigenvalues_2d(const Eigen::Matrix2d& m);

/// trace of jacobian_2d at the design equilibrium of gamma.
double design_trace(const CompressorParams& params, double gamma);

class NoSignChange : public Error {
 public:
  explicit NoSignChange(const std::string& what) : Error("NoSignChange", what) {}
};

/// gamma in [gamma_lo, gamma_hi] where the design-flow trace vanishes, with
/// det > 0 checked at the root.
double hopf_point(const CompressorParams& params, double gamma_lo, double gamma_hi);

// ---------------------------------------------------------------------------
// Branch scan

struct EquilibriumInfo {
  Equilibrium eq;
  std::complex<double> ev1;  ///< larger real part
  std::complex<double> ev2;
};

struct BranchRow {
  double gamma = 0.0;
  std::vector<EquilibriumInfo> equilibria;  ///< ascending in Phi; back() is design flow
  bool stall_exists = false;
  double stall_amp = 0.0;
  bool surge_exists = false;
  double period = 0.0;
  std::string annotation;
  std::optional<AnnulusState> stall_state;

  bool design_stable(const CompressorParams& params) const;
};

struct BranchTable {
  std::vector<BranchRow> rows;
  /// Smallest scanned gamma without a stall wave.
  std::optional<double> gamma1_candidate;
  double seed_amplitude = 0.0;
  std::size_t n_grid = 0;
};

struct ScanOptions {
  StallSearchOptions stall{};
  SurgeSearchOptions surge{};
  double seed_amplitude = 0.3;
  /// Worker threads for the independent columns; 0 reads VMG_THREADS, else
  /// hardware concurrency.
  unsigned threads = 0;
};

BranchTable bifurcation_scan(const CompressorParams& params, std::span<const double> gamma_grid,
                             const ScanOptions& options = {});

/// `gamma,Phi0,Psi0,re_ev1,im_ev1,re_ev2,im_ev2,stall_exists,stall_amp,surge_exists,period`
void write_branch_csv(std::ostream& os, const BranchTable& table);

unsigned scan_threads(unsigned requested);

}  // namespace vmg
