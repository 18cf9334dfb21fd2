#pragma once

// Throttle control laws: LQR about a design point, the three-phase basic
// controller and a high-gain proportional baseline (SURROGATE).

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vmg/attractor.hpp"
#include "vmg/control_law.hpp"
#include "vmg/errors.hpp"
#include "vmg/model.hpp"
#include "vmg/riccati.hpp"

namespace vmg {

/// Linearization about design flow. The disturbance block is diagonal in
/// Fourier modes and decoupled from (Phi, Psi); the throttle acts on Psi only.
struct LinearizedSystem {
  double gamma0 = 0.0;
  Equilibrium eq{0.0, 0.0};
  Eigen::Matrix2d a_mat = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b_vec = Eigen::Vector2d::Zero();
  /// psi_c'(Phi_0) - nu n^2 for n = 1..size().
  std::vector<double> decoupled_growth;
  /// Coefficient of cos(n theta) in the input column, n = 1..size().
  std::vector<double> phi_input;
};

LinearizedSystem linearize_design(const CompressorParams& params, double gamma0,
                                  std::size_t n_modes = 16);

/// d rhs / d gamma for the (Phi, Psi) block at an equilibrium.
Eigen::Vector2d throttle_input_vector(const CompressorParams& params, const Equilibrium& eq);

/// True iff the throttle has no path into the disturbance modes.
bool stall_uncontrollability_check(const LinearizedSystem& system);

struct LinearizedRun {
  std::vector<double> phi;
  Eigen::Vector2d y = Eigen::Vector2d::Zero();
  /// Largest Fourier amplitude of phi seen at any step.
  double max_phi_mode = 0.0;
};

/// RK4 on the linearized equations in the rotating frame,
///   phi' = nu phi_etaeta + psi_c'(Phi_0) phi + u(t) sum_n phi_input_n cos(n eta),
///   y'   = A y + b u(t).
LinearizedRun simulate_linearized(const CompressorParams& params, const LinearizedSystem& system,
                                  std::span<const double> phi0, const Eigen::Vector2d& y0,
                                  const std::function<double(double)>& input, double dt,
                                  double t_end);

// ---------------------------------------------------------------------------

/// u = -(1/R) b^T Q(t) y about a fixed point. Q is read at t - start_time and
/// the last sample is held beyond the horizon.
class LqrController final : public ControlLaw {
 public:
  LqrController(LinearizedSystem system, RiccatiSolution riccati, double gamma_min,
                double gamma_max = 2.0, double start_time = 0.0);

  /// Constant gain from the stationary Riccati solution.
  static LqrController infinite_horizon(const LinearizedSystem& system, const RiccatiWeights& w,
                                        double gamma_min, double gamma_max = 2.0);

  std::string name() const override { return "lqr"; }
  const RiccatiSolution& riccati() const noexcept { return riccati_; }
  const LinearizedSystem& system() const noexcept { return system_; }
  /// A - (1/R) b b^T Q(tau)
  Eigen::Matrix2d closed_loop(double tau) const;

 protected:
  ControlOutput evaluate(double t, const AnnulusState& state) override;

 private:
  LinearizedSystem system_;
  RiccatiSolution riccati_;
  double start_time_;
};

class NoStallFreeGamma : public Error {
 public:
  explicit NoStallFreeGamma(const std::string& what) : Error("NoStallFreeGamma", what) {}
};

/// 1.02 x the smallest scanned gamma without stall or surge whose design
/// point at the inflated gamma is stable.
double select_gamma1(const CompressorParams& params, const BranchTable& table,
                     double margin = 1.02);

class UnstableTarget : public Error {
 public:
  explicit UnstableTarget(const std::string& what) : Error("UnstableTarget", what) {}
};

/// Quasi-static path xi_1 along the design branch, gamma_bar(t) a smoothstep
/// from gamma1 to gamma_target over [0, duration].
class TrackingPath {
 public:
  TrackingPath(const CompressorParams& params, double gamma1, double gamma_target,
               double duration, std::size_t n_samples = 2001);

  double gamma1() const noexcept { return gamma1_; }
  double gamma_target() const noexcept { return gamma_target_; }
  double duration() const noexcept { return duration_; }

  double gamma_at(double t) const noexcept;
  /// Design equilibrium at gamma_at(t), solved to round-off.
  Equilibrium point_at(double t) const;
  /// d/dt (Phi, Psi) along the path, from finite differences on the sample grid.
  std::array<double, 2> rate_at(double t) const;

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<Equilibrium>& points() const noexcept { return points_; }

 private:
  CompressorParams params_;
  double gamma1_, gamma_target_, duration_;
  std::vector<double> times_;
  std::vector<Equilibrium> points_;
  std::vector<std::array<double, 2>> rates_;
};

TrackingPath trajectory_xi1(const CompressorParams& params, double gamma1, double gamma_target,
                            double duration);

/// gamma = gamma_bar(tau) - (1/R) b(tau)^T Q(tau) (x - xi_1(tau)), tau = t - start.
class TrackingLqr final : public ControlLaw {
 public:
  TrackingLqr(const CompressorParams& params, TrackingPath path, const RiccatiWeights& w,
              double gamma_min, double gamma_max = 2.0, const RiccatiOptions& options = {});

  std::string name() const override { return "tracking-lqr"; }
  void set_start_time(double t) noexcept { start_time_ = t; }
  double start_time() const noexcept { return start_time_; }
  const TrackingPath& path() const noexcept { return path_; }
  const RiccatiSolution& riccati() const noexcept { return riccati_; }

 protected:
  ControlOutput evaluate(double t, const AnnulusState& state) override;

 private:
  CompressorParams params_;
  TrackingPath path_;
  RiccatiSolution riccati_;
  double start_time_ = 0.0;
};

enum class BasicPhase : int { Clear = 0, Wait = 1, Track = 2, Hold = 3 };

struct BasicControlConfig {
  double r_u = 0.05;
  double r_phi = 0.02;
  double track_duration = 50.0;
  double wait_warning = 500.0;
  double gamma_max = 2.0;
  RiccatiWeights weights{};
  RiccatiOptions riccati{};
};

/// Clear the stall branch with gamma1, wait for the design neighbourhood,
/// track the design branch down to gamma_target, then regulate there.
class BasicController final : public ControlLaw {
 public:
  BasicController(const CompressorParams& params, double gamma1, double gamma_target,
                  const BasicControlConfig& config = {});

  std::string name() const override { return "basic"; }
  BasicPhase phase() const noexcept { return phase_; }
  double track_start() const noexcept { return track_start_; }
  Equilibrium target() const noexcept { return target_; }

 protected:
  ControlOutput evaluate(double t, const AnnulusState& state) override;

 private:
  BasicControlConfig config_;
  double gamma1_;
  Equilibrium eq1_;
  Equilibrium target_;
  TrackingLqr tracking_;
  LqrController hold_;
  BasicPhase phase_ = BasicPhase::Clear;
  double wait_start_ = 0.0;
  double track_start_ = 0.0;
  bool warned_ = false;
};

/// SURROGATE baseline: saturated gamma_target + gain (Psi - Psi_target).
/// A stand-in for a more forceful controller; not a backstepping design.
class BaselineSurrogate final : public ControlLaw {
 public:
  BaselineSurrogate(const CompressorParams& params, double gamma_target, double gain,
                    double gamma_max = 2.0);

  std::string name() const override { return "SURROGATE"; }
  Equilibrium target() const noexcept { return target_; }

 protected:
  ControlOutput evaluate(double t, const AnnulusState& state) override;

 private:
  double gamma_target_;
  double gain_;
  Equilibrium target_;
};

}  // namespace vmg
