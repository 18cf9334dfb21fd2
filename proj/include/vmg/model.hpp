#pragma once

// Viscous Moore-Greitzer compressor model: parameters, state, characteristics
// and the right-hand side of the coupled PDE/ODE system
//
//   phi_t = nu phi_tt - 1/2 phi_t + psi_c(Phi + phi) - mean psi_c
//   Phi'  = (mean psi_c - Psi) / l_c
//   Psi'  = (Phi - gamma F_T^-1(Psi)) / (4 l_c B^2)
//
// on the circle theta in [0, 2 pi).

#include <span>
#include <vector>

#include "vmg/errors.hpp"

namespace vmg {

/// Cubic compressor characteristic
///   psi_c(x) = psi_c0 + H (1 + 3/2 (x/W - 1) - 1/2 (x/W - 1)^3),
/// with its valley at x = 0 and its peak at x = 2W.
struct CubicCharacteristic {
  double psi_c0 = 0.3;
  double h = 0.18;
  double w = 0.25;

  double value(double flow) const noexcept;
  double slope(double flow) const noexcept;
  double curvature(double flow) const noexcept;
  void validate() const;
};

struct CompressorParams {
  double nu = 0.1;
  double l_c = 8.0;
  double b_param = 1.8;
  CubicCharacteristic cubic{};
  double throttle_eps = 1e-3;
  double gamma_min = 0.05;

  /// 4 l_c B^2, the time constant of the plenum equation.
  double plenum_scale() const noexcept { return 4.0 * l_c * b_param * b_param; }
  void validate() const;
};

enum class Frame { Lab, Rotating };

/// Advection speed of the disturbance in the given frame.
constexpr double advection_speed(Frame frame) noexcept {
  return frame == Frame::Lab ? 0.5 : 0.0;
}

/// Full system state. `phi` samples the zero-mean disturbance on an
/// equispaced periodic grid theta_i = 2 pi i / N.
struct AnnulusState {
  std::vector<double> phi;
  double avg_flow = 0.0;
  double pressure_rise = 0.0;
  double time = 0.0;

  std::size_t grid_size() const noexcept { return phi.size(); }
  double grid_spacing() const noexcept;
  double phi_sup() const noexcept;
  bool finite() const noexcept;
  /// Throws InvalidArgument when N < 8, values are non-finite or phi is not
  /// mean-free to 1e-10 max(1, |phi|_inf).
  void validate() const;

  static AnnulusState uniform(std::size_t n, double flow, double pressure, double t = 0.0);
};

struct ThrottleSetting {
  double gamma;
};

struct Equilibrium {
  double flow;
  double pressure;
};

struct StateDerivative {
  std::vector<double> dphi;
  double dflow = 0.0;
  double dpressure = 0.0;
};

double psi_c(const CompressorParams& params, double flow) noexcept;
double psi_c_prime(const CompressorParams& params, double flow) noexcept;

/// Smoothed inverse throttle characteristic: sign(psi) sqrt|psi| outside
/// |psi| < throttle_eps, an odd C^1 cubic inside.
double throttle_inverse(const CompressorParams& params, double psi) noexcept;
double throttle_inverse_prime(const CompressorParams& params, double psi) noexcept;

/// Pairwise sum / N. Exact for a constant vector when N is a power of two.
double grid_mean(std::span<const double> values) noexcept;

/// Annulus average of psi_c(Phi + phi) by the periodic trapezoid rule.
double mean_characteristic(const CompressorParams& params, const AnnulusState& state);
double mean_characteristic(const CompressorParams& params, double flow,
                           std::span<const double> phi);

/// Periodic second-order centred differences.
void central_first_derivative(std::span<const double> f, double dx, std::span<double> out);
void central_second_derivative(std::span<const double> f, double dx, std::span<double> out);

StateDerivative rhs(const CompressorParams& params, const AnnulusState& state,
                    ThrottleSetting gamma, Frame frame);

/// g(Phi) = Phi - gamma F_T^-1(psi_c(Phi)); its positive roots are the
/// axisymmetric equilibria.
double equilibrium_residual(const CompressorParams& params, double gamma, double flow) noexcept;

/// Every intersection of the throttle and compressor characteristics with
/// Phi > 0, ascending in Phi.
std::vector<Equilibrium> all_equilibria(const CompressorParams& params, double gamma);

/// Right-most intersection. Throws NoIntersection.
Equilibrium design_equilibrium(const CompressorParams& params, double gamma);

}  // namespace vmg
