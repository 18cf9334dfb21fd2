#pragma once

// Differential Riccati equation for the reduced (Phi, Psi) regulator
//
//   Q' = -A^T Q - Q A + Q b R^-1 b^T Q - S,   Q(t_f) = S_f,
//
// integrated backward in time by RK4 on a fixed grid.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "vmg/errors.hpp"

namespace vmg {

struct RiccatiWeights {
  Eigen::Matrix2d state = Eigen::Matrix2d::Identity();     ///< S
  double control = 10.0;                                   ///< R
  Eigen::Matrix2d terminal = Eigen::Matrix2d::Identity();  ///< S_f
};

struct RiccatiOptions {
  double step = 2e-3;
  /// Frobenius bound on the residual at the grid points, with Q' from
  /// fourth-order differences of the stored samples.
  double residual_tol = 1e-6;
};

class WeightNotPSD : public Error {
 public:
  explicit WeightNotPSD(const std::string& what) : Error("WeightNotPSD", what) {}
};

class StepTooLarge : public Error {
 public:
  explicit StepTooLarge(const std::string& what) : Error("StepTooLarge", what) {}
};

struct RiccatiSolution {
  std::vector<double> times;  ///< ascending, times.back() == t_final
  std::vector<Eigen::Matrix2d> q;
  RiccatiWeights weights;
  double t_final = 0.0;
  double max_residual = 0.0;

  /// Linear interpolation; clamps to the end samples outside [0, t_final].
  Eigen::Matrix2d at(double t) const;
};

using MatrixPath = std::function<Eigen::Matrix2d(double)>;
using VectorPath = std::function<Eigen::Vector2d(double)>;

Eigen::Matrix2d riccati_derivative(const Eigen::Matrix2d& a, const Eigen::Vector2d& b,
                                   const Eigen::Matrix2d& q, const RiccatiWeights& w);

/// Time-varying system. Throws WeightNotPSD, StepTooLarge.
RiccatiSolution solve_riccati(const MatrixPath& a, const VectorPath& b, const RiccatiWeights& w,
                              double t_final, const RiccatiOptions& options = {});

RiccatiSolution solve_riccati(const Eigen::Matrix2d& a, const Eigen::Vector2d& b,
                              const RiccatiWeights& w, double t_final,
                              const RiccatiOptions& options = {});

/// Max Frobenius residual over the stored samples.
double riccati_residual(const RiccatiSolution& sol, const MatrixPath& a, const VectorPath& b);

/// Stationary solution of the algebraic equation reached by integrating
/// backward from S_f until |Q'| < 1e-11 (max_time bounds the search).
Eigen::Matrix2d steady_state_riccati(const Eigen::Matrix2d& a, const Eigen::Vector2d& b,
                                     const RiccatiWeights& w, double max_time = 1e6);

bool is_symmetric_psd(const Eigen::Matrix2d& m, double tol = 1e-10);

}  // namespace vmg
