#include "vmg/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vmg {

namespace {

Eigen::Matrix2d symmetrize(const Eigen::Matrix2d& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Eigen::Matrix2d& m) {
  const Eigen::Matrix2d s = symmetrize(m);
  const double half_tr = 0.5 * s.trace();
  const double disc = std::hypot(0.5 * (s(0, 0) - s(1, 1)), s(0, 1));
  return half_tr - disc;
}

}  // namespace

bool is_symmetric_psd(const Eigen::Matrix2d& m, double tol) {
  if (std::abs(m(0, 1) - m(1, 0)) > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) return false;
  return min_eigenvalue(m) >= -tol;
}

Eigen::Matrix2d RiccatiSolution::at(double t) const {
  if (q.empty()) return Eigen::Matrix2d::Zero();
  if (t <= times.front()) return q.front();
  if (t >= times.back()) return q.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return (1.0 - w) * q[k - 1] + w * q[k];
}

Eigen::Matrix2d riccati_derivative(const Eigen::Matrix2d& a, const Eigen::Vector2d& b,
                                   const Eigen::Matrix2d& q, const RiccatiWeights& w) {
  const Eigen::Vector2d qb = q * b;
  return -a.transpose() * q - q * a + qb * qb.transpose() / w.control - w.state;
}

RiccatiSolution solve_riccati(const MatrixPath& a, const VectorPath& b, const RiccatiWeights& w,
                              double t_final, const RiccatiOptions& options) {
  if (!is_symmetric_psd(w.state) || !is_symmetric_psd(w.terminal)) {
    throw WeightNotPSD("Riccati weights S and S_f must be symmetric positive semidefinite");
  }
  if (!(w.control > 0.0)) throw WeightNotPSD("Riccati control weight R must be > 0");
  if (!(t_final > 0.0)) throw InvalidArgument("solve_riccati: t_final must be > 0");

  const auto n = static_cast<std::size_t>(std::max(2.0, std::ceil(t_final / options.step - 1e-9)));
  const double h = t_final / static_cast<double>(n);

  RiccatiSolution sol;
  sol.weights = w;
  sol.t_final = t_final;
  sol.times.resize(n + 1);
  sol.q.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) sol.times[k] = t_final * static_cast<double>(k) / static_cast<double>(n);

  auto f = [&](double t, const Eigen::Matrix2d& q) { return riccati_derivative(a(t), b(t), q, w); };

  Eigen::Matrix2d q = w.terminal;
  sol.q[n] = q;
  for (std::size_t k = n; k > 0; --k) {
    const double t = sol.times[k];
    // Backward step: dt = -h.
    const Eigen::Matrix2d k1 = f(t, q);
    const Eigen::Matrix2d k2 = f(t - 0.5 * h, q - 0.5 * h * k1);
    const Eigen::Matrix2d k3 = f(t - 0.5 * h, q - 0.5 * h * k2);
    const Eigen::Matrix2d k4 = f(t - h, q - h * k3);
    q = symmetrize(q - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    if (!q.allFinite()) throw StepTooLarge("Riccati integration diverged");
    sol.q[k - 1] = q;
  }

  sol.max_residual = riccati_residual(sol, a, b);
  if (sol.max_residual > options.residual_tol) {
    std::ostringstream os;
    os << "Riccati residual " << sol.max_residual << " exceeds " << options.residual_tol
       << " with step " << h;
    throw StepTooLarge(os.str());
  }
  return sol;
}

RiccatiSolution solve_riccati(const Eigen::Matrix2d& a, const Eigen::Vector2d& b,
                              const RiccatiWeights& w, double t_final,
                              const RiccatiOptions& options) {
  return solve_riccati([a](double) { return a; }, [b](double) { return b; }, w, t_final, options);
}

double riccati_residual(const RiccatiSolution& sol, const MatrixPath& a, const VectorPath& b) {
  const std::size_t n = sol.q.size();
  if (n < 3) return 0.0;
  const double h = sol.times[1] - sol.times[0];
  const auto& q = sol.q;
  // Fourth-order stencils (one-sided near the ends) so the difference error
  // stays well under the RK4 error; short paths fall back to centred.
  auto derivative = [&](std::size_t k) -> Eigen::Matrix2d {
    if (n < 5) return (q[k + 1] - q[k - 1]) / (2.0 * h);
    if (k == 0) return (-25.0 * q[0] + 48.0 * q[1] - 36.0 * q[2] + 16.0 * q[3] - 3.0 * q[4]) / (12.0 * h);
    if (k == 1) return (-3.0 * q[0] - 10.0 * q[1] + 18.0 * q[2] - 6.0 * q[3] + q[4]) / (12.0 * h);
    if (k == n - 1) {
      return (25.0 * q[k] - 48.0 * q[k - 1] + 36.0 * q[k - 2] - 16.0 * q[k - 3] + 3.0 * q[k - 4]) / (12.0 * h);
    }
    if (k == n - 2) {
      return (3.0 * q[k + 1] + 10.0 * q[k] - 18.0 * q[k - 1] + 6.0 * q[k - 2] - q[k - 3]) / (12.0 * h);
    }
    return (-q[k + 2] + 8.0 * q[k + 1] - 8.0 * q[k - 1] + q[k - 2]) / (12.0 * h);
  };
  const std::size_t first = n < 5 ? 1 : 0;
  const std::size_t last = n < 5 ? n - 1 : n;
  double worst = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    const Eigen::Matrix2d r = derivative(k) - riccati_derivative(a(sol.times[k]), b(sol.times[k]), q[k], sol.weights);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

Eigen::Matrix2d steady_state_riccati(const Eigen::Matrix2d& a, const Eigen::Vector2d& b,
                                     const RiccatiWeights& w, double max_time) {
  if (!is_symmetric_psd(w.state) || !is_symmetric_psd(w.terminal) || !(w.control > 0.0)) {
    throw WeightNotPSD("Riccati weights must be PSD with R > 0");
  }
  // Step bounded by the fastest closed-loop time scale.
  const double scale = std::max({a.cwiseAbs().maxCoeff(), b.squaredNorm() / w.control, 1e-6});
  double h = std::min(0.05, 0.1 / scale);
  auto f = [&](const Eigen::Matrix2d& q) { return riccati_derivative(a, b, q, w); };
  Eigen::Matrix2d q = w.terminal;
  for (double t = 0.0; t < max_time; t += h) {
    const Eigen::Matrix2d k1 = f(q);
    if (k1.norm() < 1e-11 * std::max(1.0, q.norm())) return q;
    const Eigen::Matrix2d k2 = f(q - 0.5 * h * k1);
    const Eigen::Matrix2d k3 = f(q - 0.5 * h * k2);
    const Eigen::Matrix2d k4 = f(q - h * k3);
    q = symmetrize(q - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    if (!q.allFinite()) throw StepTooLarge("steady-state Riccati iteration diverged");
  }
  throw StepTooLarge("steady-state Riccati iteration did not converge (pair not stabilizable?)");
}

}  // namespace vmg
