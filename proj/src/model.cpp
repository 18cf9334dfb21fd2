#include "vmg/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace vmg {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << name << " must be finite and > 0 (got " << value << ")";
    throw InvalidArgument(os.str());
  }
}

double pairwise_sum(std::span<const double> v) noexcept {
  // No sequential base block: a constant on a power-of-two grid sums exactly.
  if (v.size() <= 2) return v.size() == 2 ? v[0] + v[1] : (v.empty() ? 0.0 : v[0]);
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace

double CubicCharacteristic::value(double flow) const noexcept {
  const double s = flow / w - 1.0;
  return psi_c0 + h * (1.0 + 1.5 * s - 0.5 * s * s * s);
}

double CubicCharacteristic::slope(double flow) const noexcept {
  const double s = flow / w - 1.0;
  return 1.5 * h / w * (1.0 - s * s);
}

double CubicCharacteristic::curvature(double flow) const noexcept {
  const double s = flow / w - 1.0;
  return -3.0 * h * s / (w * w);
}

void CubicCharacteristic::validate() const {
  if (!std::isfinite(psi_c0)) throw InvalidArgument("psi_c0 must be finite");
  require_positive(h, "cubic.h");
  require_positive(w, "cubic.w");
}

void CompressorParams::validate() const {
  require_positive(nu, "nu");
  require_positive(l_c, "l_c");
  require_positive(b_param, "b_param");
  require_positive(throttle_eps, "throttle_eps");
  require_positive(gamma_min, "gamma_min");
  cubic.validate();
}

double AnnulusState::grid_spacing() const noexcept {
  return 2.0 * std::numbers::pi / static_cast<double>(phi.size());
}

double AnnulusState::phi_sup() const noexcept {
  double m = 0.0;
  for (double v : phi) m = std::max(m, std::abs(v));
  return m;
}

bool AnnulusState::finite() const noexcept {
  if (!std::isfinite(avg_flow) || !std::isfinite(pressure_rise) || !std::isfinite(time)) {
    return false;
  }
  return std::all_of(phi.begin(), phi.end(), [](double v) { return std::isfinite(v); });
}

void AnnulusState::validate() const {
  if (phi.size() < 8) throw InvalidArgument("state grid must have at least 8 samples");
  if (!finite()) throw InvalidArgument("state contains non-finite values");
  const double mean = grid_mean(phi);
  if (std::abs(mean) > 1e-10 * std::max(1.0, phi_sup())) {
    std::ostringstream os;
    os << "disturbance is not mean-free (mean = " << mean << ")";
    throw InvalidArgument(os.str());
  }
}

AnnulusState AnnulusState::uniform(std::size_t n, double flow, double pressure, double t) {
  return AnnulusState{std::vector<double>(n, 0.0), flow, pressure, t};
}

double psi_c(const CompressorParams& params, double flow) noexcept {
  return params.cubic.value(flow);
}

double psi_c_prime(const CompressorParams& params, double flow) noexcept {
  return params.cubic.slope(flow);
}

// Inside |psi| < eps: p(x) = a x + b x^3 with p(eps) = sqrt(eps) and
// p'(eps) = 1 / (2 sqrt(eps)), i.e. a = 5 / (4 sqrt eps), b = -1 / (4 eps^(5/2)).
double throttle_inverse(const CompressorParams& params, double psi) noexcept {
  const double eps = params.throttle_eps;
  const double mag = std::abs(psi);
  if (mag >= eps) return std::copysign(std::sqrt(mag), psi);
  const double root = std::sqrt(eps);
  const double a = 1.25 / root;
  const double b = -0.25 / (eps * eps * root);
  return psi * (a + b * psi * psi);
}

double throttle_inverse_prime(const CompressorParams& params, double psi) noexcept {
  const double eps = params.throttle_eps;
  const double mag = std::abs(psi);
  if (mag >= eps) return 0.5 / std::sqrt(mag);
  const double root = std::sqrt(eps);
  return 1.25 / root - 0.75 * psi * psi / (eps * eps * root);
}

double grid_mean(std::span<const double> values) noexcept {
  if (values.empty()) return 0.0;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double mean_characteristic(const CompressorParams& params, double flow,
                           std::span<const double> phi) {
  std::vector<double> vals(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) vals[i] = psi_c(params, flow + phi[i]);
  return grid_mean(vals);
}

double mean_characteristic(const CompressorParams& params, const AnnulusState& state) {
  return mean_characteristic(params, state.avg_flow, state.phi);
}

void central_first_derivative(std::span<const double> f, double dx, std::span<double> out) {
  const std::size_t n = f.size();
  const double inv = 0.5 / dx;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    const std::size_t im = (i + n - 1) % n;
    out[i] = (f[ip] - f[im]) * inv;
  }
}

void central_second_derivative(std::span<const double> f, double dx, std::span<double> out) {
  const std::size_t n = f.size();
  const double inv = 1.0 / (dx * dx);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    const std::size_t im = (i + n - 1) % n;
    out[i] = (f[ip] - 2.0 * f[i] + f[im]) * inv;
  }
}

StateDerivative rhs(const CompressorParams& params, const AnnulusState& state,
                    ThrottleSetting gamma, Frame frame) {
  if (!state.finite()) throw InvalidArgument("rhs: non-finite state");
  const std::size_t n = state.grid_size();
  const double dx = state.grid_spacing();

  StateDerivative d;
  d.dphi.assign(n, 0.0);
  std::vector<double> source(n);
  for (std::size_t i = 0; i < n; ++i) source[i] = psi_c(params, state.avg_flow + state.phi[i]);
  const double mean_psi = grid_mean(source);

  central_second_derivative(state.phi, dx, d.dphi);
  for (std::size_t i = 0; i < n; ++i) d.dphi[i] = params.nu * d.dphi[i] + (source[i] - mean_psi);

  const double c = advection_speed(frame);
  if (c != 0.0) {
    std::vector<double> grad(n);
    central_first_derivative(state.phi, dx, grad);
    for (std::size_t i = 0; i < n; ++i) d.dphi[i] -= c * grad[i];
  }

  d.dflow = (mean_psi - state.pressure_rise) / params.l_c;
  d.dpressure = (state.avg_flow - gamma.gamma * throttle_inverse(params, state.pressure_rise)) /
                params.plenum_scale();
  return d;
}

double equilibrium_residual(const CompressorParams& params, double gamma, double flow) noexcept {
  return flow - gamma * throttle_inverse(params, psi_c(params, flow));
}

std::vector<Equilibrium> all_equilibria(const CompressorParams& params, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be > 0");

  // The cubic tends to -inf, so beyond its right zero there is no positive root.
  double upper = 4.0 * params.cubic.w;
  while (psi_c(params, upper) > 0.0 && upper < 1e6) upper *= 2.0;

  constexpr int kScan = 1000;
  auto g = [&](double x) { return equilibrium_residual(params, gamma, x); };

  std::vector<Equilibrium> roots;
  auto push = [&](double x) {
    if (!roots.empty() && std::abs(roots.back().flow - x) < 1e-12) return;
    roots.push_back({x, psi_c(params, x)});
  };

  double x_prev = upper * 1e-9;
  double g_prev = g(x_prev);
  for (int k = 1; k <= kScan; ++k) {
    const double x = upper * static_cast<double>(k) / kScan;
    const double gx = g(x);
    if (gx == 0.0) {
      push(x);
    } else if ((g_prev < 0.0 && gx > 0.0) || (g_prev > 0.0 && gx < 0.0)) {
      double lo = x_prev, hi = x, g_lo = g_prev;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm < 0.0) == (g_lo < 0.0)) {
          lo = mid;
          g_lo = gm;
        } else {
          hi = mid;
        }
      }
      push(std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi);
    }
    x_prev = x;
    g_prev = gx;
  }
  return roots;
}

Equilibrium design_equilibrium(const CompressorParams& params, double gamma) {
  auto roots = all_equilibria(params, gamma);
  if (roots.empty()) {
    std::ostringstream os;
    os << "throttle characteristic at gamma = " << gamma
       << " does not intersect the compressor characteristic";
    throw NoIntersection(os.str());
  }
  return roots.back();
}

}  // namespace vmg
