#include "vmg/control.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "vmg/solver.hpp"

namespace vmg {

namespace {

bool point_stable(const CompressorParams& params, const Equilibrium& eq, double gamma) {
  const auto ev = eigenvalues_2d(jacobian_2d(params, eq, gamma));
  return ev[0].real() < 0.0 && ev[1].real() < 0.0 && psi_c_prime(params, eq.flow) - params.nu < 0.0;
}

// Right-most root of the equilibrium residual near `guess`. The residual is
// negative just left of the design root and positive right of it.
double refine_design_flow(const CompressorParams& params, double gamma, double guess) {
  auto g = [&](double x) { return equilibrium_residual(params, gamma, x); };
  double delta = 1e-6;
  double lo = guess - delta, hi = guess + delta;
  while (!(g(lo) <= 0.0 && g(hi) >= 0.0)) {
    delta *= 2.0;
    if (delta > 1.0) return design_equilibrium(params, gamma).flow;
    lo = std::max(guess - delta, 1e-12);
    hi = guess + delta;
  }
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
}

double smoothstep(double s) noexcept {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

}  // namespace

// ---------------------------------------------------------------------------

Eigen::Vector2d throttle_input_vector(const CompressorParams& params, const Equilibrium& eq) {
  return {0.0, -throttle_inverse(params, eq.pressure) / params.plenum_scale()};
}

LinearizedSystem linearize_design(const CompressorParams& params, double gamma0,
                                  std::size_t n_modes) {
  LinearizedSystem sys;
  sys.gamma0 = gamma0;
  sys.eq = design_equilibrium(params, gamma0);
  sys.a_mat = jacobian_2d(params, sys.eq, gamma0);
  sys.b_vec = throttle_input_vector(params, sys.eq);
  const double slope = psi_c_prime(params, sys.eq.flow);
  sys.decoupled_growth.resize(n_modes);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    sys.decoupled_growth[n - 1] = slope - params.nu * static_cast<double>(n * n);
  }
  sys.phi_input.assign(n_modes, 0.0);
  return sys;
}

bool stall_uncontrollability_check(const LinearizedSystem& system) {
  return std::all_of(system.phi_input.begin(), system.phi_input.end(),
                     [](double c) { return c == 0.0; });
}

LinearizedRun simulate_linearized(const CompressorParams& params, const LinearizedSystem& system,
                                  std::span<const double> phi0, const Eigen::Vector2d& y0,
                                  const std::function<double(double)>& input, double dt,
                                  double t_end) {
  const std::size_t n = phi0.size();
  if (n < 8) throw InvalidArgument("simulate_linearized: need at least 8 grid points");
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw InvalidArgument("simulate_linearized: bad dt/t_end");
  const double dx = 2.0 * std::numbers::pi / static_cast<double>(n);
  if (dt > cfl_check(params, n, Frame::Rotating)) {
    throw ConfigError("simulate_linearized: dt exceeds the stability limit");
  }
  const double slope = psi_c_prime(params, system.eq.flow);

  std::vector<double> shape(n, 0.0);
  for (std::size_t m = 0; m < system.phi_input.size(); ++m) {
    if (system.phi_input[m] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      shape[j] += system.phi_input[m] * std::cos(dx * static_cast<double>(((m + 1) * j) % n));
    }
  }

  struct Y {
    std::vector<double> phi;
    Eigen::Vector2d y;
  };
  std::vector<double> d2(n);
  auto f = [&](double t, const Y& s) {
    Y d{std::vector<double>(n), Eigen::Vector2d::Zero()};
    const double u = input(t);
    central_second_derivative(s.phi, dx, d2);
    for (std::size_t j = 0; j < n; ++j) d.phi[j] = params.nu * d2[j] + slope * s.phi[j] + u * shape[j];
    d.y = system.a_mat * s.y + system.b_vec * u;
    return d;
  };
  auto axpy = [&](const Y& s, double h, const Y& k) {
    Y r{s.phi, s.y + h * k.y};
    for (std::size_t j = 0; j < n; ++j) r.phi[j] += h * k.phi[j];
    return r;
  };
  auto sup_mode = [&](const std::vector<double>& phi) {
    AnnulusState st;
    st.phi = phi;
    double best = 0.0;
    for (const auto& [m, a] : fourier_mode_amplitudes(st, n / 2 - 1)) best = std::max(best, a);
    return best;
  };

  Y s{std::vector<double>(phi0.begin(), phi0.end()), y0};
  LinearizedRun run;
  run.max_phi_mode = sup_mode(s.phi);
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const double h = steps == 0 ? 0.0 : t_end / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = h * static_cast<double>(k);
    const Y k1 = f(t, s);
    const Y k2 = f(t + 0.5 * h, axpy(s, 0.5 * h, k1));
    const Y k3 = f(t + 0.5 * h, axpy(s, 0.5 * h, k2));
    const Y k4 = f(t + h, axpy(s, h, k3));
    for (std::size_t j = 0; j < n; ++j) {
      s.phi[j] += h / 6.0 * (k1.phi[j] + 2.0 * k2.phi[j] + 2.0 * k3.phi[j] + k4.phi[j]);
    }
    s.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    run.max_phi_mode = std::max(run.max_phi_mode, sup_mode(s.phi));
  }
  run.phi = std::move(s.phi);
  run.y = s.y;
  return run;
}

// ---------------------------------------------------------------------------
// LQR about a fixed point

LqrController::LqrController(LinearizedSystem system, RiccatiSolution riccati, double gamma_min,
                             double gamma_max, double start_time)
    : ControlLaw(gamma_min, gamma_max),
      system_(std::move(system)),
      riccati_(std::move(riccati)),
      start_time_(start_time) {
  if (riccati_.q.empty()) throw InvalidArgument("LqrController: empty Riccati solution");
}

LqrController LqrController::infinite_horizon(const LinearizedSystem& system,
                                              const RiccatiWeights& w, double gamma_min,
                                              double gamma_max) {
  RiccatiSolution sol;
  sol.weights = w;
  sol.times = {0.0};
  sol.q = {steady_state_riccati(system.a_mat, system.b_vec, w)};
  return LqrController(system, std::move(sol), gamma_min, gamma_max);
}

Eigen::Matrix2d LqrController::closed_loop(double tau) const {
  const Eigen::Matrix2d q = riccati_.at(tau);
  return system_.a_mat -
         system_.b_vec * (system_.b_vec.transpose() * q) / riccati_.weights.control;
}

ControlOutput LqrController::evaluate(double t, const AnnulusState& state) {
  ControlOutput out;
  const Eigen::Vector2d y(state.avg_flow - system_.eq.flow, state.pressure_rise - system_.eq.pressure);
  out.err_flow = y[0];
  out.err_pressure = y[1];
  if (y[0] == 0.0 && y[1] == 0.0) {
    out.command = system_.gamma0;
    return out;
  }
  const Eigen::Matrix2d q = riccati_.at(t - start_time_);
  const double u = -system_.b_vec.dot(q * y) / riccati_.weights.control;
  out.command = system_.gamma0 + u;
  return out;
}

// ---------------------------------------------------------------------------

double select_gamma1(const CompressorParams& params, const BranchTable& table, double margin) {
  for (const auto& row : table.rows) {
    if (row.stall_exists || row.surge_exists || !row.design_stable(params)) continue;
    const double g1 = margin * row.gamma;
    try {
      if (point_stable(params, design_equilibrium(params, g1), g1)) return g1;
    } catch (const NoIntersection&) {
    }
  }
  throw NoStallFreeGamma("no scanned gamma is free of stall and surge with a stable design point");
}

// ---------------------------------------------------------------------------
// Tracking path

TrackingPath::TrackingPath(const CompressorParams& params, double gamma1, double gamma_target,
                           double duration, std::size_t n_samples)
    : params_(params), gamma1_(gamma1), gamma_target_(gamma_target), duration_(duration) {
  if (!(gamma_target < gamma1)) {
    throw InvalidArgument("trajectory_xi1: gamma_target must be below gamma1");
  }
  if (!(duration > 0.0)) throw InvalidArgument("trajectory_xi1: duration must be > 0");
  if (n_samples < 3) throw InvalidArgument("trajectory_xi1: need at least 3 samples");

  times_.resize(n_samples);
  points_.resize(n_samples);
  double flow = design_equilibrium(params, gamma1).flow;
  for (std::size_t k = 0; k < n_samples; ++k) {
    times_[k] = duration * static_cast<double>(k) / static_cast<double>(n_samples - 1);
    const double g = gamma_at(times_[k]);
    flow = refine_design_flow(params, g, flow);
    points_[k] = {flow, psi_c(params, flow)};
    if (!point_stable(params, points_[k], g)) {
      std::ostringstream os;
      os << "design equilibrium at gamma = " << g << " on the tracking path is unstable";
      throw UnstableTarget(os.str());
    }
  }
  rates_.resize(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = k + 1 == n_samples ? k : k + 1;
    const double dt = times_[b] - times_[a];
    rates_[k] = {(points_[b].flow - points_[a].flow) / dt,
                 (points_[b].pressure - points_[a].pressure) / dt};
  }
}

double TrackingPath::gamma_at(double t) const noexcept {
  return gamma1_ + (gamma_target_ - gamma1_) * smoothstep(t / duration_);
}

Equilibrium TrackingPath::point_at(double t) const {
  t = std::clamp(t, 0.0, duration_);
  const double pos = t / duration_ * static_cast<double>(times_.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(pos), times_.size() - 2);
  const double w = pos - static_cast<double>(k);
  const double guess = (1.0 - w) * points_[k].flow + w * points_[k + 1].flow;
  const double flow = refine_design_flow(params_, gamma_at(t), guess);
  return {flow, psi_c(params_, flow)};
}

std::array<double, 2> TrackingPath::rate_at(double t) const {
  t = std::clamp(t, 0.0, duration_);
  const double pos = t / duration_ * static_cast<double>(times_.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(pos), times_.size() - 2);
  const double w = pos - static_cast<double>(k);
  return {(1.0 - w) * rates_[k][0] + w * rates_[k + 1][0],
          (1.0 - w) * rates_[k][1] + w * rates_[k + 1][1]};
}

TrackingPath trajectory_xi1(const CompressorParams& params, double gamma1, double gamma_target,
                            double duration) {
  return TrackingPath(params, gamma1, gamma_target, duration);
}

// ---------------------------------------------------------------------------
// Tracking LQR

TrackingLqr::TrackingLqr(const CompressorParams& params, TrackingPath path, const RiccatiWeights& w,
                         double gamma_min, double gamma_max, const RiccatiOptions& options)
    : ControlLaw(gamma_min, gamma_max), params_(params), path_(std::move(path)) {
  const auto a = [this](double t) {
    return jacobian_2d(params_, path_.point_at(t), path_.gamma_at(t));
  };
  const auto b = [this](double t) { return throttle_input_vector(params_, path_.point_at(t)); };
  riccati_ = solve_riccati(a, b, w, path_.duration(), options);
}

ControlOutput TrackingLqr::evaluate(double t, const AnnulusState& state) {
  const double tau = t - start_time_;
  const Equilibrium ref = path_.point_at(tau);
  const double feedforward = path_.gamma_at(std::clamp(tau, 0.0, path_.duration()));
  ControlOutput out;
  const Eigen::Vector2d y(state.avg_flow - ref.flow, state.pressure_rise - ref.pressure);
  out.err_flow = y[0];
  out.err_pressure = y[1];
  if (y[0] == 0.0 && y[1] == 0.0) {
    out.command = feedforward;
    return out;
  }
  const Eigen::Vector2d b = throttle_input_vector(params_, ref);
  out.command = feedforward - b.dot(riccati_.at(tau) * y) / riccati_.weights.control;
  return out;
}

// ---------------------------------------------------------------------------
// Basic controller

BasicController::BasicController(const CompressorParams& params, double gamma1,
                                 double gamma_target, const BasicControlConfig& config)
    : ControlLaw(params.gamma_min, config.gamma_max),
      config_(config),
      gamma1_(gamma1),
      eq1_(design_equilibrium(params, gamma1)),
      target_(design_equilibrium(params, gamma_target)),
      tracking_(params, TrackingPath(params, gamma1, gamma_target, config.track_duration),
                config.weights, params.gamma_min, config.gamma_max, config.riccati),
      hold_(LqrController::infinite_horizon(linearize_design(params, gamma_target), config.weights,
                                            params.gamma_min, config.gamma_max)) {
  if (!(config.r_u > 0.0) || !(config.r_phi > 0.0)) {
    throw InvalidArgument("basic controller: r_U and r_phi must be > 0");
  }
}

ControlOutput BasicController::evaluate(double t, const AnnulusState& state) {
  if (phase_ == BasicPhase::Clear) {
    phase_ = BasicPhase::Wait;
    wait_start_ = t;
  }
  if (phase_ == BasicPhase::Wait) {
    const double ef = state.avg_flow - eq1_.flow;
    const double ep = state.pressure_rise - eq1_.pressure;
    if (std::hypot(ef, ep) < config_.r_u && state.phi_sup() < config_.r_phi) {
      phase_ = BasicPhase::Track;
      track_start_ = t;
      tracking_.set_start_time(t);
    } else {
      if (!warned_ && t - wait_start_ > config_.wait_warning) {
        std::clog << "warning: basic controller still waiting for the design neighbourhood after "
                  << t - wait_start_ << " time units\n";
        warned_ = true;
      }
      ControlOutput out;
      out.command = gamma1_;
      out.phase = static_cast<int>(BasicPhase::Wait);
      out.err_flow = ef;
      out.err_pressure = ep;
      return out;
    }
  }
  if (phase_ == BasicPhase::Track) {
    if (t - track_start_ <= config_.track_duration) {
      ControlOutput out = tracking_.query(t, state);
      out.phase = static_cast<int>(BasicPhase::Track);
      return out;
    }
    phase_ = BasicPhase::Hold;
  }
  ControlOutput out = hold_.query(t, state);
  out.phase = static_cast<int>(BasicPhase::Hold);
  return out;
}

// ---------------------------------------------------------------------------

BaselineSurrogate::BaselineSurrogate(const CompressorParams& params, double gamma_target,
                                     double gain, double gamma_max)
    : ControlLaw(params.gamma_min, gamma_max),
      gamma_target_(gamma_target),
      gain_(gain),
      target_(design_equilibrium(params, gamma_target)) {
  if (!(gain > 0.0)) throw InvalidArgument("surrogate gain must be > 0");
}

ControlOutput BaselineSurrogate::evaluate(double, const AnnulusState& state) {
  ControlOutput out;
  out.err_flow = state.avg_flow - target_.flow;
  out.err_pressure = state.pressure_rise - target_.pressure;
  out.command = gamma_target_ + gain_ * out.err_pressure;
  return out;
}

}  // namespace vmg
