#include "vmg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

namespace vmg {

// ---------------------------------------------------------------------------
// Control law base

ControlLaw::ControlLaw(double gamma_min, double gamma_max)
    : gamma_min_(gamma_min), gamma_max_(gamma_max) {
  if (!(gamma_min > 0.0) || !(gamma_max >= gamma_min)) {
    throw InvalidArgument("control law needs 0 < gamma_min <= gamma_max");
  }
}

double ControlLaw::saturate(double gamma) const noexcept {
  if (std::isnan(gamma)) return gamma_min_;
  return std::clamp(gamma, gamma_min_, gamma_max_);
}

ControlOutput ControlLaw::query(double t, const AnnulusState& state) {
  ControlOutput out = evaluate(t, state);
  out.gamma = saturate(out.command);
  return out;
}

ConstantThrottle::ConstantThrottle(double gamma, double gamma_min, double gamma_max)
    : ControlLaw(gamma_min, gamma_max), gamma_(gamma) {}

ControlOutput ConstantThrottle::evaluate(double, const AnnulusState&) {
  ControlOutput out;
  out.command = gamma_;
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

void SolverConfig::validate(const CompressorParams& params) const {
  if (n_grid < 8) throw ConfigError("solver.n_grid must be >= 8");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("solver.t_end must be > 0");
  if (record_every < 1) throw ConfigError("solver.record_every must be >= 1");
  const double limit = cfl_check(params, n_grid, frame);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "solver.dt = " << dt << " outside (0, " << limit << "] for n_grid = " << n_grid;
    throw ConfigError(os.str());
  }
}

double cfl_check(const CompressorParams& params, std::size_t n_grid, Frame frame) {
  if (n_grid < 8) throw InvalidArgument("cfl_check: n_grid must be >= 8");
  constexpr double kSafety = 0.8;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double dx = 2.0 * std::numbers::pi / static_cast<double>(n_grid);
  const double c = advection_speed(frame);
  const double advective = c > 0.0 ? dx / c : kInf;
  const double diffusive = params.nu > 0.0 ? dx * dx / (2.0 * params.nu) : kInf;
  // max |psi_c'| over [-W, 3W] is 3 * (3H / 2W).
  const double max_slope = 4.5 * params.cubic.h / params.cubic.w;
  const double reaction = 0.5 / max_slope;
  return std::min(kSafety * std::min(advective, diffusive), reaction);
}

SolverConfig make_solver_config(const CompressorParams& params, std::size_t n_grid, double t_end,
                                Frame frame, Scheme scheme, std::size_t record_every) {
  SolverConfig cfg;
  cfg.n_grid = n_grid;
  cfg.frame = frame;
  cfg.scheme = scheme;
  cfg.t_end = t_end;
  cfg.record_every = record_every;
  cfg.dt = cfl_check(params, n_grid, frame);
  return cfg;
}

// ---------------------------------------------------------------------------
// Lax-Wendroff kernels

namespace detail {

HalfStep lax_wendroff_predict(std::span<const double> phi, std::span<const double> reaction,
                              double dt, double dx, double speed, double nu) {
  const std::size_t n = phi.size();
  std::vector<double> d1(n), d2(n);
  central_first_derivative(phi, dx, d1);
  central_second_derivative(phi, dx, d2);

  HalfStep half;
  half.node.resize(n);
  half.face.resize(n);
  const double courant_half = 0.5 * speed * dt / dx;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    half.node[i] = phi[i] + 0.5 * dt * (-speed * d1[i] + nu * d2[i] + reaction[i]);
    half.face[i] = 0.5 * (phi[i] + phi[ip]) - courant_half * (phi[ip] - phi[i]) +
                   0.25 * dt * (nu * (d2[i] + d2[ip]) + reaction[i] + reaction[ip]);
  }
  return half;
}

void lax_wendroff_correct(std::span<double> phi, const HalfStep& half,
                          std::span<const double> reaction_half, double dt, double dx,
                          double speed, double nu) {
  const std::size_t n = phi.size();
  std::vector<double> d2(n);
  central_second_derivative(half.node, dx, d2);
  const double courant = speed * dt / dx;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n;
    phi[i] += -courant * (half.face[i] - half.face[im]) + dt * (nu * d2[i] + reaction_half[i]);
  }
}

void remove_mean(std::span<double> phi) noexcept {
  const double m = grid_mean(phi);
  for (double& v : phi) v -= m;
}

}  // namespace detail

namespace {

constexpr double kBlowUp = 1e8;

bool bounded(const AnnulusState& s) {
  if (!s.finite()) return false;
  if (std::abs(s.avg_flow) > kBlowUp || std::abs(s.pressure_rise) > kBlowUp) return false;
  return s.phi_sup() <= kBlowUp;
}

// psi_c(flow + phi_i) - mean, returning the mean.
double reaction_into(const CompressorParams& params, double flow, std::span<const double> phi,
                     std::vector<double>& out) {
  out.resize(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = psi_c(params, flow + phi[i]);
  const double m = grid_mean(out);
  for (double& v : out) v -= m;
  return m;
}

AnnulusState lax_wendroff_step(const CompressorParams& params, const AnnulusState& s,
                               double gamma, double dt, Frame frame) {
  const std::size_t n = s.grid_size();
  const double dx = s.grid_spacing();
  const double c = advection_speed(frame);
  const double scale = params.plenum_scale();

  std::vector<double> reaction;
  const double mean_n = reaction_into(params, s.avg_flow, s.phi, reaction);
  const detail::HalfStep half =
      detail::lax_wendroff_predict(s.phi, reaction, dt, dx, c, params.nu);

  std::vector<double> phi_end(n);
  for (std::size_t i = 0; i < n; ++i) phi_end[i] = 2.0 * half.node[i] - s.phi[i];

  auto scalar_rhs = [&](double flow, double pressure, double mean_psi) {
    return std::pair{(mean_psi - pressure) / params.l_c,
                     (flow - gamma * throttle_inverse(params, pressure)) / scale};
  };

  // RK4 for (Phi, Psi) with mean psi_c sampled at phi^n, phi^{n+1/2}, phi^{n+1/2}
  // and the extrapolated phi^{n+1}.
  const double f0 = s.avg_flow, p0 = s.pressure_rise;
  const auto [k1f, k1p] = scalar_rhs(f0, p0, mean_n);
  const double f2 = f0 + 0.5 * dt * k1f, p2 = p0 + 0.5 * dt * k1p;
  const auto [k2f, k2p] = scalar_rhs(f2, p2, mean_characteristic(params, f2, half.node));
  const double f3 = f0 + 0.5 * dt * k2f, p3 = p0 + 0.5 * dt * k2p;
  const auto [k3f, k3p] = scalar_rhs(f3, p3, mean_characteristic(params, f3, half.node));
  const double f4 = f0 + dt * k3f, p4 = p0 + dt * k3p;
  const auto [k4f, k4p] = scalar_rhs(f4, p4, mean_characteristic(params, f4, phi_end));

  AnnulusState next;
  next.avg_flow = f0 + dt / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
  next.pressure_rise = p0 + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  next.time = s.time + dt;

  const double flow_half = 0.5 * (f0 + next.avg_flow);
  std::vector<double> reaction_half;
  reaction_into(params, flow_half, half.node, reaction_half);

  next.phi = s.phi;
  detail::lax_wendroff_correct(next.phi, half, reaction_half, dt, dx, c, params.nu);
  detail::remove_mean(next.phi);
  return next;
}

AnnulusState axpy(const AnnulusState& s, double a, const StateDerivative& d) {
  AnnulusState out = s;
  for (std::size_t i = 0; i < out.phi.size(); ++i) out.phi[i] += a * d.dphi[i];
  out.avg_flow += a * d.dflow;
  out.pressure_rise += a * d.dpressure;
  return out;
}

AnnulusState rk4_step(const CompressorParams& params, const AnnulusState& s, double gamma,
                      double dt, Frame frame) {
  const ThrottleSetting g{gamma};
  const StateDerivative k1 = rhs(params, s, g, frame);
  const StateDerivative k2 = rhs(params, axpy(s, 0.5 * dt, k1), g, frame);
  const StateDerivative k3 = rhs(params, axpy(s, 0.5 * dt, k2), g, frame);
  const StateDerivative k4 = rhs(params, axpy(s, dt, k3), g, frame);

  AnnulusState next = s;
  for (std::size_t i = 0; i < next.phi.size(); ++i) {
    next.phi[i] += dt / 6.0 * (k1.dphi[i] + 2.0 * k2.dphi[i] + 2.0 * k3.dphi[i] + k4.dphi[i]);
  }
  next.avg_flow += dt / 6.0 * (k1.dflow + 2.0 * k2.dflow + 2.0 * k3.dflow + k4.dflow);
  next.pressure_rise +=
      dt / 6.0 * (k1.dpressure + 2.0 * k2.dpressure + 2.0 * k3.dpressure + k4.dpressure);
  next.time = s.time + dt;
  detail::remove_mean(next.phi);
  return next;
}

AnnulusState step_with(const CompressorParams& params, const AnnulusState& state, double gamma,
                       double dt, const SolverConfig& config) {
  if (!bounded(state)) throw NonFiniteError("step: state is not finite", state);
  AnnulusState next = config.scheme == Scheme::LaxWendroff
                          ? lax_wendroff_step(params, state, gamma, dt, config.frame)
                          : rk4_step(params, state, gamma, dt, config.frame);
  if (!bounded(next)) {
    std::ostringstream os;
    os << "solution left the finite range at t = " << next.time;
    throw NonFiniteError(os.str(), state);
  }
  return next;
}

}  // namespace

AnnulusState step(const CompressorParams& params, const AnnulusState& state, ThrottleSetting gamma,
                  const SolverConfig& config) {
  if (state.grid_size() != config.n_grid) {
    throw InvalidArgument("step: state grid does not match solver.n_grid");
  }
  return step_with(params, state, gamma.gamma, config.dt, config);
}

// ---------------------------------------------------------------------------
// Integration

double Trajectory::duration() const noexcept {
  if (samples.size() < 2) return 0.0;
  return samples.back().state.time - samples.front().state.time;
}

Trajectory Trajectory::tail(double length) const {
  Trajectory out;
  out.config = config;
  out.params = params;
  out.controller = controller;
  if (samples.empty()) return out;
  const double t0 = samples.back().state.time - length;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].state.time >= t0 - 1e-12) {
      out.samples.push_back(samples[i]);
      if (i < control_log.size()) out.control_log.push_back(control_log[i]);
    }
  }
  return out;
}

Trajectory integrate(const CompressorParams& params, const AnnulusState& state0, ControlLaw& law,
                     const SolverConfig& config) {
  params.validate();
  config.validate(params);
  state0.validate();
  if (state0.grid_size() != config.n_grid) {
    throw InvalidArgument("integrate: initial state grid does not match solver.n_grid");
  }

  const auto n_steps = static_cast<std::size_t>(std::ceil(config.t_end / config.dt - 1e-9));
  const double dt = config.t_end / static_cast<double>(n_steps);
  const double t0 = state0.time;

  Trajectory traj;
  traj.config = config;
  traj.params = params;
  traj.controller = law.name();
  traj.samples.reserve(n_steps / config.record_every + 2);
  traj.control_log.reserve(n_steps / config.record_every + 2);

  auto record = [&](const AnnulusState& s, const ControlOutput& out, double applied) {
    traj.samples.push_back({s, applied});
    traj.control_log.push_back(
        {s.time, out.phase, out.command, applied, out.err_flow, out.err_pressure});
  };

  bool warned = false;
  AnnulusState state = state0;
  ControlOutput out{};
  double applied = 0.0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    out = law.query(state.time, state);
    applied = out.gamma;
    if (!(applied >= params.gamma_min)) {
      if (!warned) {
        std::clog << "warning: controller '" << law.name() << "' returned gamma = " << applied
                  << " below gamma_min; clamped\n";
        warned = true;
      }
      applied = params.gamma_min;
    }
    if (k % config.record_every == 0) record(state, out, applied);
    try {
      AnnulusState next = step_with(params, state, applied, dt, config);
      next.time = t0 + static_cast<double>(k + 1) * dt;
      state = std::move(next);
    } catch (const NonFiniteError& e) {
      throw NonFiniteError(e.what(), e.last_valid(), std::move(traj));
    }
  }
  record(state, out, applied);
  return traj;
}

std::vector<std::pair<int, double>> fourier_mode_amplitudes(const AnnulusState& state,
                                                            std::size_t n_max) {
  const std::size_t n = state.grid_size();
  if (2 * n_max >= n) throw InvalidArgument("fourier_mode_amplitudes: n_max must be < N/2");
  std::vector<std::pair<int, double>> out;
  out.reserve(n_max);
  const double dx = state.grid_spacing();
  for (std::size_t m = 1; m <= n_max; ++m) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double arg = dx * static_cast<double>((m * j) % n);
      re += state.phi[j] * std::cos(arg);
      im -= state.phi[j] * std::sin(arg);
    }
    out.emplace_back(static_cast<int>(m), 2.0 * std::hypot(re, im) / static_cast<double>(n));
  }
  return out;
}

}  // namespace vmg
