#include "vmg/attractor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "vmg/trajectory_io.hpp"

namespace vmg {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

std::complex<double> fourier_coefficient(std::span<const double> f, std::size_t mode) {
  const std::size_t n = f.size();
  const double dx = 2.0 * kPi / static_cast<double>(n);
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double arg = dx * static_cast<double>((mode * j) % n);
    re += f[j] * std::cos(arg);
    im -= f[j] * std::sin(arg);
  }
  return {re / static_cast<double>(n), im / static_cast<double>(n)};
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Classification

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Design: return "Design";
    case Regime::Stall: return "Stall";
    case Regime::Surge: return "Surge";
    case Regime::Transient: return "Transient";
  }
  return "Transient";
}

double measure_drift(std::span<const double> before, std::span<const double> after) {
  const std::size_t n = before.size();
  if (n != after.size() || n < 8) throw InvalidArgument("measure_drift: grid mismatch");
  const double dx = 2.0 * kPi / static_cast<double>(n);

  // Coarse: after_i ~ before_{i-k}.
  std::size_t best_k = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += after[i] * before[(i + n - k) % n];
    if (c > best) {
      best = c;
      best_k = k;
    }
  }
  const double coarse = wrap_angle(dx * static_cast<double>(best_k));

  // Refine with the dominant mode: after_m = before_m exp(-i m s).
  std::size_t mode = 1;
  double amp = 0.0;
  const std::size_t n_modes = std::min<std::size_t>(8, n / 2 - 1);
  for (std::size_t m = 1; m <= n_modes; ++m) {
    const double a = std::abs(fourier_coefficient(before, m));
    if (a > amp * 1.5) {
      amp = a;
      mode = m;
    }
  }
  if (amp == 0.0) return 0.0;
  const auto b = fourier_coefficient(before, mode);
  const auto a = fourier_coefficient(after, mode);
  const double dm = static_cast<double>(mode);
  const double base = -std::arg(a / b) / dm;
  const double branch = 2.0 * kPi / dm;
  const double k = std::round((coarse - base) / branch);
  return wrap_angle(base + k * branch);
}

std::vector<double> wave_speeds(const Trajectory& traj) {
  std::vector<double> speeds;
  const double frame_speed = advection_speed(traj.config.frame) > 0.0 ? 0.0 : 0.5;
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const auto& a = traj.samples[k - 1].state;
    const auto& b = traj.samples[k].state;
    const double dt = b.time - a.time;
    if (dt <= 0.0) continue;
    speeds.push_back(measure_drift(a.phi, b.phi) / dt + frame_speed);
  }
  return speeds;
}

namespace {

// Mean spacing of upward crossings of the mid level; 0 with fewer than 3.
double detect_period(const Trajectory& tail, double level) {
  std::vector<double> crossings;
  for (std::size_t k = 1; k < tail.samples.size(); ++k) {
    const auto& a = tail.samples[k - 1].state;
    const auto& b = tail.samples[k].state;
    if (a.avg_flow < level && b.avg_flow >= level) {
      const double w = (level - a.avg_flow) / (b.avg_flow - a.avg_flow);
      crossings.push_back(a.time + w * (b.time - a.time));
    }
  }
  if (crossings.size() < 3) return 0.0;
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

double flow_range(const Trajectory& tail, std::size_t begin, std::size_t end) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = begin; k < end; ++k) {
    lo = std::min(lo, tail.samples[k].state.avg_flow);
    hi = std::max(hi, tail.samples[k].state.avg_flow);
  }
  return hi - lo;
}

}  // namespace

RegimeLabel classify_regime(const Trajectory& tail, const ClassifierOptions& options) {
  if (tail.samples.size() < 2 || tail.duration() < options.min_tail) {
    std::ostringstream os;
    os << "classify_regime needs a tail of at least " << options.min_tail << " time units";
    throw TailTooShort(os.str());
  }
  RegimeLabel label;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : tail.samples) {
    label.wave_amplitude = std::max(label.wave_amplitude, s.state.phi_sup());
    lo = std::min(lo, s.state.avg_flow);
    hi = std::max(hi, s.state.avg_flow);
  }
  label.flow_oscillation = hi - lo;

  const bool wavy = label.wave_amplitude >= options.eps_phi;
  const bool steady = label.flow_oscillation < options.eps_flow;

  if (!wavy && steady) {
    label.regime = Regime::Design;
    return label;
  }
  if (wavy && steady) {
    const auto speeds = wave_speeds(tail);
    if (!speeds.empty()) {
      const auto [smin, smax] = std::minmax_element(speeds.begin(), speeds.end());
      if (*smax - *smin <= options.speed_spread) {
        std::vector<double> sorted = speeds;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        label.wave_speed = sorted[sorted.size() / 2];
        label.regime = Regime::Stall;
        return label;
      }
    }
    label.regime = Regime::Transient;
    return label;
  }
  // Oscillating Phi: surge if periodic and not decaying.
  const double period = detect_period(tail, 0.5 * (lo + hi));
  const std::size_t half = tail.samples.size() / 2;
  const double first = flow_range(tail, 0, half);
  const double second = flow_range(tail, half, tail.samples.size());
  if (period > 0.0 && second >= 0.8 * first) {
    label.period = period;
    label.regime = Regime::Surge;
    return label;
  }
  label.regime = Regime::Transient;
  return label;
}

// ---------------------------------------------------------------------------
// Stall waves

double StallWave::amplitude() const noexcept {
  double m = 0.0;
  for (double v : profile) m = std::max(m, std::abs(v));
  return m;
}

AnnulusState StallWave::state() const { return AnnulusState{profile, flow, pressure, 0.0}; }

namespace {

double state_change(const AnnulusState& a, const AnnulusState& b) {
  double m = std::max(std::abs(a.avg_flow - b.avg_flow), std::abs(a.pressure_rise - b.pressure_rise));
  for (std::size_t i = 0; i < a.phi.size(); ++i) m = std::max(m, std::abs(a.phi[i] - b.phi[i]));
  return m;
}

AnnulusState advance(const CompressorParams& params, AnnulusState s, double gamma,
                     const SolverConfig& cfg, double duration) {
  const auto n = static_cast<std::size_t>(std::ceil(duration / cfg.dt - 1e-9));
  SolverConfig c = cfg;
  c.dt = duration / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) s = step(params, s, ThrottleSetting{gamma}, c);
  return s;
}

double rhs_sup(const StateDerivative& d) {
  double m = std::max(std::abs(d.dflow), std::abs(d.dpressure));
  for (double v : d.dphi) m = std::max(m, std::abs(v));
  return m;
}

// Gauss-Newton on the rotating-frame steady equations, with mean and phase
// conditions removing the two neutral directions. Returns false when the
// iteration does not reach a residual of 1e-12.
bool newton_polish(const CompressorParams& params, double gamma, AnnulusState& s) {
  const std::size_t n = s.grid_size();
  const double dx = s.grid_spacing();
  const double inv_dx2 = 1.0 / (dx * dx);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double scale = params.plenum_scale();

  std::vector<double> ref_grad(n);
  central_first_derivative(s.phi, dx, ref_grad);
  const std::vector<double> ref = s.phi;

  const auto rows = static_cast<Eigen::Index>(n + 4);
  const auto cols = static_cast<Eigen::Index>(n + 2);
  AnnulusState x = s;
  for (int it = 0; it < 30; ++it) {
    const StateDerivative d = rhs(params, x, ThrottleSetting{gamma}, Frame::Rotating);
    Eigen::VectorXd f(rows);
    double phase = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      f(static_cast<Eigen::Index>(i)) = d.dphi[i];
      phase += (x.phi[i] - ref[i]) * ref_grad[i];
    }
    f(cols - 2) = d.dflow;
    f(cols - 1) = d.dpressure;
    f(cols) = grid_mean(x.phi);
    f(cols + 1) = phase * inv_n;
    const double res = f.cwiseAbs().maxCoeff();
    if (!std::isfinite(res)) return false;
    if (res < 1e-13) {
      s = x;
      return true;
    }

    std::vector<double> slope(n);
    for (std::size_t i = 0; i < n; ++i) slope[i] = psi_c_prime(params, x.avg_flow + x.phi[i]);
    const double mean_slope = grid_mean(slope);

    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, cols);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const auto ip = static_cast<Eigen::Index>((i + 1) % n);
      const auto im = static_cast<Eigen::Index>((i + n - 1) % n);
      jac(r, ip) += params.nu * inv_dx2;
      jac(r, im) += params.nu * inv_dx2;
      jac(r, r) += -2.0 * params.nu * inv_dx2 + slope[i];
      for (std::size_t j = 0; j < n; ++j) jac(r, static_cast<Eigen::Index>(j)) -= inv_n * slope[j];
      jac(r, cols - 2) = slope[i] - mean_slope;
      jac(cols - 2, r) = inv_n * slope[i] / params.l_c;
      jac(cols, r) = inv_n;
      jac(cols + 1, r) = inv_n * ref_grad[i];
    }
    jac(cols - 2, cols - 2) = mean_slope / params.l_c;
    jac(cols - 2, cols - 1) = -1.0 / params.l_c;
    jac(cols - 1, cols - 2) = 1.0 / scale;
    jac(cols - 1, cols - 1) =
        -gamma * throttle_inverse_prime(params, x.pressure_rise) / scale;

    const Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(-f);
    for (std::size_t i = 0; i < n; ++i) x.phi[i] += delta(static_cast<Eigen::Index>(i));
    x.avg_flow += delta(cols - 2);
    x.pressure_rise += delta(cols - 1);
    if (delta.cwiseAbs().maxCoeff() > 1.0) return false;
  }
  return false;
}

}  // namespace

StallWave find_stall_wave(const CompressorParams& params, double gamma, double seed_amplitude,
                          const StallSearchOptions& options) {
  const Equilibrium eq = design_equilibrium(params, gamma);
  AnnulusState seed = AnnulusState::uniform(options.n_grid, eq.flow, eq.pressure);
  const double dx = seed.grid_spacing();
  for (std::size_t i = 0; i < options.n_grid; ++i) {
    seed.phi[i] = seed_amplitude * std::cos(dx * static_cast<double>(i));
  }
  return find_stall_wave(params, gamma, seed, options);
}

StallWave find_stall_wave(const CompressorParams& params, double gamma, const AnnulusState& seed,
                          const StallSearchOptions& options) {
  if (gamma < params.gamma_min) throw InvalidArgument("find_stall_wave: gamma below gamma_min");
  SolverConfig cfg = make_solver_config(params, seed.grid_size(), options.window, Frame::Rotating);
  if (options.dt > 0.0) cfg.dt = options.dt;
  cfg.validate(params);

  AnnulusState s = seed;
  s.time = 0.0;
  detail::remove_mean(s.phi);

  double t = 0.0;
  bool polished = false;
  while (true) {
    if (s.phi_sup() < options.decay_floor) {
      std::ostringstream os;
      os << "disturbance decayed at gamma = " << gamma << " (t = " << t << ")";
      throw NoStall(os.str(), s.phi_sup(), false);
    }
    if (t >= options.time_budget) {
      std::ostringstream os;
      os << "no stationary stall wave within " << options.time_budget
         << " time units at gamma = " << gamma;
      throw NoStall(os.str(), s.phi_sup(), true);
    }
    AnnulusState next = advance(params, s, gamma, cfg, options.window);
    t += options.window;
    const double change = state_change(s, next);
    if (change < options.tolerance) {
      StallWave wave;
      wave.profile = next.phi;
      wave.flow = next.avg_flow;
      wave.pressure = next.pressure_rise;
      wave.drift_speed = measure_drift(s.phi, next.phi) / options.window;
      wave.wave_speed = 0.5 + wave.drift_speed;
      wave.residual = rhs_sup(rhs(params, next, ThrottleSetting{gamma}, Frame::Rotating));
      wave.settle_time = t;
      return wave;
    }
    s = std::move(next);
    if (!polished && change < options.polish_switch && s.phi_sup() > 10.0 * options.decay_floor) {
      AnnulusState candidate = s;
      if (newton_polish(params, gamma, candidate)) {
        s = std::move(candidate);
        polished = true;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Surge

std::array<double, 2> surge_subsystem_step(const CompressorParams& params, double gamma,
                                           std::array<double, 2> y, double dt) {
  const double scale = params.plenum_scale();
  auto f = [&](double flow, double pressure) {
    return std::array<double, 2>{(psi_c(params, flow) - pressure) / params.l_c,
                                 (flow - gamma * throttle_inverse(params, pressure)) / scale};
  };
  const auto k1 = f(y[0], y[1]);
  const auto k2 = f(y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]);
  const auto k3 = f(y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]);
  const auto k4 = f(y[0] + dt * k3[0], y[1] + dt * k3[1]);
  return {y[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          y[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

SurgeCycle find_surge_cycle(const CompressorParams& params, double gamma,
                            const SurgeSearchOptions& options) {
  const Equilibrium eq = design_equilibrium(params, gamma);
  const double section = eq.flow;
  std::array<double, 2> y = options.seed ? std::array<double, 2>{options.seed->flow,
                                                                  options.seed->pressure}
                                         : std::array<double, 2>{0.0, eq.pressure};
  const double dt = options.dt;
  const auto max_steps = static_cast<std::size_t>(options.t_max / dt);

  struct Crossing {
    double t;
    double pressure;
    std::size_t step;
  };
  std::vector<Crossing> crossings;
  std::vector<std::array<double, 3>> history;  // since the previous crossing
  std::vector<std::array<double, 3>> previous_cycle;

  for (std::size_t k = 0; k < max_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (std::hypot(y[0] - eq.flow, y[1] - eq.pressure) < 1e-10) {
      throw NoCycle("orbit converged to the design equilibrium");
    }
    history.push_back({t, y[0], y[1]});
    const auto next = surge_subsystem_step(params, gamma, y, dt);
    if (!std::isfinite(next[0]) || !std::isfinite(next[1])) throw NoCycle("surge orbit blew up");

    if (y[0] < section && next[0] >= section) {
      // Secant on the RK4 sub-step length for the crossing time.
      double lo = 0.0, hi = dt, f_lo = y[0] - section, f_hi = next[0] - section;
      double tau = dt * f_lo / (f_lo - f_hi);
      for (int it = 0; it < 50; ++it) {
        const double f_tau = surge_subsystem_step(params, gamma, y, tau)[0] - section;
        if (std::abs(f_tau) < 1e-15) break;
        if (f_tau < 0.0) {
          lo = tau;
          f_lo = f_tau;
        } else {
          hi = tau;
          f_hi = f_tau;
        }
        const double secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        tau = (secant > lo && secant < hi) ? secant : 0.5 * (lo + hi);
        if (hi - lo < 1e-14) break;
      }
      const auto at = surge_subsystem_step(params, gamma, y, tau);
      crossings.push_back({t + tau, at[1], k});
      history.push_back({t + tau, at[0], at[1]});
      previous_cycle = std::move(history);
      history.clear();
      history.push_back({t + tau, at[0], at[1]});

      if (crossings.size() >= 4) {
        const std::size_t m = crossings.size();
        const double p1 = crossings[m - 1].t - crossings[m - 2].t;
        const double p2 = crossings[m - 2].t - crossings[m - 3].t;
        const double p3 = crossings[m - 3].t - crossings[m - 4].t;
        const bool periods_agree =
            std::abs(p1 - p2) < options.tolerance && std::abs(p2 - p3) < options.tolerance;
        const bool section_agrees =
            std::abs(crossings[m - 1].pressure - crossings[m - 2].pressure) < options.tolerance &&
            std::abs(crossings[m - 2].pressure - crossings[m - 3].pressure) < options.tolerance;
        if (periods_agree && section_agrees) {
          SurgeCycle cycle;
          cycle.period = p1;
          cycle.section_flow = section;
          // previous_cycle starts at the history reset of the prior crossing.
          cycle.samples = std::move(previous_cycle);
          cycle.flow_min = cycle.flow_max = cycle.samples.front()[1];
          cycle.pressure_min = cycle.pressure_max = cycle.samples.front()[2];
          for (const auto& s : cycle.samples) {
            cycle.flow_min = std::min(cycle.flow_min, s[1]);
            cycle.flow_max = std::max(cycle.flow_max, s[1]);
            cycle.pressure_min = std::min(cycle.pressure_min, s[2]);
            cycle.pressure_max = std::max(cycle.pressure_max, s[2]);
          }
          if (cycle.flow_max - cycle.flow_min < 1e-4) {
            throw NoCycle("oscillation decayed onto the design equilibrium");
          }
          return cycle;
        }
      }
    }
    y = next;
  }
  throw NoCycle("no periodic orbit detected within t_max");
}

// ---------------------------------------------------------------------------
// Linear stability

Eigen::Matrix2d jacobian_2d(const CompressorParams& params, const Equilibrium& eq, double gamma) {
  const double scale = params.plenum_scale();
  Eigen::Matrix2d j;
  j << psi_c_prime(params, eq.flow) / params.l_c, -1.0 / params.l_c, 1.0 / scale,
      -gamma * throttle_inverse_prime(params, eq.pressure) / scale;
  return j;
}

std::array<std::complex<double>, 2> eigenvalues_2d(const Eigen::Matrix2d& m) {
  const double tr = m.trace();
  const double det = m.determinant();
  const std::complex<double> disc = std::sqrt(std::complex<double>(0.25 * tr * tr - det, 0.0));
  return {0.5 * tr + disc, 0.5 * tr - disc};
}

double design_trace(const CompressorParams& params, double gamma) {
  return jacobian_2d(params, design_equilibrium(params, gamma), gamma).trace();
}

double hopf_point(const CompressorParams& params, double gamma_lo, double gamma_hi) {
  if (!(gamma_lo < gamma_hi)) throw InvalidArgument("hopf_point: empty gamma range");
  double lo = gamma_lo, hi = gamma_hi;
  double t_lo = design_trace(params, lo);
  const double t_hi = design_trace(params, hi);
  if ((t_lo > 0.0) == (t_hi > 0.0) || t_lo == 0.0 || t_hi == 0.0) {
    if (t_lo == 0.0) return lo;
    if (t_hi == 0.0) return hi;
    std::ostringstream os;
    os << "design-flow trace does not change sign on [" << gamma_lo << ", " << gamma_hi << "]";
    throw NoSignChange(os.str());
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    mid = 0.5 * (lo + hi);
    const double tm = design_trace(params, mid);
    if (tm == 0.0) break;
    if ((tm > 0.0) == (t_lo > 0.0)) {
      lo = mid;
      t_lo = tm;
    } else {
      hi = mid;
    }
  }
  const double root = std::abs(design_trace(params, lo)) < std::abs(design_trace(params, hi)) ? lo : hi;
  const Eigen::Matrix2d j = jacobian_2d(params, design_equilibrium(params, root), root);
  if (!(j.determinant() > 0.0)) {
    throw Error("NotHopf", "trace vanishes with det <= 0: saddle, not a Hopf point");
  }
  return root;
}

// ---------------------------------------------------------------------------
// Branch scan

bool BranchRow::design_stable(const CompressorParams& params) const {
  if (equilibria.empty()) return false;
  const auto& d = equilibria.back();
  return d.ev1.real() < 0.0 && d.ev2.real() < 0.0 &&
         psi_c_prime(params, d.eq.flow) - params.nu < 0.0;
}

unsigned scan_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("VMG_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BranchTable bifurcation_scan(const CompressorParams& params, std::span<const double> gamma_grid,
                             const ScanOptions& options) {
  if (!std::is_sorted(gamma_grid.begin(), gamma_grid.end())) {
    throw InvalidArgument("bifurcation_scan: gamma grid must be ascending");
  }
  BranchTable table;
  table.seed_amplitude = options.seed_amplitude;
  table.n_grid = options.stall.n_grid;
  table.rows.resize(gamma_grid.size());
  const unsigned threads = scan_threads(options.threads);

  // Equilibria, eigenvalues and surge are independent per row.
  parallel_for(gamma_grid.size(), threads, [&](std::size_t i) {
    BranchRow& row = table.rows[i];
    row.gamma = gamma_grid[i];
    try {
      for (const auto& eq : all_equilibria(params, row.gamma)) {
        const auto ev = eigenvalues_2d(jacobian_2d(params, eq, row.gamma));
        row.equilibria.push_back({eq, ev[0], ev[1]});
      }
    } catch (const Error& e) {
      row.annotation += std::string("equilibria: ") + e.what() + "; ";
    }
    try {
      const SurgeCycle cycle = find_surge_cycle(params, row.gamma, options.surge);
      row.surge_exists = true;
      row.period = cycle.period;
    } catch (const NoCycle&) {
      row.surge_exists = false;
    } catch (const Error& e) {
      row.annotation += std::string("surge: ") + e.what() + "; ";
    }
  });

  // Stall column in ascending gamma, seeded by the previous settled wave.
  std::optional<AnnulusState> seed;
  for (BranchRow& row : table.rows) {
    try {
      const StallWave wave =
          seed ? find_stall_wave(params, row.gamma, *seed, options.stall)
               : find_stall_wave(params, row.gamma, options.seed_amplitude, options.stall);
      row.stall_exists = true;
      row.stall_amp = wave.amplitude();
      row.stall_state = wave.state();
      seed = wave.state();
    } catch (const NoStall& e) {
      row.stall_exists = false;
      row.stall_amp = 0.0;
      if (e.budget_exhausted()) row.annotation += "stall: unsettled within budget; ";
      seed.reset();
    } catch (const Error& e) {
      row.annotation += std::string("stall: ") + e.what() + "; ";
      seed.reset();
    }
    if (!row.stall_exists && !table.gamma1_candidate) table.gamma1_candidate = row.gamma;
  }
  return table;
}

void write_branch_csv(std::ostream& os, const BranchTable& table) {
  os << "gamma,Phi0,Psi0,re_ev1,im_ev1,re_ev2,im_ev2,stall_exists,stall_amp,surge_exists,period\n";
  for (const auto& row : table.rows) {
    os << format_double(row.gamma) << ',';
    if (row.equilibria.empty()) {
      os << "nan,nan,nan,nan,nan,nan,";
    } else {
      const auto& d = row.equilibria.back();
      os << format_double(d.eq.flow) << ',' << format_double(d.eq.pressure) << ','
         << format_double(d.ev1.real()) << ',' << format_double(d.ev1.imag()) << ','
         << format_double(d.ev2.real()) << ',' << format_double(d.ev2.imag()) << ',';
    }
    os << (row.stall_exists ? 1 : 0) << ',' << format_double(row.stall_amp) << ','
       << (row.surge_exists ? 1 : 0) << ',' << format_double(row.period) << '\n';
  }
}

}  // namespace vmg
