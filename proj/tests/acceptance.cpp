// Acceptance checks for the compressor lab. One PASS/FAIL line per criterion;
// exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "vmg/attractor.hpp"
#include "vmg/control.hpp"
#include "vmg/metrics.hpp"
#include "vmg/riccati.hpp"
#include "vmg/solver.hpp"
#include "vmg/trajectory_io.hpp"

using namespace vmg;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const CompressorParams kParams{};
constexpr std::size_t kN = 128;
constexpr double kStallGamma = 0.4;
constexpr double kSurgeGamma = 0.5;
constexpr double kTarget = 0.62;
constexpr double kHorizon = 1500.0;
constexpr double kPressureFloor = 0.25;

// Everything criterion 9 has to look at.
std::vector<const Trajectory*> g_runs;
std::vector<Trajectory> g_store;

const Trajectory& keep(Trajectory t) {
  g_store.reserve(64);
  g_store.push_back(std::move(t));
  g_runs.push_back(&g_store.back());
  return g_store.back();
}

AnnulusState cosine_seed(double gamma, std::size_t n, double a, int m) {
  const Equilibrium eq = design_equilibrium(kParams, gamma);
  AnnulusState s = AnnulusState::uniform(n, eq.flow, eq.pressure);
  for (std::size_t j = 0; j < n; ++j) {
    s.phi[j] = a * std::cos(2 * std::numbers::pi * static_cast<double>((m * j) % n) / static_cast<double>(n));
  }
  return s;
}

// Shared fixtures, built on first use.
const StallWave& settled_stall() {
  static const StallWave w = find_stall_wave(kParams, kStallGamma, 0.3);
  return w;
}

double gamma1() {
  static const double g = [] {
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) grid.push_back(0.40 + 0.01 * k);
    return select_gamma1(kParams, bifurcation_scan(kParams, grid));
  }();
  return g;
}

AnnulusState stall_start() {
  AnnulusState s = settled_stall().state();
  s.time = 0;
  return s;
}

SolverConfig control_config() { return make_solver_config(kParams, kN, kHorizon, Frame::Lab, Scheme::LaxWendroff, 10); }

// ---------------------------------------------------------------------------

Verdict stall_wave_speed() {
  const StallWave& w = settled_stall();
  ConstantThrottle law(kStallGamma, kParams.gamma_min);
  const Trajectory& lab = keep(integrate(kParams, w.state(), law,
                                         make_solver_config(kParams, kN, 20.0, Frame::Lab, Scheme::LaxWendroff, 50)));
  const auto speeds = wave_speeds(lab);
  double mean = 0;
  for (double s : speeds) mean += s;
  mean /= static_cast<double>(speeds.size());
  const bool ok = std::abs(w.wave_speed - 0.5) <= 0.01 && std::abs(mean - 0.5) <= 0.01;
  return {ok, fmt("settled profile speed %.6f, lab-frame re-measured %.6f (target 0.5 +- 2%%)",
                  w.wave_speed, mean)};
}

Verdict mode_growth() {
  const Equilibrium eq = design_equilibrium(kParams, kTarget);
  const double slope = psi_c_prime(kParams, eq.flow);
  auto measured = [&](std::size_t n_grid, int m) {
    ConstantThrottle law(kTarget, kParams.gamma_min);
    const double exact = slope - kParams.nu * m * m;
    const double t_end = std::min(10.0, 5.0 / std::abs(exact));
    const Trajectory& t = keep(integrate(kParams, cosine_seed(kTarget, n_grid, 1e-6, m), law,
                                         make_solver_config(kParams, n_grid, t_end, Frame::Lab, Scheme::LaxWendroff, 5)));
    // least-squares slope of log amplitude
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : t.samples) {
      const double x = s.state.time;
      const double y = std::log(fourier_mode_amplitudes(s.state, m)[m - 1].second);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double k = static_cast<double>(t.samples.size());
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
  };
  bool ok = true;
  std::string d;
  for (int m = 1; m <= 4; ++m) {
    const double exact = slope - kParams.nu * m * m;
    const double e128 = std::abs(measured(128, m) - exact) / std::abs(exact);
    const double e256 = std::abs(measured(256, m) - exact) / std::abs(exact);
    const double ratio = e128 / e256;
    ok = ok && e128 <= 1e-2 && ratio >= 3.0 && ratio <= 5.0;
    d += fmt("n=%d rel.err %.2e (N=128) %.2e (N=256) ratio %.2f; ", m, e128, e256, ratio);
  }
  return {ok, d};
}

Verdict uncontrollability() {
  const LinearizedSystem sys = linearize_design(kParams, kTarget);
  const std::vector<double> zero(kN, 0.0);
  std::vector<std::function<double(double)>> inputs{
      [](double) { return 0.0; },
      [](double t) { return t < 0.1 ? 10.0 : 0.0; },
      [](double t) { return 0.5 * std::sin(0.9 * t) + 0.2 * std::cos(3.1 * t); },
      [](double t) { return t > 5 ? -1.0 : 1.0; },
  };
  double worst = 0;
  for (const auto& u : inputs) {
    const auto run = simulate_linearized(kParams, sys, zero, Eigen::Vector2d(0.02, -0.01), u, 0.005, 30.0);
    worst = std::max(worst, run.max_phi_mode);
  }
  // with a disturbance present, its evolution is the same for every input
  const AnnulusState seed = cosine_seed(kTarget, kN, 1e-3, 3);
  const auto base = simulate_linearized(kParams, sys, seed.phi, Eigen::Vector2d::Zero(), inputs[0], 0.005, 30.0);
  double diff = 0;
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    const auto run = simulate_linearized(kParams, sys, seed.phi, Eigen::Vector2d::Zero(), inputs[i], 0.005, 30.0);
    for (std::size_t j = 0; j < kN; ++j) diff = std::max(diff, std::abs(run.phi[j] - base.phi[j]));
  }
  const bool ok = stall_uncontrollability_check(sys) && worst <= 1e-13 && diff <= 1e-13;
  return {ok, fmt("max phi mode amplitude under throttle input %.1e, input-induced difference %.1e",
                  worst, diff)};
}

Verdict hopf() {
  const double gh = hopf_point(kParams, 0.5, 0.7);
  const Eigen::Matrix2d j = jacobian_2d(kParams, design_equilibrium(kParams, gh), gh);
  auto ode_run = [&](double gamma) {
    // phi = 0 is invariant, so this integrates the (Phi, Psi) subsystem
    const Equilibrium eq = design_equilibrium(kParams, gamma);
    ConstantThrottle law(gamma, kParams.gamma_min);
    const Trajectory& t = keep(integrate(kParams, AnnulusState::uniform(16, eq.flow + 1e-3, eq.pressure), law,
                                         make_solver_config(kParams, 16, 4000.0)));
    return classify_regime(t.tail(1200.0));
  };
  const RegimeLabel below = ode_run(kSurgeGamma);
  const RegimeLabel above = ode_run(gh + 0.02);
  const bool ok = std::abs(j.trace()) <= 1e-9 && j.determinant() > 0 && below.regime == Regime::Surge &&
                  above.regime == Regime::Design;
  return {ok, fmt("gamma_H = %.10f, trace %.1e, det %.3e; gamma %.2f -> %s (period %.1f), gamma %.4f -> %s",
                  gh, j.trace(), j.determinant(), kSurgeGamma, std::string(to_string(below.regime)).c_str(),
                  below.period, gh + 0.02, std::string(to_string(above.regime)).c_str())};
}

Verdict riccati() {
  const LinearizedSystem sys = linearize_design(kParams, kTarget);
  RiccatiWeights w;
  const RiccatiSolution design = solve_riccati(sys.a_mat, sys.b_vec, w, 200.0);
  TrackingLqr track(kParams, trajectory_xi1(kParams, gamma1(), kTarget, 50.0), w, kParams.gamma_min);

  RiccatiWeights scalar;
  scalar.state.setZero();
  scalar.control = 0.7;
  scalar.terminal << 2.0, 0, 0, 0;
  const RiccatiSolution s = solve_riccati(Eigen::Matrix2d::Zero(), Eigen::Vector2d(1, 0), scalar, 5.0);
  double closed_form = 0;
  for (std::size_t k = 0; k < s.q.size(); ++k) {
    const double exact = 2.0 * 0.7 / (0.7 + 2.0 * (5.0 - s.times[k]));
    closed_form = std::max(closed_form, std::abs(s.q[k](0, 0) - exact));
  }

  const Eigen::Matrix2d q_inf = steady_state_riccati(sys.a_mat, sys.b_vec, w);
  Eigen::EigenSolver<Eigen::Matrix2d> es(sys.a_mat - sys.b_vec * sys.b_vec.transpose() * q_inf / w.control);
  const double re = std::max(es.eigenvalues()[0].real(), es.eigenvalues()[1].real());
  const bool ok = design.max_residual <= 1e-6 && track.riccati().max_residual <= 1e-6 && closed_form <= 1e-8 &&
                  re < 0;
  return {ok, fmt("residual %.1e (design), %.1e (tracking); scalar closed form error %.1e; "
                  "infinite-horizon closed-loop max Re %.3e",
                  design.max_residual, track.riccati().max_residual, closed_form, re)};
}

struct ControlRun {
  double recovery = -1;
  double min_psi = 0;
  double psi0 = 0;
  double area = 0;
  std::string csv;
};

ControlRun run_control(ControlLaw& law, const AnnulusState& s0, const Equilibrium& target) {
  const Trajectory& t = keep(integrate(kParams, s0, law, control_config()));
  ControlRun r;
  if (const auto rec = recovery_time(t, target)) r.recovery = *rec;
  r.min_psi = min_pressure(t);
  r.psi0 = s0.pressure_rise;
  r.area = excursion_area(t);
  std::ostringstream os;
  write_trajectory_csv(os, t, true);
  write_control_log_csv(os, t);
  r.csv = os.str();
  return r;
}

ControlRun& basic_stall_run() {
  static ControlRun r = [] {
    BasicController law(kParams, gamma1(), kTarget);
    return run_control(law, stall_start(), law.target());
  }();
  return r;
}

Verdict basic_stall() {
  const ControlRun& r = basic_stall_run();
  const bool ok = r.recovery >= 0 && r.min_psi > 0 && r.min_psi >= kPressureFloor * r.psi0;
  return {ok, fmt("gamma1 = %.4f; recovered at t = %.1f; min Psi = %.4f = %.1f%% of initial %.4f",
                  gamma1(), r.recovery, r.min_psi, 100 * r.min_psi / r.psi0, r.psi0)};
}

Verdict basic_surge() {
  const SurgeCycle cycle = find_surge_cycle(kParams, kSurgeGamma);
  AnnulusState s0 = cosine_seed(kSurgeGamma, kN, 1e-3, 1);
  s0.avg_flow = cycle.samples.front()[1];
  s0.pressure_rise = cycle.samples.front()[2];
  BasicController law(kParams, gamma1(), kTarget);
  const ControlRun r = run_control(law, s0, law.target());
  return {r.recovery >= 0,
          fmt("surge period %.1f at gamma %.2f; recovered at t = %.1f of %.0f; min Psi %.4f", cycle.period,
              kSurgeGamma, r.recovery, kHorizon, r.min_psi)};
}

Verdict contrast() {
  BaselineSurrogate law(kParams, kTarget, 5.0);
  const ControlRun s = run_control(law, stall_start(), law.target());
  const ControlRun& b = basic_stall_run();
  return {s.area > b.area, fmt("hull area SURROGATE (gain 5) %.4f vs basic %.4f", s.area, b.area)};
}

Verdict cross_scheme() {
  const AnnulusState s0 = cosine_seed(kStallGamma, kN, 0.3, 1);
  SolverConfig c = make_solver_config(kParams, kN, 10.0);
  c.dt *= 0.5;
  ConstantThrottle a(kStallGamma, kParams.gamma_min), b(kStallGamma, kParams.gamma_min);
  const Trajectory& lw = keep(integrate(kParams, s0, a, c));
  c.scheme = Scheme::MethodOfLinesRK4;
  const Trajectory& mol = keep(integrate(kParams, s0, b, c));
  double d = 0;
  for (std::size_t k = 0; k < lw.samples.size() && k < mol.samples.size(); ++k) {
    for (std::size_t j = 0; j < kN; ++j) {
      d = std::max(d, std::abs(lw.samples[k].state.phi[j] - mol.samples[k].state.phi[j]));
    }
  }
  const bool ok = lw.samples.size() == mol.samples.size() && d <= 1e-4;
  return {ok, fmt("max |phi_LW - phi_MOL| over t in [0, 10] = %.2e (dt = %.3e)", d, c.dt)};
}

Verdict conservation_determinism() {
  double worst = 0;
  std::size_t samples = 0;
  for (const Trajectory* t : g_runs) {
    worst = std::max(worst, max_mean_drift(*t));
    samples += t->samples.size();
  }
  BasicController law(kParams, gamma1(), kTarget);
  const ControlRun again = run_control(law, stall_start(), law.target());
  const bool same = again.csv == basic_stall_run().csv;
  const StallWave w2 = find_stall_wave(kParams, kStallGamma, 0.3);
  const bool same_wave = w2.profile == settled_stall().profile;
  return {worst <= 1e-10 && same && same_wave,
          fmt("max |mean phi| = %.1e over %zu samples in %zu runs; repeated control run %s, "
              "repeated stall search %s",
              worst, samples, g_runs.size(), same ? "byte-identical" : "DIFFERS",
              same_wave ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* name;
    Verdict (*fn)();
  };
  const Item items[] = {
      {1, "stall wave speed", stall_wave_speed},
      {2, "linearized mode growth", mode_growth},
      {3, "stall uncontrollability", uncontrollability},
      {4, "Hopf detection", hopf},
      {5, "Riccati correctness", riccati},
      {6, "basic control, stall recovery", basic_stall},
      {7, "basic control, surge recovery", basic_surge},
      {8, "controller contrast", contrast},
      {10, "cross-scheme oracle", cross_scheme},
      {9, "conservation and determinism", conservation_determinism},
  };
  int failures = 0;
  for (const auto& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = it.fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d  %-32s %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", it.id, it.name,
                v.detail.c_str(), secs);
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  return failures;
}
