#include "vmg/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "vmg/attractor.hpp"
#include "vmg/control.hpp"
#include "vmg/metrics.hpp"
#include "vmg/phase_plot.hpp"
#include "vmg/riccati.hpp"
#include "vmg/trajectory_io.hpp"

namespace vmg {

namespace {

using json = nlohmann::ordered_json;

struct Writer {
  const RunOptions& opts;
  ScenarioOutcome& outcome;

  std::filesystem::path path(const std::string& name) const { return opts.out_dir / name; }
  void note(const std::filesystem::path& p) { outcome.files.push_back(p); }
};

std::string with_suffix(const std::string& name, const std::string& suffix, bool apply) {
  if (!apply) return name;
  const std::filesystem::path p(name);
  return (p.parent_path() / (p.stem().string() + "_" + suffix + p.extension().string())).string();
}

json state_json(const AnnulusState& s) {
  return {{"t", s.time}, {"Phi", s.avg_flow}, {"Psi", s.pressure_rise}, {"phi_sup", s.phi_sup()}};
}

json eq_json(const Equilibrium& e) { return {{"Phi", e.flow}, {"Psi", e.pressure}}; }

json complex_json(std::complex<double> z) { return {z.real(), z.imag()}; }

SolverConfig resolved_solver(const ScenarioConfig& cfg) {
  SolverConfig s = cfg.solver;
  if (s.dt == 0.0) s.dt = cfl_check(cfg.model, s.n_grid, s.frame);
  s.validate(cfg.model);
  return s;
}

std::vector<double> cosine(std::size_t n, double amplitude, int mode) {
  std::vector<double> phi(n);
  const double dx = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    phi[j] = amplitude * std::cos(dx * static_cast<double>((static_cast<std::size_t>(mode) * j) % n));
  }
  return phi;
}

std::optional<std::string> regime_of(const Trajectory& traj, const ScenarioConfig& cfg,
                                     RegimeLabel* label) {
  try {
    *label = classify_regime(traj.tail(cfg.classify_tail), cfg.classifier);
    return std::string(to_string(label->regime));
  } catch (const TailTooShort&) {
    return std::nullopt;
  }
}

void write_trajectory_outputs(Writer& w, const Trajectory& traj, const std::string& trajectory,
                              const std::string& log, const std::string& plot) {
  write_trajectory_csv(w.path(trajectory), traj, w.opts.full_profile);
  w.note(w.path(trajectory));
  write_control_log_csv(w.path(log), traj);
  w.note(w.path(log));
  if (w.opts.plot) {
    emit_phase_plot(w.path(plot), traj);
    w.note(w.path(plot));
  }
}

double initial_gamma(ScenarioKind kind, const ScenarioConfig& cfg) {
  if (cfg.initial.gamma) return *cfg.initial.gamma;
  switch (kind) {
    case ScenarioKind::ControlStall: return 0.4;
    case ScenarioKind::ControlSurge: return 0.5;
    default: return cfg.controller.gamma;
  }
}

AnnulusState surge_start(const ScenarioConfig& cfg, double gamma, double amplitude, int mode) {
  const SurgeCycle cycle = find_surge_cycle(cfg.model, gamma);
  AnnulusState s = AnnulusState::uniform(cfg.solver.n_grid, cycle.samples.front()[1],
                                         cycle.samples.front()[2]);
  s.phi = cosine(cfg.solver.n_grid, amplitude, mode);
  return s;
}

// ---------------------------------------------------------------------------

json run_simulate(const ScenarioConfig& cfg, Writer& w) {
  if (cfg.controller.laws.size() != 1) throw ConfigError("simulate takes exactly one controller law");
  const SolverConfig solver = resolved_solver(cfg);
  const AnnulusState s0 = scenario_initial_state(ScenarioKind::Simulate, cfg);
  const std::string& law_name = cfg.controller.laws.front();
  const double g1 = law_name == "basic" ? resolve_gamma1(cfg) : 0.0;
  auto law = make_control_law(law_name, cfg, g1);
  const Trajectory traj = integrate(cfg.model, s0, *law, solver);
  write_trajectory_outputs(w, traj, cfg.output.trajectory, cfg.output.control_log, cfg.output.plot);

  RegimeLabel label;
  const auto regime = regime_of(traj, cfg, &label);
  if (w.opts.report) {
    *w.opts.report << "regime: " << regime.value_or("undetermined (tail too short)") << '\n';
  }
  json j;
  j["scenario"] = "simulate";
  j["controller"] = law->name();
  j["initial"] = state_json(s0);
  j["final"] = state_json(traj.samples.back().state);
  j["samples"] = traj.samples.size();
  j["dt"] = solver.dt;
  if (regime) {
    j["regime"] = *regime;
    j["wave_amplitude"] = label.wave_amplitude;
    j["flow_oscillation"] = label.flow_oscillation;
    j["wave_speed"] = label.wave_speed;
    j["period"] = label.period;
  } else {
    j["regime"] = nullptr;
  }
  j["max_abs_mean_phi"] = max_mean_drift(traj);
  return j;
}

json row_summary(const CompressorParams& params, const BranchRow& row) {
  json r;
  r["gamma"] = row.gamma;
  r["design"] = row.equilibria.empty() ? json(nullptr) : eq_json(row.equilibria.back().eq);
  r["design_stable"] = row.design_stable(params);
  r["stall_exists"] = row.stall_exists;
  r["stall_amp"] = row.stall_amp;
  r["surge_exists"] = row.surge_exists;
  r["period"] = row.period;
  if (!row.annotation.empty()) r["annotation"] = row.annotation;
  return r;
}

BranchTable scan_for(const ScenarioConfig& cfg) {
  ScanOptions opts;
  opts.seed_amplitude = cfg.scan.seed_amplitude;
  opts.threads = cfg.scan.threads;
  opts.stall.n_grid = cfg.solver.n_grid;
  opts.stall.time_budget = cfg.scan.stall_budget;
  const auto grid = cfg.scan.grid();
  return bifurcation_scan(cfg.model, grid, opts);
}

json run_bifurcate(const ScenarioConfig& cfg, Writer& w) {
  const BranchTable table = scan_for(cfg);
  {
    std::ofstream os(w.path(cfg.output.branch));
    if (!os) throw Error("IOError", "cannot open " + w.path(cfg.output.branch).string());
    write_branch_csv(os, table);
  }
  w.note(w.path(cfg.output.branch));

  json j;
  j["scenario"] = "bifurcate";
  j["rows"] = json::array();
  for (const auto& row : table.rows) j["rows"].push_back(row_summary(cfg.model, row));
  try {
    const double g1 = select_gamma1(cfg.model, table);
    j["gamma1"] = g1;
    if (w.opts.report) *w.opts.report << "gamma1 = " << g1 << '\n';
  } catch (const NoStallFreeGamma& e) {
    j["gamma1"] = nullptr;
    j["gamma1_error"] = e.what();
    if (w.opts.report) *w.opts.report << "gamma1: " << e.what() << '\n';
  }
  try {
    const double gh = hopf_point(cfg.model, cfg.scan.gamma_lo, cfg.scan.gamma_hi);
    j["gamma_hopf"] = gh;
    if (w.opts.report) *w.opts.report << "Hopf point gamma_H = " << gh << '\n';
  } catch (const Error& e) {
    j["gamma_hopf"] = nullptr;
  }
  return j;
}

json run_control(ScenarioKind kind, const ScenarioConfig& cfg, Writer& w) {
  const SolverConfig solver = resolved_solver(cfg);
  const AnnulusState s0 = scenario_initial_state(kind, cfg);
  const Equilibrium target = design_equilibrium(cfg.model, cfg.controller.gamma_target);
  bool needs_g1 = false;
  for (const auto& l : cfg.controller.laws) needs_g1 = needs_g1 || l == "basic";
  const double g1 = needs_g1 ? resolve_gamma1(cfg) : 0.0;

  json j;
  j["scenario"] = std::string(to_string(kind));
  j["initial_gamma"] = initial_gamma(kind, cfg);
  j["initial"] = state_json(s0);
  j["gamma_target"] = cfg.controller.gamma_target;
  j["target"] = eq_json(target);
  if (needs_g1) j["gamma1"] = g1;
  j["runs"] = json::array();

  const bool many = cfg.controller.laws.size() > 1;
  for (const auto& name : cfg.controller.laws) {
    auto law = make_control_law(name, cfg, g1);
    const Trajectory traj = integrate(cfg.model, s0, *law, solver);
    write_trajectory_outputs(w, traj, with_suffix(cfg.output.trajectory, name, many),
                             with_suffix(cfg.output.control_log, name, many),
                             with_suffix(cfg.output.plot, name, many));
    const auto rec = recovery_time(traj, target);
    const double min_psi = min_pressure(traj);
    const double area = excursion_area(traj);

    json r;
    r["controller"] = law->name();
    if (name == "surrogate") {
      r["label"] = "SURROGATE: saturated high-gain proportional baseline, not a backstepping law";
    }
    r["recovered"] = rec.has_value();
    r["recovery_time"] = rec ? json(*rec) : json(nullptr);
    r["min_Psi"] = min_psi;
    r["min_Psi_ratio"] = min_psi / s0.pressure_rise;
    r["excursion_area"] = area;
    r["final"] = state_json(traj.samples.back().state);
    r["max_abs_mean_phi"] = max_mean_drift(traj);
    if (const auto* basic = dynamic_cast<const BasicController*>(law.get())) {
      r["final_phase"] = static_cast<int>(basic->phase());
      r["track_start"] = basic->phase() >= BasicPhase::Track ? json(basic->track_start()) : json(nullptr);
    }
    if (w.opts.report) {
      *w.opts.report << law->name() << ": recovered=" << (rec ? "yes" : "no");
      if (rec) *w.opts.report << " at t=" << *rec;
      *w.opts.report << " min Psi=" << min_psi << " excursion area=" << area << '\n';
    }
    j["runs"].push_back(std::move(r));
  }
  return j;
}

json run_lqr_design(const ScenarioConfig& cfg, Writer& w) {
  const auto& c = cfg.controller;
  const LinearizedSystem sys = linearize_design(cfg.model, c.gamma_target);
  RiccatiWeights weights;
  weights.state = c.weight_state * Eigen::Matrix2d::Identity();
  weights.control = c.weight_control;
  weights.terminal = c.weight_terminal * Eigen::Matrix2d::Identity();
  RiccatiOptions ropts;
  ropts.step = c.riccati_step;
  const RiccatiSolution sol = solve_riccati(sys.a_mat, sys.b_vec, weights, c.horizon, ropts);
  const Eigen::Matrix2d q_inf = steady_state_riccati(sys.a_mat, sys.b_vec, weights);

  auto closed = [&](const Eigen::Matrix2d& q) {
    return Eigen::Matrix2d(sys.a_mat - sys.b_vec * (sys.b_vec.transpose() * q) / weights.control);
  };
  const auto ev_open = eigenvalues_2d(sys.a_mat);
  const auto ev_0 = eigenvalues_2d(closed(sol.q.front()));
  const auto ev_inf = eigenvalues_2d(closed(q_inf));

  {
    std::ofstream os(w.path(cfg.output.riccati));
    if (!os) throw Error("IOError", "cannot open " + w.path(cfg.output.riccati).string());
    os << "t,q11,q12,q22\n";
    const std::size_t stride = std::max<std::size_t>(1, sol.q.size() / 1000);
    for (std::size_t k = 0; k < sol.q.size(); k += stride) {
      const auto& q = sol.q[k];
      os << format_double(sol.times[k]) << ',' << format_double(q(0, 0)) << ','
         << format_double(q(0, 1)) << ',' << format_double(q(1, 1)) << '\n';
    }
    if ((sol.q.size() - 1) % stride != 0) {
      const auto& q = sol.q.back();
      os << format_double(sol.times.back()) << ',' << format_double(q(0, 0)) << ','
         << format_double(q(0, 1)) << ',' << format_double(q(1, 1)) << '\n';
    }
  }
  w.note(w.path(cfg.output.riccati));

  if (auto* out = w.opts.report) {
    *out << "design point gamma0 = " << sys.gamma0 << ": Phi0 = " << sys.eq.flow
         << ", Psi0 = " << sys.eq.pressure << '\n';
    *out << "A =\n" << sys.a_mat << "\nb = " << sys.b_vec.transpose() << '\n';
    *out << "Q(0) =\n" << sol.q.front() << "\nQ_inf =\n" << q_inf << '\n';
    *out << "open-loop eigenvalues: " << ev_open[0] << ' ' << ev_open[1] << '\n';
    *out << "closed-loop eigenvalues (t = 0): " << ev_0[0] << ' ' << ev_0[1] << '\n';
    *out << "closed-loop eigenvalues (infinite horizon): " << ev_inf[0] << ' ' << ev_inf[1] << '\n';
  }

  auto mat = [](const Eigen::Matrix2d& m) {
    return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
  };
  json j;
  j["scenario"] = "lqr-design";
  j["gamma0"] = sys.gamma0;
  j["design"] = eq_json(sys.eq);
  j["A"] = mat(sys.a_mat);
  j["b"] = {sys.b_vec[0], sys.b_vec[1]};
  j["decoupled_growth"] = sys.decoupled_growth;
  j["stall_uncontrollable"] = stall_uncontrollability_check(sys);
  j["horizon"] = c.horizon;
  j["riccati_residual"] = sol.max_residual;
  j["Q0"] = mat(sol.q.front());
  j["Q_inf"] = mat(q_inf);
  j["eig_open"] = {complex_json(ev_open[0]), complex_json(ev_open[1])};
  j["eig_closed_t0"] = {complex_json(ev_0[0]), complex_json(ev_0[1])};
  j["eig_closed_inf"] = {complex_json(ev_inf[0]), complex_json(ev_inf[1])};
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

AnnulusState scenario_initial_state(ScenarioKind kind, const ScenarioConfig& cfg) {
  const std::size_t n = cfg.solver.n_grid;
  const double gamma = initial_gamma(kind, cfg);

  if (kind == ScenarioKind::ControlStall) {
    StallSearchOptions opts;
    opts.n_grid = n;
    const StallWave wave = find_stall_wave(cfg.model, gamma, cfg.initial.amplitude.value_or(0.3), opts);
    AnnulusState s = wave.state();
    s.time = 0.0;
    return s;
  }
  if (kind == ScenarioKind::ControlSurge) {
    return surge_start(cfg, gamma, cfg.initial.amplitude.value_or(1e-3), cfg.initial.mode);
  }

  switch (cfg.initial.kind) {
    case InitialKind::Equilibrium: {
      const Equilibrium eq = design_equilibrium(cfg.model, gamma);
      return AnnulusState::uniform(n, eq.flow, eq.pressure);
    }
    case InitialKind::StallSeed: {
      const Equilibrium eq = design_equilibrium(cfg.model, gamma);
      AnnulusState s = AnnulusState::uniform(n, eq.flow, eq.pressure);
      s.phi = cosine(n, cfg.initial.amplitude.value_or(0.3), cfg.initial.mode);
      return s;
    }
    case InitialKind::SurgeSeed:
      return surge_start(cfg, gamma, cfg.initial.amplitude.value_or(1e-3), cfg.initial.mode);
    case InitialKind::Profile: {
      Trajectory t;
      try {
        t = read_trajectory_csv(std::filesystem::path(cfg.initial.file));
      } catch (const Error& e) {
        throw ConfigError(std::string("[initial] file: ") + e.what());
      }
      if (t.samples.empty()) throw ConfigError("[initial] profile file has no samples");
      AnnulusState s = t.samples.back().state;
      if (s.grid_size() != n) throw ConfigError("[initial] profile grid size differs from solver.n_grid");
      s.time = 0.0;
      return s;
    }
  }
  throw ConfigError("unhandled initial condition");
}

double resolve_gamma1(const ScenarioConfig& cfg) {
  if (cfg.controller.gamma1) return *cfg.controller.gamma1;
  const double g1 = select_gamma1(cfg.model, scan_for(cfg));
  if (!(cfg.controller.gamma_target < g1)) {
    throw ConfigError("controller.gamma_target must lie below the selected gamma1");
  }
  return g1;
}

std::unique_ptr<ControlLaw> make_control_law(const std::string& law, const ScenarioConfig& cfg,
                                             double gamma1) {
  const auto& c = cfg.controller;
  const auto& p = cfg.model;
  RiccatiWeights weights;
  weights.state = c.weight_state * Eigen::Matrix2d::Identity();
  weights.control = c.weight_control;
  weights.terminal = c.weight_terminal * Eigen::Matrix2d::Identity();
  RiccatiOptions ropts;
  ropts.step = c.riccati_step;

  if (law == "constant") return std::make_unique<ConstantThrottle>(c.gamma, p.gamma_min, c.gamma_max);
  if (law == "lqr") {
    LinearizedSystem sys = linearize_design(p, c.gamma_target);
    RiccatiSolution sol = solve_riccati(sys.a_mat, sys.b_vec, weights, c.horizon, ropts);
    return std::make_unique<LqrController>(std::move(sys), std::move(sol), p.gamma_min, c.gamma_max);
  }
  if (law == "basic") {
    BasicControlConfig bc;
    bc.r_u = c.r_u;
    bc.r_phi = c.r_phi;
    bc.track_duration = c.track_duration;
    bc.wait_warning = c.wait_warning;
    bc.gamma_max = c.gamma_max;
    bc.weights = weights;
    bc.riccati = ropts;
    return std::make_unique<BasicController>(p, gamma1, c.gamma_target, bc);
  }
  if (law == "surrogate") return std::make_unique<BaselineSurrogate>(p, c.gamma_target, c.gain, c.gamma_max);
  throw ConfigError("unknown controller law '" + law + "'");
}

ScenarioOutcome run_scenario(ScenarioKind kind, const ScenarioConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  std::filesystem::create_directories(opts.out_dir);
  ScenarioOutcome outcome;
  Writer w{opts, outcome};

  json summary;
  switch (kind) {
    case ScenarioKind::Simulate: summary = run_simulate(cfg, w); break;
    case ScenarioKind::Bifurcate: summary = run_bifurcate(cfg, w); break;
    case ScenarioKind::ControlStall:
    case ScenarioKind::ControlSurge: summary = run_control(kind, cfg, w); break;
    case ScenarioKind::LqrDesign: summary = run_lqr_design(cfg, w); break;
  }
  outcome.summary_json = summary.dump(2) + "\n";
  std::ofstream os(w.path(cfg.output.summary));
  if (!os) throw Error("IOError", "cannot open " + w.path(cfg.output.summary).string());
  os << outcome.summary_json;
  w.note(w.path(cfg.output.summary));
  return outcome;
}

std::string error_record(const std::string& kind, const std::string& message, int exit_code) {
  json j;
  j["error"] = kind;
  j["message"] = message;
  j["exit_code"] = exit_code;
  return j.dump() + "\n";
}

}  // namespace vmg
