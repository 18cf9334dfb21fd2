#pragma once

// Scenario files: INI-style `key = value` lines grouped in [sections].
// Parsing is strict; an unknown section or key, an unparsable value or an
// out-of-range setting raises ConfigError before anything is computed.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vmg/attractor.hpp"
#include "vmg/model.hpp"
#include "vmg/solver.hpp"

namespace vmg {

enum class ScenarioKind { Simulate, Bifurcate, ControlStall, ControlSurge, LqrDesign };

std::string_view to_string(ScenarioKind kind) noexcept;
ScenarioKind parse_scenario_kind(std::string_view name);

enum class InitialKind { Equilibrium, StallSeed, SurgeSeed, Profile };

struct ControllerSpec {
  /// constant | lqr | basic | surrogate; control scenarios accept several.
  std::vector<std::string> laws{"basic"};
  double gamma = 0.62;                 ///< constant law, and simulate's plant
  std::optional<double> gamma1;        ///< unset: bifurcation scan + select_gamma1
  double gamma_target = 0.62;
  double gain = 5.0;                   ///< surrogate
  double r_u = 0.05;
  double r_phi = 0.02;
  double track_duration = 50.0;
  double wait_warning = 500.0;
  double weight_state = 1.0;           ///< S = weight_state I
  double weight_control = 10.0;        ///< R
  double weight_terminal = 1.0;        ///< S_f = weight_terminal I
  double gamma_max = 2.0;
  double horizon = 200.0;              ///< lqr law and lqr-design
  double riccati_step = 2e-3;
};

struct InitialSpec {
  InitialKind kind = InitialKind::Equilibrium;
  /// Plant throttle used to build the initial state. Unset: controller.gamma
  /// for simulate, 0.4 for control-stall, 0.5 for control-surge.
  std::optional<double> gamma;
  /// Disturbance amplitude. Unset: 0.3 for stall seeds, 1e-3 on the surge cycle.
  std::optional<double> amplitude;
  int mode = 1;
  std::string file;
};

struct ScanSpec {
  double gamma_lo = 0.40;
  double gamma_hi = 0.80;
  double gamma_step = 0.01;
  double seed_amplitude = 0.3;
  unsigned threads = 0;
  double stall_budget = 20000.0;

  std::vector<double> grid() const;
};

struct OutputSpec {
  std::string trajectory = "trajectory.csv";
  std::string control_log = "control_log.csv";
  std::string summary = "summary.json";
  std::string branch = "branch.csv";
  std::string riccati = "riccati.csv";
  std::string plot = "phase.svg";
};

struct ScenarioConfig {
  std::optional<ScenarioKind> kind;
  CompressorParams model{};
  /// dt = 0 selects the CFL limit at run time.
  SolverConfig solver{128, 0.0, Frame::Lab, Scheme::LaxWendroff, 2000.0, 10};
  ControllerSpec controller{};
  InitialSpec initial{};
  ScanSpec scan{};
  ClassifierOptions classifier{};
  double classify_tail = 1000.0;
  OutputSpec output{};

  /// Range checks; throws ConfigError.
  void validate() const;
};

ScenarioConfig parse_scenario_config(std::istream& is);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

}  // namespace vmg
