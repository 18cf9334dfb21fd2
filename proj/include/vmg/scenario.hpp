#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "vmg/control_law.hpp"
#include "vmg/scenario_config.hpp"

namespace vmg {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool plot = false;
  bool full_profile = false;
  /// Human-readable progress and results; null for silence.
  std::ostream* report = nullptr;
};

struct ScenarioOutcome {
  std::string summary_json;
  std::vector<std::filesystem::path> files;
};

/// Runs one scenario and writes its outputs under opts.out_dir.
ScenarioOutcome run_scenario(ScenarioKind kind, const ScenarioConfig& config,
                             const RunOptions& opts = {});

/// The initial state a scenario starts from (settled stall or surge for the
/// control scenarios).
AnnulusState scenario_initial_state(ScenarioKind kind, const ScenarioConfig& config);

/// gamma1 from the config or, when unset, from a bifurcation scan.
double resolve_gamma1(const ScenarioConfig& config);

std::unique_ptr<ControlLaw> make_control_law(const std::string& law, const ScenarioConfig& config,
                                             double gamma1);

/// `{"error": kind, "message": ..., "exit_code": n}`
std::string error_record(const std::string& kind, const std::string& message, int exit_code);

}  // namespace vmg
