// vmg <scenario> --config <path> [--out <dir>] [--plot] [--full-profile]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vmg/scenario.hpp"
#include "vmg/solver.hpp"
#include "vmg/trajectory_io.hpp"

namespace {

int fail(const std::filesystem::path& out_dir, const std::string& kind, const std::string& msg,
         int code) {
  const std::string rec = vmg::error_record(kind, msg, code);
  std::cerr << rec;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream(out_dir / "error.json") << rec;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous Moore-Greitzer compressor lab"};
  std::string scenario, config_path, out_dir = ".";
  bool plot = false, full_profile = false;
  app.add_option("scenario", scenario, "simulate | bifurcate | control-stall | control-surge | lqr-design")
      ->required();
  app.add_option("--config", config_path, "scenario file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--plot", plot, "write an SVG phase plot");
  app.add_flag("--full-profile", full_profile, "include the phi profile in the trajectory CSV");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  const std::filesystem::path out(out_dir);
  vmg::ScenarioKind kind;
  vmg::ScenarioConfig cfg;
  try {
    kind = vmg::parse_scenario_kind(scenario);
    cfg = vmg::load_scenario_config(config_path);
    if (cfg.kind && *cfg.kind != kind) {
      throw vmg::ConfigError("scenario file is for '" + std::string(vmg::to_string(*cfg.kind)) +
                             "', command line asks for '" + scenario + "'");
    }
  } catch (const vmg::Error& e) {
    return fail(out, e.kind(), e.what(), 2);
  }

  vmg::RunOptions opts;
  opts.out_dir = out;
  opts.plot = plot;
  opts.full_profile = full_profile;
  opts.report = &std::cout;
  try {
    const auto outcome = vmg::run_scenario(kind, cfg, opts);
    std::cout << outcome.summary_json;
  } catch (const vmg::ConfigError& e) {
    return fail(out, e.kind(), e.what(), 2);
  } catch (const vmg::NonFiniteError& e) {
    vmg::Trajectory last;
    last.samples.push_back({e.last_valid(), 0.0});
    try {
      vmg::write_trajectory_csv(out / "last_state.csv", last, true);
    } catch (const vmg::Error&) {
    }
    return fail(out, e.kind(), e.what(), 3);
  } catch (const vmg::Error& e) {
    return fail(out, e.kind(), e.what(), 3);
  } catch (const std::exception& e) {
    return fail(out, "Internal", e.what(), 3);
  }
  return 0;
}
