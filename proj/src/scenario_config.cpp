#include "vmg/scenario_config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace vmg {

namespace {

using Setter = std::function<void(const std::string&)>;
using Section = std::map<std::string, Setter, std::less<>>;

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  try {
    return boost::lexical_cast<T>(boost::trim_copy(text));
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("cannot parse '" + text + "' for key " + key);
  }
}

Setter number(const std::string& key, double& slot) {
  return [key, &slot](const std::string& v) {
    slot = parse_value<double>(key, v);
    if (!std::isfinite(slot)) throw ConfigError(key + " must be finite");
  };
}

Setter optional_number(const std::string& key, std::optional<double>& slot) {
  return [key, &slot](const std::string& v) {
    const std::string t = boost::trim_copy(v);
    if (t == "auto") {
      slot.reset();
      return;
    }
    const double x = parse_value<double>(key, t);
    if (!std::isfinite(x)) throw ConfigError(key + " must be finite");
    slot = x;
  };
}

template <class T>
Setter integer(const std::string& key, T& slot) {
  return [key, &slot](const std::string& v) {
    const long long x = parse_value<long long>(key, v);
    if (x < 0 && std::is_unsigned_v<T>) throw ConfigError(key + " must be non-negative");
    slot = static_cast<T>(x);
  };
}

Setter text(std::string& slot) {
  return [&slot](const std::string& v) { slot = boost::trim_copy(v); };
}

}  // namespace

std::string_view to_string(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::Simulate: return "simulate";
    case ScenarioKind::Bifurcate: return "bifurcate";
    case ScenarioKind::ControlStall: return "control-stall";
    case ScenarioKind::ControlSurge: return "control-surge";
    case ScenarioKind::LqrDesign: return "lqr-design";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  for (auto k : {ScenarioKind::Simulate, ScenarioKind::Bifurcate, ScenarioKind::ControlStall,
                 ScenarioKind::ControlSurge, ScenarioKind::LqrDesign}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

std::vector<double> ScanSpec::grid() const {
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((gamma_hi - gamma_lo) / gamma_step + 1e-9));
  for (long k = 0; k <= n; ++k) g.push_back(gamma_lo + gamma_step * static_cast<double>(k));
  return g;
}

void ScenarioConfig::validate() const {
  try {
    model.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("[model] ") + e.what());
  }
  if (solver.n_grid < 8) throw ConfigError("[solver] n_grid must be >= 8");
  if (solver.dt < 0.0) throw ConfigError("[solver] dt must be >= 0 (0 selects the CFL limit)");
  if (solver.dt > 0.0) solver.validate(model);
  if (!(solver.t_end > 0.0)) throw ConfigError("[solver] t_end must be > 0");
  if (solver.record_every == 0) throw ConfigError("[solver] record_every must be >= 1");

  const auto& c = controller;
  if (c.laws.empty()) throw ConfigError("[controller] law must name at least one controller");
  static const std::set<std::string, std::less<>> known{"constant", "lqr", "basic", "surrogate"};
  std::set<std::string> seen;
  for (const auto& law : c.laws) {
    if (!known.count(law)) throw ConfigError("[controller] unknown law '" + law + "'");
    if (!seen.insert(law).second) throw ConfigError("[controller] law '" + law + "' listed twice");
  }
  if (!(c.gamma_max > model.gamma_min)) throw ConfigError("[controller] gamma_max must exceed gamma_min");
  auto in_range = [&](double g, const char* key) {
    if (!(g >= model.gamma_min && g <= c.gamma_max)) {
      throw ConfigError(std::string("[controller] ") + key + " outside [gamma_min, gamma_max]");
    }
  };
  in_range(c.gamma, "gamma");
  in_range(c.gamma_target, "gamma_target");
  if (c.gamma1) in_range(*c.gamma1, "gamma1");
  if (c.gamma1 && !(c.gamma_target < *c.gamma1)) {
    throw ConfigError("[controller] gamma_target must be below gamma1");
  }
  if (!(c.gain > 0.0)) throw ConfigError("[controller] gain must be > 0");
  if (!(c.r_u > 0.0) || !(c.r_phi > 0.0)) throw ConfigError("[controller] r_u and r_phi must be > 0");
  if (!(c.track_duration > 0.0)) throw ConfigError("[controller] track_duration must be > 0");
  if (!(c.weight_state >= 0.0) || !(c.weight_terminal >= 0.0)) {
    throw ConfigError("[controller] weights must be >= 0");
  }
  if (!(c.weight_control > 0.0)) throw ConfigError("[controller] weight_control must be > 0");
  if (!(c.horizon > 0.0) || !(c.riccati_step > 0.0)) {
    throw ConfigError("[controller] horizon and riccati_step must be > 0");
  }

  if (initial.gamma && !(*initial.gamma >= model.gamma_min)) {
    throw ConfigError("[initial] gamma below gamma_min");
  }
  if (initial.amplitude && !(*initial.amplitude >= 0.0)) {
    throw ConfigError("[initial] amplitude must be >= 0");
  }
  if (initial.mode < 1 || static_cast<std::size_t>(initial.mode) >= solver.n_grid / 2) {
    throw ConfigError("[initial] mode must be in [1, n_grid/2)");
  }
  if (initial.kind == InitialKind::Profile && initial.file.empty()) {
    throw ConfigError("[initial] kind = profile needs file");
  }

  if (!(scan.gamma_step > 0.0) || !(scan.gamma_lo > 0.0) || !(scan.gamma_hi >= scan.gamma_lo)) {
    throw ConfigError("[scan] need 0 < gamma_lo <= gamma_hi and gamma_step > 0");
  }
  if (scan.grid().size() > 10000) throw ConfigError("[scan] more than 10000 rows");
  if (!(scan.seed_amplitude > 0.0) || !(scan.stall_budget > 0.0)) {
    throw ConfigError("[scan] seed_amplitude and stall_budget must be > 0");
  }

  if (!(classifier.eps_phi > 0.0) || !(classifier.eps_flow > 0.0) || !(classifier.min_tail > 0.0)) {
    throw ConfigError("[classifier] thresholds must be > 0");
  }
  if (!(classify_tail >= classifier.min_tail)) {
    throw ConfigError("[classifier] tail must be >= min_tail");
  }

  std::set<std::string> paths;
  for (const auto* p : {&output.trajectory, &output.control_log, &output.summary, &output.branch,
                        &output.riccati, &output.plot}) {
    if (p->empty()) throw ConfigError("[output] paths must be non-empty");
    const std::string norm = std::filesystem::path(*p).lexically_normal().string();
    if (norm == "error.json" || norm == "last_state.csv") {
      throw ConfigError("[output] " + *p + " is reserved");
    }
    if (!paths.insert(norm).second) throw ConfigError("[output] duplicate path " + *p);
  }
}

ScenarioConfig parse_scenario_config(std::istream& is) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed scenario file: ") + e.what());
  }

  ScenarioConfig cfg;
  std::string frame, scheme, laws, initial_kind;

  std::map<std::string, Section, std::less<>> schema;
  auto& m = schema["model"];
  m["nu"] = number("model.nu", cfg.model.nu);
  m["l_c"] = number("model.l_c", cfg.model.l_c);
  m["b"] = number("model.b", cfg.model.b_param);
  m["psi_c0"] = number("model.psi_c0", cfg.model.cubic.psi_c0);
  m["h"] = number("model.h", cfg.model.cubic.h);
  m["w"] = number("model.w", cfg.model.cubic.w);
  m["throttle_eps"] = number("model.throttle_eps", cfg.model.throttle_eps);
  m["gamma_min"] = number("model.gamma_min", cfg.model.gamma_min);

  auto& s = schema["solver"];
  s["n_grid"] = integer("solver.n_grid", cfg.solver.n_grid);
  s["dt"] = number("solver.dt", cfg.solver.dt);
  s["frame"] = text(frame);
  s["scheme"] = text(scheme);
  s["t_end"] = number("solver.t_end", cfg.solver.t_end);
  s["record_every"] = integer("solver.record_every", cfg.solver.record_every);

  auto& c = schema["controller"];
  c["law"] = text(laws);
  c["gamma"] = number("controller.gamma", cfg.controller.gamma);
  c["gamma1"] = optional_number("controller.gamma1", cfg.controller.gamma1);
  c["gamma_target"] = number("controller.gamma_target", cfg.controller.gamma_target);
  c["gain"] = number("controller.gain", cfg.controller.gain);
  c["r_u"] = number("controller.r_u", cfg.controller.r_u);
  c["r_phi"] = number("controller.r_phi", cfg.controller.r_phi);
  c["track_duration"] = number("controller.track_duration", cfg.controller.track_duration);
  c["wait_warning"] = number("controller.wait_warning", cfg.controller.wait_warning);
  c["weight_state"] = number("controller.weight_state", cfg.controller.weight_state);
  c["weight_control"] = number("controller.weight_control", cfg.controller.weight_control);
  c["weight_terminal"] = number("controller.weight_terminal", cfg.controller.weight_terminal);
  c["gamma_max"] = number("controller.gamma_max", cfg.controller.gamma_max);
  c["horizon"] = number("controller.horizon", cfg.controller.horizon);
  c["riccati_step"] = number("controller.riccati_step", cfg.controller.riccati_step);

  auto& i = schema["initial"];
  i["kind"] = text(initial_kind);
  i["gamma"] = optional_number("initial.gamma", cfg.initial.gamma);
  i["amplitude"] = optional_number("initial.amplitude", cfg.initial.amplitude);
  i["mode"] = integer("initial.mode", cfg.initial.mode);
  i["file"] = text(cfg.initial.file);

  auto& sc = schema["scan"];
  sc["gamma_lo"] = number("scan.gamma_lo", cfg.scan.gamma_lo);
  sc["gamma_hi"] = number("scan.gamma_hi", cfg.scan.gamma_hi);
  sc["gamma_step"] = number("scan.gamma_step", cfg.scan.gamma_step);
  sc["seed_amplitude"] = number("scan.seed_amplitude", cfg.scan.seed_amplitude);
  sc["threads"] = integer("scan.threads", cfg.scan.threads);
  sc["stall_budget"] = number("scan.stall_budget", cfg.scan.stall_budget);

  auto& cl = schema["classifier"];
  cl["eps_phi"] = number("classifier.eps_phi", cfg.classifier.eps_phi);
  cl["eps_flow"] = number("classifier.eps_flow", cfg.classifier.eps_flow);
  cl["min_tail"] = number("classifier.min_tail", cfg.classifier.min_tail);
  cl["speed_spread"] = number("classifier.speed_spread", cfg.classifier.speed_spread);
  cl["tail"] = number("classifier.tail", cfg.classify_tail);

  auto& o = schema["output"];
  o["trajectory"] = text(cfg.output.trajectory);
  o["control_log"] = text(cfg.output.control_log);
  o["summary"] = text(cfg.output.summary);
  o["branch"] = text(cfg.output.branch);
  o["riccati"] = text(cfg.output.riccati);
  o["plot"] = text(cfg.output.plot);

  std::string scenario;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      if (name != "scenario") throw ConfigError("unknown top-level key '" + name + "'");
      scenario = boost::trim_copy(node.data());
      continue;
    }
    const auto sec = schema.find(name);
    if (sec == schema.end()) throw ConfigError("unknown section [" + name + "]");
    for (const auto& [key, leaf] : node) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
      it->second(leaf.data());
    }
  }

  if (!scenario.empty()) cfg.kind = parse_scenario_kind(scenario);
  if (!frame.empty()) {
    if (frame == "lab") cfg.solver.frame = Frame::Lab;
    else if (frame == "rotating") cfg.solver.frame = Frame::Rotating;
    else throw ConfigError("[solver] frame must be lab or rotating");
  }
  if (!scheme.empty()) {
    if (scheme == "lax-wendroff") cfg.solver.scheme = Scheme::LaxWendroff;
    else if (scheme == "mol-rk4") cfg.solver.scheme = Scheme::MethodOfLinesRK4;
    else throw ConfigError("[solver] scheme must be lax-wendroff or mol-rk4");
  }
  if (!laws.empty()) {
    cfg.controller.laws.clear();
    std::vector<std::string> parts;
    boost::split(parts, laws, boost::is_any_of(","));
    for (auto& p : parts) cfg.controller.laws.push_back(boost::trim_copy(p));
  }
  if (!initial_kind.empty()) {
    if (initial_kind == "equilibrium") cfg.initial.kind = InitialKind::Equilibrium;
    else if (initial_kind == "stall-seed") cfg.initial.kind = InitialKind::StallSeed;
    else if (initial_kind == "surge-seed") cfg.initial.kind = InitialKind::SurgeSeed;
    else if (initial_kind == "profile") cfg.initial.kind = InitialKind::Profile;
    else throw ConfigError("[initial] kind must be equilibrium, stall-seed, surge-seed or profile");
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open scenario file " + path.string());
  return parse_scenario_config(is);
}

}  // namespace vmg
