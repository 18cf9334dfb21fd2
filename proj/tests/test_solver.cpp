#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "vmg/metrics.hpp"
#include "vmg/solver.hpp"
#include "vmg/trajectory_io.hpp"

using namespace vmg;

namespace {

AnnulusState seeded(const CompressorParams& p, double gamma, std::size_t n, double a, int m) {
  const Equilibrium eq = design_equilibrium(p, gamma);
  AnnulusState s = AnnulusState::uniform(n, eq.flow, eq.pressure);
  for (std::size_t j = 0; j < n; ++j) s.phi[j] = a * std::cos(2 * std::numbers::pi * m * j / n);
  return s;
}

// Records the raw command so the clamp can be observed.
class Fixed final : public ControlLaw {
 public:
  explicit Fixed(double g) : ControlLaw(0.05, 2.0), g_(g) {}
  std::string name() const override { return "fixed"; }

 protected:
  ControlOutput evaluate(double, const AnnulusState&) override {
    ControlOutput o;
    o.command = g_;
    return o;
  }

 private:
  double g_;
};

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("step above the stability limit is a config error") {
  CompressorParams p;
  SolverConfig c = make_solver_config(p, 128, 1.0);
  CHECK_NOTHROW(c.validate(p));
  c.dt *= 1.01;
  CHECK_THROWS_AS(c.validate(p), ConfigError);
  c = make_solver_config(p, 128, 1.0);
  c.record_every = 0;
  CHECK_THROWS_AS(c.validate(p), ConfigError);
  // rotating frame has no advective limit, so its step is never smaller
  CHECK(cfl_check(p, 128, Frame::Rotating) >= cfl_check(p, 128, Frame::Lab));
}

TEST_CASE("constant throttle from equilibrium stays put") {
  CompressorParams p;
  const Equilibrium eq = design_equilibrium(p, 0.62);
  const AnnulusState s0 = AnnulusState::uniform(64, eq.flow, eq.pressure);
  for (Scheme scheme : {Scheme::LaxWendroff, Scheme::MethodOfLinesRK4}) {
    ConstantThrottle law(0.62, p.gamma_min);
    const auto traj = integrate(p, s0, law, make_solver_config(p, 64, 50.0, Frame::Lab, scheme, 7));
    for (const auto& s : traj.samples) {
      CHECK(std::abs(s.state.avg_flow - eq.flow) < 1e-13);
      CHECK(std::abs(s.state.pressure_rise - eq.pressure) < 1e-13);
      CHECK(s.state.phi_sup() == 0.0);
    }
    CHECK(traj.samples.back().state.time == doctest::Approx(50.0).epsilon(1e-14));
  }
}

TEST_CASE("pure transport: profile translates at one half, second-order phase error") {
  // nu = 0, no reaction: phi_t = -1/2 phi_theta, exact solution sin(theta - t/2).
  auto error = [](std::size_t n) {
    const double dx = 2 * std::numbers::pi / n;
    const double dt = 0.4 * dx / 0.5;
    std::vector<double> phi(n), zero(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) phi[j] = std::sin(dx * j);
    const double t_end = 2.0;
    const auto steps = static_cast<int>(std::ceil(t_end / dt));
    const double h = t_end / steps;
    for (int k = 0; k < steps; ++k) {
      const auto half = detail::lax_wendroff_predict(phi, zero, h, dx, 0.5, 0.0);
      detail::lax_wendroff_correct(phi, half, zero, h, dx, 0.5, 0.0);
    }
    double e = 0;
    for (std::size_t j = 0; j < n; ++j) e = std::max(e, std::abs(phi[j] - std::sin(dx * j - 0.5 * t_end)));
    return e;
  };
  const double e64 = error(64), e128 = error(128);
  CHECK(e128 < 1e-3);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("disturbance mean stays zero") {
  CompressorParams p;
  for (Scheme scheme : {Scheme::LaxWendroff, Scheme::MethodOfLinesRK4}) {
    ConstantThrottle law(0.4, p.gamma_min);
    const auto traj = integrate(p, seeded(p, 0.4, 128, 0.3, 1), law,
                                make_solver_config(p, 128, 30.0, Frame::Lab, scheme));
    CHECK(max_mean_drift(traj) <= 1e-10);
  }
}

TEST_CASE("throttle below gamma_min is clamped and logged") {
  CompressorParams p;
  Fixed law(-1.0);
  CHECK(law.query(0.0, AnnulusState::uniform(16, 0.3, 0.5)).gamma == p.gamma_min);
  const auto traj = integrate(p, seeded(p, 0.62, 32, 1e-3, 1), law, make_solver_config(p, 32, 1.0));
  REQUIRE(!traj.control_log.empty());
  for (const auto& r : traj.control_log) {
    CHECK(r.gamma_command == -1.0);
    CHECK(r.gamma_applied == p.gamma_min);
  }
}

TEST_CASE("recording keeps every k-th state plus the last") {
  CompressorParams p;
  ConstantThrottle law(0.62, p.gamma_min);
  SolverConfig c = make_solver_config(p, 32, 1.0);
  c.dt = 1.0 / 10.0;
  c.dt = std::min(c.dt, cfl_check(p, 32));
  const auto steps = static_cast<std::size_t>(std::ceil(1.0 / c.dt));
  c.record_every = 3;
  const auto traj = integrate(p, seeded(p, 0.62, 32, 1e-3, 1), law, c);
  CHECK(traj.samples.size() == steps / 3 + 1 + (steps % 3 != 0));
  CHECK(traj.samples.front().state.time == 0.0);
  CHECK(traj.samples.back().state.time == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("blow-up is reported with the last finite state") {
  CompressorParams p;
  ConstantThrottle law(0.62, p.gamma_min);
  AnnulusState s = seeded(p, 0.62, 32, 50.0, 1);
  try {
    integrate(p, s, law, make_solver_config(p, 32, 50.0));
    FAIL("expected NonFinite");
  } catch (const NonFiniteError& e) {
    CHECK(e.last_valid().finite());
    CHECK(std::string(e.kind()) == "NonFinite");
  }
}

TEST_CASE("fourier amplitudes") {
  AnnulusState s = AnnulusState::uniform(64, 0, 0);
  for (std::size_t j = 0; j < 64; ++j) {
    const double th = 2 * std::numbers::pi * j / 64;
    s.phi[j] = 3 * std::cos(2 * th) + 0.5 * std::sin(5 * th + 0.3);
  }
  const auto m = fourier_mode_amplitudes(s, 8);
  REQUIRE(m.size() == 8);
  CHECK(m[1].first == 2);
  CHECK(m[1].second == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(m[4].second == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(m[0].second < 1e-14);
}

TEST_CASE("schemes agree on a short stall-seed run") {
  CompressorParams p;
  const AnnulusState s0 = seeded(p, 0.4, 64, 0.3, 1);
  ConstantThrottle a(0.4, p.gamma_min), b(0.4, p.gamma_min);
  SolverConfig c = make_solver_config(p, 64, 5.0);
  const auto lw = integrate(p, s0, a, c);
  c.scheme = Scheme::MethodOfLinesRK4;
  const auto mol = integrate(p, s0, b, c);
  REQUIRE(lw.samples.size() == mol.samples.size());
  double d = 0;
  for (std::size_t k = 0; k < lw.samples.size(); ++k)
    for (std::size_t j = 0; j < 64; ++j)
      d = std::max(d, std::abs(lw.samples[k].state.phi[j] - mol.samples[k].state.phi[j]));
  CHECK(d < 1e-3);
}

TEST_CASE("trajectory CSV round-trips to full precision") {
  CompressorParams p;
  ConstantThrottle law(0.4, p.gamma_min);
  const auto traj = integrate(p, seeded(p, 0.4, 16, 0.2, 1), law, make_solver_config(p, 16, 2.0));
  std::stringstream ss;
  write_trajectory_csv(ss, traj, true);
  const Trajectory back = read_trajectory_csv(ss);
  REQUIRE(back.samples.size() == traj.samples.size());
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& x = traj.samples[k];
    const auto& y = back.samples[k];
    CHECK(x.state.time == y.state.time);
    CHECK(x.state.avg_flow == y.state.avg_flow);
    CHECK(x.state.pressure_rise == y.state.pressure_rise);
    CHECK(x.gamma == y.gamma);
    CHECK(x.state.phi == y.state.phi);
  }
  std::stringstream flat;
  write_trajectory_csv(flat, traj, false);
  CHECK_THROWS(read_trajectory_csv(flat));
}

}  // TEST_SUITE
