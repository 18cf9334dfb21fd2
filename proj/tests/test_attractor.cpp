#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "vmg/attractor.hpp"

using namespace vmg;

namespace {

Trajectory constant_trajectory(double duration, double dt) {
  Trajectory t;
  for (double s = 0; s <= duration + 1e-12; s += dt) {
    TrajectorySample x;
    x.state = AnnulusState::uniform(16, 0.5, 0.66, s);
    x.gamma = 0.62;
    t.samples.push_back(x);
  }
  return t;
}

}  // namespace

TEST_SUITE("attractor") {

TEST_CASE("constant trajectory is Design; short tails are refused") {
  CHECK(classify_regime(constant_trajectory(100, 0.5)).regime == Regime::Design);
  CHECK_THROWS_AS(classify_regime(constant_trajectory(5, 0.5)), TailTooShort);
}

TEST_CASE("drift of a shifted profile") {
  const std::size_t n = 128;
  std::vector<double> a(n), b(n);
  const double shift = 0.4321;
  for (std::size_t j = 0; j < n; ++j) {
    const double th = 2 * std::numbers::pi * j / n;
    a[j] = std::cos(th) + 0.3 * std::cos(2 * th + 0.2);
    b[j] = std::cos(th - shift) + 0.3 * std::cos(2 * (th - shift) + 0.2);
  }
  CHECK(measure_drift(a, b) == doctest::Approx(shift).epsilon(1e-10));
  CHECK(measure_drift(b, a) == doctest::Approx(-shift).epsilon(1e-10));
}

TEST_CASE("jacobian matches finite differences of the reduced rhs") {
  CompressorParams p;
  const double g = 0.62;
  const Equilibrium eq = design_equilibrium(p, g);
  const Eigen::Matrix2d j = jacobian_2d(p, eq, g);
  auto f = [&](double x, double y) {
    const auto d = rhs(p, AnnulusState::uniform(16, x, y), {g}, Frame::Lab);
    return Eigen::Vector2d(d.dflow, d.dpressure);
  };
  const double h = 1e-6;
  const Eigen::Vector2d c0 = (f(eq.flow + h, eq.pressure) - f(eq.flow - h, eq.pressure)) / (2 * h);
  const Eigen::Vector2d c1 = (f(eq.flow, eq.pressure + h) - f(eq.flow, eq.pressure - h)) / (2 * h);
  CHECK((j.col(0) - c0).norm() < 1e-9);
  CHECK((j.col(1) - c1).norm() < 1e-9);
}

TEST_CASE("closed-form 2x2 eigenvalues agree with Eigen") {
  Eigen::Matrix2d m;
  m << -0.3, 1.2, -0.7, 0.1;
  const auto ev = eigenvalues_2d(m);
  Eigen::EigenSolver<Eigen::Matrix2d> es(m);
  const auto ref = es.eigenvalues();
  const bool same = std::abs(ev[0] - ref[0]) < 1e-13 || std::abs(ev[0] - ref[1]) < 1e-13;
  CHECK(same);
  CHECK(ev[0].real() >= ev[1].real());
}

TEST_CASE("Hopf point: zero trace, positive determinant") {
  CompressorParams p;
  const double gh = hopf_point(p, 0.5, 0.7);
  const Eigen::Matrix2d j = jacobian_2d(p, design_equilibrium(p, gh), gh);
  CHECK(std::abs(j.trace()) <= 1e-9);
  CHECK(j.determinant() > 0);
  CHECK_THROWS_AS(hopf_point(p, 0.65, 0.8), NoSignChange);
}

TEST_CASE("stall wave at gamma = 0.4 rotates at half rotor speed") {
  CompressorParams p;
  const StallWave w = find_stall_wave(p, 0.4, 0.3);
  CHECK(w.wave_speed == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(w.drift_speed) < 1e-3);
  CHECK(w.residual < 1e-6);
  CHECK(w.amplitude() > 0.3);
  CHECK(std::abs(grid_mean(w.profile)) < 1e-12);
}

TEST_CASE("cold seed decays when the design point attracts it") {
  CompressorParams p;
  StallSearchOptions o;
  o.time_budget = 5000;
  CHECK_THROWS_AS(find_stall_wave(p, 0.8, 0.3, o), NoStall);
}

TEST_CASE("surge cycle below the Hopf point, none well above it") {
  CompressorParams p;
  const SurgeCycle c = find_surge_cycle(p, 0.5);
  CHECK(c.period > 100);
  CHECK(c.flow_min < 0);
  CHECK(c.flow_max > 0.5);
  CHECK(c.samples.front()[1] == doctest::Approx(c.section_flow).epsilon(1e-9));
  CHECK_THROWS_AS(find_surge_cycle(p, 0.7), NoCycle);
}

TEST_CASE("scan is independent of the thread count") {
  CompressorParams p;
  const std::vector<double> grid{0.4, 0.5, 0.6, 0.76};
  ScanOptions o;
  o.stall.time_budget = 5000;
  o.threads = 1;
  const BranchTable a = bifurcation_scan(p, grid, o);
  o.threads = 4;
  const BranchTable b = bifurcation_scan(p, grid, o);
  std::ostringstream sa, sb;
  write_branch_csv(sa, a);
  write_branch_csv(sb, b);
  CHECK(sa.str() == sb.str());
  REQUIRE(a.rows.size() == 4);
  CHECK(a.rows[0].stall_exists);
  CHECK(a.rows[0].surge_exists);
  CHECK_FALSE(a.rows[3].stall_exists);
  CHECK_FALSE(a.rows[3].surge_exists);
  CHECK(a.rows[3].design_stable(p));
}

}  // TEST_SUITE
