#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vmg/model.hpp"

using namespace vmg;

namespace {

std::vector<double> cosine(std::size_t n, double a, int m) {
  std::vector<double> phi(n);
  for (std::size_t j = 0; j < n; ++j) phi[j] = a * std::cos(2.0 * std::numbers::pi * m * j / n);
  return phi;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("cubic has its valley at 0 and peak at 2W") {
  CompressorParams p;
  const auto& c = p.cubic;
  CHECK(psi_c(p, 0.0) == doctest::Approx(c.psi_c0).epsilon(1e-15));
  CHECK(psi_c(p, 2.0 * c.w) == doctest::Approx(c.psi_c0 + 2.0 * c.h).epsilon(1e-15));
  CHECK(std::abs(psi_c_prime(p, 0.0)) < 1e-14);
  CHECK(std::abs(psi_c_prime(p, 2.0 * c.w)) < 1e-14);
  // inflection at W with slope 3H/(2W)
  CHECK(psi_c_prime(p, c.w) == doctest::Approx(1.5 * c.h / c.w).epsilon(1e-14));
  CHECK(std::abs(c.curvature(c.w)) < 1e-14);
}

TEST_CASE("slope matches centred differences") {
  CompressorParams p;
  for (double x : {-0.2, 0.1, 0.3, 0.55, 0.8}) {
    const double h = 1e-5;
    const double fd = (psi_c(p, x + h) - psi_c(p, x - h)) / (2 * h);
    CHECK(psi_c_prime(p, x) == doctest::Approx(fd).epsilon(1e-8));
    const double fd2 = (psi_c_prime(p, x + h) - psi_c_prime(p, x - h)) / (2 * h);
    CHECK(p.cubic.curvature(x) == doctest::Approx(fd2).epsilon(1e-8));
  }
}

TEST_CASE("throttle inverse is odd, C1 and exact outside the blend") {
  CompressorParams p;
  const double eps = p.throttle_eps;
  for (double psi : {2 * eps, 0.1, 0.66, 3.0}) {
    CHECK(throttle_inverse(p, psi) == doctest::Approx(std::sqrt(psi)).epsilon(1e-15));
    CHECK(throttle_inverse(p, -psi) == doctest::Approx(-std::sqrt(psi)).epsilon(1e-15));
  }
  CHECK(throttle_inverse(p, 0.0) == 0.0);
  for (double psi : {1e-5, 3e-4, 9e-4}) {
    CHECK(throttle_inverse(p, -psi) == -throttle_inverse(p, psi));
  }
  // continuity of value and slope at the blend edge (the slope is only C0,
  // so the gap shrinks like d)
  const double d = 1e-12;
  CHECK(throttle_inverse(p, eps - d) == doctest::Approx(throttle_inverse(p, eps + d)).epsilon(1e-6));
  CHECK(throttle_inverse_prime(p, eps - d) ==
        doctest::Approx(throttle_inverse_prime(p, eps + d)).epsilon(1e-6));
  CHECK(throttle_inverse_prime(p, eps + d) == doctest::Approx(0.5 / std::sqrt(eps)).epsilon(1e-6));
  for (double psi : {-0.3, -5e-4, 2e-4, 0.2}) {
    const double h = 1e-8;
    const double fd = (throttle_inverse(p, psi + h) - throttle_inverse(p, psi - h)) / (2 * h);
    CHECK(throttle_inverse_prime(p, psi) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("grid mean is exact for constants on power-of-two grids") {
  for (std::size_t n : {8u, 64u, 128u, 4096u}) {
    std::vector<double> v(n, 0.1);
    CHECK(grid_mean(v) == 0.1);
  }
}

TEST_CASE("mean characteristic matches the closed-form cosine average") {
  // For a cubic, mean psi_c(Phi + a cos) = psi_c(Phi) + psi_c''(Phi) a^2 / 4.
  CompressorParams p;
  for (std::size_t n : {16u, 128u, 4096u}) {
    for (double flow : {0.1, 0.4, 0.6}) {
      const double a = 0.3;
      const auto phi = cosine(n, a, 1);
      const double exact = psi_c(p, flow) + p.cubic.curvature(flow) * a * a / 4.0;
      CHECK(mean_characteristic(p, flow, phi) == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("central differences converge at second order") {
  auto err = [](std::size_t n, bool second) {
    std::vector<double> f(n), d(n);
    const double dx = 2 * std::numbers::pi / n;
    for (std::size_t j = 0; j < n; ++j) f[j] = std::sin(3 * dx * j);
    if (second) central_second_derivative(f, dx, d); else central_first_derivative(f, dx, d);
    double e = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double exact = second ? -9 * std::sin(3 * dx * j) : 3 * std::cos(3 * dx * j);
      e = std::max(e, std::abs(d[j] - exact));
    }
    return e;
  };
  for (bool second : {false, true}) {
    const double r = err(64, second) / err(128, second);
    CHECK(r == doctest::Approx(4.0).epsilon(0.02));
  }
}

TEST_CASE("rhs vanishes at an axisymmetric equilibrium") {
  CompressorParams p;
  for (double g : {0.4, 0.62, 0.8}) {
    const Equilibrium eq = design_equilibrium(p, g);
    CHECK(std::abs(eq.pressure - psi_c(p, eq.flow)) < 1e-15);
    CHECK(std::abs(equilibrium_residual(p, g, eq.flow)) < 1e-13);
    for (Frame f : {Frame::Lab, Frame::Rotating}) {
      const auto d = rhs(p, AnnulusState::uniform(32, eq.flow, eq.pressure), {g}, f);
      CHECK(std::abs(d.dflow) < 1e-14);
      CHECK(std::abs(d.dpressure) < 1e-14);
      for (double v : d.dphi) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("rhs is mean-free in phi and agrees with the linear mode rate") {
  CompressorParams p;
  const Equilibrium eq = design_equilibrium(p, 0.62);
  AnnulusState s = AnnulusState::uniform(128, eq.flow, eq.pressure);
  s.phi = cosine(128, 1e-7, 2);
  const auto d = rhs(p, s, {0.62}, Frame::Rotating);
  // the source minus its mean cancels to rounding of |psi_c| ~ 0.7
  CHECK(std::abs(grid_mean(d.dphi)) < 1e-15);
  const double dx = s.grid_spacing();
  const double lam = psi_c_prime(p, eq.flow) - p.nu * 4.0 / (dx * dx) * std::pow(std::sin(dx), 2);
  for (std::size_t j = 0; j < 128; j += 17) {
    // quadratic remainder psi_c'' phi^2 / 2 (less its mean) plus rounding
    CHECK(std::abs(d.dphi[j] - lam * s.phi[j]) <= std::abs(p.cubic.curvature(eq.flow)) * 1e-14 + 1e-15);
  }
}

TEST_CASE("equilibria: one or three intersections, design is the right-most") {
  CompressorParams p;
  const auto low = all_equilibria(p, 0.3);
  REQUIRE(!low.empty());
  for (const auto& e : low) CHECK(std::abs(equilibrium_residual(p, 0.3, e.flow)) < 1e-12);
  CHECK(design_equilibrium(p, 0.3).flow == doctest::Approx(low.back().flow).epsilon(1e-14));
  CHECK(all_equilibria(p, 0.62).size() == 1);
  for (std::size_t i = 1; i < low.size(); ++i) CHECK(low[i - 1].flow < low[i].flow);
}

TEST_CASE("no intersection when the characteristic is negative everywhere") {
  CompressorParams p;
  p.cubic.psi_c0 = -1.0;
  CHECK_THROWS_AS(design_equilibrium(p, 0.5), NoIntersection);
}

TEST_CASE("parameter and state validation") {
  CompressorParams p;
  CHECK_NOTHROW(p.validate());
  p.nu = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.cubic.w = -1;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);

  AnnulusState s = AnnulusState::uniform(4, 0.5, 0.6);
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = AnnulusState::uniform(16, 0.5, 0.6);
  s.phi[0] = 1e-3;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.phi[0] = std::nan("");
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

}  // TEST_SUITE
