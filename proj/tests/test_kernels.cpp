#include "doctest.h"

#include "symlab/huovinen.hpp"
#include "symlab/kernel.hpp"
#include "symlab/multiplier.hpp"

#include <random>

using namespace symlab;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

std::vector<Kernel> zoo() { return {riesz_kernel(2), riesz_kernel(3), huovinen_kernel(1), huovinen_kernel(3), huovinen_kernel(5), coordinate_kernel()}; }

}  // namespace

TEST_CASE("kernel examples") {
  const Kernel riesz = riesz_kernel(2);
  CHECK(riesz(v2(1, 0)) == v2(1, 0));
  const Kernel h3 = huovinen_kernel(3);
  const Vec z = h3(v2(std::cos(kPi / 6), std::sin(kPi / 6)));
  CHECK(z(0) == doctest::Approx(0).scale(1));
  CHECK(z(1) == doctest::Approx(1));
  CHECK_THROWS_AS(huovinen_kernel(4), InputError);
  const Kernel coord = coordinate_kernel();
  CHECK(coord(v2(1, 5))(0) == 1);
  CHECK(coord(v2(0, 3.5))(0) == 0);
}

TEST_CASE("huovinen k=1 matches riesz and keeps the modulus") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const Kernel h1 = huovinen_kernel(1);
  const Kernel h5 = huovinen_kernel(5);
  const Kernel riesz = riesz_kernel(2);
  for (int i = 0; i < 100; ++i) {
    const Vec x = v2(g(rng), g(rng));
    CHECK((h1(x) - riesz(x)).norm() <= 1e-14 * x.norm());
    CHECK(h5(x).norm() == doctest::Approx(x.norm()).epsilon(1e-13));
  }
}

TEST_CASE("zoo kernels are odd and one-homogeneous") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> t(0.01, 100.0);
  for (const Kernel& k : zoo()) {
    for (int i = 0; i < 1000; ++i) {
      Vec x(k.dim());
      for (int j = 0; j < k.dim(); ++j) x(j) = g(rng);
      const double scale = t(rng);
      const double size = k(x).norm() + x.norm();
      CHECK((k(-x) + k(x)).norm() <= 1e-12 * size);
      CHECK((k(scale * x) - scale * k(x)).norm() <= 1e-12 * scale * size);
    }
  }
}

TEST_CASE("riesz multiplier closed form") {
  const Kernel riesz = riesz_kernel(2);
  for (const Vec& xi : sphere_nodes(2, 12)) {
    const MultiplierValue m = multiplier(riesz, xi);
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(m.value(j).real()) <= 1e-8);
      CHECK(m.value(j).imag() == doctest::Approx(-2 * kPi * xi(j)).epsilon(1e-8).scale(1));
    }
  }
  CHECK_THROWS_AS(multiplier(riesz, v2(1, 1)), InputError);
}

TEST_CASE("multiplier is odd in xi and purely imaginary") {
  for (const Kernel& k : {riesz_kernel(2), huovinen_kernel(3), coordinate_kernel()}) {
    for (const Vec& xi : sphere_nodes(2, 7)) {
      const MultiplierValue a = multiplier(k, xi);
      const MultiplierValue b = multiplier(k, -xi);
      CHECK((a.value + b.value).norm() <= 2e-9);
      for (Eigen::Index j = 0; j < a.value.size(); ++j) CHECK(std::abs(a.value(j).real()) <= 1e-8);
    }
  }
}

TEST_CASE("coordinate kernel multiplier vanishes on the vertical axis") {
  const Kernel coord = coordinate_kernel();
  CHECK(multiplier(coord, v2(0, 1)).value.norm() <= 1e-8);
  const NonvanishingScan scan = multiplier_nonvanishing_scan(coord, 16);
  CHECK_FALSE(scan.nonvanishing);
  CHECK(scan.min_modulus <= 1e-6);
  CHECK(std::abs(scan.witness(0)) <= 1e-9);
}

TEST_CASE("riesz and huovinen k=1 scans agree") {
  const NonvanishingScan a = multiplier_nonvanishing_scan(riesz_kernel(2), 16);
  const NonvanishingScan b = multiplier_nonvanishing_scan(huovinen_kernel(1), 16);
  CHECK(a.nonvanishing);
  CHECK(a.min_modulus == doctest::Approx(2 * kPi).epsilon(1e-8));
  CHECK(b.min_modulus == doctest::Approx(a.min_modulus).epsilon(1e-10));
}

TEST_CASE("angle residual") {
  CHECK(std::abs(huovinen_angle_residual(3, 1, 1, kPi / 3)) <= 1e-12);
  CHECK(std::abs(huovinen_angle_residual(3, 1, 1, 0.5)) > 1e-3);
  CHECK(std::abs(huovinen_angle_residual(3, 1, 2, kPi / 3)) > 1e-3);
  CHECK_THROWS_AS(huovinen_angle_residual(2, 1, 1, 0.3), InputError);
  for (int k : {3, 5, 7})
    for (double theta : huovinen_angle_roots(k)) {
      const double delta = 1e-3;
      CHECK(std::abs(huovinen_angle_residual(k, 1, 1 + delta, theta)) >= delta * std::pow(std::sin(theta), k) / 2);
    }
}

TEST_CASE("angle roots") {
  const auto r3 = huovinen_angle_roots(3);
  REQUIRE(r3.size() == 1);
  CHECK(std::abs(r3[0] - kPi / 3) <= 1e-10);
  const auto r5 = huovinen_angle_roots(5);
  REQUIRE(r5.size() == 2);
  CHECK(std::abs(r5[0] - kPi / 5) <= 1e-10);
  CHECK(std::abs(r5[1] - 2 * kPi / 5) <= 1e-10);
  RootSearch below_half_pi;
  below_half_pi.hi = kPi / 2 - 1e-3;
  CHECK(huovinen_angle_roots(1, below_half_pi).empty());
  RootSearch coarse;
  coarse.grid_points = 5;
  CHECK_THROWS_AS(huovinen_angle_roots(7, coarse), InputError);
}

TEST_CASE("center balance") {
  std::vector<double> angles, weights;
  alternating_rays(3, 1.0, 1.0, angles, weights);
  CHECK(std::abs(center_balance(3, angles, weights)) <= 1e-12);
  alternating_rays(3, 1.0, 2.0, angles, weights);
  CHECK(std::abs(center_balance(3, angles, weights)) == doctest::Approx(3));
  CHECK(std::abs(center_balance(3, {0.4}, {1.0})) == doctest::Approx(1));
  CHECK_THROWS_AS(center_balance(3, {0.1, 0.2}, {1.0}), InputError);
}
