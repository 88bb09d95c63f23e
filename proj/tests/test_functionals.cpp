#include "doctest.h"

#include "symlab/functionals.hpp"
#include "symlab/generators.hpp"
#include "symlab/huovinen.hpp"

#include <random>

using namespace symlab;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec polar(double rho, double t) { return v2(rho * std::cos(t), rho * std::sin(t)); }
Mat x_axis() { return (Mat(2, 1) << 1, 0).finished(); }

Measure single_atom(double a, double b) {
  return make_atomic_measure<double>((Mat(2, 1) << a, b).finished(), Vec::Ones(1));
}

Measure random_atoms(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> w(0.1, 2);
  Mat p(2, n);
  Vec weights(n);
  for (int i = 0; i < n; ++i) {
    p.col(i) = v2(u(rng), u(rng));
    weights(i) = w(rng);
  }
  return make_atomic_measure<double>(p, weights);
}

}  // namespace

TEST_CASE("eta and phi cutoffs") {
  const CutoffEta eta(0.25);
  CHECK(eta(0.0) == 1);
  CHECK(eta(0.75) == 1);
  CHECK(eta(0.875) == doctest::Approx(0.5));
  CHECK(eta(1.0) == 0);
  CHECK(eta.lipschitz() == 4);
  double lip = 0;
  for (int i = 0; i < 1000; ++i) lip = std::max(lip, std::abs(eta(0.7 + i * 1e-4 + 1e-4) - eta(0.7 + i * 1e-4)) / 1e-4);
  CHECK(lip <= 4 + 1e-6);
  CHECK_THROWS_AS(CutoffEta(1.0), InputError);
  const CutoffPhi phi;
  CHECK(phi(2.9) == 1);
  CHECK(phi(4.1) == 0);
  for (double t = 0; t <= 5; t += 0.01) {
    CHECK(phi(t) >= 0);
    CHECK(phi(t) <= 1);
    CHECK(std::abs(phi.derivative(t)) <= 2);
    CHECK(std::abs((phi(t + 1e-6) - phi(t - 1e-6)) / 2e-6 - phi.derivative(t)) <= 1e-4);
  }
}

TEST_CASE("sla of a single atom") {
  const Vec v = sla_functional(single_atom(1, 0), riesz_kernel(2), Vec(Vec::Zero(2)), 2.0, 0.5, 1.0);
  CHECK(v(0) == doctest::Approx(-0.25));
  CHECK(v(1) == 0);
}

TEST_CASE("sla vanishes on a flat line") {
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), Vec(Vec::Zero(2)), 0.5, 4.0, 1.0 / 2000);
  const ScanResult scan = sla_scan(line, riesz_kernel(2), v2(0.1, 0), geometric_radii(1.0, 0.8, 20), 0.5, 1.0);
  CHECK(scan.tail_max <= 1e-12);
  CHECK(scan.verdict);
  CHECK(scan.radii.size() == 20);
  CHECK_THROWS_AS(sla_functional(line, riesz_kernel(2), Vec(Vec::Zero(2)), 0.005, 0.5, 1.0), RefusalError);
}

TEST_CASE("sla on spikes and generic lines") {
  const Kernel h3 = huovinen_kernel(3);
  const Measure spike = make_spike_measure<double>(3, 3, 0.0, Vec(Vec::Zero(2)), 0.5, 3.0, 1.0 / 4096);
  const auto radii = geometric_radii(0.25, 0.5, 6);
  const Vec x = polar(0.5, kPi / 3);
  CHECK(sla_scan(spike, h3, x, radii, 0.5, 1.0).tail_max <= 1e-9);
  const Measure generic =
      make_line_configuration<double>(Vec(Vec::Zero(2)), {0.0, 0.9, 2.1}, {0.5, 0.5, 0.5}, 3.0, 1.0 / 4096);
  CHECK(sla_scan(generic, h3, v2(1.0 / 256, 0), radii, 0.5, 1.0).tail_max >= 0.05 * 0.5);
}

TEST_CASE("sla on the cantor product") {
  const double s = 1.5;
  const Measure cantor = make_cantor_product_measure<double>(s, 4, 1.0);
  const Kernel coord = coordinate_kernel();
  const Eigen::Index row = (cantor.size() / 16 - 1) / 2;
  const Vec x = cantor.position(row + 5 * cantor.size() / 16);
  REQUIRE(x(0) == 0);
  const double h = cantor.resolution();
  for (double r : {40 * h, 100 * h}) {
    REQUIRE(cantor.window().admits(x, r));
    CHECK(sla_functional(cantor, coord, x, r, 0.5, s).norm() <= 1e-9);
  }
}

TEST_CASE("symmetry defect") {
  const Kernel riesz = riesz_kernel(2);
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), Vec(Vec::Zero(2)), 1.0, 10.0, 1.0 / 256);
  const auto radii = geometric_radii(3.0, 0.5, 6);
  CHECK(symmetry_defect(line, riesz, v2(0.25, 0), radii, 1.0).value <= 1e-12);
  CHECK(symmetry_defect(line, riesz, v2(0, 1), radii, 1.0).value > 0.1);
  const Measure spike = make_spike_measure<double>(3, 3, 0.0, Vec(Vec::Zero(2)), 0.5, 3.0, 1.0 / 256);
  CHECK(symmetry_defect(spike, huovinen_kernel(3), Vec(Vec::Zero(2)), geometric_radii(1.0, 0.5, 5), 1.0).value <= 1e-12);
}

TEST_CASE("symmetry defect scales with the mass") {
  const Kernel h3 = huovinen_kernel(3);
  const Measure generic = make_line_configuration<double>(Vec(Vec::Zero(2)), {0.0, 0.9, 2.1}, {0.5, 0.5, 0.5}, 3.0, 1.0 / 128);
  const auto radii = geometric_radii(1.0, 0.5, 4);
  for (int i = 0; i < generic.size(); i += 97) {
    const Vec x = generic.position(i);
    if (!generic.window().admits(x, 1.0)) continue;
    const double base = symmetry_defect(generic, h3, x, radii, 1.0).value;
    CHECK(symmetry_defect(generic.scaled(2.0), h3, x, radii, 1.0).value == 2.0 * base);
  }
}

TEST_CASE("symmetric point scan") {
  const Kernel riesz = riesz_kernel(2);
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), Vec(Vec::Zero(2)), 1.0, 10.0, 1.0 / 256);
  std::vector<Vec> grid;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) grid.push_back(v2(0.25 * i, 0.25 * j));
  for (const auto& c : symmetric_point_scan(line, riesz, grid, geometric_radii(2.0, 0.5, 5), 1.0))
    CHECK(c.symmetric == (c.point(1) == 0));

  const Measure spike = make_spike_measure<double>(3, 3, 0.0, Vec(Vec::Zero(2)), 0.5, 3.0, 1.0 / 256);
  std::vector<Vec> bisectors;
  for (int j = 0; j < 6; ++j) bisectors.push_back(polar(0.5, kPi / 6 + j * kPi / 3));
  for (const auto& c : symmetric_point_scan(spike, huovinen_kernel(3), bisectors, geometric_radii(1.0, 0.5, 4), 1.0)) {
    CHECK_FALSE(c.symmetric);
    CHECK(c.defect.value > 0.05);
  }

  const Measure two = make_atomic_measure<double>((Mat(2, 2) << 0, 3, 0, 0).finished(), Vec::Ones(2));
  for (const auto& c : symmetric_point_scan(two, riesz, {v2(0.5, 0.2)}, {1.0}, 1.0)) CHECK(c.defect.value > 0);
}

TEST_CASE("density ratios") {
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), Vec(Vec::Zero(2)), 1.0, 10.0, 1.0 / 1024);
  for (double r : {2.0, 0.5, 0.125}) CHECK(std::abs(density_ratio(line, Vec(Vec::Zero(2)), r, 1.0) - 2) <= 1.0 / 1024 / r + 1e-12);
  const Measure empty = make_flat_measure<double>(2, 1, x_axis(), Vec(Vec::Zero(2)), 0.0, 10.0, 1.0 / 64);
  CHECK(density_ratio(empty, Vec(Vec::Zero(2)), 1.0, 1.0) == 0);

  const double s = 1.5;
  const Measure cantor = make_cantor_product_measure<double>(s, 4, 1.0);
  const Vec x = cantor.position((cantor.size() / 16 - 1) / 2 + 9 * cantor.size() / 16);
  const double h = cantor.resolution();
  std::vector<double> radii;
  for (double r = 0.2; r >= 20 * h; r *= 0.6) radii.push_back(r);
  const ScanResult scan = density_scan(cantor, x, radii, s);
  CHECK(scan.tail_max <= 20);
  CHECK(scan.tail_min > 0);
}

TEST_CASE("density is invariant under rescaling") {
  const Measure spike = make_spike_measure<double>(3, 3, 0.0, Vec(Vec::Zero(2)), 0.5, 3.0, 1.0 / 256);
  const Vec x = polar(0.5, 0.0);
  const double r = 0.25;
  const Measure blown = push_forward(spike, x, r, std::pow(r, -1.0));
  for (double rho : {1.0, 0.5, 0.3})
    CHECK(density_ratio(spike, x, rho * r, 1.0) == doctest::Approx(density_ratio(blown, Vec(Vec::Zero(2)), rho, 1.0)).epsilon(1e-12));
}

TEST_CASE("truncated principal values") {
  const Kernel riesz = riesz_kernel(2);
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), Vec(Vec::Zero(2)), 1.0, 10.0, 1.0 / 256);
  const auto eps = geometric_radii(1.0, 0.5, 4);
  const PvResult flat = pv_estimator(line, riesz, Vec(Vec::Zero(2)), 1.0, eps);
  for (const Vec& v : flat.values) CHECK(v.norm() <= 1e-12);
  CHECK(flat.cauchy_defect <= 1e-12);

  const PvResult one = pv_estimator(single_atom(1, 0), riesz, Vec(Vec::Zero(2)), 1.0, geometric_radii(0.8, 0.5, 6));
  for (const Vec& v : one.values) {
    CHECK(v(0) == doctest::Approx(-1));
    CHECK(v(1) == 0);
  }
  CHECK(one.cauchy_defect == 0);

  const PvResult at_x = pv_estimator(single_atom(0, 0), riesz, Vec(Vec::Zero(2)), 1.0, {0.5, 0.25});
  CHECK(at_x.atom_at_x_excluded);
  CHECK_FALSE(at_x.warning.empty());
}

TEST_CASE("principal values of the generic configuration do not settle") {
  const Kernel h3 = huovinen_kernel(3);
  const Measure generic =
      make_line_configuration<double>(Vec(Vec::Zero(2)), {0.0, 0.9, 2.1}, {0.5, 0.5, 0.5}, 3.0, 1.0 / 4096);
  const PvResult pv = pv_estimator(generic, h3, v2(0.03, 0), 1.0, geometric_radii(0.5, 0.6, 8));
  CHECK(pv.cauchy_defect > 0.05);
}

TEST_CASE("pv to sla bound") {
  const Kernel riesz = riesz_kernel(2);
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), Vec(Vec::Zero(2)), 1.0, 10.0, 1.0 / 256);
  const auto flat = pv_to_sla_check(line, riesz, Vec(Vec::Zero(2)), 1.0, 1.0, 0.1, 1e-9, 3.0);
  CHECK(flat.lhs <= 1e-12);
  CHECK(flat.holds);

  const Measure atom = single_atom(0.7, 0.2);
  const auto probe = pv_to_sla_check(atom, riesz, Vec(Vec::Zero(2)), 1.0, 1.0, 0.1, 10.0, 10.0);
  const auto check = pv_to_sla_check(atom, riesz, Vec(Vec::Zero(2)), 1.0, 1.0, 0.1, probe.delta_observed, probe.density_observed);
  CHECK(check.holds);
  CHECK_THROWS_AS(pv_to_sla_check(atom, riesz, Vec(Vec::Zero(2)), 1.0, 1.0, 0.1, 0.5 * probe.delta_observed, 10.0), RefusalError);
  CHECK_THROWS_AS(pv_to_sla_check(atom, riesz, Vec(Vec::Zero(2)), 1.0, 1.0, 0.6, 10.0, 10.0), InputError);
}

TEST_CASE("best epsilon sits near sqrt(delta / k)") {
  std::vector<double> grid;
  for (int i = 1; i < 500; ++i) grid.push_back(i * 1e-3);
  for (double delta : {1e-4, 1e-3, 1e-2}) {
    const double k = 2.0;
    const double eps = best_epsilon(grid, 1.0, 1.0, delta, k);
    const double guess = std::sqrt(delta / (k * 2));
    CHECK(eps == doctest::Approx(guess).epsilon(0.35));
  }
}

TEST_CASE("radial test integral") {
  std::mt19937_64 rng(3);
  const Kernel riesz = riesz_kernel(2);
  const Kernel h3 = huovinen_kernel(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Measure nu = random_atoms(rng, 30);
    const RadialProfile psi({0.0, 0.3, 0.7, 1.2}, {2.0, 1.5, -0.5, 0.0});
    const Vec x = v2(0.1 * trial - 1, 0.05);
    for (const Kernel* k : {&riesz, &h3}) {
      const Vec a = radial_test_integral(nu, *k, x, psi);
      const Vec b = radial_layer_cake(nu, *k, x, psi);
      CHECK((a - b).norm() <= 1e-9);
    }
    const double r = 0.8, s = 1.0;
    const Vec sla = sla_functional(nu, riesz, x, r, 0.3, s);
    const Vec direct = radial_test_integral(nu, riesz, x, RadialProfile::from_eta(CutoffEta(0.3), r)) / std::pow(r, s + 1);
    CHECK((sla - direct).norm() <= 1e-14 * (1 + direct.norm()));
  }
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), Vec(Vec::Zero(2)), 1.0, 10.0, 1.0 / 256);
  CHECK(radial_test_integral(line, riesz, v2(0.5, 0), RadialProfile({0.0, 1.0, 2.0}, {1.0, 3.0, 0.0})).norm() <= 1e-12);
}
