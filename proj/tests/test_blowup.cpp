#include "doctest.h"

#include "symlab/blowup.hpp"
#include "symlab/generators.hpp"

#include <random>

using namespace symlab;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec origin() { return Vec::Zero(2); }
Mat x_axis() { return (Mat(2, 1) << 1, 0).finished(); }

}  // namespace

TEST_CASE("test net in the plane") {
  const TestNet net = build_test_net<double>(2, 1.0);
  CHECK(net.size() >= 100);
  CHECK(net.size() <= 500);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-4.5, 4.5);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec y = v2(u(rng), u(rng));
    std::vector<double> active(net.size(), 0.0);
    net.for_each_active(y, [&](int m, double g) { active[static_cast<std::size_t>(m)] = g; });
    for (std::size_t m = 0; m < net.size(); ++m) {
      const double g = net(m, y);
      CHECK(g == active[m]);
      CHECK(std::abs(g) <= 4);
      if (y.norm() >= 4) CHECK(g == 0);
    }
  }
  for (int q = 0; q < 360; ++q) {
    const Vec y = 4 * v2(std::cos(q * kPi / 180), std::sin(q * kPi / 180));
    for (std::size_t m = 0; m < net.size(); ++m) CHECK(net(m, y) == 0);
  }
}

TEST_CASE("net members are 1-Lipschitz and interpolate Lipschitz functions") {
  const double eps = 0.5;
  const TestNet net = build_test_net<double>(2, eps);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-4, 4);
  const Vec c = v2(0.3, -0.4);
  auto f = [&](const Vec& y) { return std::max(0.0, 3.0 - (y - c).norm()) - std::max(0.0, 1.0 - (y + c).norm()); };
  for (int trial = 0; trial < 3000; ++trial) {
    const Vec y = v2(u(rng), u(rng));
    const Vec z = y + 0.01 * v2(u(rng), u(rng));
    double interp = 0;
    net.for_each_active(y, [&](int m, double g) {
      interp += f(net.nodes[static_cast<std::size_t>(m)]) * g / net.amplitude;
      CHECK(std::abs(g - net(static_cast<std::size_t>(m), z)) <= (y - z).norm() + 1e-15);
    });
    CHECK(std::abs(interp - f(y)) <= eps);
  }
}

TEST_CASE("test net refuses oversized requests") {
  CHECK_THROWS_AS(build_test_net<double>(3, 0.01), RefusalError);
  CHECK_THROWS_AS(build_test_net<double>(2, 0.0), InputError);
}

TEST_CASE("rescale") {
  const Measure spike = make_spike_measure<double>(3, 3, 0.0, origin(), 0.5, 3.0, 1.0 / 256);
  const Measure same = rescale(spike, origin(), 1.0, 1.0);
  CHECK(same.positions() == spike.positions());
  CHECK(same.weights() == spike.weights());

  const Vec a = v2(0.375, -0.25);
  for (double s : {1.0, 2.0}) {
    const Measure twice = rescale(rescale(spike, a, 0.5, s), origin(), 0.25, s);
    const Measure once = rescale(spike, a, 0.125, s);
    CHECK(twice.positions() == once.positions());
    CHECK(twice.weights() == once.weights());
  }

  const Measure line = make_flat_measure<double>(2, 1, x_axis(), origin(), 0.5, 3.0, 1.0 / 256);
  const Measure blown = rescale(line, v2(0.5, 0), 0.25, 1.0);
  CHECK(ball_mass(blown, origin(), 2.0) == doctest::Approx(ball_mass(line, v2(0.5, 0), 0.5) / 0.25));
  CHECK(std::abs(ball_mass(blown, origin(), 2.0) - 2.0) <= 0.1);
}

TEST_CASE("moments of a flat line are constant") {
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), origin(), 0.5, 3.0, 1.0 / 4096);
  const TestNet net = build_test_net<double>(2, 1.0);
  const auto seq = BlowupSequence::standard(line, v2(0.25, 0), geometric_radii(0.5, 0.5, 6), 1.0);
  const WeakConvergenceReport rep = weak_convergence_diagnostic(seq, net);
  CHECK(rep.moments.rows() == 6);
  CHECK(rep.moments.cols() == static_cast<Eigen::Index>(net.size()));
  CHECK(rep.cauchy_defect <= rep.tolerance);
  CHECK_FALSE(rep.diverging);
  CHECK(rep.moments.cwiseAbs().maxCoeff() > 0);

  const auto doubled = BlowupSequence::standard(line.scaled(2.0), v2(0.25, 0), geometric_radii(0.5, 0.5, 6), 1.0);
  CHECK(weak_convergence_diagnostic(doubled, net).moments == 2.0 * rep.moments);

  const auto proof = BlowupSequence::proof_normalized(line, v2(0.25, 0), geometric_radii(0.5, 0.5, 6), 1.0, 2.0);
  const Mat scaled = weak_convergence_diagnostic(proof, net).moments;
  CHECK((scaled - rep.moments / 6.0).cwiseAbs().maxCoeff() <= 1e-14);

  const auto far = BlowupSequence::standard(line, v2(0.25, 0), {2.0}, 1.0);
  CHECK_THROWS_AS(weak_convergence_diagnostic(far, net), RefusalError);
}

TEST_CASE("cantor blowups at a self-similar point") {
  const double s = 1.5;
  const int depth = 6;
  const Measure cantor = make_cantor_product_measure<double>(s, depth, 0.3);
  const double lambda = cantor_factor<double>(s, depth).ratio;
  const Vec a = v2(0, cantor.resolution() / 2);
  std::vector<double> radii;
  for (int j = 2; j <= 4; ++j) radii.push_back(std::pow(lambda, j));
  const TestNet net = build_test_net<double>(2, 1.0);
  const WeakConvergenceReport rep = weak_convergence_diagnostic(BlowupSequence::standard(cantor, a, radii, s), net);
  CHECK(rep.cauchy_defect <= rep.tolerance);
  CHECK_FALSE(rep.diverging);
}

TEST_CASE("single atom blowups diverge") {
  const Measure atom = make_atomic_measure<double>(Mat(v2(0.1, 0.2)), Vec::Ones(1));
  const TestNet net = build_test_net<double>(2, 1.0);
  const auto seq = BlowupSequence::standard(atom, v2(0.1, 0.2), geometric_radii(1.0, 0.5, 6), 1.0);
  const WeakConvergenceReport rep = weak_convergence_diagnostic(seq, net);
  CHECK(rep.diverging);
  for (Eigen::Index j = 1; j < rep.moments.rows(); ++j)
    CHECK(rep.moments.row(j).maxCoeff() == doctest::Approx(2 * rep.moments.row(j - 1).maxCoeff()));
}

TEST_CASE("tangent symmetry experiments") {
  const std::vector<double> radii = geometric_radii(0.03, 0.7, 5);
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), origin(), 0.5, 3.0, 1.0 / 4096);
  const TangentSymmetryReport flat = tangent_symmetry_experiment(line, riesz_kernel(2), v2(0.25, 0), radii, 1.0, 0.5);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    CHECK(flat.defects[i] <= 1e-12);
    CHECK(flat.sla[i] <= 1e-12);
  }

  const Kernel h3 = huovinen_kernel(3);
  const Measure spike = make_spike_measure<double>(3, 3, 0.0, origin(), 0.5, 3.0, 1.0 / 4096);
  const TangentSymmetryReport sym = tangent_symmetry_experiment(spike, h3, origin(), radii, 1.0, 0.5);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    CHECK(sym.defects[i] <= 1e-12);
    CHECK(sym.sla[i] <= 1e-12);
  }

  const Measure generic =
      make_line_configuration<double>(origin(), {0.0, 0.9, 2.1}, {0.5, 0.5, 0.5}, 3.0, 1.0 / 4096);
  const TangentSymmetryReport gen = tangent_symmetry_experiment(generic, h3, v2(1.0 / 256, 0), radii, 1.0, 0.5);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    CHECK(gen.defects[i] >= 0.02);
    CHECK(gen.sla[i] >= 0.02);
  }
}
