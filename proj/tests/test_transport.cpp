#include "doctest.h"

#include "symlab/generators.hpp"
#include "symlab/transport.hpp"

#include <chrono>
#include <random>

using namespace symlab;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec origin() { return Vec::Zero(2); }
Mat x_axis() { return (Mat(2, 1) << 1, 0).finished(); }
Mat y_axis() { return (Mat(2, 1) << 0, 1).finished(); }

Measure atom_at(const Vec& p, double w = 1) { return make_atomic_measure<double>(Mat(p), (Vec(1) << w).finished()); }

LipschitzDualInstance instance(const Mat& p, const Vec& a, double r = 1) {
  LipschitzDualInstance inst;
  inst.center = origin();
  inst.radius = r;
  inst.s = 1;
  inst.positions = p;
  inst.coefficients = a;
  inst.mu_mass = a.cwiseMax(0.0).sum();
  inst.nu_mass = (-a).cwiseMax(0.0).sum();
  return inst;
}

LipschitzDualInstance random_instance(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-2.8, 2.8);
  std::uniform_real_distribution<double> w(-1, 1);
  Mat p(2, n);
  Vec a(n);
  for (int i = 0; i < n; ++i) {
    p.col(i) = v2(u(rng), u(rng));
    a(i) = w(rng);
  }
  return instance(p, a);
}

CandidateFamily flat_family(double h_ratio) {
  CandidateFamily f;
  f.h_ratio = h_ratio;
  return f;
}

}  // namespace

TEST_CASE("c coefficient") {
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), origin(), 0.5, 3.0, 1.0 / 64);
  CHECK(c_coefficient(line, line, origin(), 0.5) == doctest::Approx(1));
  CHECK(c_coefficient(line, line.scaled(2.0), origin(), 0.5) == doctest::Approx(0.5));
  CHECK(c_coefficient(line, atom_at(v2(2.5, 2.5)), origin(), 0.25) == 0);
}

TEST_CASE("instances") {
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), origin(), 0.5, 3.0, 1.0 / 64);
  CHECK(build_instance(line, line, origin(), 0.5, 1).size() == 0);
  const LipschitzDualInstance one = build_instance(atom_at(origin()), atom_at(v2(10, 0)), origin(), 1, 1);
  REQUIRE(one.size() == 1);
  CHECK(one.coefficients(0) == 1);
  CHECK(build_instance(atom_at(v2(5, 0)), atom_at(v2(10, 0)), origin(), 1, 1).size() == 0);
  const LipschitzDualInstance inst = build_instance(line, atom_at(v2(0.1, 0)), v2(0.2, 0), 0.3, 1);
  for (Eigen::Index i = 0; i < inst.size(); ++i) {
    CHECK((inst.positions.col(i) - inst.center).norm() < 4 * 0.3);
    CHECK(std::isfinite(inst.coefficients(i)));
  }
}

TEST_CASE("small dual values") {
  CHECK(lipschitz_dual_value(instance(Mat(origin()), Vec::Ones(1))).value == doctest::Approx(4));
  const LipschitzDualInstance pair = instance((Mat(2, 2) << 1, -1, 0, 0).finished(), v2(1, -1));
  CHECK(lipschitz_dual_value(pair).value == doctest::Approx(2));
  CHECK(brute_force_dual_value(pair) == doctest::Approx(2));
  const LipschitzDualInstance empty = instance(Mat(2, 0), Vec(0));
  CHECK(lipschitz_dual_value(empty).value == 0);
  CHECK(brute_force_dual_value(empty) == 0);
  CHECK(brute_force_dual_value(instance(Mat(origin()), (Vec(1) << -0.7).finished())) == doctest::Approx(2.8));
  CHECK(brute_force_dual_value(instance((Mat(2, 2) << 0, 1, 0, 0).finished(), Vec::Zero(2))) == 0);
}

TEST_CASE("exact solver agrees with vertex enumeration") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const LipschitzDualInstance inst = random_instance(rng, 1 + trial % 6);
    const DualSolution sol = lipschitz_dual_value(inst);
    CHECK(std::abs(sol.value - brute_force_dual_value(inst)) <= 1e-9);
    CHECK(audit_solution(inst, sol).ok);
  }
}

TEST_CASE("dual value properties on larger instances") {
  std::mt19937_64 rng(9);
  for (int n : {30, 120, 600}) {
    LipschitzDualInstance inst = random_instance(rng, n);
    const DualSolution sol = lipschitz_dual_value(inst);
    const FeasibilityAudit audit = audit_solution(inst, sol);
    CHECK(audit.ok);
    CHECK(audit.min_pair_slack >= -1e-10);
    CHECK(audit.min_boundary_slack >= -1e-10);
    CHECK(audit.max_abs_f <= 4 + 1e-10);
    CHECK(sol.certificate_gap <= 1e-8);

    LipschitzDualInstance scaled = inst;
    scaled.coefficients *= 3.5;
    CHECK(lipschitz_dual_value(scaled).value == doctest::Approx(3.5 * sol.value).epsilon(1e-10));

    LipschitzDualInstance padded = inst;
    padded.positions.conservativeResize(2, n + 3);
    padded.coefficients.conservativeResize(n + 3);
    for (int j = 0; j < 3; ++j) {
      padded.positions.col(n + j) = v2(0.5 * j - 0.5, 1.7);
      padded.coefficients(n + j) = 0;
    }
    CHECK(lipschitz_dual_value(padded).value == doctest::Approx(sol.value).epsilon(1e-10));
  }
}

TEST_CASE("alpha of a flat line") {
  const double r = 0.25;
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), origin(), 0.5, 3.0, r / 200);
  const Vec x = v2(0.1, 0);
  const AlphaResult flat = alpha_flat(line, x, r, 1, flat_family(200));
  CHECK(flat.value <= 0.02);

  const AlphaResult general = alpha_general(line, x, r, 1, flat_family(200));
  CHECK(general.value <= flat.value + 1e-6);

  CandidateFamily vertical;
  vertical.kind = FamilyKind::ExplicitList;
  vertical.include_zero = false;
  vertical.explicit_candidates = {make_flat_measure<double>(2, 1, y_axis(), x, 0.5, 1.5, r / 50)};
  const double cross = alpha_general(make_flat_measure<double>(2, 1, x_axis(), origin(), 0.5, 3.0, r / 50), x, r, 1,
                                     vertical).value;
  CHECK(cross >= 0.1);

  CandidateFamily both = vertical;
  both.explicit_candidates.push_back(make_flat_measure<double>(2, 1, x_axis(), x, 0.5, 1.5, r / 50));
  CHECK(alpha_general(make_flat_measure<double>(2, 1, x_axis(), origin(), 0.5, 3.0, r / 50), x, r, 1, both).value <=
        cross);
}

TEST_CASE("alpha of a single atom") {
  CandidateFamily f = flat_family(50);
  f.refine = false;
  f.n_angles = 36;
  const AlphaResult a = alpha_flat(atom_at(origin()), origin(), 1.0, 1, f);
  CHECK(a.value > 0.1);
  CHECK(a.value <= 4 * 2);
}

TEST_CASE("zero candidate grows at non-integer s") {
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), origin(), 0.5, 3.0, 1.0 / 2048);
  CandidateFamily zero;
  zero.kind = FamilyKind::Zero;
  const double a1 = alpha_general(line, origin(), 0.4, 1.5, zero).value;
  const double a2 = alpha_general(line, origin(), 0.1, 1.5, zero).value;
  CHECK(a1 == doctest::Approx(zero_candidate_value(line, origin(), 0.4, 1.5)).epsilon(1e-10));
  CHECK(a2 / a1 == doctest::Approx(2).epsilon(0.01));
}

TEST_CASE("spike measures against spike candidates") {
  const double r = 0.25;
  const Measure spike = make_spike_measure<double>(3, 3, 0.0, origin(), 0.5, 2.5, r / 200);
  CandidateFamily spikes;
  spikes.kind = FamilyKind::Spike;
  spikes.h_ratio = 200;
  spikes.refine = false;
  const Vec x = v2(0.125, 0);
  CHECK(alpha_general(spike, x, r, 1, spikes).value <= 0.02);

  CandidateFamily lines = spikes;
  lines.h_ratio = 25;
  lines.m_values = {1};
  lines.include_zero = false;
  const Measure coarse = make_spike_measure<double>(3, 3, 0.0, origin(), 0.5, 2.5, 1.0 / 128);
  const AlphaScan scan = alpha_scan(coarse, origin(), {0.5, 0.25}, 1, lines);
  CHECK(scan.scan.tail_min >= 0.1);
}

TEST_CASE("scaling invariance") {
  CandidateFamily f = flat_family(25);
  f.refine = false;
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), origin(), 0.5, 3.0, 1.0 / 256);
  CHECK(scaling_invariance_check(line, v2(0.2, 0), 0.5, 1, f).gap <= 1e-8);
  CandidateFamily spikes;
  spikes.kind = FamilyKind::Spike;
  spikes.h_ratio = 16;
  spikes.refine = false;
  const Measure spike = make_spike_measure<double>(3, 3, 0.0, origin(), 0.5, 3.0, 1.0 / 256);
  CHECK(scaling_invariance_check(spike, origin(), 0.25, 1, spikes).gap <= 1e-8);
  f.n_angles = 36;
  CHECK(scaling_invariance_check(atom_at(v2(0.3, 0.1)), v2(0.3, 0.1), 0.2, 1, f).gap <= 1e-8);
}

TEST_CASE("alpha scan on a flat line") {
  const Measure line = make_flat_measure<double>(2, 1, x_axis(), origin(), 0.5, 3.0, 1.0 / 2048);
  CandidateFamily f = flat_family(200);
  f.refine = false;
  const AlphaScan scan = alpha_scan(line, origin(), geometric_radii(0.5, 0.5, 3), 1, f);
  CHECK(scan.scan.tail_max <= 0.02);
  CHECK(scan.results.size() == 3);
  for (const auto& res : scan.results) CHECK(res.gap <= 1e-8);
}

TEST_CASE("cantor measure is far from the zero measure") {
  const double s = 1.5;
  const Measure cantor = make_cantor_product_measure<double>(s, 5, 1.0);
  CandidateFamily zero;
  zero.kind = FamilyKind::Zero;
  const Eigen::Index row = (cantor.size() / 32 - 1) / 2;
  const Vec x = cantor.position(row);
  const AlphaScan scan = alpha_scan(cantor, x, geometric_radii(0.2, 0.6, 3), s, zero);
  CHECK(scan.scan.tail_min >= 0.1);
}
