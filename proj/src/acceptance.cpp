#include "symlab/acceptance.hpp"

#include "symlab/functionals.hpp"
#include "symlab/generators.hpp"
#include "symlab/huovinen.hpp"
#include "symlab/kernel.hpp"
#include "symlab/multiplier.hpp"
#include "symlab/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace symlab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << v;
  return out.str();
}

Vec vec2(double a, double b) { return (Vec(2) << a, b).finished(); }

Vec polar2(double radius, double angle) { return vec2(radius * std::cos(angle), radius * std::sin(angle)); }

Mat e1_basis() { return (Mat(2, 1) << 1, 0).finished(); }

constexpr double kDensity = 0.5;
const std::vector<double> kGenericAngles{0.0, 0.9, 2.1};

// Cantor product used by criteria 8, 9 and 10.
constexpr double kCantorS = 1.5;
constexpr int kCantorDepth = 8;
constexpr double kCantorR = 0.01;

const Measure& cantor_measure() {
  static const Measure mu = make_cantor_product_measure<double>(kCantorS, kCantorDepth, kCantorR);
  return mu;
}

/// Support points (j h, c_i) of the Cantor product.
std::vector<Vec> cantor_points(int count) {
  const auto factor = cantor_factor<double>(kCantorS, kCantorDepth);
  const double h = factor.interval_length;
  std::vector<Vec> out;
  const int n = static_cast<int>(factor.centers.size());
  for (int q = 0; q < count; ++q) {
    const int i = (q * (n - 1)) / std::max(1, count - 1);
    const int j = (q % 3 - 1) * 7;
    out.push_back(vec2(j * h, factor.centers[static_cast<std::size_t>(i)]));
  }
  return out;
}

// ---------------------------------------------------------------- 1

CriterionResult lp_oracle(std::uint64_t seed) {
  CriterionResult res{1, "LP oracle equivalence", false, "", 0};
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    LipschitzDualInstance inst;
    const int d = 1 + trial % 3;
    const int n = 1 + static_cast<int>(rng() % 6);
    inst.radius = 0.25 + 2 * std::abs(unit(rng));
    inst.s = 0.5 + std::abs(unit(rng)) * (d - 0.5);
    inst.center = Vec(d);
    for (int k = 0; k < d; ++k) inst.center(k) = unit(rng);
    inst.positions = Mat(d, n);
    inst.coefficients = Vec(n);
    for (int i = 0; i < n; ++i) {
      Vec u(d);
      do {
        for (int k = 0; k < d; ++k) u(k) = unit(rng);
      } while (u.norm() > 1 || u.norm() < 1e-3);
      inst.positions.col(i) = inst.center + 3.9 * inst.radius * std::pow(std::abs(unit(rng)), 0.5) * u / u.norm();
      inst.coefficients(i) = unit(rng);
    }
    const double lp = lipschitz_dual_value(inst).value;
    const double brute = brute_force_dual_value(inst);
    worst = std::max(worst, std::abs(lp - brute));
  }
  res.seconds = seconds_since(t0);
  res.passed = worst <= 1e-9 && res.seconds <= 10;
  res.detail = "max |lp - brute| = " + fmt(worst) + " (<= 1e-9), 200 instances in " + fmt(res.seconds) + " s (<= 10)";
  return res;
}

// ---------------------------------------------------------------- 2

struct ScalingCase {
  std::string label;
  Measure mu;
  Vec x;
  double r;
  double s;
  CandidateFamily family;
};

CandidateFamily flat_family(double h_ratio) {
  CandidateFamily f;
  f.kind = FamilyKind::Flat;
  f.include_zero = false;
  f.h_ratio = h_ratio;
  f.refine = false;
  return f;
}

CandidateFamily spike_family(double h_ratio) {
  CandidateFamily f;
  f.kind = FamilyKind::Spike;
  f.h_ratio = h_ratio;
  f.refine = false;
  return f;
}

CandidateFamily explicit_family(std::vector<Measure> candidates) {
  CandidateFamily f;
  f.kind = FamilyKind::ExplicitList;
  f.explicit_candidates = std::move(candidates);
  return f;
}

std::vector<ScalingCase> scaling_cases() {
  std::vector<ScalingCase> cases;
  const Vec o = Vec::Zero(2);
  {
    const Measure line = make_flat_measure<double>(2, 1, e1_basis(), o, kDensity, 3.0, 1.0 / 640);
    for (double r : {0.5, 0.1, 0.02}) cases.push_back({"flat line", line, vec2(0.3, 0), r, 1, flat_family(25)});
    cases.push_back({"flat line, tilted candidates", line, vec2(-0.2, 0), 0.2, 1,
                     explicit_family({make_flat_measure<double>(2, 1, (Mat(2, 1) << 0.6, 0.8).finished(), vec2(-0.2, 0),
                                                                kDensity, 1.0, 1.0 / 320)})});
    CandidateFamily zero;
    zero.kind = FamilyKind::Zero;
    cases.push_back({"flat line, zero family", line, vec2(0.1, 0), 0.3, 1.5, zero});
  }
  {
    const Measure spike = make_spike_measure<double>(3, 3, 0.0, o, kDensity, 3.0, 1.0 / 320);
    cases.push_back({"spike center", spike, o, 0.25, 1, spike_family(16)});
    cases.push_back({"spike off-center", spike, polar2(0.1, kPi / 3), 0.1, 1, spike_family(16)});
    cases.push_back({"spike, flat family", spike, vec2(0.05, 0), 0.2, 1, flat_family(16)});
  }
  {
    const Measure one_line = make_spike_measure<double>(3, 1, 0.4, o, kDensity, 3.0, 1.0 / 320);
    cases.push_back({"one-line spike", one_line, polar2(0.5, 0.4), 0.3, 1, flat_family(16)});
  }
  {
    Mat p(2, 4);
    p << 0.0, 0.3, -0.2, 0.1, 0.0, 0.1, 0.25, -0.3;
    const Measure atoms = make_atomic_measure<double>(p, (Vec(4) << 0.2, 0.1, 0.3, 0.15).finished());
    Mat q(2, 2);
    q << 0.05, -0.1, 0.0, 0.2;
    const Measure other = make_atomic_measure<double>(q, (Vec(2) << 0.5, 0.25).finished());
    cases.push_back({"atoms", atoms, vec2(0.05, 0.02), 0.15, 1, explicit_family({other})});
    cases.push_back({"atoms, flat family", atoms, vec2(-0.1, 0.1), 0.1, 1, flat_family(40)});
    cases.push_back({"atoms off-support", atoms, vec2(2.0, 2.0), 0.1, 1.5, explicit_family({other})});
  }
  {
    const Measure& cantor = cantor_measure();
    const auto pts = cantor_points(10);
    const double h = cantor.resolution();
    const Measure row = make_flat_measure<double>(2, 1, e1_basis(), pts[3], 1.0, 0.0064, h);
    cases.push_back({"cantor, horizontal candidate", cantor, pts[3], 0.0015, kCantorS, explicit_family({row})});
    cases.push_back({"cantor, self candidate", cantor, pts[6], 0.002, kCantorS, explicit_family({cantor})});
  }
  {
    const Measure lattice = make_lattice_lines_measure<double>(vec2(1, 0), vec2(0.1, 0.3), 1.0, 0.5, 3.0, 1.0 / 320);
    cases.push_back({"lattice lines", lattice, vec2(0.2, 0.3), 0.1, 1, flat_family(25)});
    cases.push_back({"lattice lines between", lattice, vec2(-0.4, 0.15), 0.05, 1, flat_family(25)});
  }
  {
    const Measure tiling = make_triangle_tiling_measure<double>(0.5, 0.2, 1.0, 3.0, 1.0 / 320);
    cases.push_back({"triangle tiling", tiling, o, 0.1, 1, flat_family(25)});
    cases.push_back({"triangle tiling, spikes", tiling, o, 0.08, 1, spike_family(16)});
  }
  {
    const Measure generic = make_line_configuration<double>(o, kGenericAngles, {kDensity, kDensity, kDensity}, 3.0, 1.0 / 320);
    cases.push_back({"generic lines", generic, o, 0.2, 1, spike_family(16)});
    cases.push_back({"generic lines off-center", generic, polar2(0.15, 0.9), 0.1, 1, flat_family(16)});
  }
  return cases;
}

CriterionResult scaling_invariance() {
  CriterionResult res{2, "Scaling invariance", false, "", 0};
  const auto t0 = Clock::now();
  double worst = 0;
  std::string worst_label;
  const auto cases = scaling_cases();
  for (const auto& c : cases) {
    const ScalingCheck check = scaling_invariance_check(c.mu, c.x, c.r, c.s, c.family);
    if (check.gap >= worst) {
      worst = check.gap;
      worst_label = c.label;
    }
  }
  res.seconds = seconds_since(t0);
  res.passed = worst <= 1e-8;
  res.detail = "max gap " + fmt(worst) + " (<= 1e-8, " + worst_label + ") over " + std::to_string(cases.size()) +
               " triples";
  return res;
}

// ---------------------------------------------------------------- 3

const std::vector<double>& scan_radii() {
  static const std::vector<double> radii = geometric_radii(1.0, 0.5, 8);
  return radii;
}

CriterionResult flat_detection() {
  CriterionResult res{3, "Riesz flat detection", false, "", 0};
  const auto t0 = Clock::now();
  const auto& radii = scan_radii();
  double flat_worst = 0;
  for (int k = 0; k < 10; ++k) {
    const Vec x = vec2(k * radii.front() / 4, 0);
    MeasureAtScale line = [&x](double r) {
      return make_flat_measure<double>(2, 1, e1_basis(), x, kDensity, 5 * r, r / 200);
    };
    CandidateFamily fam = flat_family(200);
    fam.refine = true;
    const AlphaScan scan = alpha_scan(line, x, radii, 1.0, fam);
    for (const auto& v : scan.scan.values) flat_worst = std::max(flat_worst, v(0));
  }
  double spike_tail = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 10; ++k) {
    const Vec x = vec2(k * radii.back() / 4, 0);
    MeasureAtScale spike = [&x](double r) {
      return make_spike_measure<double>(3, 3, 0.0, Vec::Zero(2), kDensity, x.norm() + 5 * r, r / 25);
    };
    CandidateFamily fam = flat_family(25);
    fam.refine = true;
    const AlphaScan scan = alpha_scan(spike, x, radii, 1.0, fam);
    spike_tail = std::min(spike_tail, scan.scan.tail_min);
  }
  res.seconds = seconds_since(t0);
  res.passed = flat_worst <= 0.02 && spike_tail >= 0.05;
  res.detail = "flat line max alpha " + fmt(flat_worst) + " (<= 0.02); spike min tail alpha " + fmt(spike_tail) +
               " (>= 0.05)";
  return res;
}

// ---------------------------------------------------------------- 4

constexpr double kSpikeH = 1.0 / 2048;

std::vector<Vec> spike_support_points() {
  // Atoms of the spike grid: the center and points on each of the three lines.
  std::vector<Vec> out{Vec::Zero(2)};
  const int steps[] = {41, 205, 512, 97, 300, 11, 777, 150, 64};
  for (int q = 0; q < 9; ++q) {
    const double angle = (q % 3) * kPi / 3 + (q % 2 ? kPi : 0.0);
    out.push_back(polar2(steps[q] * kSpikeH, angle));
  }
  return out;
}

CriterionResult spike_symmetry() {
  CriterionResult res{4, "Huovinen spike symmetry", false, "", 0};
  const auto t0 = Clock::now();
  const Kernel omega = huovinen_kernel(3);
  const auto radii = geometric_radii(0.5, 0.5, 6);
  const Measure spike = make_spike_measure<double>(3, 3, 0.0, Vec::Zero(2), kDensity, 1.5, kSpikeH);
  double worst_ratio = 0;
  for (const auto& p : spike_support_points()) {
    const DefectReport d = symmetry_defect(spike, omega, p, radii, 1.0);
    worst_ratio = std::max(worst_ratio, d.value / (3 * d.error_estimate));
  }
  const Measure generic =
      make_line_configuration<double>(Vec::Zero(2), kGenericAngles, {kDensity, kDensity, kDensity}, 1.5, kSpikeH);
  double generic_best = 0;
  for (double angle : kGenericAngles)
    for (int step : {0, 64, 205, 512}) {
      const DefectReport d = symmetry_defect(generic, omega, polar2(step * kSpikeH, angle), radii, 1.0);
      generic_best = std::max(generic_best, d.value);
    }
  res.seconds = seconds_since(t0);
  res.passed = worst_ratio <= 1 && generic_best >= 0.05;
  res.detail = "spike max defect / (3 x estimate) = " + fmt(worst_ratio) + " (<= 1); generic max defect " +
               fmt(generic_best) + " (>= 0.05)";
  return res;
}

// ---------------------------------------------------------------- 5

CriterionResult angle_equation() {
  CriterionResult res{5, "Angle equation roots", false, "", 0};
  const auto t0 = Clock::now();
  double worst = 0;
  bool counts = true;
  for (int k : {3, 5, 7}) {
    const auto roots = huovinen_angle_roots(k);
    std::vector<double> expected;
    for (int p = 1; kPi * p / k < kPi / 2; ++p) expected.push_back(kPi * p / k);
    if (roots.size() != expected.size()) {
      counts = false;
      continue;
    }
    for (std::size_t i = 0; i < roots.size(); ++i) worst = std::max(worst, std::abs(roots[i] - expected[i]));
  }
  res.seconds = seconds_since(t0);
  res.passed = counts && worst <= 1e-10;
  res.detail = std::string(counts ? "root sets match in size" : "root count mismatch") + ", max error " + fmt(worst) +
               " (<= 1e-10)";
  return res;
}

// ---------------------------------------------------------------- 6

CriterionResult center_balance_check() {
  CriterionResult res{6, "Center balance", false, "", 0};
  const auto t0 = Clock::now();
  double equal_worst = 0;
  double unequal_worst = 0;
  for (int n : {3, 5}) {
    std::vector<double> angles, weights;
    alternating_rays(n, 0.7, 0.7, angles, weights);
    equal_worst = std::max(equal_worst, std::abs(center_balance(n, angles, weights)));
    const double a = 1.3, b = 0.4;
    alternating_rays(n, a, b, angles, weights);
    unequal_worst = std::max(unequal_worst, std::abs(std::abs(center_balance(n, angles, weights)) - n * std::abs(a - b)));
  }
  res.seconds = seconds_since(t0);
  res.passed = equal_worst <= 1e-12 && unequal_worst <= 1e-12;
  res.detail = "equal weights |balance| " + fmt(equal_worst) + ", unequal ||balance| - n|a-b|| " + fmt(unequal_worst) +
               " (<= 1e-12)";
  return res;
}

// ---------------------------------------------------------------- 7

CriterionResult multiplier_check() {
  CriterionResult res{7, "Multiplier", false, "", 0};
  const auto t0 = Clock::now();
  const Kernel riesz = riesz_kernel(2);
  double riesz_err = 0;
  double real_max = 0;
  for (const Vec& xi : sphere_nodes(2, 16)) {
    const MultiplierValue m = multiplier(riesz, xi);
    for (int j = 0; j < 2; ++j) {
      const std::complex<double> expected(0.0, -2 * kPi * xi(j));
      riesz_err = std::max(riesz_err, std::abs(m.value(j) - expected));
      real_max = std::max(real_max, std::abs(m.value(j).real()));
    }
  }
  const Kernel coord = coordinate_kernel();
  const double at_axis = multiplier(coord, vec2(0, 1)).value.norm();
  double off_axis_min = std::numeric_limits<double>::infinity();
  for (const Vec& xi : sphere_nodes(2, 16))
    if (std::abs(xi(0)) >= 0.3) off_axis_min = std::min(off_axis_min, multiplier(coord, xi).value.norm());
  res.seconds = seconds_since(t0);
  res.passed = riesz_err <= 1e-6 && real_max <= 1e-8 && at_axis <= 1e-8 && off_axis_min >= 0.5 && res.seconds <= 30;
  res.detail = "riesz error " + fmt(riesz_err) + " (<= 1e-6), real parts " + fmt(real_max) +
               " (<= 1e-8); coordinate |m(0,1)| " + fmt(at_axis) + " (<= 1e-8), min off-axis " + fmt(off_axis_min) +
               " (>= 0.5); " + fmt(res.seconds) + " s (<= 30)";
  return res;
}

// ---------------------------------------------------------------- 8

CriterionResult cantor_sharpness() {
  CriterionResult res{8, "Cantor sharpness example", false, "", 0};
  const auto t0 = Clock::now();
  const Measure& mu = cantor_measure();
  const Kernel omega = coordinate_kernel();
  const auto radii = geometric_radii(0.004, 0.5, 4);
  double worst_ratio = 0;
  double dens_lo = std::numeric_limits<double>::infinity();
  double dens_hi = 0;
  for (const auto& p : cantor_points(10)) {
    const DefectReport d = symmetry_defect(mu, omega, p, radii, kCantorS);
    const double limit = 3 * d.error_estimate;
    worst_ratio = std::max(worst_ratio, limit > 0 ? d.value / limit : (d.value > 0 ? INFINITY : 0.0));
    const ScanResult dens = density_scan(mu, p, geometric_radii(0.008, 0.5, 5), kCantorS);
    dens_lo = std::min(dens_lo, dens.tail_min);
    dens_hi = std::max(dens_hi, dens.tail_max);
  }
  res.seconds = seconds_since(t0);
  res.passed = worst_ratio <= 1 && dens_lo >= 0.1 && dens_hi <= 10;
  res.detail = "max defect / (3 x estimate) = " + fmt(worst_ratio) + " (<= 1); density tail in [" + fmt(dens_lo) +
               ", " + fmt(dens_hi) + "] (within [0.1, 10])";
  return res;
}

// ---------------------------------------------------------------- 9 and 10

struct Experiment {
  std::string label;
  Measure mu;
  Kernel kernel;
  Vec x;
  std::vector<double> radii;
  double s;
  double tau;
};

std::vector<Experiment> pv_experiments() {
  const Vec o = Vec::Zero(2);
  std::vector<Experiment> out;
  const auto radii = geometric_radii(0.25, 0.5, 5);
  out.push_back({"flat line", make_flat_measure<double>(2, 1, e1_basis(), o, kDensity, 1.5, kSpikeH), riesz_kernel(2),
                 vec2(0.125, 0), radii, 1, 0.5});
  const Measure spike = make_spike_measure<double>(3, 3, 0.0, o, kDensity, 1.5, kSpikeH);
  out.push_back({"spike center", spike, huovinen_kernel(3), o, radii, 1, 0.5});
  out.push_back({"spike off-center", spike, huovinen_kernel(3), polar2(64 * kSpikeH, kPi / 3), radii, 1, 0.5});
  const Measure generic = make_line_configuration<double>(o, kGenericAngles, {kDensity, kDensity, kDensity}, 1.5, kSpikeH);
  out.push_back({"generic center", generic, huovinen_kernel(3), o, radii, 1, 0.5});
  out.push_back({"generic off-center", generic, huovinen_kernel(3), polar2(8 * kSpikeH, 0.9), radii, 1, 0.5});
  out.push_back({"cantor", cantor_measure(), coordinate_kernel(), cantor_points(10)[4], geometric_radii(0.008, 0.5, 5),
                 kCantorS, 0.5});
  Mat p(2, 1);
  p << 0, 0;
  out.push_back({"single atom", make_atomic_measure<double>(p, (Vec(1) << 0.3).finished()), riesz_kernel(2),
                 vec2(0.5, 0), geometric_radii(0.1, 0.5, 6), 1, 0.5});
  return out;
}

CriterionResult pv_bound() {
  CriterionResult res{9, "Principal value to SLA bound", false, "", 0};
  const auto t0 = Clock::now();
  std::vector<double> grid;
  for (int i = 1; i < 50; ++i) grid.push_back(0.01 * i);
  bool all_hold = true;
  double worst_tail_ratio = 0;
  double worst_constant = 0;
  int checks = 0;
  for (const auto& e : pv_experiments()) {
    const ScanResult sla = sla_scan(e.mu, e.kernel, e.x, e.radii, e.tau, e.s);
    for (std::size_t i = 0; i < e.radii.size(); ++i) {
      const double r = e.radii[i];
      const double delta = pv_shell_sup(e.mu, e.kernel, e.x, e.s, r);
      double mass = 0;
      for (int a : e.mu.atoms_in_ball(e.x, r))
        if (!(e.mu.position(a) - e.x).isZero(0)) mass += e.mu.weight(a);
      const double k_ball = mass / std::pow(r, e.s);
      const double eps_ball = best_epsilon(grid, e.kernel.sup_on_sphere(), e.s, delta, k_ball);
      const PvSlaCheck check = pv_to_sla_check(e.mu, e.kernel, e.x, e.s, r, eps_ball, delta, k_ball);
      all_hold = all_hold && check.holds;
      ++checks;
      if (i < sla.tail_begin()) continue;
      // The eta window averages ball integrals over radii in [(1 - tau) r, r].
      const double k_sla = mass / std::pow((1 - e.tau) * r, e.s);
      const double eps = best_epsilon(grid, e.kernel.sup_on_sphere(), e.s, delta, k_sla);
      const double constant = pv_sla_constant(e.kernel.sup_on_sphere(), e.s, eps);
      const double bound = pv_sla_bound(e.kernel.sup_on_sphere(), e.s, eps, delta, k_sla);
      worst_constant = std::max(worst_constant, constant);
      const double value = sla.values[i].norm();
      if (value > 0) worst_tail_ratio = std::max(worst_tail_ratio, bound > 0 ? value / bound : INFINITY);
    }
  }
  res.seconds = seconds_since(t0);
  res.passed = all_hold && worst_tail_ratio <= 1 && worst_constant <= 10;
  res.detail = std::string(all_hold ? "all " : "not all ") + std::to_string(checks) +
               " ball checks hold; max SLA tail / bound = " + fmt(worst_tail_ratio) + " (<= 1), max C = " +
               fmt(worst_constant) + " (<= 10)";
  return res;
}

constexpr double kSmallSla = 0.05;
constexpr double kSmallAlpha = 0.05;

struct VerdictCase {
  std::string label;
  std::function<Measure(double)> measure;
  Kernel kernel;
  Vec x;
  std::vector<double> radii;
  double s;
  CandidateFamily family;
};

std::vector<VerdictCase> verdict_cases() {
  const Vec o = Vec::Zero(2);
  std::vector<VerdictCase> out;
  const auto radii = scan_radii();
  {
    const Vec x = vec2(0.25, 0);
    CandidateFamily fam = flat_family(200);
    fam.refine = true;
    out.push_back({"flat line", [x](double r) { return make_flat_measure<double>(2, 1, e1_basis(), x, kDensity, 5 * r, r / 200); },
                   riesz_kernel(2), x, radii, 1, fam});
  }
  // Spike centers lie on the offset grid 0.25 r for every radius down to 1/128; below that the ball sees one line.
  for (const Vec& x : {Vec(o), polar2(1.0 / 32, kPi / 3)}) {
    CandidateFamily fam = spike_family(64);
    fam.refine = true;
    out.push_back({"spike", [x](double r) { return make_spike_measure<double>(3, 3, 0.0, Vec::Zero(2), kDensity, x.norm() + 5 * r, r / 64); },
                   huovinen_kernel(3), x, geometric_radii(0.125, 0.5, 8), 1, fam});
  }
  {
    const Measure& cantor = cantor_measure();
    out.push_back({"cantor", [&cantor](double) { return cantor; }, coordinate_kernel(), cantor_points(10)[5],
                   geometric_radii(0.0023, 0.7, 6), kCantorS, explicit_family({cantor})});
  }
  {
    // Off-center by rho = 1/256: every radius still reaches the crossing.
    const double rho = 1.0 / 256;
    const Vec x = vec2(rho, 0);
    CandidateFamily fam = spike_family(25);
    fam.refine = true;
    out.push_back({"generic lines",
                   [rho](double r) {
                     return make_line_configuration<double>(Vec::Zero(2), kGenericAngles, {kDensity, kDensity, kDensity},
                                                            rho + 5 * r, r / 25);
                   },
                   huovinen_kernel(3), x, radii, 1, fam});
  }
  {
    // Off the support with 4r below the distance to the atom.
    Mat p(2, 1);
    p << 0, 0;
    const Measure atom = make_atomic_measure<double>(p, (Vec(1) << 0.3).finished());
    out.push_back({"single atom", [atom](double) { return atom; }, riesz_kernel(2), vec2(0.4, 0),
                   geometric_radii(0.08, 0.5, 8), 1, spike_family(25)});
  }
  return out;
}

CriterionResult verdict_agreement() {
  CriterionResult res{10, "alpha / SLA verdict agreement", false, "", 0};
  const auto t0 = Clock::now();
  bool agree = true;
  std::ostringstream detail;
  for (const auto& c : verdict_cases()) {
    // Same per-radius measures as the alpha scan.
    ScanResult sla;
    for (double r : c.radii) {
      sla.radii.push_back(r);
      sla.values.push_back(sla_functional(c.measure(r), c.kernel, c.x, r, 0.5, c.s));
    }
    double sla_tail = 0;
    for (std::size_t i = sla.tail_begin(); i < sla.values.size(); ++i) sla_tail = std::max(sla_tail, sla.values[i].norm());
    const AlphaScan alpha = alpha_scan(c.measure, c.x, c.radii, c.s, c.family);
    const bool sla_small = sla_tail <= kSmallSla;
    const bool alpha_small = alpha.scan.tail_max <= kSmallAlpha;
    agree = agree && sla_small == alpha_small;
    detail << c.label << " (" << fmt(sla_tail) << ", " << fmt(alpha.scan.tail_max) << ") ";
  }
  res.seconds = seconds_since(t0);
  res.passed = agree;
  res.detail = "tail (SLA, alpha) vs small <= " + fmt(kSmallSla) + ": " + detail.str();
  return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<std::function<CriterionResult()>> battery{
      [&] { return lp_oracle(options.seed); }, scaling_invariance, flat_detection, spike_symmetry,     angle_equation,
      center_balance_check,                    multiplier_check,   cantor_sharpness, pv_bound, verdict_agreement};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= static_cast<int>(battery.size()); ++id) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) continue;
    CriterionResult r;
    try {
      r = battery[static_cast<std::size_t>(id - 1)]();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion " + std::to_string(id);
      r.detail = std::string("error: ") + e.what();
    }
    if (options.on_result) options.on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream out;
  out << (r.passed ? "[PASS] " : "[FAIL] ") << "C" << r.id << " " << r.name << ": " << r.detail << " (" << fmt(r.seconds)
      << " s)";
  return out.str();
}

}  // namespace symlab
