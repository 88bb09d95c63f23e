// Pointwise functionals of (measure, kernel, point, scale): the small local
// action average, ball integrals and symmetry defects, densities, truncated
// principal values, and the principal-value to small-local-action bound.
#pragma once

#include "symlab/cutoff.hpp"
#include "symlab/kernel.hpp"
#include "symlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace symlab {

/// Number of trailing radii used by "limit is zero" verdicts.
inline constexpr int kTailWindow = 5;

/// Radius-indexed series with tail diagnostics. Radii are strictly decreasing.
template <typename Scalar>
struct ScanResultT {
  std::vector<Scalar> radii;
  std::vector<Vector<Scalar>> values;
  std::vector<Scalar> error_estimates;
  Scalar tail_max = 0;
  Scalar tail_min = 0;
  Scalar resolution_floor = 0;
  Scalar threshold = 0;
  bool verdict = false;

  std::size_t tail_begin() const {
    return radii.size() > static_cast<std::size_t>(kTailWindow) ? radii.size() - kTailWindow : 0;
  }

  /// max of the error estimates over the tail window.
  Scalar tail_error() const {
    Scalar e = 0;
    for (std::size_t i = tail_begin(); i < error_estimates.size(); ++i) e = std::max(e, error_estimates[i]);
    return e;
  }
};

using ScanResult = ScanResultT<double>;

namespace detail {

template <typename Scalar>
void require_decreasing(const std::vector<Scalar>& radii, const char* what) {
  if (radii.empty()) throw InputError(std::string(what) + ": empty radius grid");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0)) throw InputError(std::string(what) + ": radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw InputError(std::string(what) + ": radii must strictly decrease");
  }
}

template <typename Scalar>
void finish_tail(ScanResultT<Scalar>& scan) {
  const std::size_t begin = scan.tail_begin();
  scan.tail_max = 0;
  scan.tail_min = std::numeric_limits<Scalar>::infinity();
  for (std::size_t i = begin; i < scan.values.size(); ++i) {
    const Scalar v = scan.values[i].norm();
    scan.tail_max = std::max(scan.tail_max, v);
    scan.tail_min = std::min(scan.tail_min, v);
  }
}

}  // namespace detail

/// Geometric radius grid r_max * ratio^j, j < count.
template <typename Scalar = double>
std::vector<Scalar> geometric_radii(Scalar r_max, Scalar ratio, int count) {
  if (!(r_max > 0) || !(ratio > 0 && ratio < 1) || count < 1)
    throw InputError("geometric radii: need r_max > 0, ratio in (0,1), count >= 1");
  std::vector<Scalar> out;
  Scalar r = r_max;
  for (int j = 0; j < count; ++j, r *= ratio) out.push_back(r);
  return out;
}

/// sum over atoms y in B(x, r) of w(y) Omega(x - y).
template <typename Scalar>
Vector<Scalar> ball_integral(const DiscreteMeasure<Scalar>& nu, const KernelT<Scalar>& kernel,
                             const Vector<Scalar>& x, Scalar r) {
  if (kernel.dim() != nu.dim()) throw InputError("kernel and measure dimensions differ");
  Vector<Scalar> acc = Vector<Scalar>::Zero(kernel.codomain_dim());
  for (int i : nu.atoms_in_ball(x, r)) acc += nu.weight(i) * kernel(Vector<Scalar>(x - nu.position(i)));
  return acc;
}

/// Atom sum of Omega(x - y) psi(|x - y|) against nu.
template <typename Scalar>
Vector<Scalar> radial_test_integral(const DiscreteMeasure<Scalar>& nu, const KernelT<Scalar>& kernel,
                                    const Vector<Scalar>& x, const RadialProfileT<Scalar>& psi) {
  if (kernel.dim() != nu.dim()) throw InputError("kernel and measure dimensions differ");
  Vector<Scalar> acc = Vector<Scalar>::Zero(kernel.codomain_dim());
  for (int i : nu.atoms_in_ball(x, psi.support())) {
    const Vector<Scalar> diff = x - nu.position(i);
    acc += (nu.weight(i) * psi(diff.norm())) * kernel(diff);
  }
  return acc;
}

/// Same quantity through -int_0^inf psi'(rho) [int_{B(x,rho)} Omega(x-y) dnu] drho,
/// summed exactly over the breakpoints of the two piecewise-constant factors.
template <typename Scalar>
Vector<Scalar> radial_layer_cake(const DiscreteMeasure<Scalar>& nu, const KernelT<Scalar>& kernel,
                                 const Vector<Scalar>& x, const RadialProfileT<Scalar>& psi) {
  struct Hit {
    Scalar dist;
    Vector<Scalar> value;
  };
  std::vector<Hit> hits;
  for (int i : nu.atoms_in_ball(x, psi.support())) {
    const Vector<Scalar> diff = x - nu.position(i);
    hits.push_back({diff.norm(), nu.weight(i) * kernel(diff)});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.dist < b.dist; });

  std::vector<Scalar> breaks(psi.knots());
  for (const Hit& h : hits) breaks.push_back(h.dist);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  Vector<Scalar> acc = Vector<Scalar>::Zero(kernel.codomain_dim());
  Vector<Scalar> inside = Vector<Scalar>::Zero(kernel.codomain_dim());
  std::size_t next_hit = 0;
  std::size_t segment = 0;
  const auto& knots = psi.knots();
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const Scalar lo = breaks[b];
    const Scalar hi = breaks[b + 1];
    if (lo >= psi.support()) break;
    // B(x, rho) for rho in (lo, hi] holds every atom at distance <= lo.
    while (next_hit < hits.size() && hits[next_hit].dist <= lo) inside += hits[next_hit++].value;
    while (segment + 2 < knots.size() && knots[segment + 1] <= lo) ++segment;
    acc -= psi.slope(segment) * (hi - lo) * inside;
  }
  return acc;
}

/// Quadrature error proxy h * (Lip(Omega) + |Omega|/tau) * mu(B(x,r)) / r^(s+1).
template <typename Scalar>
Scalar sla_error_estimate(const DiscreteMeasure<Scalar>& mu, const KernelT<Scalar>& kernel, const Vector<Scalar>& x,
                          Scalar r, Scalar tau, Scalar s) {
  const Scalar lip = kernel.lipschitz_on_sphere() + kernel.sup_on_sphere() / tau;
  return mu.resolution() * lip * ball_mass(mu, x, r) / std::pow(r, s + 1);
}

/// (1/r^(s+1)) sum w(y) Omega(x - y) eta^tau(|x - y|/r).
template <typename Scalar>
Vector<Scalar> sla_functional(const DiscreteMeasure<Scalar>& mu, const KernelT<Scalar>& kernel,
                              const Vector<Scalar>& x, Scalar r, Scalar tau, Scalar s) {
  if (!(r > 0)) throw InputError("sla: radius must be positive");
  mu.require_resolution(r, "sla");
  mu.require_window(x, r, "sla");
  const CutoffEtaT<Scalar> eta(tau);
  return radial_test_integral(mu, kernel, x, RadialProfileT<Scalar>::from_eta(eta, r, Scalar(1) / std::pow(r, s + 1)));
}

/// sla_functional over a decreasing radius grid. The verdict is
/// tail_max <= threshold, with threshold defaulting to 10x the tail error estimate.
template <typename Scalar>
ScanResultT<Scalar> sla_scan(const DiscreteMeasure<Scalar>& mu, const KernelT<Scalar>& kernel,
                             const Vector<Scalar>& x, const std::vector<Scalar>& radii, Scalar tau, Scalar s,
                             std::optional<Scalar> threshold = std::nullopt) {
  detail::require_decreasing(radii, "sla_scan");
  ScanResultT<Scalar> scan;
  scan.resolution_floor = mu.resolution_floor();
  for (Scalar r : radii) {
    scan.radii.push_back(r);
    scan.values.push_back(sla_functional(mu, kernel, x, r, tau, s));
    scan.error_estimates.push_back(sla_error_estimate(mu, kernel, x, r, tau, s));
  }
  detail::finish_tail(scan);
  scan.threshold = threshold.value_or(Scalar(10) * scan.tail_error());
  scan.verdict = scan.tail_max <= scan.threshold;
  return scan;
}

/// Normalized symmetry defect: sup over radii of |int_{B(x,r)} Omega(x-y) dnu| / r^s.
template <typename Scalar>
struct DefectReportT {
  Scalar value = 0;
  Scalar worst_radius = 0;
  /// Discretization proxy: sup over radii of
  /// [h Lip(Omega) nu(B(x,r)) + |Omega| r nu(shell of width 2h at r)] / r^s.
  Scalar error_estimate = 0;
  std::vector<Scalar> per_radius;
};

using DefectReport = DefectReportT<double>;

template <typename Scalar>
DefectReportT<Scalar> symmetry_defect(const DiscreteMeasure<Scalar>& nu, const KernelT<Scalar>& kernel,
                                      const Vector<Scalar>& x, const std::vector<Scalar>& radii, Scalar s) {
  if (radii.empty()) throw InputError("symmetry_defect: empty radius grid");
  DefectReportT<Scalar> out;
  const Scalar h = nu.resolution();
  for (Scalar r : radii) {
    if (!(r > 0)) throw InputError("symmetry_defect: radii must be positive");
    nu.require_window(x, r + h, "symmetry_defect");
    const Scalar scale = std::pow(r, s);
    const Scalar v = ball_integral(nu, kernel, x, r).norm() / scale;
    out.per_radius.push_back(v);
    if (v > out.value || out.per_radius.size() == 1) {
      out.value = v;
      out.worst_radius = r;
    }
    Scalar err = h * kernel.lipschitz_on_sphere() * ball_mass(nu, x, r);
    if (h > 0) {
      const Scalar shell = ball_mass(nu, x, r + h) - (r > h ? ball_mass(nu, x, r - h) : Scalar(0));
      err += kernel.sup_on_sphere() * r * shell;
    }
    out.error_estimate = std::max(out.error_estimate, err / scale);
  }
  return out;
}

template <typename Scalar>
struct SymmetricCandidateT {
  Vector<Scalar> point;
  DefectReportT<Scalar> defect;
  bool symmetric = false;
};

using SymmetricCandidate = SymmetricCandidateT<double>;

/// Defect at every candidate; `symmetric` iff defect <= threshold, where the
/// threshold defaults to 3x the candidate's own discretization estimate.
template <typename Scalar>
std::vector<SymmetricCandidateT<Scalar>> symmetric_point_scan(const DiscreteMeasure<Scalar>& nu,
                                                              const KernelT<Scalar>& kernel,
                                                              const std::vector<Vector<Scalar>>& candidates,
                                                              const std::vector<Scalar>& radii, Scalar s,
                                                              std::optional<Scalar> threshold = std::nullopt) {
  std::vector<SymmetricCandidateT<Scalar>> out;
  for (const auto& p : candidates) {
    SymmetricCandidateT<Scalar> c;
    c.point = p;
    c.defect = symmetry_defect(nu, kernel, p, radii, s);
    const Scalar limit = threshold.value_or(Scalar(3) * c.defect.error_estimate);
    c.symmetric = c.defect.value <= limit;
    out.push_back(std::move(c));
  }
  return out;
}

/// mu(B(x, r)) / r^s.
template <typename Scalar>
Scalar density_ratio(const DiscreteMeasure<Scalar>& mu, const Vector<Scalar>& x, Scalar r, Scalar s) {
  mu.require_window(x, r, "density");
  return ball_mass(mu, x, r) / std::pow(r, s);
}

/// Density ratios over a decreasing grid; tail_max / tail_min proxy the upper
/// and lower densities.
template <typename Scalar>
ScanResultT<Scalar> density_scan(const DiscreteMeasure<Scalar>& mu, const Vector<Scalar>& x,
                                 const std::vector<Scalar>& radii, Scalar s) {
  detail::require_decreasing(radii, "density_scan");
  ScanResultT<Scalar> scan;
  scan.resolution_floor = mu.resolution_floor();
  for (Scalar r : radii) {
    mu.require_resolution(r, "density_scan");
    scan.radii.push_back(r);
    Vector<Scalar> v(1);
    v << density_ratio(mu, x, r, s);
    scan.values.push_back(v);
    scan.error_estimates.push_back(ball_mass(mu, x, r + mu.resolution()) / std::pow(r, s) - v(0));
  }
  detail::finish_tail(scan);
  scan.verdict = std::isfinite(static_cast<double>(scan.tail_max));
  return scan;
}

/// Truncated principal values I_eps = sum over eps < |x-y| < outer of
/// w(y) Omega(x-y)/|x-y|^(s+1), where `outer` is the trusted reach at x.
template <typename Scalar>
struct PvResultT {
  std::vector<Scalar> epsilons;
  std::vector<Vector<Scalar>> values;
  Scalar cauchy_defect = 0;
  Scalar outer_radius = 0;
  bool atom_at_x_excluded = false;
  std::string warning;
};

using PvResult = PvResultT<double>;

template <typename Scalar>
PvResultT<Scalar> pv_estimator(const DiscreteMeasure<Scalar>& mu, const KernelT<Scalar>& kernel,
                               const Vector<Scalar>& x, Scalar s, const std::vector<Scalar>& epsilons) {
  detail::require_decreasing(epsilons, "pv_estimator");
  if (kernel.dim() != mu.dim()) throw InputError("kernel and measure dimensions differ");
  mu.require_window(x, epsilons.front(), "pv_estimator");
  mu.require_resolution(epsilons.back(), "pv_estimator");
  PvResultT<Scalar> out;
  out.epsilons = epsilons;
  const Scalar slack = mu.window().slack(x, Scalar(0));

  struct Term {
    Scalar dist;
    Vector<Scalar> value;
  };
  std::vector<Term> terms;
  std::vector<int> idx;
  if (std::isfinite(static_cast<double>(slack))) {
    out.outer_radius = slack;
    idx = mu.atoms_in_ball(x, slack);
  } else {
    out.outer_radius = std::numeric_limits<Scalar>::infinity();
    idx.resize(static_cast<std::size_t>(mu.size()));
    for (Eigen::Index i = 0; i < mu.size(); ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
  }
  for (int i : idx) {
    const Vector<Scalar> diff = x - mu.position(i);
    const Scalar dist = diff.norm();
    if (dist == 0) {
      if (mu.weight(i) > 0) {
        out.atom_at_x_excluded = true;
        out.warning = "atom at x excluded: principal value integrand undefined at 0";
      }
      continue;
    }
    terms.push_back({dist, (mu.weight(i) / std::pow(dist, s + 1)) * kernel(diff)});
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.dist > b.dist; });
  // Accumulate from the far field inwards so every I_eps is a prefix sum.
  Vector<Scalar> acc = Vector<Scalar>::Zero(kernel.codomain_dim());
  std::size_t t = 0;
  for (Scalar eps : epsilons) {
    while (t < terms.size() && terms[t].dist > eps) acc += terms[t++].value;
    out.values.push_back(acc);
  }
  const std::size_t begin = epsilons.size() > static_cast<std::size_t>(kTailWindow) ? epsilons.size() - kTailWindow : 0;
  for (std::size_t i = begin; i < out.values.size(); ++i)
    for (std::size_t j = i + 1; j < out.values.size(); ++j)
      out.cauchy_defect = std::max(out.cauchy_defect, Scalar((out.values[i] - out.values[j]).norm()));
  return out;
}

/// Supremum over 0 < r1 < r2 <= r of |sum over r1 <= |y-x| < r2 of
/// w Omega(y-x)/|y-x|^(s+1)|. Exact for up to `exact_limit` distinct distances,
/// otherwise the upper bound 2 max_rho |F(rho)|.
template <typename Scalar>
Scalar pv_shell_sup(const DiscreteMeasure<Scalar>& mu, const KernelT<Scalar>& kernel, const Vector<Scalar>& x,
                    Scalar s, Scalar r, std::size_t exact_limit = 4000) {
  struct Term {
    Scalar dist;
    Vector<Scalar> value;
  };
  std::vector<Term> terms;
  for (int i : mu.atoms_in_ball(x, r)) {
    const Vector<Scalar> diff = mu.position(i) - x;
    const Scalar dist = diff.norm();
    if (dist == 0) continue;
    terms.push_back({dist, (mu.weight(i) / std::pow(dist, s + 1)) * kernel(diff)});
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.dist < b.dist; });
  // Prefix sums F at every distinct distance; atoms at equal distance (to
  // relative precision 1e-12) enter a shell together.
  std::vector<Vector<Scalar>> prefix{Vector<Scalar>::Zero(kernel.codomain_dim())};
  for (std::size_t i = 0; i < terms.size();) {
    Vector<Scalar> group = Vector<Scalar>::Zero(kernel.codomain_dim());
    const Scalar start = terms[i].dist;
    while (i < terms.size() && terms[i].dist - start <= Scalar(1e-12) * start) group += terms[i++].value;
    prefix.push_back(prefix.back() + group);
  }
  Scalar best = 0;
  if (prefix.size() <= exact_limit) {
    for (std::size_t i = 0; i < prefix.size(); ++i)
      for (std::size_t j = i + 1; j < prefix.size(); ++j) best = std::max(best, Scalar((prefix[j] - prefix[i]).norm()));
  } else {
    for (const auto& p : prefix) best = std::max(best, Scalar(2) * p.norm());
  }
  return best;
}

template <typename Scalar>
struct PvSlaCheckT {
  Scalar lhs = 0;
  Scalar bound = 0;
  Scalar constant = 0;
  Scalar delta_observed = 0;
  Scalar density_observed = 0;
  bool holds = false;
};

using PvSlaCheck = PvSlaCheckT<double>;

/// Constant C with |(1/r^(s+1)) int_{B(x,r)} Omega| <= C (eps k (s+1) + delta/eps)
/// whenever every shell integral inside B(x,r) is at most delta and
/// mu(B(x,r) \ {x}) <= k r^s. Telescoping over r_j = (1-eps)^j r gives the
/// two terms |Omega| ((1-eps)^-(s+1) - 1) k and delta / (1 - (1-eps)^(s+1)).
template <typename Scalar>
Scalar pv_sla_constant(Scalar kernel_sup, Scalar s, Scalar eps) {
  const Scalar near = kernel_sup * (std::pow(1 - eps, -(s + 1)) - 1) / (eps * (s + 1));
  const Scalar far = eps / (1 - std::pow(1 - eps, s + 1));
  return std::max({Scalar(1), near, far});
}

template <typename Scalar>
Scalar pv_sla_bound(Scalar kernel_sup, Scalar s, Scalar eps, Scalar delta, Scalar k) {
  return pv_sla_constant(kernel_sup, s, eps) * (eps * k * (s + 1) + delta / eps);
}

template <typename Scalar>
PvSlaCheckT<Scalar> pv_to_sla_check(const DiscreteMeasure<Scalar>& mu, const KernelT<Scalar>& kernel,
                                    const Vector<Scalar>& x, Scalar s, Scalar r, Scalar eps, Scalar delta, Scalar k) {
  if (!(eps > 0 && eps < Scalar(0.5))) throw InputError("pv_to_sla_check: eps must lie in (0, 1/2)");
  if (!(r > 0)) throw InputError("pv_to_sla_check: r must be positive");
  mu.require_window(x, r, "pv_to_sla_check");
  PvSlaCheckT<Scalar> out;
  out.delta_observed = pv_shell_sup(mu, kernel, x, s, r);
  Scalar mass = 0;
  Vector<Scalar> integral = Vector<Scalar>::Zero(kernel.codomain_dim());
  for (int i : mu.atoms_in_ball(x, r)) {
    const Vector<Scalar> diff = mu.position(i) - x;
    if (diff.isZero(0)) continue;
    mass += mu.weight(i);
    integral += mu.weight(i) * kernel(diff);
  }
  out.density_observed = mass / std::pow(r, s);
  if (delta < out.delta_observed)
    throw RefusalError("pv_to_sla_check: delta " + std::to_string(delta) + " below observed shell supremum " +
                       std::to_string(out.delta_observed));
  if (k < out.density_observed)
    throw RefusalError("pv_to_sla_check: k " + std::to_string(k) + " below observed density " +
                       std::to_string(out.density_observed));
  out.lhs = integral.norm() / std::pow(r, s + 1);
  out.constant = pv_sla_constant(kernel.sup_on_sphere(), s, eps);
  out.bound = pv_sla_bound(kernel.sup_on_sphere(), s, eps, delta, k);
  out.holds = out.lhs <= out.bound;
  return out;
}

/// eps on the grid minimizing the bound for given (delta, k).
template <typename Scalar>
Scalar best_epsilon(const std::vector<Scalar>& grid, Scalar kernel_sup, Scalar s, Scalar delta, Scalar k) {
  if (grid.empty()) throw InputError("best_epsilon: empty grid");
  Scalar best = grid.front();
  Scalar best_value = std::numeric_limits<Scalar>::infinity();
  for (Scalar eps : grid) {
    const Scalar v = pv_sla_bound(kernel_sup, s, eps, delta, k);
    if (v < best_value) {
      best_value = v;
      best = eps;
    }
  }
  return best;
}

}  // namespace symlab
