// Blow-ups: normalized rescalings r^-s (T_{a,r})# mu, a finite net of
// Lipschitz test functions on B(0,4), and moment diagnostics along a radius
// sequence.
#pragma once

#include "symlab/cutoff.hpp"
#include "symlab/functionals.hpp"
#include "symlab/kernel.hpp"
#include "symlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace symlab {

template <typename Scalar>
DiscreteMeasure<Scalar> rescale(const DiscreteMeasure<Scalar>& mu, const Vector<Scalar>& a, Scalar r, Scalar s) {
  if (!(r > 0)) throw InputError("rescale: r must be positive");
  return push_forward(mu, a, r, std::pow(r, -s));
}

/// Tensor hats g_z(y) = (delta / sqrt d) prod_k (1 - |y_k - z_k| / delta)_+ on
/// the lattice delta Z^d with delta = epsilon / (2 sqrt d), keeping nodes with
/// |z| + delta sqrt d <= 4. Each hat is 1-Lipschitz, vanishes outside B(0,4)
/// and is bounded by delta / sqrt d.
template <typename Scalar>
struct TestNetT {
  Scalar epsilon = 0;
  int dim = 0;
  Scalar spacing = 0;
  Scalar amplitude = 0;
  /// Lattice index range [-extent, extent] per axis.
  int extent = 0;
  std::vector<Vector<Scalar>> nodes;
  /// Dense lattice map: member id, or -1 for dropped nodes.
  std::vector<int> lookup;

  std::size_t size() const { return nodes.size(); }

  Scalar operator()(std::size_t member, const Vector<Scalar>& y) const {
    Scalar v = amplitude;
    for (int k = 0; k < dim; ++k) {
      const Scalar t = 1 - std::abs(y(k) - nodes[member](k)) / spacing;
      if (t <= 0) return Scalar(0);
      v *= t;
    }
    return v;
  }

  /// Calls f(member, value) for the at most 2^d members that are non-zero at y.
  template <typename F>
  void for_each_active(const Vector<Scalar>& y, F&& f) const {
    std::vector<long> base(dim);
    for (int k = 0; k < dim; ++k) base[k] = static_cast<long>(std::floor(y(k) / spacing));
    const int corners = 1 << dim;
    for (int c = 0; c < corners; ++c) {
      long flat = 0;
      bool inside = true;
      for (int k = 0; k < dim; ++k) {
        const long idx = base[k] + ((c >> k) & 1);
        if (idx < -extent || idx > extent) {
          inside = false;
          break;
        }
        flat = flat * (2 * extent + 1) + (idx + extent);
      }
      if (!inside) continue;
      const int member = lookup[static_cast<std::size_t>(flat)];
      if (member < 0) continue;
      const Scalar v = (*this)(static_cast<std::size_t>(member), y);
      if (v != 0) f(member, v);
    }
  }
};

using TestNet = TestNetT<double>;

template <typename Scalar>
TestNetT<Scalar> build_test_net(int d, Scalar epsilon, std::size_t max_members = 100000) {
  if (d < 1) throw InputError("test net: dimension must be positive");
  if (!(epsilon > 0)) throw InputError("test net: epsilon must be positive");
  TestNetT<Scalar> net;
  net.epsilon = epsilon;
  net.dim = d;
  const Scalar root_d = std::sqrt(Scalar(d));
  net.spacing = epsilon / (2 * root_d);
  net.amplitude = net.spacing / root_d;
  const Scalar reach = 4 - net.spacing * root_d;
  const Scalar cube = std::pow(2 * std::floor(std::max<Scalar>(reach, 0) / net.spacing) + 1, Scalar(d));
  const Scalar ball = std::pow(Scalar(kPi), Scalar(d) / 2) / std::tgamma(Scalar(d) / 2 + 1) *
                      std::pow(std::max<Scalar>(reach, 0) / net.spacing, Scalar(d));
  if (ball > Scalar(max_members) || cube > Scalar(50) * Scalar(max_members)) {
    std::ostringstream msg;
    msg << "test net: about " << static_cast<double>(ball) << " members for epsilon = " << epsilon << " in d = " << d
        << " exceeds the budget of " << max_members;
    throw RefusalError(msg.str());
  }
  net.extent = reach > 0 ? static_cast<int>(std::floor(reach / net.spacing)) : 0;
  const long side = 2L * net.extent + 1;
  long total = 1;
  for (int k = 0; k < d; ++k) total *= side;
  net.lookup.assign(static_cast<std::size_t>(total), -1);
  std::vector<long> idx(d, -net.extent);
  Vector<Scalar> z(d);
  for (long flat = 0; flat < total; ++flat) {
    long rest = flat;
    for (int k = d - 1; k >= 0; --k) {
      idx[k] = rest % side - net.extent;
      rest /= side;
    }
    for (int k = 0; k < d; ++k) z(k) = Scalar(idx[k]) * net.spacing;
    if (z.norm() <= reach * (1 + Scalar(1e-12))) {
      net.lookup[static_cast<std::size_t>(flat)] = static_cast<int>(net.nodes.size());
      net.nodes.push_back(z);
    }
  }
  if (net.nodes.size() > max_members) throw RefusalError("test net: member budget exceeded");
  return net;
}

template <typename Scalar>
struct BlowupSequenceT {
  DiscreteMeasure<Scalar> base;
  Vector<Scalar> center;
  std::vector<Scalar> radii;
  std::vector<Scalar> normalization;

  std::size_t size() const { return radii.size(); }

  /// normalization r^-s.
  static BlowupSequenceT standard(DiscreteMeasure<Scalar> base, Vector<Scalar> a, std::vector<Scalar> radii, Scalar s) {
    BlowupSequenceT out{std::move(base), std::move(a), std::move(radii), {}};
    for (Scalar r : out.radii) out.normalization.push_back(std::pow(r, -s));
    out.validate();
    return out;
  }

  /// normalization 1 / (3^s k r^s).
  static BlowupSequenceT proof_normalized(DiscreteMeasure<Scalar> base, Vector<Scalar> a, std::vector<Scalar> radii,
                                          Scalar s, Scalar k) {
    if (!(k > 0)) throw InputError("blowup: density bound k must be positive");
    BlowupSequenceT out{std::move(base), std::move(a), std::move(radii), {}};
    for (Scalar r : out.radii) out.normalization.push_back(Scalar(1) / (std::pow(Scalar(3), s) * k * std::pow(r, s)));
    out.validate();
    return out;
  }

  void validate() const {
    detail::require_decreasing(radii, "blowup sequence");
    if (normalization.size() != radii.size()) throw InputError("blowup: one normalization per radius");
    for (Scalar c : normalization)
      if (!(c > 0)) throw InputError("blowup: normalizations must be positive");
  }
};

using BlowupSequence = BlowupSequenceT<double>;

/// moments(j, i) = int g_i(y) phi(|y|) d mu_j(y) with mu_j = c_j (T_{a,r_j})# mu.
template <typename Scalar>
struct WeakConvergenceReportT {
  Matrix<Scalar> moments;
  /// (h / r_j) (1 + |g|_inf |phi'|) mu_j(B(0,4)): quadrature proxy per radius.
  std::vector<Scalar> error_estimates;
  /// max over members of the oscillation across the last kTailWindow radii.
  Scalar cauchy_defect = 0;
  /// 2x the largest tail error estimate.
  Scalar tolerance = 0;
  /// The largest moment grew by more than 2x across the tail window.
  bool diverging = false;
};

using WeakConvergenceReport = WeakConvergenceReportT<double>;

template <typename Scalar>
WeakConvergenceReportT<Scalar> weak_convergence_diagnostic(const BlowupSequenceT<Scalar>& seq,
                                                           const TestNetT<Scalar>& net,
                                                           const CutoffPhiT<Scalar>& phi = {}) {
  seq.validate();
  const auto& mu = seq.base;
  if (net.dim != mu.dim()) throw InputError("blowup: net and measure dimensions differ");
  WeakConvergenceReportT<Scalar> out;
  out.moments = Matrix<Scalar>::Zero(static_cast<Eigen::Index>(seq.size()), static_cast<Eigen::Index>(net.size()));
  const Scalar lip = 1 + net.amplitude * Scalar(CutoffPhiT<Scalar>::kDerivativeBound);
  Vector<Scalar> y(mu.dim());
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const Scalar r = seq.radii[j];
    mu.require_window(seq.center, 4 * r, "weak_convergence_diagnostic");
    Scalar mass = 0;
    for (int i : mu.atoms_in_ball(seq.center, 4 * r)) {
      y = (mu.position(i) - seq.center) / r;
      const Scalar w = mu.weight(i) * seq.normalization[j];
      mass += w;
      const Scalar cut = phi(y.norm());
      if (cut == 0) continue;
      net.for_each_active(y, [&](int member, Scalar g) { out.moments(static_cast<Eigen::Index>(j), member) += w * g * cut; });
    }
    out.error_estimates.push_back(mu.resolution() / r * lip * mass);
  }
  const std::size_t n = seq.size();
  const std::size_t begin = n > static_cast<std::size_t>(kTailWindow) ? n - kTailWindow : 0;
  for (Eigen::Index i = 0; i < out.moments.cols(); ++i) {
    Scalar lo = std::numeric_limits<Scalar>::infinity();
    Scalar hi = -lo;
    for (std::size_t j = begin; j < n; ++j) {
      lo = std::min(lo, out.moments(static_cast<Eigen::Index>(j), i));
      hi = std::max(hi, out.moments(static_cast<Eigen::Index>(j), i));
    }
    if (n > 0) out.cauchy_defect = std::max(out.cauchy_defect, hi - lo);
  }
  for (std::size_t j = begin; j < n; ++j) out.tolerance = std::max(out.tolerance, 2 * out.error_estimates[j]);
  if (n > begin + 1 && out.moments.cols() > 0) {
    const Scalar first = out.moments.row(static_cast<Eigen::Index>(begin)).cwiseAbs().maxCoeff();
    const Scalar last = out.moments.row(static_cast<Eigen::Index>(n - 1)).cwiseAbs().maxCoeff();
    out.diverging = last > 2 * first;
  }
  return out;
}

template <typename Scalar>
struct TangentSymmetryReportT {
  std::vector<Scalar> radii;
  /// symmetry defect of the rescaled measure at 0 over the unit radii.
  std::vector<Scalar> defects;
  std::vector<Scalar> defect_errors;
  /// |sla_functional(mu, a, r)|.
  std::vector<Scalar> sla;
  std::vector<Scalar> sla_errors;
  /// Pearson correlation of the two series; NaN when one of them is constant.
  Scalar correlation = std::numeric_limits<Scalar>::quiet_NaN();
};

using TangentSymmetryReport = TangentSymmetryReportT<double>;

namespace detail {

template <typename Scalar>
Scalar pearson(const std::vector<Scalar>& u, const std::vector<Scalar>& v) {
  const std::size_t n = u.size();
  if (n < 2) return std::numeric_limits<Scalar>::quiet_NaN();
  Scalar mu = 0, mv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= Scalar(n);
  mv /= Scalar(n);
  Scalar cov = 0, su = 0, sv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (u[i] - mu) * (v[i] - mv);
    su += (u[i] - mu) * (u[i] - mu);
    sv += (v[i] - mv) * (v[i] - mv);
  }
  if (!(su > 0 && sv > 0)) return std::numeric_limits<Scalar>::quiet_NaN();
  return cov / std::sqrt(su * sv);
}

}  // namespace detail

template <typename Scalar>
TangentSymmetryReportT<Scalar> tangent_symmetry_experiment(const DiscreteMeasure<Scalar>& mu,
                                                           const KernelT<Scalar>& kernel, const Vector<Scalar>& a,
                                                           const std::vector<Scalar>& radii, Scalar s, Scalar tau,
                                                           const std::vector<Scalar>& unit_radii = {Scalar(0.25), Scalar(0.5), Scalar(0.75), Scalar(1)}) {
  detail::require_decreasing(radii, "tangent_symmetry_experiment");
  TangentSymmetryReportT<Scalar> out;
  const Vector<Scalar> origin = Vector<Scalar>::Zero(mu.dim());
  for (Scalar r : radii) {
    const DiscreteMeasure<Scalar> nu = rescale(mu, a, r, s);
    const DefectReportT<Scalar> defect = symmetry_defect(nu, kernel, origin, unit_radii, s);
    out.radii.push_back(r);
    out.defects.push_back(defect.value);
    out.defect_errors.push_back(defect.error_estimate);
    out.sla.push_back(sla_functional(mu, kernel, a, r, tau, s).norm());
    out.sla_errors.push_back(sla_error_estimate(mu, kernel, a, r, tau, s));
  }
  out.correlation = detail::pearson(out.defects, out.sla);
  return out;
}

}  // namespace symlab
