// Atomic approximations of locally finite Borel measures on R^d.
#pragma once

#include "symlab/core.hpp"
#include "symlab/spatial_index.hpp"

#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace symlab {

/// Region on which a generated measure faithfully represents its continuum
/// counterpart. A query looking at B(x, reach) is trusted iff that ball is inside.
///
/// `axis >= 0` turns the ball into a slab: only coordinate `axis` is truncated
/// (used by product measures whose other factors are represented completely).
template <typename Scalar>
struct TrustWindowT {
  Vector<Scalar> center;
  Scalar radius = std::numeric_limits<Scalar>::infinity();
  int axis = -1;

  bool unbounded() const { return !std::isfinite(static_cast<double>(radius)); }

  /// Slack R - |x - c| - reach; negative means the query leaves the window.
  Scalar slack(const Vector<Scalar>& x, Scalar reach) const {
    if (unbounded()) return std::numeric_limits<Scalar>::infinity();
    const Scalar offset = axis >= 0 ? std::abs(x(axis) - center(axis)) : (x - center).norm();
    return radius - offset - reach;
  }

  bool admits(const Vector<Scalar>& x, Scalar reach) const { return slack(x, reach) >= Scalar(-1e-12) * radius; }

  TrustWindowT mapped(const Vector<Scalar>& a, Scalar r) const {
    TrustWindowT out = *this;
    if (center.size() > 0) out.center = (center - a) / r;
    out.radius = radius / r;
    return out;
  }
};

using TrustWindow = TrustWindowT<double>;

/// Summary of a sampled s-growth test: max of mass(B(x,r)) / r^s.
template <typename Scalar>
struct GrowthReportT {
  Scalar exponent = 0;
  Scalar worst_ratio = 0;
  Vector<Scalar> worst_center;
  Scalar worst_radius = 0;

  bool in_class(Scalar tolerance = Scalar(1e-9)) const { return worst_ratio <= Scalar(1) + tolerance; }
};

using GrowthReport = GrowthReportT<double>;

/// Weighted atom cloud (positions are the columns of a d x N matrix).
///
/// Instances are immutable: copies share storage and the spatial index.
template <typename Scalar>
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  DiscreteMeasure(Matrix<Scalar> positions, Vector<Scalar> weights, Scalar resolution, std::string provenance,
                  TrustWindowT<Scalar> window = {})
      : storage_(std::make_shared<Storage>()), resolution_(resolution), provenance_(std::move(provenance)),
        window_(std::move(window)) {
    if (positions.rows() < 1) throw InputError("measure dimension must be at least 1");
    if (positions.cols() != weights.size()) throw InputError("positions and weights disagree in length");
    if (!positions.allFinite()) throw InputError("atom positions must be finite");
    if (!weights.allFinite() || (weights.size() > 0 && weights.minCoeff() < 0))
      throw InputError("atom weights must be finite and non-negative");
    if (!(resolution >= 0)) throw InputError("resolution must be non-negative");
    if (window_.center.size() == 0) window_.center = Vector<Scalar>::Zero(positions.rows());
    if (window_.center.size() != positions.rows()) throw InputError("trust window has wrong dimension");
    storage_->positions = std::move(positions);
    storage_->weights = std::move(weights);
    storage_->index = KdTree<Scalar>(storage_->positions);
  }

  int dim() const { return storage_ ? static_cast<int>(storage_->positions.rows()) : 0; }
  Eigen::Index size() const { return storage_ ? storage_->weights.size() : 0; }
  bool empty() const { return size() == 0; }

  const Matrix<Scalar>& positions() const { return storage_->positions; }
  const Vector<Scalar>& weights() const { return storage_->weights; }
  auto position(Eigen::Index i) const { return storage_->positions.col(i); }
  Scalar weight(Eigen::Index i) const { return storage_->weights(i); }

  /// Atom spacing h of the discretization (0 for purely atomic measures).
  Scalar resolution() const { return resolution_; }
  const std::string& provenance() const { return provenance_; }
  const TrustWindowT<Scalar>& window() const { return window_; }

  Scalar total_mass() const { return empty() ? Scalar(0) : storage_->weights.sum(); }

  /// Indices of atoms in the open ball B(x, r), ascending.
  std::vector<int> atoms_in_ball(const Vector<Scalar>& x, Scalar r) const {
    check_point(x);
    if (empty()) return {};
    return storage_->index.ball(x, r);
  }

  std::pair<int, Scalar> nearest_atom(const Vector<Scalar>& x) const {
    check_point(x);
    return storage_->index.nearest(x);
  }

  void check_point(const Vector<Scalar>& x) const {
    if (x.size() != dim()) throw InputError("point dimension does not match measure dimension");
  }

  /// Throws RefusalError unless B(x, reach) lies inside the trust window.
  void require_window(const Vector<Scalar>& x, Scalar reach, const std::string& what) const {
    if (!window_.admits(x, reach)) {
      std::ostringstream msg;
      msg << what << ": trusted window violated, need |x - c| + " << reach << " <= R = " << window_.radius
          << " (slack " << window_.slack(x, reach) << ")";
      throw RefusalError(msg.str());
    }
  }

  /// Throws RefusalError when r is below the resolution floor 20h.
  void require_resolution(Scalar r, const std::string& what) const {
    if (r < Scalar(kResolutionFloorFactor) * resolution_) {
      std::ostringstream msg;
      msg << what << ": radius " << r << " below resolution floor " << kResolutionFloorFactor << "h = "
          << Scalar(kResolutionFloorFactor) * resolution_;
      throw RefusalError(msg.str());
    }
  }

  Scalar resolution_floor() const { return Scalar(kResolutionFloorFactor) * resolution_; }

  /// Same atoms with every weight multiplied by `factor` >= 0.
  DiscreteMeasure scaled(Scalar factor) const {
    if (!(factor >= 0)) throw InputError("mass scale must be non-negative");
    std::ostringstream prov;
    prov << "scale(" << factor << ")*" << provenance_;
    return DiscreteMeasure(positions(), weights() * factor, resolution_, prov.str(), window_);
  }

 private:
  struct Storage {
    Matrix<Scalar> positions;
    Vector<Scalar> weights;
    KdTree<Scalar> index;
  };

  std::shared_ptr<Storage> storage_;
  Scalar resolution_ = 0;
  std::string provenance_;
  TrustWindowT<Scalar> window_;
};

using Measure = DiscreteMeasure<double>;

/// Sum of the weights of atoms p with |p - x| < r.
template <typename Scalar>
Scalar ball_mass(const DiscreteMeasure<Scalar>& mu, const Vector<Scalar>& x, Scalar r) {
  if (!(r > 0)) throw InputError("ball_mass: radius must be positive");
  Scalar mass = 0;
  for (int i : mu.atoms_in_ball(x, r)) mass += mu.weight(i);
  return mass;
}

/// Image of mu under y -> (y - a)/r with every weight multiplied by mass_scale.
template <typename Scalar>
DiscreteMeasure<Scalar> push_forward(const DiscreteMeasure<Scalar>& mu, const Vector<Scalar>& a, Scalar r,
                                     Scalar mass_scale) {
  if (!(r > 0)) throw InputError("push_forward: r must be positive");
  if (!(mass_scale > 0)) throw InputError("push_forward: mass scale must be positive");
  mu.check_point(a);
  Matrix<Scalar> moved = (mu.positions().colwise() - a) / r;
  std::ostringstream prov;
  prov.precision(17);
  prov << "push(a=[";
  for (Eigen::Index k = 0; k < a.size(); ++k) prov << (k ? "," : "") << a(k);
  prov << "],r=" << r << ",m=" << mass_scale << ")*" << mu.provenance();
  return DiscreteMeasure<Scalar>(std::move(moved), mu.weights() * mass_scale, mu.resolution() / r, prov.str(),
                                 mu.window().mapped(a, r));
}

/// Worst sampled ratio mass(B(x,r)) / r^s over centers x radii.
template <typename Scalar>
GrowthReportT<Scalar> growth_check(const DiscreteMeasure<Scalar>& mu, Scalar s,
                                   const std::vector<Vector<Scalar>>& centers, const std::vector<Scalar>& radii) {
  if (!(s > 0 && s < mu.dim())) throw InputError("growth_check: exponent must lie in (0, d)");
  if (centers.empty() || radii.empty()) throw InputError("growth_check: empty sample");
  GrowthReportT<Scalar> report;
  report.exponent = s;
  report.worst_center = centers.front();
  report.worst_radius = radii.front();
  for (const auto& x : centers) {
    for (Scalar r : radii) {
      const Scalar ratio = ball_mass(mu, x, r) / std::pow(r, s);
      if (ratio > report.worst_ratio) {
        report.worst_ratio = ratio;
        report.worst_center = x;
        report.worst_radius = r;
      }
    }
  }
  return report;
}

}  // namespace symlab
