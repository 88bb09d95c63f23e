// Radial cutoffs: the eta^tau ramps of the small-local-action functional, the
// phi window of the transport numbers, and general piecewise-linear profiles.
#pragma once

#include "symlab/core.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace symlab {

/// 1 on [0, 1 - tau], 0 on [1, inf), linear in between. Lipschitz constant 1/tau.
template <typename Scalar>
class CutoffEtaT {
 public:
  explicit CutoffEtaT(Scalar tau) : tau_(tau) {
    if (!(tau > 0 && tau < 1)) throw InputError("eta cutoff: tau must lie in (0, 1)");
  }

  Scalar tau() const { return tau_; }
  Scalar lipschitz() const { return Scalar(1) / tau_; }

  Scalar operator()(Scalar t) const {
    if (t <= 1 - tau_) return Scalar(1);
    if (t >= 1) return Scalar(0);
    return (1 - t) / tau_;
  }

 private:
  Scalar tau_;
};

using CutoffEta = CutoffEtaT<double>;

/// 1 on [0, 3], 0 on [4, inf), quintic smoothstep 1 - S(t - 3) on [3, 4] with
/// S(u) = 6u^5 - 15u^4 + 10u^3. |phi'| <= 15/8.
template <typename Scalar>
struct CutoffPhiT {
  static constexpr double kDerivativeBound = 15.0 / 8.0;

  Scalar operator()(Scalar t) const {
    if (t <= 3) return Scalar(1);
    if (t >= 4) return Scalar(0);
    const Scalar u = t - 3;
    return 1 - u * u * u * (u * (u * 6 - 15) + 10);
  }

  Scalar derivative(Scalar t) const {
    if (t <= 3 || t >= 4) return Scalar(0);
    const Scalar u = t - 3;
    return -30 * u * u * (1 - u) * (1 - u);
  }
};

using CutoffPhi = CutoffPhiT<double>;

/// Compactly supported continuous piecewise-linear profile psi : [0, inf) -> R,
/// given by knots (t_i, v_i) with increasing t_i, and psi = 0 beyond the last knot.
template <typename Scalar>
class RadialProfileT {
 public:
  RadialProfileT(std::vector<Scalar> knots, std::vector<Scalar> values)
      : t_(std::move(knots)), v_(std::move(values)) {
    if (t_.size() != v_.size() || t_.size() < 2) throw InputError("profile: need at least two knots");
    if (t_.front() != 0) throw InputError("profile: first knot must be at 0");
    for (std::size_t i = 1; i < t_.size(); ++i)
      if (!(t_[i] > t_[i - 1])) throw InputError("profile: knots must increase");
    if (v_.back() != 0) throw InputError("profile: must vanish at its last knot");
  }

  /// eta^tau(t / r) * scale as a profile.
  static RadialProfileT from_eta(const CutoffEtaT<Scalar>& eta, Scalar r, Scalar scale = Scalar(1)) {
    return RadialProfileT({Scalar(0), (1 - eta.tau()) * r, r}, {scale, scale, Scalar(0)});
  }

  Scalar support() const { return t_.back(); }
  const std::vector<Scalar>& knots() const { return t_; }
  const std::vector<Scalar>& values() const { return v_; }

  Scalar operator()(Scalar t) const {
    if (t >= t_.back()) return Scalar(0);
    if (t <= 0) return v_.front();
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    const Scalar w = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return v_[i] + w * (v_[i + 1] - v_[i]);
  }

  /// Constant slope on segment i, i.e. on [t_i, t_{i+1}).
  Scalar slope(std::size_t i) const { return (v_[i + 1] - v_[i]) / (t_[i + 1] - t_[i]); }

 private:
  std::vector<Scalar> t_;
  std::vector<Scalar> v_;
};

using RadialProfile = RadialProfileT<double>;

}  // namespace symlab
