// Odd, one-homogeneous kernels Omega : R^d \ {0} -> R^q.
#pragma once

#include "symlab/core.hpp"

#include <complex>
#include <functional>
#include <string>
#include <utility>

namespace symlab {

/// Kernel with a vector-valued evaluator. Scalar kernels use codomain_dim 1;
/// complex kernels are returned as (real, imaginary) pairs.
template <typename Scalar>
class KernelT {
 public:
  using Evaluator = std::function<Vector<Scalar>(const Vector<Scalar>&)>;

  KernelT() = default;
  KernelT(std::string name, int dim, int codomain_dim, Scalar lipschitz_on_sphere, Scalar sup_on_sphere,
          Evaluator evaluator, bool declared_analytic = false)
      : name_(std::move(name)), dim_(dim), codomain_dim_(codomain_dim), lipschitz_(lipschitz_on_sphere),
        sup_(sup_on_sphere), analytic_(declared_analytic), eval_(std::move(evaluator)) {
    if (dim_ < 1 || codomain_dim_ < 1) throw InputError("kernel dimensions must be positive");
    if (!eval_) throw InputError("kernel needs an evaluator");
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int codomain_dim() const { return codomain_dim_; }
  /// Lipschitz bound of Omega restricted to the unit sphere.
  Scalar lipschitz_on_sphere() const { return lipschitz_; }
  /// sup |Omega| on the unit sphere, so |Omega(x)| <= sup * |x|.
  Scalar sup_on_sphere() const { return sup_; }
  /// Whether x -> Omega(x)|x|^k is real analytic for some k. Declared, not tested.
  bool declared_analytic() const { return analytic_; }

  /// Omega(x); Omega(0) = 0 by convention.
  Vector<Scalar> operator()(const Vector<Scalar>& x) const {
    if (x.size() != dim_) throw InputError("kernel evaluated at a point of the wrong dimension");
    if (x.isZero(0)) return Vector<Scalar>::Zero(codomain_dim_);
    return eval_(x);
  }

 private:
  std::string name_;
  int dim_ = 0;
  int codomain_dim_ = 0;
  Scalar lipschitz_ = 0;
  Scalar sup_ = 0;
  bool analytic_ = false;
  Evaluator eval_;
};

using Kernel = KernelT<double>;

/// Omega(x) = x.
template <typename Scalar = double>
KernelT<Scalar> riesz_kernel(int d) {
  if (d < 1) throw InputError("riesz kernel: dimension must be positive");
  return KernelT<Scalar>("riesz", d, d, Scalar(1), Scalar(1), [](const Vector<Scalar>& x) { return x; }, true);
}

/// Omega(z) = z^k / |z|^(k-1) on C = R^2, k odd.
template <typename Scalar = double>
KernelT<Scalar> huovinen_kernel(int k) {
  if (k < 1 || k % 2 == 0) throw InputError("huovinen kernel: k must be a positive odd integer");
  return KernelT<Scalar>(
      "huovinen" + std::to_string(k), 2, 2, Scalar(k), Scalar(1),
      [k](const Vector<Scalar>& x) {
        const std::complex<Scalar> z(x(0), x(1));
        const Scalar modulus = std::abs(z);
        const std::complex<Scalar> unit = z / modulus;
        std::complex<Scalar> power(1, 0);
        for (int i = 0; i < k; ++i) power *= unit;
        Vector<Scalar> out(2);
        out << modulus * power.real(), modulus * power.imag();
        return out;
      },
      true);
}

/// Omega(x) = x_1 in the plane; its multiplier vanishes on the x_2 axis.
template <typename Scalar = double>
KernelT<Scalar> coordinate_kernel() {
  return KernelT<Scalar>(
      "coordinate", 2, 1, Scalar(1), Scalar(1),
      [](const Vector<Scalar>& x) {
        Vector<Scalar> out(1);
        out << x(0);
        return out;
      },
      true);
}

}  // namespace symlab
