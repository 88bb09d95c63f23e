// Fourier multiplier of the principal value distribution Omega(x)/|x|^(d+1):
//   m(xi) = -int_{S^(d-1)} Omega(w) [ i pi/2 sgn(xi.w) + log|xi.w| ] dH^(d-1)(w).
#pragma once

#include "symlab/kernel.hpp"

#include <complex>
#include <vector>

namespace symlab {

using ComplexVec = Eigen::VectorXcd;

/// Composite Gauss-Legendre on the polar angle psi in (0, pi/2) measured from
/// xi, with `levels` geometric panels (ratio 1/2) accumulating at psi = pi/2
/// where xi.w vanishes. Refinement doubles `order` and adds two levels until
/// consecutive estimates differ by at most `tolerance`.
struct QuadratureSpec {
  int order = 16;
  int levels = 24;
  int max_refinements = 3;
  double tolerance = 1e-10;
};

struct MultiplierValue {
  Vec xi;
  ComplexVec value;
  /// max-norm difference between the two finest refinement levels.
  double error_estimate = 0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, Vec& nodes, Vec& weights);

/// Product rule on the hemisphere {w in S^(d-1) : w.axis > 0} aligned with `axis`.
/// Returns nodes as columns; the opposite hemisphere is obtained by negation.
void hemisphere_rule(const Vec& axis, int order, int levels, Mat& nodes, Vec& weights);

MultiplierValue multiplier(const Kernel& kernel, const Vec& xi, const QuadratureSpec& quad = {});

/// Quasi-uniform unit vectors: equispaced angles on S^1, Fibonacci points on S^2.
std::vector<Vec> sphere_nodes(int dim, int count);

struct NonvanishingScan {
  double min_modulus = 0;
  Vec witness;
  double max_error = 0;
  double margin = 0;
  bool nonvanishing = false;
  std::vector<MultiplierValue> values;
};

/// min over sphere nodes of the Euclidean norm |m(xi)|; non-vanishing iff the minimum
/// exceeds max(10 * quadrature error, 1e-6).
NonvanishingScan multiplier_nonvanishing_scan(const Kernel& kernel, int sphere_nodes, const QuadratureSpec& quad = {});

}  // namespace symlab
