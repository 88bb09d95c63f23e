// Angle relations for planar line configurations under the kernel z^k/|z|^(k-1).
#pragma once

#include "symlab/core.hpp"

#include <complex>
#include <vector>

namespace symlab {

/// c_minus (cos t e^{it} - 1)^k + c_plus (cos t e^{-it} - 1)^k.
std::complex<double> huovinen_angle_residual(int k, double c_minus, double c_plus, double theta);

struct RootSearch {
  double lo = 0.0;
  double hi = 0.5 * kPi;
  /// Bracketing grid points across (lo, hi]; spacing must stay below pi/(2k).
  int grid_points = 2000;
  double tolerance = 1e-12;
};

/// Roots in (lo, hi] of the equal-weight residual, found by sign changes of its
/// real part (the imaginary part vanishes identically) and bisection.
std::vector<double> huovinen_angle_roots(int k, const RootSearch& search = {});

/// sum_j c_j e^{i k angle_j}.
std::complex<double> center_balance(int k, const std::vector<double>& ray_angles,
                                    const std::vector<double>& ray_weights);

/// Rays of n full lines through a point at angles j pi / n with alternating
/// weights a (even j) and b (odd j).
void alternating_rays(int n, double a, double b, std::vector<double>& angles, std::vector<double>& weights);

}  // namespace symlab
