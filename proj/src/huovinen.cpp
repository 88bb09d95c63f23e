#include "symlab/huovinen.hpp"

#include <cmath>

namespace symlab {

std::complex<double> huovinen_angle_residual(int k, double c_minus, double c_plus, double theta) {
  if (k < 1 || k % 2 == 0) throw InputError("angle residual: k must be a positive odd integer");
  const std::complex<double> z = std::cos(theta) * std::polar(1.0, theta) - 1.0;
  return c_minus * std::pow(z, k) + c_plus * std::pow(std::conj(z), k);
}

std::vector<double> huovinen_angle_roots(int k, const RootSearch& search) {
  if (k < 1 || k % 2 == 0) throw InputError("angle roots: k must be a positive odd integer");
  if (!(search.hi > search.lo) || search.grid_points < 2) throw InputError("angle roots: empty search interval");
  const double spacing = (search.hi - search.lo) / search.grid_points;
  if (spacing >= kPi / (2.0 * k))
    throw InputError("angle roots: grid spacing " + std::to_string(spacing) + " cannot separate roots pi/" +
                     std::to_string(k) + " apart");
  auto f = [k](double t) { return huovinen_angle_residual(k, 1.0, 1.0, t).real(); };
  std::vector<double> roots;
  const double merge = kPi / (4.0 * k);
  double a = search.lo + spacing;
  double fa = f(a);
  for (int i = 1; i < search.grid_points; ++i) {
    const double b = search.lo + (i + 1) * spacing;
    const double fb = f(b);
    if (fa == 0.0 || (fa < 0) != (fb < 0)) {
      double lo = a;
      double hi = b;
      double flo = fa;
      while (hi - lo > search.tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double root = fa == 0.0 ? a : 0.5 * (lo + hi);
      if (roots.empty() || root - roots.back() > merge) roots.push_back(root);
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0 && (roots.empty() || a - roots.back() > merge)) roots.push_back(a);
  return roots;
}

std::complex<double> center_balance(int k, const std::vector<double>& ray_angles,
                                    const std::vector<double>& ray_weights) {
  if (ray_angles.size() != ray_weights.size()) throw InputError("center balance: one weight per ray");
  std::complex<double> sum = 0.0;
  for (std::size_t j = 0; j < ray_angles.size(); ++j) {
    if (!(ray_weights[j] >= 0)) throw InputError("center balance: weights must be non-negative");
    sum += ray_weights[j] * std::polar(1.0, k * ray_angles[j]);
  }
  return sum;
}

void alternating_rays(int n, double a, double b, std::vector<double>& angles, std::vector<double>& weights) {
  if (n < 1) throw InputError("alternating rays: need at least one line");
  angles.clear();
  weights.clear();
  for (int j = 0; j < 2 * n; ++j) {
    angles.push_back(j * kPi / n);
    weights.push_back(j % 2 == 0 ? a : b);
  }
}

}  // namespace symlab
