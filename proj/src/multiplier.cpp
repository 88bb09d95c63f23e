#include "symlab/multiplier.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace symlab {

void gauss_legendre(int order, Vec& nodes, Vec& weights) {
  if (order < 1) throw InputError("gauss_legendre: order must be positive");
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix.
  Mat jacobi = Mat::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(jacobi);
  nodes = eig.eigenvalues();
  weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
}

namespace {

struct Rule {
  std::vector<Vec> nodes;
  std::vector<double> weights;
};

/// Breakpoints 0 < pi/4 < ... < pi/2 (1 - 2^-levels) < pi/2.
std::vector<double> graded_breaks(int levels) {
  std::vector<double> b{0.0};
  for (int j = 1; j <= levels; ++j) b.push_back(0.5 * kPi * (1.0 - std::ldexp(1.0, -j)));
  b.push_back(0.5 * kPi);
  return b;
}

Rule full_sphere(const Mat& basis, int order, int levels);

/// Hemisphere around basis.col(0) inside span(basis).
Rule hemisphere(const Mat& basis, int order, int levels) {
  const int k = static_cast<int>(basis.cols());
  const Vec axis = basis.col(0);
  if (k == 1) return Rule{{axis}, {1.0}};
  const Rule inner = full_sphere(basis.rightCols(k - 1), order, levels);
  Vec gx, gw;
  gauss_legendre(order, gx, gw);
  const std::vector<double> breaks = graded_breaks(levels);
  Rule out;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double lo = breaks[p];
    const double half = 0.5 * (breaks[p + 1] - lo);
    for (int q = 0; q < order; ++q) {
      const double psi = lo + half * (gx(q) + 1.0);
      const double jac = half * gw(q) * std::pow(std::sin(psi), k - 2);
      for (std::size_t e = 0; e < inner.nodes.size(); ++e) {
        out.nodes.push_back(std::cos(psi) * axis + std::sin(psi) * inner.nodes[e]);
        out.weights.push_back(jac * inner.weights[e]);
      }
    }
  }
  return out;
}

Rule full_sphere(const Mat& basis, int order, int levels) {
  const int k = static_cast<int>(basis.cols());
  Rule out;
  if (k == 2) {
    // Periodic trapezoid on a great circle: spectrally accurate for smooth integrands.
    const int n = 4 * order;
    for (int j = 0; j < n; ++j) {
      const double t = 2.0 * kPi * (j + 0.5) / n;
      out.nodes.push_back(std::cos(t) * basis.col(0) + std::sin(t) * basis.col(1));
      out.weights.push_back(2.0 * kPi / n);
    }
    return out;
  }
  Rule half = hemisphere(basis, order, levels);
  for (std::size_t i = 0; i < half.nodes.size(); ++i) {
    out.nodes.push_back(half.nodes[i]);
    out.weights.push_back(half.weights[i]);
    out.nodes.push_back(-half.nodes[i]);
    out.weights.push_back(half.weights[i]);
  }
  return out;
}

/// Orthonormal basis of R^d whose first column is `axis`.
Mat frame(const Vec& axis) {
  Eigen::HouseholderQR<Mat> qr(axis);
  Mat q = qr.householderQ() * Mat::Identity(axis.size(), axis.size());
  q.col(0) = axis;
  return q;
}

ComplexVec evaluate(const Kernel& kernel, const Vec& xi, int order, int levels) {
  Mat nodes;
  Vec weights;
  hemisphere_rule(xi, order, levels, nodes, weights);
  const int q = kernel.codomain_dim();
  Vec sgn_part = Vec::Zero(q);
  Vec log_part = Vec::Zero(q);
  for (Eigen::Index i = 0; i < nodes.cols(); ++i) {
    const Vec w = nodes.col(i);
    const Vec plus = kernel(w);
    const Vec minus = kernel(Vec(-w));
    const double l = std::log(std::abs(xi.dot(w)));
    sgn_part += weights(i) * (plus - minus);
    log_part += weights(i) * l * (plus + minus);
  }
  ComplexVec m(q);
  for (int j = 0; j < q; ++j) m(j) = std::complex<double>(-log_part(j), -0.5 * kPi * sgn_part(j));
  return m;
}

}  // namespace

void hemisphere_rule(const Vec& axis, int order, int levels, Mat& nodes, Vec& weights) {
  if (axis.size() < 2) throw InputError("hemisphere_rule: dimension must be at least 2");
  const Rule rule = hemisphere(frame(axis), order, levels);
  nodes.resize(axis.size(), static_cast<Eigen::Index>(rule.nodes.size()));
  weights.resize(static_cast<Eigen::Index>(rule.weights.size()));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    nodes.col(static_cast<Eigen::Index>(i)) = rule.nodes[i];
    weights(static_cast<Eigen::Index>(i)) = rule.weights[i];
  }
}

MultiplierValue multiplier(const Kernel& kernel, const Vec& xi, const QuadratureSpec& quad) {
  if (xi.size() != kernel.dim()) throw InputError("multiplier: xi has wrong dimension");
  if (std::abs(xi.norm() - 1.0) > 1e-12) throw InputError("multiplier: xi must be a unit vector");
  if (quad.order < 2 || quad.levels < 0 || quad.max_refinements < 1) throw InputError("multiplier: bad quadrature spec");
  int order = quad.order;
  int levels = quad.levels;
  ComplexVec coarse = evaluate(kernel, xi, order, levels);
  double diff = 0;
  for (int step = 0; step < quad.max_refinements; ++step) {
    order *= 2;
    levels += 2;
    ComplexVec fine = evaluate(kernel, xi, order, levels);
    diff = (fine - coarse).cwiseAbs().maxCoeff();
    if (diff <= quad.tolerance) return {xi, fine, diff};
    coarse = std::move(fine);
  }
  throw QuadratureError("multiplier quadrature did not settle", coarse.cwiseAbs().maxCoeff(), diff);
}

std::vector<Vec> sphere_nodes(int dim, int count) {
  if (count < 1) throw InputError("sphere_nodes: count must be positive");
  std::vector<Vec> out;
  if (dim == 2) {
    for (int j = 0; j < count; ++j) {
      const double t = 2.0 * kPi * j / count;
      out.push_back((Vec(2) << std::cos(t), std::sin(t)).finished());
    }
  } else if (dim == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < count; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / count;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      out.push_back((Vec(3) << rho * std::cos(golden * j), rho * std::sin(golden * j), z).finished());
    }
  } else {
    throw InputError("sphere_nodes: only d = 2 and d = 3 grids are provided");
  }
  return out;
}

NonvanishingScan multiplier_nonvanishing_scan(const Kernel& kernel, int nodes, const QuadratureSpec& quad) {
  if (nodes < 8) throw InputError("multiplier scan: need at least 8 sphere nodes");
  NonvanishingScan scan;
  scan.min_modulus = std::numeric_limits<double>::infinity();
  for (const Vec& xi : sphere_nodes(kernel.dim(), nodes)) {
    MultiplierValue v = multiplier(kernel, xi, quad);
    const double modulus = v.value.norm();
    scan.max_error = std::max(scan.max_error, v.error_estimate);
    if (modulus < scan.min_modulus) {
      scan.min_modulus = modulus;
      scan.witness = xi;
    }
    scan.values.push_back(std::move(v));
  }
  scan.margin = std::max(10.0 * scan.max_error, 1e-6);
  scan.nonvanishing = scan.min_modulus > scan.margin;
  return scan;
}

}  // namespace symlab
