// Generators for the measure families studied by the lab: flat planes,
// k-spikes and line configurations, the Cantor product, lattice lines and the
// triangle tiling. Every generator records its parameters in the provenance
// string and sets the trust window of the truncation.
#pragma once

#include "symlab/measure.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace symlab {

namespace detail {

template <typename Scalar>
std::string fmt_vec(const Vector<Scalar>& v) {
  std::ostringstream out;
  out.precision(17);
  out << "[";
  for (Eigen::Index k = 0; k < v.size(); ++k) out << (k ? "," : "") << v(k);
  out << "]";
  return out.str();
}

/// Collects atoms column by column before handing them to DiscreteMeasure.
template <typename Scalar>
class AtomBuffer {
 public:
  explicit AtomBuffer(int dim) : dim_(dim) {}

  void add(const Vector<Scalar>& p, Scalar w) {
    coords_.insert(coords_.end(), p.data(), p.data() + dim_);
    weights_.push_back(w);
  }

  DiscreteMeasure<Scalar> build(Scalar h, std::string provenance, TrustWindowT<Scalar> window) {
    const auto n = static_cast<Eigen::Index>(weights_.size());
    Matrix<Scalar> pos = Eigen::Map<Matrix<Scalar>>(coords_.data(), dim_, n);
    Vector<Scalar> w = Eigen::Map<Vector<Scalar>>(weights_.data(), n);
    return DiscreteMeasure<Scalar>(std::move(pos), std::move(w), h, std::move(provenance), std::move(window));
  }

 private:
  int dim_;
  std::vector<Scalar> coords_;
  std::vector<Scalar> weights_;
};

/// Atoms z + j h u with |j h| <= R; j = 0 is skipped when `skip_origin`.
template <typename Scalar>
void add_line(AtomBuffer<Scalar>& buf, const Vector<Scalar>& z, const Vector<Scalar>& u, Scalar h, Scalar reach,
              Scalar weight, bool skip_origin = false) {
  const auto steps = static_cast<std::int64_t>(std::floor(reach / h + Scalar(1e-9)));
  for (std::int64_t j = -steps; j <= steps; ++j) {
    if (skip_origin && j == 0) continue;
    buf.add(z + (Scalar(j) * h) * u, weight);
  }
}

template <typename Scalar>
Vector<Scalar> unit2(Scalar angle) {
  Vector<Scalar> u(2);
  u << std::cos(angle), std::sin(angle);
  return u;
}

template <typename Scalar>
void check_spacing(Scalar R, Scalar h) {
  if (!(R > 0)) throw InputError("truncation radius must be positive");
  if (!(h > 0)) throw InputError("spacing must be positive");
  if (h > R) throw InputError("spacing must not exceed the truncation radius");
}

}  // namespace detail

/// c * H^s on the affine plane center + span(basis), truncated to B(center, R),
/// on a square grid of spacing h (weights c h^s).
template <typename Scalar>
DiscreteMeasure<Scalar> make_flat_measure(int d, int s, const Matrix<Scalar>& basis, const Vector<Scalar>& center,
                                          Scalar c, Scalar R, Scalar h) {
  if (d < 2) throw InputError("flat measure: ambient dimension must be at least 2");
  if (s < 1 || s >= d) throw InputError("flat measure: need 1 <= s < d");
  if (basis.rows() != d || basis.cols() != s) throw InputError("flat measure: basis must be d x s");
  if (center.size() != d) throw InputError("flat measure: center has wrong dimension");
  if (!(c >= 0)) throw InputError("flat measure: density must be non-negative");
  detail::check_spacing(R, h);
  const Matrix<Scalar> gram = basis.transpose() * basis;
  if ((gram - Matrix<Scalar>::Identity(s, s)).cwiseAbs().maxCoeff() > Scalar(1e-10))
    throw InputError("flat measure: basis is not orthonormal");

  detail::AtomBuffer<Scalar> buf(d);
  const auto steps = static_cast<std::int64_t>(std::floor(R / h + Scalar(1e-9)));
  const Scalar weight = c * std::pow(h, Scalar(s));
  std::vector<std::int64_t> idx(s, -steps);
  const Scalar R2 = R * R * (1 + Scalar(1e-12));
  while (true) {
    Scalar sq = 0;
    for (int k = 0; k < s; ++k) sq += Scalar(idx[k] * idx[k]) * h * h;
    if (sq <= R2) {
      Vector<Scalar> p = center;
      for (int k = 0; k < s; ++k) p += (Scalar(idx[k]) * h) * basis.col(k);
      buf.add(p, weight);
    }
    int k = s - 1;
    while (k >= 0 && idx[k] == steps) idx[k--] = -steps;
    if (k < 0) break;
    ++idx[k];
  }
  std::ostringstream prov;
  prov.precision(17);
  prov << "flat{d=" << d << ",s=" << s << ",center=" << detail::fmt_vec(center) << ",c=" << c << ",R=" << R
       << ",h=" << h << "}";
  return buf.build(h, prov.str(), TrustWindowT<Scalar>{center, R, -1});
}

/// Full lines through z at the given angles with per-line densities, each
/// discretized at spacing h from z and truncated to B(z, R). The shared atom
/// at z carries the sum of the per-line contributions.
template <typename Scalar>
DiscreteMeasure<Scalar> make_line_configuration(const Vector<Scalar>& z, const std::vector<Scalar>& angles,
                                                const std::vector<Scalar>& densities, Scalar R, Scalar h) {
  if (z.size() != 2) throw InputError("line configuration lives in the plane");
  if (angles.size() != densities.size() || angles.empty())
    throw InputError("line configuration: need one density per angle");
  detail::check_spacing(R, h);
  detail::AtomBuffer<Scalar> buf(2);
  Scalar center_weight = 0;
  for (Scalar c : densities) {
    if (!(c >= 0)) throw InputError("line configuration: densities must be non-negative");
    center_weight += c * h;
  }
  bool placed_center = false;
  for (std::size_t n = 0; n < angles.size(); ++n) {
    const Vector<Scalar> u = detail::unit2(angles[n]);
    const auto steps = static_cast<std::int64_t>(std::floor(R / h + Scalar(1e-9)));
    for (std::int64_t j = -steps; j <= steps; ++j) {
      if (j == 0) {
        if (!placed_center) buf.add(z, center_weight);
        placed_center = true;
        continue;
      }
      buf.add(z + (Scalar(j) * h) * u, densities[n] * h);
    }
  }
  std::ostringstream prov;
  prov.precision(17);
  prov << "lines{z=" << detail::fmt_vec(z) << ",angles=[";
  for (std::size_t n = 0; n < angles.size(); ++n) prov << (n ? "," : "") << angles[n];
  prov << "],densities=[";
  for (std::size_t n = 0; n < densities.size(); ++n) prov << (n ? "," : "") << densities[n];
  prov << "],R=" << R << ",h=" << h << "}";
  return buf.build(h, prov.str(), TrustWindowT<Scalar>{z, R, -1});
}

/// Divisors of n in increasing order.
inline std::vector<int> divisors(int n) {
  std::vector<int> out;
  for (int m = 1; m <= n; ++m)
    if (n % m == 0) out.push_back(m);
  return out;
}

/// k-spike measure: c * sum of H^1 on m lines through z at angles alpha + n pi/m.
template <typename Scalar>
DiscreteMeasure<Scalar> make_spike_measure(int k, int m, Scalar alpha, const Vector<Scalar>& z, Scalar c, Scalar R,
                                           Scalar h) {
  if (k < 1 || k % 2 == 0) throw InputError("spike measure: k must be a positive odd integer");
  if (m < 1 || k % m != 0) throw InputError("spike measure: m must divide k");
  std::vector<Scalar> angles;
  for (int n = 0; n < m; ++n) angles.push_back(alpha + Scalar(n) * Scalar(kPi) / Scalar(m));
  auto mu = make_line_configuration(z, angles, std::vector<Scalar>(m, c), R, h);
  std::ostringstream prov;
  prov.precision(17);
  prov << "spike{k=" << k << ",m=" << m << ",alpha=" << alpha << ",z=" << detail::fmt_vec(z) << ",c=" << c
       << ",R=" << R << ",h=" << h << "}";
  return DiscreteMeasure<Scalar>(mu.positions(), mu.weights(), h, prov.str(), mu.window());
}

/// Level-`depth` intervals of the two-map Cantor set of ratio 2^(-1/(s-1)) in
/// [0,1]: centers and masses (each 2^-depth).
template <typename Scalar>
struct CantorFactor {
  Scalar ratio = 0;
  Scalar interval_length = 0;
  std::vector<Scalar> centers;
  std::vector<Scalar> masses;
};

template <typename Scalar>
CantorFactor<Scalar> cantor_factor(Scalar s, int depth) {
  if (!(s > 1 && s < 2)) throw InputError("Cantor product: s must lie in (1, 2)");
  if (depth < 0 || depth > 24) throw InputError("Cantor product: depth must lie in [0, 24]");
  CantorFactor<Scalar> out;
  out.ratio = std::pow(Scalar(2), Scalar(-1) / (s - 1));
  out.interval_length = std::pow(out.ratio, Scalar(depth));
  const std::uint64_t count = std::uint64_t{1} << depth;
  const Scalar mass = std::ldexp(Scalar(1), -depth);
  out.centers.reserve(count);
  for (std::uint64_t code = 0; code < count; ++code) {
    Scalar left = 0;
    Scalar scale = 1;
    for (int level = 0; level < depth; ++level) {
      const bool right = (code >> (depth - 1 - level)) & 1U;
      if (right) left += scale * (1 - out.ratio);
      scale *= out.ratio;
    }
    out.centers.push_back(left + out.interval_length / 2);
    out.masses.push_back(mass);
  }
  return out;
}

/// m_1 x (Cantor measure of dimension s-1): first coordinate on a grid of
/// spacing lambda^depth over [-R, R], second coordinate at the level-depth
/// Cantor interval centers.
template <typename Scalar>
DiscreteMeasure<Scalar> make_cantor_product_measure(Scalar s, int depth, Scalar R) {
  const CantorFactor<Scalar> cantor = cantor_factor(s, depth);
  const Scalar h = cantor.interval_length;
  detail::check_spacing(R, h);
  const auto steps = static_cast<std::int64_t>(std::floor(R / h + Scalar(1e-9)));
  detail::AtomBuffer<Scalar> buf(2);
  Vector<Scalar> p(2);
  for (std::size_t i = 0; i < cantor.centers.size(); ++i) {
    for (std::int64_t j = -steps; j <= steps; ++j) {
      p << Scalar(j) * h, cantor.centers[i];
      buf.add(p, cantor.masses[i] * h);
    }
  }
  std::ostringstream prov;
  prov.precision(17);
  prov << "cantor_product{s=" << s << ",depth=" << depth << ",R=" << R << "}";
  Vector<Scalar> wc(2);
  wc << 0, Scalar(0.5);
  return buf.build(h, prov.str(), TrustWindowT<Scalar>{wc, R, 0});
}

/// Parallel lines L + j a, weight c for odd j and d_weight for even j,
/// truncated to B(0, R).
template <typename Scalar>
DiscreteMeasure<Scalar> make_lattice_lines_measure(const Vector<Scalar>& direction, const Vector<Scalar>& a, Scalar c,
                                                   Scalar d_weight, Scalar R, Scalar h) {
  if (direction.size() != 2 || a.size() != 2) throw InputError("lattice lines live in the plane");
  if (!(c >= 0 && d_weight >= 0)) throw InputError("lattice lines: weights must be non-negative");
  detail::check_spacing(R, h);
  if (!(direction.norm() > 0)) throw InputError("lattice lines: direction must be non-zero");
  const Vector<Scalar> u = direction / direction.norm();
  const Vector<Scalar> a_perp = a - a.dot(u) * u;
  if (a_perp.norm() <= Scalar(1e-12) * std::max<Scalar>(Scalar(1), a.norm()))
    throw InputError("lattice lines: offset a must not be parallel to the line");
  const Scalar gap = a_perp.norm();
  const auto lines = static_cast<std::int64_t>(std::floor(R / gap));
  detail::AtomBuffer<Scalar> buf(2);
  for (std::int64_t j = -lines; j <= lines; ++j) {
    const Vector<Scalar> foot = Scalar(j) * a_perp;
    const Scalar dist = foot.norm();
    if (dist > R) continue;
    const Scalar half = std::sqrt(std::max<Scalar>(Scalar(0), R * R - dist * dist));
    const Scalar w = (j % 2 != 0 ? c : d_weight) * h;
    detail::add_line(buf, foot, u, h, half, w);
  }
  std::ostringstream prov;
  prov.precision(17);
  prov << "lattice_lines{u=" << detail::fmt_vec(u) << ",a=" << detail::fmt_vec(a) << ",c=" << c
       << ",d=" << d_weight << ",R=" << R << ",h=" << h << "}";
  return buf.build(h, prov.str(), TrustWindowT<Scalar>{Vector<Scalar>::Zero(2), R, -1});
}

/// a * H^1 on the edges of the equilateral triangle tiling with line spacing b,
/// rotated by alpha, truncated to B(0, R).
template <typename Scalar>
DiscreteMeasure<Scalar> make_triangle_tiling_measure(Scalar b, Scalar alpha, Scalar a_density, Scalar R, Scalar h) {
  if (!(b > 0)) throw InputError("triangle tiling: cell scale must be positive");
  if (!(a_density >= 0)) throw InputError("triangle tiling: density must be non-negative");
  detail::check_spacing(R, h);
  detail::AtomBuffer<Scalar> buf(2);
  const auto lines = static_cast<std::int64_t>(std::floor(R / b));
  for (int family = 0; family < 3; ++family) {
    const Scalar theta = alpha + Scalar(2 * family) * Scalar(kPi) / 3;
    const Vector<Scalar> u = detail::unit2(theta);
    const Vector<Scalar> normal = detail::unit2(theta + Scalar(kPi) / 2);
    for (std::int64_t l = -lines; l <= lines; ++l) {
      const Scalar dist = std::abs(Scalar(l) * b);
      if (dist > R) continue;
      const Scalar half = std::sqrt(std::max<Scalar>(Scalar(0), R * R - dist * dist));
      detail::add_line(buf, Vector<Scalar>(Scalar(l) * b * normal), u, h, half, a_density * h);
    }
  }
  std::ostringstream prov;
  prov.precision(17);
  prov << "triangle_tiling{b=" << b << ",alpha=" << alpha << ",a=" << a_density << ",R=" << R << ",h=" << h << "}";
  return buf.build(h, prov.str(), TrustWindowT<Scalar>{Vector<Scalar>::Zero(2), R, -1});
}

/// Finitely many atoms; exact everywhere (no truncation, h = 0).
template <typename Scalar>
DiscreteMeasure<Scalar> make_atomic_measure(const Matrix<Scalar>& positions, const Vector<Scalar>& weights) {
  std::ostringstream prov;
  prov << "atoms{n=" << weights.size() << "}";
  return DiscreteMeasure<Scalar>(positions, weights, Scalar(0), prov.str(), TrustWindowT<Scalar>{});
}

}  // namespace symlab
