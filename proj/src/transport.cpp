#include "symlab/transport.hpp"

#include "network_simplex.hpp"
#include "symlab/generators.hpp"
#include "symlab/multiplier.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace symlab {

Vec LipschitzDualInstance::bounds() const {
  Vec b(size());
  for (Eigen::Index i = 0; i < size(); ++i)
    b(i) = kTransportWindow - (positions.col(i) - center).norm() / radius;
  return b;
}

DualSolution lipschitz_dual_value(const LipschitzDualInstance& inst, const SolverOptions& options) {
  DualSolution sol;
  const Eigen::Index n = inst.size();
  if (!inst.coefficients.allFinite()) throw InputError("dual LP: coefficients must be finite");
  sol.method = n > options.n_exact ? "exact-LP/neighbour-pricing" : "exact-LP";
  if (n == 0) {
    sol.f = Vec(0);
    return sol;
  }
  const Mat scaled = inst.positions / inst.radius;
  const Vec b = inst.bounds();
  if (b.minCoeff() <= 0) throw InputError("dual LP: entries must lie inside B(x, 4r)");
  const long max_pivots = options.max_pivots > 0 ? options.max_pivots : 100L * (n + 1) + 10000;
  detail::LipschitzFlowSolver solver(scaled, inst.coefficients, b);
  const detail::FlowResult res =
      solver.solve(options.tolerance, max_pivots, n > options.n_exact ? options.neighbours : 0);
  const double gap = std::abs(res.primal - res.dual) + res.violation;
  if (!res.optimal) throw SolverError("dual LP: pivot limit reached before optimality", gap);
  sol.f = res.potentials;
  sol.pivots = res.pivots;
  sol.certificate_gap = gap;
  sol.value = std::max(0.0, inst.coefficients.dot(sol.f)) / std::pow(inst.radius, inst.s);
  return sol;
}

namespace {

/// Depth-first sign assignment along a spanning tree rooted at the ground,
/// keeping only partial assignments that satisfy every constraint so far.
struct TreeVertexSearch {
  const Mat& pos;
  const Vec& a;
  const Vec& b;
  std::vector<int> order;
  std::vector<int> parent;
  Vec f;
  double best = 0;

  double cost(int u, int v, int ground) const {
    if (u == ground) return b(v);
    if (v == ground) return b(u);
    return (pos.col(u) - pos.col(v)).norm();
  }

  void run(std::size_t depth, int ground) {
    if (depth == order.size()) {
      best = std::max(best, a.dot(f));
      return;
    }
    const int v = order[depth];
    const int p = parent[v];
    const double base = p == ground ? 0.0 : f(p);
    const double c = cost(v, p, ground);
    for (int sign : {1, -1}) {
      const double value = base + sign * c;
      const double tol = 1e-12 * (1 + std::abs(value));
      bool ok = std::abs(value) <= b(v) + tol;
      for (std::size_t t = 0; ok && t < depth; ++t) {
        const int u = order[t];
        ok = std::abs(value - f(u)) <= cost(u, v, ground) + tol;
      }
      if (!ok) continue;
      f(v) = value;
      run(depth + 1, ground);
    }
  }
};

}  // namespace

double brute_force_dual_value(const LipschitzDualInstance& inst) {
  const int n = static_cast<int>(inst.size());
  if (n > 6) throw RefusalError("brute force oracle: at most 6 entries");
  if (n == 0) return 0.0;
  const Mat pos = inst.positions / inst.radius;
  const Vec b = inst.bounds();
  const int nodes = n + 1;
  const int ground = n;
  TreeVertexSearch search{pos, inst.coefficients, b, {}, {}, Vec::Zero(n), 0.0};

  // Every vertex of the bounded polytope has n linearly independent tight
  // constraints; their graph over {entries, ground} is a spanning tree.
  std::vector<int> code(static_cast<std::size_t>(std::max(0, nodes - 2)), 0);
  while (true) {
    // Pruefer decoding.
    std::vector<int> degree(nodes, 1);
    for (int c : code) ++degree[c];
    std::vector<std::vector<int>> adj(nodes);
    for (int c : code) {
      int leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      adj[leaf].push_back(c);
      adj[c].push_back(leaf);
      --degree[leaf];
      --degree[c];
    }
    int u = -1;
    for (int v = 0; v < nodes; ++v)
      if (degree[v] == 1) {
        if (u < 0) {
          u = v;
        } else {
          adj[u].push_back(v);
          adj[v].push_back(u);
        }
      }
    search.order.clear();
    search.parent.assign(nodes, -1);
    std::vector<int> queue{ground};
    std::vector<char> seen(nodes, 0);
    seen[ground] = 1;
    for (std::size_t q = 0; q < queue.size(); ++q)
      for (int w : adj[queue[q]])
        if (!seen[w]) {
          seen[w] = 1;
          search.parent[w] = queue[q];
          search.order.push_back(w);
          queue.push_back(w);
        }
    search.run(0, ground);

    std::size_t pos_idx = 0;
    while (pos_idx < code.size() && ++code[pos_idx] == nodes) code[pos_idx++] = 0;
    if (pos_idx == code.size()) break;
  }
  return search.best / std::pow(inst.radius, inst.s);
}

FeasibilityAudit audit_solution(const LipschitzDualInstance& inst, const DualSolution& sol, double slack_tol) {
  FeasibilityAudit audit;
  const Eigen::Index n = inst.size();
  const Vec b = inst.bounds();
  audit.min_pair_slack = std::numeric_limits<double>::infinity();
  audit.min_boundary_slack = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    audit.max_abs_f = std::max(audit.max_abs_f, std::abs(sol.f(i)));
    audit.min_boundary_slack = std::min(audit.min_boundary_slack, b(i) - std::abs(sol.f(i)));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double c = (inst.positions.col(i) - inst.positions.col(j)).norm() / inst.radius;
      audit.min_pair_slack = std::min(audit.min_pair_slack, c - std::abs(sol.f(i) - sol.f(j)));
    }
  }
  if (n < 2) audit.min_pair_slack = 0;
  if (n < 1) audit.min_boundary_slack = 0;
  audit.upper_bound = kTransportWindow * (inst.mu_mass + inst.nu_mass) / std::pow(inst.radius, inst.s);
  audit.ok = audit.min_pair_slack >= -slack_tol && audit.min_boundary_slack >= -slack_tol &&
             audit.max_abs_f <= kTransportWindow + slack_tol && sol.value <= audit.upper_bound * (1 + 1e-12) + 1e-15;
  return audit;
}

namespace {

const CutoffPhi kPhi{};

double phi_mass(const Measure& m, const Vec& x, double r) {
  if (m.empty()) return 0.0;
  double acc = 0;
  for (int i : m.atoms_in_ball(x, kTransportWindow * r))
    acc += kPhi((m.position(i) - x).norm() / r) * m.weight(i);
  return acc;
}

}  // namespace

double c_coefficient(const Measure& mu, const Measure& nu, const Vec& x, double r) {
  if (!(r > 0)) throw InputError("c coefficient: r must be positive");
  if (!mu.empty()) mu.require_window(x, kTransportWindow * r, "c coefficient (mu)");
  if (!nu.empty()) nu.require_window(x, kTransportWindow * r, "c coefficient (nu)");
  const double den = phi_mass(nu, x, r);
  return den > 0 ? phi_mass(mu, x, r) / den : 0.0;
}

LipschitzDualInstance build_instance(const Measure& mu, const Measure& nu, const Vec& x, double r, double s,
                                     std::optional<double> c_override) {
  if (!(r > 0)) throw InputError("build_instance: r must be positive");
  if (!mu.empty()) mu.require_window(x, kTransportWindow * r, "build_instance (mu)");
  if (!nu.empty()) {
    nu.require_window(x, kTransportWindow * r, "build_instance (nu)");
    if (nu.dim() != static_cast<int>(x.size())) throw InputError("build_instance: nu has wrong dimension");
  }
  LipschitzDualInstance inst;
  inst.center = x;
  inst.radius = r;
  inst.s = s;
  inst.c = c_override ? *c_override : c_coefficient(mu, nu, x, r);

  struct Raw {
    Vec p;
    double coef;
    double mass;
  };
  std::vector<Raw> raw;
  auto collect = [&](const Measure& m, double sign) {
    if (m.empty()) return;
    for (int i : m.atoms_in_ball(x, kTransportWindow * r)) {
      const double ph = kPhi((m.position(i) - x).norm() / r);
      if (ph <= 0) continue;
      const double w = ph * m.weight(i) * (sign > 0 ? 1.0 : inst.c);
      if (w == 0) continue;
      raw.push_back({m.position(i), sign * w, w});
      (sign > 0 ? inst.mu_mass : inst.nu_mass) += w;
    }
  };
  collect(mu, 1.0);
  collect(nu, -1.0);

  // Merge positions closer than 1e-9 r; the lowest index represents the group.
  const int total = static_cast<int>(raw.size());
  Mat all(x.size(), total);
  for (int i = 0; i < total; ++i) all.col(i) = raw[i].p;
  const KdTree<double> tree(all);
  std::vector<int> rep(total, -1);
  std::vector<double> coef;
  std::vector<double> gross;
  std::vector<int> rep_index;
  for (int i = 0; i < total; ++i) {
    if (rep[i] >= 0) continue;
    rep[i] = static_cast<int>(coef.size());
    coef.push_back(0.0);
    gross.push_back(0.0);
    rep_index.push_back(i);
    for (int j : tree.ball(all.col(i), 1e-9 * r))
      if (rep[j] < 0) rep[j] = rep[i];
  }
  for (int i = 0; i < total; ++i) {
    coef[rep[i]] += raw[i].coef;
    gross[rep[i]] += raw[i].mass;
  }
  std::vector<int> keep;
  for (std::size_t g = 0; g < coef.size(); ++g)
    if (std::abs(coef[g]) > 1e-12 * gross[g]) keep.push_back(static_cast<int>(g));
  inst.positions.resize(x.size(), static_cast<Eigen::Index>(keep.size()));
  inst.coefficients.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t t = 0; t < keep.size(); ++t) {
    inst.positions.col(static_cast<Eigen::Index>(t)) = raw[rep_index[keep[t]]].p;
    inst.coefficients(static_cast<Eigen::Index>(t)) = coef[keep[t]];
  }
  return inst;
}

double zero_candidate_value(const Measure& mu, const Vec& x, double r, double s) {
  mu.require_window(x, kTransportWindow * r, "zero candidate");
  double acc = 0;
  for (int i : mu.atoms_in_ball(x, kTransportWindow * r)) {
    const double t = (mu.position(i) - x).norm() / r;
    acc += kPhi(t) * mu.weight(i) * (kTransportWindow - t);
  }
  return acc / std::pow(r, s);
}

std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Flat: return "flat";
    case FamilyKind::Spike: return "spike";
    case FamilyKind::Zero: return "zero";
    case FamilyKind::ExplicitList: return "explicit";
  }
  return "unknown";
}

FamilyKind parse_family_kind(const std::string& name) {
  if (name == "flat") return FamilyKind::Flat;
  if (name == "spike") return FamilyKind::Spike;
  if (name == "zero") return FamilyKind::Zero;
  if (name == "explicit") return FamilyKind::ExplicitList;
  throw ConfigError("unknown candidate family '" + name + "'");
}

std::string CandidateDescriptor::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << kind;
  for (double p : params) out << ' ' << p;
  return out.str();
}

namespace {

/// Unit-ball volume in dimension s, the density normalizing H^s on a plane into M_s.
double plane_density(int s) {
  return std::tgamma(0.5 * s + 1.0) / std::pow(kPi, 0.5 * s);
}

struct Line {
  Vec anchor;
  Vec dir;
};

/// A candidate measure given geometrically, materialized on demand.
struct Candidate {
  CandidateDescriptor desc;
  std::vector<Line> lines;
  double line_density = 0;
  Mat plane_basis;
  const Measure* given = nullptr;
  bool zero = false;
};

double dist_to_line(const Vec& y, const Line& l) {
  const Vec w = y - l.anchor;
  return (w - w.dot(l.dir) * l.dir).norm();
}

class AlphaEngine {
 public:
  AlphaEngine(const Measure& mu, const Vec& x, double r, double s, const CandidateFamily& family,
              const SolverOptions& options)
      : mu_(mu), x_(x), r_(r), s_(s), family_(family), options_(options) {
    if (!(r > 0)) throw InputError("alpha: r must be positive");
    if (x.size() != mu.dim()) throw InputError("alpha: point has wrong dimension");
    mu.require_window(x, kTransportWindow * r, "alpha");
    h_c_ = r / family.h_ratio;
    if (mu.resolution() > 0 && mu.resolution() <= h_c_) h_c_ = mu.resolution();
    reach_ = kTransportWindow * r * (1 + family.margin);
    norm_ = std::pow(r, s);
    for (int i : mu.atoms_in_ball(x, kTransportWindow * r)) {
      const double t = (mu.position(i) - x).norm() / r;
      const double w = kPhi(t) * mu.weight(i);
      if (w <= 0) continue;
      entries_.push_back(mu.position(i));
      entry_w_.push_back(w);
      entry_b_.push_back(kTransportWindow - t);
    }
  }

  double lb_support(const Candidate& c) const {
    // f = min(dist(., supp nu)/r, b) is admissible and vanishes on supp nu.
    if (c.zero) return std::numeric_limits<double>::infinity();
    double acc = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      double d = std::numeric_limits<double>::infinity();
      if (c.given) {
        d = c.given->empty() ? d : c.given->nearest_atom(entries_[i]).second;
      } else if (c.plane_basis.size() > 0) {
        const Vec w = entries_[i] - x_;
        d = (w - c.plane_basis * (c.plane_basis.transpose() * w)).norm();
      } else {
        for (const Line& l : c.lines) d = std::min(d, dist_to_line(entries_[i], l));
      }
      acc += entry_w_[i] * std::min(d / r_, entry_b_[i]);
    }
    return acc / norm_;
  }

  Measure materialize(const Candidate& c) const {
    if (c.given) return *c.given;
    const int d = static_cast<int>(x_.size());
    if (c.plane_basis.size() > 0) {
      const int s = static_cast<int>(c.plane_basis.cols());
      return make_flat_measure(d, s, c.plane_basis, x_, plane_density(s), reach_, h_c_);
    }
    detail::AtomBuffer<double> buf(d);
    for (const Line& l : c.lines) {
      const Vec w = l.anchor - x_;
      const double wu = w.dot(l.dir);
      const double disc = wu * wu - w.squaredNorm() + reach_ * reach_;
      if (disc < 0) continue;
      const double root = std::sqrt(disc);
      const auto lo = static_cast<long long>(std::ceil((-wu - root) / h_c_));
      const auto hi = static_cast<long long>(std::floor((-wu + root) / h_c_));
      for (long long j = lo; j <= hi; ++j) buf.add(l.anchor + (double(j) * h_c_) * l.dir, c.line_density * h_c_);
    }
    return buf.build(h_c_, c.desc.describe(), TrustWindow{x_, reach_, -1});
  }

  /// Best of the admissible test functions clamp(dist(., supp nu)/r - t, -b, b)
  /// and their mirrors built from supp mu, over a grid of shifts t.
  double profile_bound(const LipschitzDualInstance& inst, const Measure& nu) const {
    const Eigen::Index n = inst.size();
    if (n == 0) return 0.0;
    const Vec b = inst.bounds();
    Vec d_nu(n);
    Vec d_mu(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      d_nu(i) = nu.empty() ? b(i) : std::min(b(i), nu.nearest_atom(inst.positions.col(i)).second / r_);
      d_mu(i) = mu_.empty() ? b(i) : std::min(b(i), mu_.nearest_atom(inst.positions.col(i)).second / r_);
    }
    double best = 0;
    for (int step = 0; step <= 80; ++step) {
      const double t = 0.05 * step;
      const double from_nu = inst.coefficients.dot((d_nu.array() - t).max(-b.array()).matrix());
      const double from_mu = -inst.coefficients.dot((d_mu.array() - t).max(-b.array()).matrix());
      best = std::max({best, from_nu, from_mu});
    }
    return best / norm_;
  }

  /// Solves the instance binned to cells of four spacings and extends the
  /// coarse potentials to the entries, from below and from above.
  double coarse_bound(const LipschitzDualInstance& inst) const {
    const Eigen::Index n = inst.size();
    if (n <= 400) return 0.0;
    const double cell = 4 * std::max(mu_.resolution(), h_c_);
    std::map<std::vector<long long>, int> bins;
    std::vector<int> rep;
    std::vector<double> coef;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::vector<long long> key(x_.size());
      for (Eigen::Index q = 0; q < x_.size(); ++q)
        key[q] = static_cast<long long>(std::floor((inst.positions(q, i) - x_(q)) / cell));
      const auto [it, fresh] = bins.emplace(key, static_cast<int>(rep.size()));
      if (fresh) {
        rep.push_back(static_cast<int>(i));
        coef.push_back(0.0);
      }
      coef[it->second] += inst.coefficients(i);
    }
    LipschitzDualInstance coarse = inst;
    coarse.positions.resize(x_.size(), static_cast<Eigen::Index>(rep.size()));
    coarse.coefficients.resize(static_cast<Eigen::Index>(rep.size()));
    for (std::size_t t = 0; t < rep.size(); ++t) {
      coarse.positions.col(static_cast<Eigen::Index>(t)) = inst.positions.col(rep[t]);
      coarse.coefficients(static_cast<Eigen::Index>(t)) = coef[t];
    }
    const DualSolution sol = lipschitz_dual_value(coarse, options_);
    const Vec b = inst.bounds();
    double below = 0;
    double above = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double lo = b(i);
      double hi = -b(i);
      for (Eigen::Index j = 0; j < coarse.size(); ++j) {
        const double d = (inst.positions.col(i) - coarse.positions.col(j)).norm() / r_;
        lo = std::min(lo, sol.f(j) + d);
        hi = std::max(hi, sol.f(j) - d);
      }
      below += inst.coefficients(i) * lo;
      above += inst.coefficients(i) * hi;
    }
    return std::max(below, above) / norm_;
  }

  /// Exact value of one candidate, or a lower bound above `best` when that
  /// already rules it out. Returns (value, exact).
  std::pair<double, bool> evaluate(const Candidate& c, double best, double lb1) {
    if (c.zero) return {zero_candidate_value(mu_, x_, r_, s_), true};
    if (lb1 > best) return {lb1, false};
    const Measure nu = materialize(c);
    const LipschitzDualInstance inst = build_instance(mu_, nu, x_, r_, s_);
    const double lb = profile_bound(inst, nu);
    if (lb > best) return {lb, false};
    const double lb_coarse = coarse_bound(inst);
    if (lb_coarse > best) return {lb_coarse, false};
    const DualSolution sol = lipschitz_dual_value(inst, options_);
    const FeasibilityAudit audit = audit_solution(inst, sol);
    if (!audit.ok) throw SolverError("alpha: dual solution failed its feasibility audit", sol.certificate_gap);
    ++lp_solves_;
    gap_ = std::max(gap_, sol.certificate_gap);
    method_ = sol.method;
    return {sol.value, true};
  }

  AlphaResult run(std::vector<Candidate> cands, const std::function<Candidate(const Candidate&, const Vec&)>& perturb,
                  const std::function<Vec(const Candidate&)>& params) {
    AlphaResult out;
    out.candidates = static_cast<int>(cands.size());
    if (cands.empty()) throw InputError("alpha: empty candidate family");
    std::vector<double> lb(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) lb[i] = cands[i].zero ? -1.0 : lb_support(cands[i]);
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lb[a] < lb[b]; });
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t idx : order) {
      if (lb[idx] > best || (lb[idx] == best && idx > best_idx)) {
        ++out.pruned;
        continue;
      }
      const auto [value, exact] = evaluate(cands[idx], best, lb[idx]);
      if (!exact) {
        ++out.pruned;
        continue;
      }
      if (value < best || (value == best && idx < best_idx)) {
        best = value;
        best_idx = idx;
      }
    }
    Candidate winner = cands[best_idx];
    if (family_.refine && perturb && !winner.zero && !winner.given && best > 1e-12) {
      // Golden-section search along each parameter within one grid step of the winner.
      Vec p = params(winner);
      int evals = 0;
      auto value_at = [&](const Vec& q) {
        Candidate trial = perturb(winner, q);
        const auto [value, exact] = evaluate(trial, best, lb_support(trial));
        ++evals;
        if (exact && value < best) {
          best = value;
          winner = trial;
        }
        return value;
      };
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      for (Eigen::Index k = 0; k < p.size() && best > 1e-12; ++k) {
        const Vec base = params(winner);
        double lo = base(k) - step_sizes_(k);
        double hi = base(k) + step_sizes_(k);
        auto at = [&](double t) {
          Vec q = base;
          q(k) = t;
          return value_at(q);
        };
        double m1 = hi - g * (hi - lo);
        double m2 = lo + g * (hi - lo);
        double f1 = at(m1);
        double f2 = at(m2);
        for (int it = 2; it < family_.refine_iterations; ++it) {
          if (f1 <= f2) {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - g * (hi - lo);
            f1 = at(m1);
          } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + g * (hi - lo);
            f2 = at(m2);
          }
        }
      }
      out.candidates += evals;
    }
    out.value = best;
    out.best = winner.desc;
    out.method = method_.empty() ? "closed-form" : method_;
    out.gap = gap_;
    out.lp_solves = lp_solves_;
    return out;
  }

  Vec step_sizes_;

 private:
  const Measure& mu_;
  Vec x_;
  double r_;
  double s_;
  const CandidateFamily& family_;
  SolverOptions options_;
  double h_c_ = 0;
  double reach_ = 0;
  double norm_ = 1;
  std::vector<Vec> entries_;
  std::vector<double> entry_w_;
  std::vector<double> entry_b_;
  int lp_solves_ = 0;
  double gap_ = 0;
  std::string method_;
};

Vec unit_dir(int d, const Vec& angles) {
  // d = 2: angle; d = 3: (polar, azimuth).
  Vec u(d);
  if (d == 2) {
    u << std::cos(angles(0)), std::sin(angles(0));
  } else {
    u << std::sin(angles(0)) * std::cos(angles(1)), std::sin(angles(0)) * std::sin(angles(1)), std::cos(angles(0));
  }
  return u;
}

Vec dir_angles(const Vec& u) {
  if (u.size() == 2) return (Vec(1) << std::atan2(u(1), u(0))).finished();
  return (Vec(2) << std::acos(std::clamp(u(2), -1.0, 1.0)), std::atan2(u(1), u(0))).finished();
}

/// Orthonormal complement of a unit normal in R^3.
Mat plane_from_normal(const Vec& n) {
  Eigen::HouseholderQR<Mat> qr(n);
  Mat q = qr.householderQ() * Mat::Identity(3, 3);
  return q.rightCols(2);
}

Candidate line_candidate(const Vec& x, const Vec& u, const std::string& kind, std::vector<double> params) {
  Candidate c;
  c.desc = {kind, std::move(params)};
  c.lines.push_back({x, u});
  c.line_density = 0.5;
  return c;
}

Candidate spike_candidate(const Vec& x, int m, double beta, double t) {
  Candidate c;
  c.desc = {"spike", {double(m), beta, t}};
  const Vec u0 = unit_dir(2, (Vec(1) << beta).finished());
  c.lines.push_back({x, u0});
  const Vec z = x - t * u0;
  for (int n = 1; n < m; ++n) c.lines.push_back({z, unit_dir(2, (Vec(1) << beta + n * kPi / m).finished())});
  c.line_density = 0.5 / m;
  return c;
}

/// Top-s principal directions of the phi-weighted atoms around x.
Mat principal_directions(const Measure& mu, const Vec& x, double r, int s) {
  const int d = static_cast<int>(x.size());
  Mat second = Mat::Zero(d, d);
  for (int i : mu.atoms_in_ball(x, kTransportWindow * r)) {
    const Vec w = mu.position(i) - x;
    second += kPhi(w.norm() / r) * mu.weight(i) * w * w.transpose();
  }
  if (second.norm() == 0) return Mat();
  Eigen::SelfAdjointEigenSolver<Mat> eig(second);
  return eig.eigenvectors().rightCols(s);
}

}  // namespace

AlphaResult alpha_general(const Measure& mu, const Vec& x, double r, double s, const CandidateFamily& family,
                          const SolverOptions& options) {
  AlphaEngine engine(mu, x, r, s, family, options);
  const int d = static_cast<int>(x.size());
  std::vector<Candidate> cands;
  if (family.include_zero || family.kind == FamilyKind::Zero) {
    Candidate z;
    z.zero = true;
    z.desc = {"zero", {}};
    cands.push_back(z);
  }
  std::function<Candidate(const Candidate&, const Vec&)> perturb;
  std::function<Vec(const Candidate&)> params;

  switch (family.kind) {
    case FamilyKind::Zero:
      break;
    case FamilyKind::ExplicitList:
      for (std::size_t i = 0; i < family.explicit_candidates.size(); ++i) {
        Candidate c;
        c.given = &family.explicit_candidates[i];
        c.desc = {"explicit", {double(i)}};
        cands.push_back(c);
      }
      break;
    case FamilyKind::Flat: {
      const int ps = family.plane_dim;
      if (ps < 1 || ps >= d) throw InputError("flat family: plane dimension must lie in [1, d)");
      if (std::abs(s - std::round(s)) > 0 || static_cast<int>(std::round(s)) != ps)
        throw InputError("flat family: s must be an integer equal to the plane dimension");
      if (ps == 1) {
        if (d == 2) {
          for (int j = 0; j < family.n_angles; ++j) {
            const double th = j * kPi / family.n_angles;
            cands.push_back(line_candidate(x, unit_dir(2, (Vec(1) << th).finished()), "flat", {th}));
          }
        } else if (d == 3) {
          for (int j = 0; j < family.n_normals; ++j) {
            const double z = 1.0 - (j + 0.5) / family.n_normals;
            const double az = kPi * (3.0 - std::sqrt(5.0)) * j;
            const Vec ang = (Vec(2) << std::acos(z), az).finished();
            cands.push_back(line_candidate(x, unit_dir(3, ang), "flat", {ang(0), ang(1)}));
          }
        } else {
          throw InputError("flat family: lines are sampled in d = 2, 3 only");
        }
        const Mat seed = principal_directions(mu, x, r, 1);
        if (seed.size() > 0) {
          const Vec ang = dir_angles(seed.col(0));
          std::vector<double> p(ang.data(), ang.data() + ang.size());
          cands.push_back(line_candidate(x, seed.col(0), "flat", p));
        }
        perturb = [x, d](const Candidate&, const Vec& q) {
          std::vector<double> p(q.data(), q.data() + q.size());
          return line_candidate(x, unit_dir(d, q), "flat", p);
        };
        params = [](const Candidate& c) { return Vec(Eigen::Map<const Vec>(c.desc.params.data(), c.desc.params.size())); };
        engine.step_sizes_ = Vec::Constant(d - 1, kPi / family.n_angles);
      } else if (ps == 2 && d == 3) {
        auto plane = [](const Vec& ang) {
          Candidate c;
          c.desc = {"flat", {ang(0), ang(1)}};
          c.plane_basis = plane_from_normal(unit_dir(3, ang));
          return c;
        };
        for (int j = 0; j < family.n_normals; ++j) {
          const double z = 1.0 - (j + 0.5) / family.n_normals;
          const double az = kPi * (3.0 - std::sqrt(5.0)) * j;
          cands.push_back(plane((Vec(2) << std::acos(z), az).finished()));
        }
        const Mat seed = principal_directions(mu, x, r, 3);
        if (seed.size() > 0) cands.push_back(plane(dir_angles(seed.col(0))));
        perturb = [plane](const Candidate&, const Vec& q) { return plane(q); };
        params = [](const Candidate& c) { return Vec(Eigen::Map<const Vec>(c.desc.params.data(), 2)); };
        engine.step_sizes_ = Vec::Constant(2, std::sqrt(4.0 * kPi / family.n_normals));
      } else {
        throw InputError("flat family: supported planes are lines (d = 2, 3) and 2-planes in R^3");
      }
      break;
    }
    case FamilyKind::Spike: {
      if (d != 2) throw InputError("spike family lives in the plane");
      if (family.k < 1 || family.k % 2 == 0) throw InputError("spike family: k must be a positive odd integer");
      std::vector<int> ms = family.m_values.empty() ? divisors(family.k) : family.m_values;
      const int steps = static_cast<int>(std::floor(family.max_offset / family.offset_step + 1e-9));
      for (int m : ms) {
        if (m < 1 || family.k % m != 0) throw InputError("spike family: m must divide k");
        for (int j = 0; j < family.n_angles; ++j) {
          const double beta = j * kPi / family.n_angles;
          if (m == 1) {
            cands.push_back(spike_candidate(x, 1, beta, 0.0));
            continue;
          }
          for (int o = -steps; o <= steps; ++o) cands.push_back(spike_candidate(x, m, beta, o * family.offset_step * r));
        }
      }
      perturb = [x](const Candidate& c, const Vec& q) {
        const int m = static_cast<int>(c.desc.params[0]);
        return spike_candidate(x, m, q(0), m == 1 ? 0.0 : q(1));
      };
      params = [](const Candidate& c) {
        return static_cast<int>(c.desc.params[0]) == 1 ? (Vec(1) << c.desc.params[1]).finished()
                                                      : (Vec(2) << c.desc.params[1], c.desc.params[2]).finished();
      };
      engine.step_sizes_ = (Vec(2) << kPi / family.n_angles, family.offset_step * r).finished();
      break;
    }
  }
  return engine.run(std::move(cands), perturb, params);
}

AlphaResult alpha_flat(const Measure& mu, const Vec& x, double r, int s, CandidateFamily sampling,
                       const SolverOptions& options) {
  sampling.kind = FamilyKind::Flat;
  sampling.plane_dim = s;
  sampling.include_zero = false;
  return alpha_general(mu, x, r, double(s), sampling, options);
}

AlphaScan alpha_scan(const MeasureAtScale& mu, const Vec& x, const std::vector<double>& radii, double s,
                     const CandidateFamily& family, const SolverOptions& options, std::optional<double> threshold) {
  detail::require_decreasing(radii, "alpha_scan");
  AlphaScan out;
  for (double r : radii) {
    const Measure m = mu(r);
    out.scan.resolution_floor = std::max(out.scan.resolution_floor, m.resolution_floor());
    AlphaResult res = alpha_general(m, x, r, s, family, options);
    out.scan.radii.push_back(r);
    out.scan.values.push_back((Vec(1) << res.value).finished());
    // Moving each atom by half a spacing changes the dual value by at most this.
    out.scan.error_estimates.push_back(0.5 * std::max(m.resolution(), r / family.h_ratio) / r *
                                       phi_mass(m, x, r) / std::pow(r, s));
    out.results.push_back(std::move(res));
  }
  detail::finish_tail(out.scan);
  out.scan.threshold = threshold.value_or(10.0 * out.scan.tail_error());
  out.scan.verdict = out.scan.tail_max <= out.scan.threshold;
  return out;
}

AlphaScan alpha_scan(const Measure& mu, const Vec& x, const std::vector<double>& radii, double s,
                     const CandidateFamily& family, const SolverOptions& options, std::optional<double> threshold) {
  return alpha_scan([&mu](double) { return mu; }, x, radii, s, family, options, threshold);
}

ScalingCheck scaling_invariance_check(const Measure& mu, const Vec& x, double r, double s,
                                      const CandidateFamily& family, const SolverOptions& options) {
  ScalingCheck out;
  out.lhs = alpha_general(mu, x, r, s, family, options).value;
  const double mass = std::pow(r, -s);
  const Measure scaled = push_forward(mu, x, r, mass);
  CandidateFamily moved = family;
  moved.explicit_candidates.clear();
  for (const Measure& c : family.explicit_candidates) moved.explicit_candidates.push_back(push_forward(c, x, r, mass));
  out.rhs = alpha_general(scaled, Vec::Zero(x.size()), 1.0, s, moved, options).value;
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace symlab
