#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace symlab::detail {

LipschitzFlowSolver::LipschitzFlowSolver(const Mat& scaled_positions, const Vec& supplies, const Vec& bounds)
    : n_(static_cast<int>(supplies.size())),
      ground_(n_),
      dims_(static_cast<int>(scaled_positions.rows())),
      a_(supplies),
      b_(bounds) {
  const int nodes = n_ + 1;
  coords_.assign(dims_, std::vector<double>(n_));
  sinks_.assign(dims_, {});
  for (int i = 0; i < n_; ++i) {
    for (int q = 0; q < dims_; ++q) coords_[q][i] = scaled_positions(q, i);
    if (a_(i) > 0) {
      sources_.push_back(i);
    } else if (a_(i) < 0) {
      sink_ids_.push_back(i);
      for (int q = 0; q < dims_; ++q) sinks_[q].push_back(scaled_positions(q, i));
    }
  }
  sink_pot_.resize(sink_ids_.size());

  parent_.assign(nodes, -1);
  up_.assign(nodes, 0);
  flow_.assign(nodes, 0.0);
  cost_.assign(nodes, 0.0);
  pot_.assign(nodes, 0.0);
  depth_.assign(nodes, 0);
  first_child_.assign(nodes, -1);
  next_sibling_.assign(nodes, -1);
  prev_sibling_.assign(nodes, -1);
  // Strongly feasible start: every entry hangs off the ground, zero flows point upward.
  for (int i = n_ - 1; i >= 0; --i) {
    link(i, ground_);
    up_[i] = a_(i) >= 0 ? 1 : 0;
    flow_[i] = std::abs(a_(i));
    cost_[i] = b_(i);
  }
  update_subtree(ground_);
}

double LipschitzFlowSolver::dist(int u, int v) const {
  if (u == ground_) return b_(v);
  if (v == ground_) return b_(u);
  double d2 = 0;
  for (int q = 0; q < dims_; ++q) {
    const double diff = coords_[q][u] - coords_[q][v];
    d2 += diff * diff;
  }
  return std::sqrt(d2);
}

void LipschitzFlowSolver::link(int v, int p) {
  parent_[v] = p;
  prev_sibling_[v] = -1;
  next_sibling_[v] = first_child_[p];
  if (first_child_[p] >= 0) prev_sibling_[first_child_[p]] = v;
  first_child_[p] = v;
}

void LipschitzFlowSolver::unlink(int v) {
  const int p = parent_[v];
  if (prev_sibling_[v] >= 0)
    next_sibling_[prev_sibling_[v]] = next_sibling_[v];
  else
    first_child_[p] = next_sibling_[v];
  if (next_sibling_[v] >= 0) prev_sibling_[next_sibling_[v]] = prev_sibling_[v];
  parent_[v] = -1;
}

void LipschitzFlowSolver::update_subtree(int root) {
  stack_.clear();
  stack_.push_back(root);
  while (!stack_.empty()) {
    const int v = stack_.back();
    stack_.pop_back();
    if (v != ground_) {
      const int p = parent_[v];
      depth_[v] = depth_[p] + 1;
      pot_[v] = up_[v] ? pot_[p] + cost_[v] : pot_[p] - cost_[v];
    }
    for (int c = first_child_[v]; c >= 0; c = next_sibling_[c]) stack_.push_back(c);
  }
}

void LipschitzFlowSolver::pivot(int k, int l, double cost) {
  // Apex of the cycle closed by the entering arc k -> l.
  kpath_.clear();
  lpath_.clear();
  int u = k;
  int v = l;
  while (u != v) {
    if (depth_[u] >= depth_[v]) {
      kpath_.push_back(u);
      u = parent_[u];
    } else {
      lpath_.push_back(v);
      v = parent_[v];
    }
  }
  // The cycle runs apex -> (down to) k -> l -> (up to) apex; arcs against that
  // orientation lose flow.
  double delta = std::numeric_limits<double>::infinity();
  for (int w : kpath_)
    if (up_[w]) delta = std::min(delta, flow_[w]);
  for (int w : lpath_)
    if (!up_[w]) delta = std::min(delta, flow_[w]);
  if (!std::isfinite(delta)) throw SolverError("network simplex: unbounded pivot cycle", 0.0);

  // Last blocking arc met when walking the cycle from the apex.
  int leaving = -1;
  bool leaving_on_k = false;
  for (auto it = kpath_.rbegin(); it != kpath_.rend(); ++it)
    if (up_[*it] && flow_[*it] <= delta) {
      leaving = *it;
      leaving_on_k = true;
    }
  for (int w : lpath_)
    if (!up_[w] && flow_[w] <= delta) {
      leaving = w;
      leaving_on_k = false;
    }

  for (int w : kpath_) flow_[w] += up_[w] ? -delta : delta;
  for (int w : lpath_) flow_[w] += up_[w] ? delta : -delta;
  flow_[leaving] = 0.0;

  // Re-hang the subtree cut off at `leaving` from the entering arc.
  const int inner = leaving_on_k ? k : l;
  const int outer = leaving_on_k ? l : k;
  int prev = inner;
  int prev_parent = parent_[inner];
  char prev_up = up_[inner];
  double prev_flow = flow_[inner];
  double prev_cost = cost_[inner];
  unlink(inner);
  link(inner, outer);
  up_[inner] = leaving_on_k ? 1 : 0;
  flow_[inner] = delta;
  cost_[inner] = cost;
  while (prev != leaving) {
    const int node = prev_parent;
    const int next_parent = parent_[node];
    const char node_up = up_[node];
    const double node_flow = flow_[node];
    const double node_cost = cost_[node];
    unlink(node);
    link(node, prev);
    up_[node] = prev_up ? 0 : 1;
    flow_[node] = prev_flow;
    cost_[node] = prev_cost;
    prev = node;
    prev_parent = next_parent;
    prev_up = node_up;
    prev_flow = node_flow;
    prev_cost = node_cost;
  }
  update_subtree(inner);
}

namespace {

template <int D>
struct RowScan {
  // Only arcs whose reduced cost can beat `best` need a square root.
  static void run(const std::vector<std::vector<double>>& sinks, const std::vector<int>& ids, const double* sink_pot,
                  const double* ci, double pi, int i, double& best, int& k, int& l, double& cost, bool& found) {
    const int dims = D > 0 ? D : static_cast<int>(sinks.size());
    const int m = static_cast<int>(ids.size());
    const double* c[D > 0 ? D : 1];
    if constexpr (D > 0)
      for (int q = 0; q < D; ++q) c[q] = sinks[q].data();
    for (int t = 0; t < m; ++t) {
      const double room = best + pi - sink_pot[t];
      if (room <= 0) continue;
      double d2 = 0;
      for (int q = 0; q < dims; ++q) {
        const double diff = (D > 0 ? c[q][t] : sinks[q][t]) - ci[q];
        d2 += diff * diff;
      }
      if (d2 >= room * room) continue;
      const double dist = std::sqrt(d2);
      const double rc = dist - pi + sink_pot[t];
      if (rc < best) {
        best = rc;
        k = i;
        l = ids[t];
        cost = dist;
        found = true;
      }
    }
  }
};

}  // namespace

void LipschitzFlowSolver::scan_row(int i, double& best, int& k, int& l, double& cost, bool& found) const {
  std::vector<double> point(dims_);
  for (int q = 0; q < dims_; ++q) point[q] = coords_[q][i];
  const double* p = point.data();
  switch (dims_) {
    case 2: RowScan<2>::run(sinks_, sink_ids_, sink_pot_.data(), p, pot_[i], i, best, k, l, cost, found); break;
    case 3: RowScan<3>::run(sinks_, sink_ids_, sink_pot_.data(), p, pot_[i], i, best, k, l, cost, found); break;
    default: RowScan<0>::run(sinks_, sink_ids_, sink_pot_.data(), p, pot_[i], i, best, k, l, cost, found); break;
  }
}

bool LipschitzFlowSolver::price_block(double tolerance, int& k, int& l, double& cost) {
  // Rows are the positive entries plus the ground.
  const std::size_t rows = sources_.size() + 1;
  const int rows_per_block = std::max<int>(8, static_cast<int>(256 / rows));
  for (std::size_t t = 0; t < sink_ids_.size(); ++t) sink_pot_[t] = pot_[sink_ids_[t]];
  double best = -tolerance;
  bool found = false;
  int scanned_in_block = 0;
  for (std::size_t step = 0; step < rows; ++step) {
    const std::size_t row = next_row_;
    next_row_ = (next_row_ + 1) % rows;
    if (row == sources_.size()) {
      for (std::size_t t = 0; t < sink_ids_.size(); ++t) {
        const int j = sink_ids_[t];
        const double rc = b_(j) + sink_pot_[t];
        if (rc < best) {
          best = rc;
          k = ground_;
          l = j;
          cost = b_(j);
          found = true;
        }
      }
    } else {
      const int i = sources_[row];
      scan_row(i, best, k, l, cost, found);
      const double rc = b_(i) - pot_[i];
      if (rc < best) {
        best = rc;
        k = i;
        l = ground_;
        cost = b_(i);
        found = true;
      }
    }
    if (found && ++scanned_in_block >= rows_per_block) return true;
  }
  return found;
}

void LipschitzFlowSolver::build_candidates(int neighbours) {
  candidates_.clear();
  for (int j : sink_ids_) candidates_.emplace_back(ground_, j);
  const int m = static_cast<int>(sink_ids_.size());
  const int kn = std::min(neighbours, m);
  std::vector<int> idx(m);
  std::vector<double> d(m);
  for (int i : sources_) {
    candidates_.emplace_back(i, ground_);
    if (kn <= 0) continue;
    for (int t = 0; t < m; ++t) d[t] = dist(i, sink_ids_[t]);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + kn, idx.end(),
                      [&](int p, int q) { return d[p] < d[q] || (d[p] == d[q] && p < q); });
    for (int t = 0; t < kn; ++t) candidates_.emplace_back(i, sink_ids_[idx[t]]);
  }
  next_candidate_ = 0;
}

bool LipschitzFlowSolver::price_candidates(double tolerance, int& k, int& l, double& cost) {
  const std::size_t total = candidates_.size();
  if (total == 0) return false;
  const std::size_t block = std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(double(total))));
  double best = -tolerance;
  bool found = false;
  std::size_t in_block = 0;
  for (std::size_t step = 0; step < total; ++step) {
    const auto [u, v] = candidates_[next_candidate_];
    next_candidate_ = (next_candidate_ + 1) % total;
    const double c = dist(u, v);
    const double rc = c - pot_[u] + pot_[v];
    if (rc < best) {
      best = rc;
      k = u;
      l = v;
      cost = c;
      found = true;
    }
    if (found && ++in_block >= block) return true;
  }
  return found;
}

double LipschitzFlowSolver::max_violation() const {
  double worst = 0.0;
  for (int j : sink_ids_) worst = std::max(worst, -b_(j) - pot_[j]);
  for (int i : sources_) {
    worst = std::max(worst, pot_[i] - b_(i));
    for (int j : sink_ids_) worst = std::max(worst, pot_[i] - pot_[j] - dist(i, j));
  }
  return worst;
}

Vec LipschitzFlowSolver::transform() const {
  Vec f(n_);
  for (int y = 0; y < n_; ++y) {
    double v = b_(y);
    for (int j : sink_ids_) v = std::min(v, pot_[j] + dist(y, j));
    f(y) = v;
  }
  return f;
}

FlowResult LipschitzFlowSolver::solve(double tolerance, long max_pivots, int neighbours) {
  FlowResult out;
  int k = 0;
  int l = 0;
  double cost = 0;
  if (neighbours > 0 && !sources_.empty() && !sink_ids_.empty()) {
    build_candidates(neighbours);
    while (out.pivots < max_pivots && price_candidates(tolerance, k, l, cost)) {
      pivot(k, l, cost);
      ++out.pivots;
    }
  }
  while (out.pivots < max_pivots && price_block(tolerance, k, l, cost)) {
    pivot(k, l, cost);
    ++out.pivots;
  }
  for (int v = 0; v < n_; ++v) out.primal += flow_[v] * cost_[v];
  out.violation = max_violation();
  out.optimal = out.violation <= 10 * tolerance;
  out.potentials = transform();
  out.dual = a_.dot(out.potentials);
  return out;
}

}  // namespace symlab::detail
