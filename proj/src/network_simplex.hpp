// Primal network simplex for the transshipment dual of the Lipschitz LP.
//
// Nodes 0..n-1 are entries, node n is the ground. Costs are |p_i - p_j|
// (positions already divided by r) between entries and b_i between an entry
// and the ground; with b 1-Lipschitz and non-negative this is a metric, so
// optimal flows only run from positive entries to negative ones, directly or
// through the ground. The simplex works on that bipartite arc set. The
// returned potentials are the transform
//   f(y) = min(b(y), min_{a_j < 0} f_j + |y - p_j|),
// which meets every pairwise and boundary constraint and does not lower the
// objective.
#pragma once

#include "symlab/core.hpp"

#include <vector>

namespace symlab::detail {

struct FlowResult {
  Vec potentials;
  double primal = 0;
  double dual = 0;
  double violation = 0;
  long pivots = 0;
  bool optimal = false;
};

class LipschitzFlowSolver {
 public:
  LipschitzFlowSolver(const Mat& scaled_positions, const Vec& supplies, const Vec& bounds);

  /// `neighbours` > 0 runs a first pricing phase restricted to that many
  /// nearest negative entries per positive entry.
  FlowResult solve(double tolerance, long max_pivots, int neighbours);

 private:
  double dist(int u, int v) const;
  void link(int v, int p);
  void unlink(int v);
  void update_subtree(int root);
  void pivot(int k, int l, double cost);
  bool price_block(double tolerance, int& k, int& l, double& cost);
  bool price_candidates(double tolerance, int& k, int& l, double& cost);
  void scan_row(int i, double& best, int& k, int& l, double& cost, bool& found) const;
  void build_candidates(int neighbours);
  double max_violation() const;
  Vec transform() const;

  int n_;
  int ground_;
  int dims_;
  Vec a_;
  Vec b_;
  /// coords_[q][i]: coordinate q of entry i; sinks_ holds the same for the negative entries.
  std::vector<std::vector<double>> coords_;
  std::vector<std::vector<double>> sinks_;
  std::vector<int> sources_;
  std::vector<int> sink_ids_;

  std::vector<int> parent_;
  std::vector<char> up_;
  std::vector<double> flow_;
  std::vector<double> cost_;
  std::vector<double> pot_;
  std::vector<int> depth_;

  std::vector<int> first_child_;
  std::vector<int> next_sibling_;
  std::vector<int> prev_sibling_;
  std::vector<int> stack_;
  std::vector<int> kpath_;
  std::vector<int> lpath_;
  mutable std::vector<double> sink_pot_;

  std::size_t next_row_ = 0;
  std::vector<std::pair<int, int>> candidates_;
  std::size_t next_candidate_ = 0;
};

}  // namespace symlab::detail
