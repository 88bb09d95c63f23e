// Windowed bounded-Lipschitz transport numbers: the finite Lipschitz-dual LP,
// candidate symmetric-measure families and alpha scans.
#pragma once

#include "symlab/cutoff.hpp"
#include "symlab/functionals.hpp"
#include "symlab/measure.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace symlab {

/// maximize sum a_i f_i over f_i - f_j <= |p_i - p_j|/r, |f_i| <= (4r - |p_i - x|)/r.
struct LipschitzDualInstance {
  Vec center;
  double radius = 1;
  double s = 1;
  Mat positions;
  Vec coefficients;
  double c = 0;
  /// phi-weighted masses of mu and c*nu inside B(x, 4r).
  double mu_mass = 0;
  double nu_mass = 0;

  Eigen::Index size() const { return coefficients.size(); }
  /// Boundary bounds b_i = dist(p_i, boundary of B(x,4r)) / r.
  Vec bounds() const;
};

struct SolverOptions {
  /// Above this entry count pricing starts on nearest-neighbour arcs before full pricing.
  int n_exact = 400;
  int neighbours = 8;
  double tolerance = 1e-11;
  /// 0 selects 100 (n + 1) + 10000.
  long max_pivots = 0;
};

struct DualSolution {
  /// LP optimum divided by r^s.
  double value = 0;
  Vec f;
  std::string method;
  /// |primal flow cost - dual objective| plus any residual reduced-cost violation, unnormalized.
  double certificate_gap = 0;
  long pivots = 0;
};

DualSolution lipschitz_dual_value(const LipschitzDualInstance& inst, const SolverOptions& options = {});

/// Vertex enumeration over spanning trees of the constraint graph; n <= 6.
double brute_force_dual_value(const LipschitzDualInstance& inst);

struct FeasibilityAudit {
  double min_pair_slack = 0;
  double min_boundary_slack = 0;
  double max_abs_f = 0;
  /// 4 (mu_mass + nu_mass) / r^s.
  double upper_bound = 0;
  bool ok = false;
};

FeasibilityAudit audit_solution(const LipschitzDualInstance& inst, const DualSolution& sol, double slack_tol = 1e-10);

/// int phi(|y-x|/r) dmu / int phi(|y-x|/r) dnu, or 0 when the denominator vanishes.
double c_coefficient(const Measure& mu, const Measure& nu, const Vec& x, double r);

/// Net coefficients phi (mu_w - c nu_w) on B(x, 4r); positions of mu and nu
/// closer than 1e-9 r merge. Uses c_coefficient unless `c` is given.
LipschitzDualInstance build_instance(const Measure& mu, const Measure& nu, const Vec& x, double r, double s,
                                     std::optional<double> c = std::nullopt);

/// The zero-measure candidate in closed form: f_i = b_i is optimal since all
/// coefficients are non-negative.
double zero_candidate_value(const Measure& mu, const Vec& x, double r, double s);

enum class FamilyKind { Flat, Spike, Zero, ExplicitList };

struct CandidateFamily {
  FamilyKind kind = FamilyKind::Flat;
  /// Flat planes: dimension s of the planes.
  int plane_dim = 1;
  /// Spikes: kernel exponent k and admissible line counts m (divisors of k when empty).
  int k = 3;
  std::vector<int> m_values;
  int n_angles = 180;
  int n_normals = 400;
  /// Spike center offsets along the line through x: multiples of offset_step * r up to max_offset * r.
  double offset_step = 0.25;
  double max_offset = 4.0;
  bool refine = true;
  /// Golden-section evaluations per parameter.
  int refine_iterations = 10;
  /// Candidate spacing min(mu.h, r / h_ratio).
  double h_ratio = 200;
  /// Candidates are materialized on B(x, 4r (1 + margin)).
  double margin = 0.05;
  bool include_zero = true;
  std::vector<Measure> explicit_candidates;
};

std::string family_name(FamilyKind kind);
FamilyKind parse_family_kind(const std::string& name);

struct CandidateDescriptor {
  std::string kind;
  std::vector<double> params;
  std::string describe() const;
};

struct AlphaResult {
  double value = 0;
  CandidateDescriptor best;
  std::string method;
  double gap = 0;
  int candidates = 0;
  int lp_solves = 0;
  int pruned = 0;
};

AlphaResult alpha_general(const Measure& mu, const Vec& x, double r, double s, const CandidateFamily& family,
                          const SolverOptions& options = {});

/// inf over sampled s-planes through x (no zero measure).
AlphaResult alpha_flat(const Measure& mu, const Vec& x, double r, int s, CandidateFamily sampling = {},
                       const SolverOptions& options = {});

/// Measure used at scale r: either fixed, or re-discretized per radius.
using MeasureAtScale = std::function<Measure(double r)>;

struct AlphaScan {
  ScanResult scan;
  std::vector<AlphaResult> results;
};

AlphaScan alpha_scan(const MeasureAtScale& mu, const Vec& x, const std::vector<double>& radii, double s,
                     const CandidateFamily& family, const SolverOptions& options = {},
                     std::optional<double> threshold = std::nullopt);

AlphaScan alpha_scan(const Measure& mu, const Vec& x, const std::vector<double>& radii, double s,
                     const CandidateFamily& family, const SolverOptions& options = {},
                     std::optional<double> threshold = std::nullopt);

struct ScalingCheck {
  double lhs = 0;
  double rhs = 0;
  double gap = 0;
};

/// alpha_mu(B(x,r)) against alpha of r^-s T_{x,r}# mu on B(0,1), with the
/// candidate family transported alongside (explicit candidates are pushed forward).
ScalingCheck scaling_invariance_check(const Measure& mu, const Vec& x, double r, double s,
                                      const CandidateFamily& family, const SolverOptions& options = {});

}  // namespace symlab
