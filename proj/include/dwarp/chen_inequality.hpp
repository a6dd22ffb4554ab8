#pragma once

#include "dwarp/dwp_immersion.hpp"

namespace dwarp {

/// Both sides of the fundamental inequality
///   n2 Delta^1 f1 / f1 + n1 Delta^2 f2 / f2
///     <= (n^2/4) |H|^2 + n1 n2 max K~
/// at one point, with the trace-negative leaf Laplacians, plus the equality-case
/// diagnostics: the immersion is an equality point exactly when it is mixed
/// totally geodesic with n1 H1 = n2 H2.
struct InequalityReport {
  Vec point;
  double lhs = 0.0;
  double h_norm_sq = 0.0;
  double max_k = 0.0;  // sampled estimate, or exactly c on a space form
  double rhs = 0.0;
  double gap = 0.0;  // rhs - lhs, reproducible from the stored parts
  bool holds = false;
  bool equality = false;
  double mixed_tg_residual = 0.0;
  double partial_mc_residual = 0.0;  // |n1 H1 - n2 H2|
  bool equality_flags_set = false;
};

/// Deterministic estimate of the maximum ambient sectional curvature over
/// 2-plane sections of the immersed tangent space at p. On a scenario with a
/// verified space-form constant the exact c is returned. Otherwise planes are
/// drawn from a Halton sequence (offset by the seed) inside the pushed-forward
/// tangent space and each is refined by 20 sweeps of coordinate ascent; the
/// estimate is non-decreasing in the budget because samples are indexed by a
/// budget-independent sequence. Budget must be at least 64.
double max_ambient_sectional(const DwpImmersionScenario& s, const Vec& p, int budget,
                             std::uint64_t seed);

InequalityReport fundamental_inequality(const DwpImmersionScenario& s, const Vec& p, int budget,
                                std::uint64_t seed, double slack_tol = 1e-8);

/// Space-form specialization: max K~ replaced by the declared c exactly.
InequalityReport space_form_inequality(const DwpImmersionScenario& s, const Vec& p,
                                double slack_tol = 1e-8);

/// Hypothesis class a scenario may declare for the obstruction probe.
struct HypothesisTags {
  bool harmonic = false;
  bool minimal = false;
  std::optional<std::array<double, 2>> eigen;  // declared eigenvalues of f1, f2
  bool any() const { return harmonic || minimal || eigen.has_value(); }
};

/// Instance-level consistency probe for the non-existence propositions: the
/// declared hypotheses are validated numerically at the sample points, and
/// for minimal scenarios the derived bound n1 n2 max K~ >= LHS is checked
/// (with harmonic warps the bound is max K~ >= 0; with eigenfunction warps it
/// is n1 n2 max K~ >= n2 l1 + n1 l2).
struct ObstructionReport {
  double harmonic_residual = 0.0;
  double eigen_residual = 0.0;
  double minimal_residual = 0.0;
  bool hypotheses_ok = false;
  double max_k = 0.0;    // max over the sampled points
  double lhs_max = 0.0;  // max of the inequality's left side over the points
  double bound = 0.0;    // required lower bound for n1 n2 max K~
  bool consistent = false;
};
ObstructionReport obstruction_probe(const DwpImmersionScenario& s,
                                    const std::vector<Vec>& points,
                                    const HypothesisTags& tags, int budget,
                                    std::uint64_t seed, double hypothesis_tol = 1e-6);

}  // namespace dwarp
