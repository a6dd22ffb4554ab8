#include "dwarp/chen_inequality.hpp"

#include <cmath>

namespace dwarp {

namespace {

double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

constexpr std::uint64_t kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19};

// Orthonormalizes coefficient vectors (the ambient frame they weight is
// already orthonormal). Returns false for a degenerate pair.
bool orthonormalize_pair(Vec& u, Vec& v) {
  const double nu = u.norm();
  if (nu < 1e-10) return false;
  u /= nu;
  v -= u.dot(v) * u;
  const double nv = v.norm();
  if (nv < 1e-10) return false;
  v /= nv;
  return true;
}

}  // namespace

double max_ambient_sectional(const DwpImmersionScenario& s, const Vec& p, int budget,
                             std::uint64_t seed) {
  if (budget < 64) throw Error("max_ambient_sectional: budget must be at least 64");
  if (s.space_form_c) return *s.space_form_c;

  const int n = s.source.product()->dim();
  const Vec q = s.product_immersion.map_point(p);
  const PointGeometry geo = point_geometry(*s.ambient.product(), q);
  const CurvatureTensor curv = curvature_tensor(geo);

  // Orthonormal basis of the pushed-forward tangent space at q.
  const Mat jac = s.product_immersion.jacobian(p);
  std::vector<Vec> basis;
  for (int i = 0; i < n; ++i) {
    Vec v = jac.col(i);
    for (const Vec& e : basis) v -= inner(geo, v, e) * e;
    const double norm2 = inner(geo, v, v);
    if (!(norm2 > 1e-14))
      throw Error("max_ambient_sectional: tangent space is degenerate at the point");
    basis.push_back(v / std::sqrt(norm2));
  }
  const auto realize_coeff = [&](const Vec& c) {
    Vec v = Vec::Zero(geo.chart->dim());
    for (int i = 0; i < n; ++i) v += c[i] * basis[i];
    return v;
  };
  const auto plane_k = [&](const Vec& uc, const Vec& vc) {
    return sectional_curvature(geo, curv, realize_coeff(uc), realize_coeff(vc));
  };

  const std::uint64_t offset = 1 + seed % 9973;
  double best_overall = -std::numeric_limits<double>::infinity();
  for (int sample = 0; sample < budget; ++sample) {
    Vec u(n), v(n);
    for (int d = 0; d < n; ++d) {
      u[d] = 2.0 * halton(offset + sample, kHaltonBases[d % 8]) - 1.0;
      v[d] = 2.0 * halton(offset + sample, kHaltonBases[(d + n) % 8]) - 1.0;
    }
    // Nudge so the very first sample is never the zero vector.
    u[sample % n] += 0.5;
    v[(sample + 1) % n] += 0.5;
    if (!orthonormalize_pair(u, v)) continue;

    double best = plane_k(u, v);
    double step = 0.25;
    for (int iter = 0; iter < 20; ++iter) {
      bool improved = false;
      for (int d = 0; d < 2 * n; ++d)
        for (double sign : {1.0, -1.0}) {
          Vec uu = u, vv = v;
          (d < n ? uu[d] : vv[d - n]) += sign * step;
          if (!orthonormalize_pair(uu, vv)) continue;
          const double k = plane_k(uu, vv);
          if (k > best) {
            best = k;
            u = uu;
            v = vv;
            improved = true;
          }
        }
      if (!improved) step *= 0.5;
    }
    best_overall = std::max(best_overall, best);
  }
  if (!std::isfinite(best_overall))
    throw Error("max_ambient_sectional: no non-degenerate plane found");
  return best_overall;
}

namespace {

InequalityReport inequality_report(const DwpImmersionScenario& s, const Vec& p,
                                   double max_k, double slack_tol) {
  InequalityReport r;
  r.point = p;
  r.max_k = max_k;

  const double f1 = s.warp_value(1, p), f2 = s.warp_value(2, p);
  const int n1 = s.n(1), n2 = s.n(2), n = n1 + n2;
  r.lhs = n2 * leaf_laplacian(s, 1, p) / f1 + n1 * leaf_laplacian(s, 2, p) / f2;

  const Mat g_amb = metric_at(*s.ambient.product(), s.product_immersion.map_point(p));
  const Vec h_mean = mean_curvature(s.product_immersion, p).ambient;
  r.h_norm_sq = h_mean.dot(g_amb * h_mean);
  r.rhs = 0.25 * n * n * r.h_norm_sq + n1 * n2 * r.max_k;
  r.gap = r.rhs - r.lhs;
  r.holds = r.lhs <= r.rhs + slack_tol;
  r.equality = std::abs(r.gap) <= slack_tol;

  const std::vector<Vec> d1 = distribution_frame(s, 1, p);
  const std::vector<Vec> d2 = distribution_frame(s, 2, p);
  for (const Vec& a : d1)
    for (const Vec& b : d2) {
      const Vec h = second_fundamental_form(s.product_immersion, p, TangentVector{p, a},
                                            TangentVector{p, b})
                        .ambient;
      r.mixed_tg_residual = std::max(r.mixed_tg_residual, std::sqrt(h.dot(g_amb * h)));
    }
  const Vec h1 = partial_mean_curvature(s, 1, p).ambient;
  const Vec h2 = partial_mean_curvature(s, 2, p).ambient;
  const Vec diff_vec = n1 * h1 - n2 * h2;
  r.partial_mc_residual = std::sqrt(diff_vec.dot(g_amb * diff_vec));
  r.equality_flags_set = r.mixed_tg_residual <= 1e-6 && r.partial_mc_residual <= 1e-6;
  return r;
}

}  // namespace

InequalityReport fundamental_inequality(const DwpImmersionScenario& s, const Vec& p, int budget,
                                std::uint64_t seed, double slack_tol) {
  return inequality_report(s, p, max_ambient_sectional(s, p, budget, seed), slack_tol);
}

InequalityReport space_form_inequality(const DwpImmersionScenario& s, const Vec& p,
                                double slack_tol) {
  if (!s.space_form_c)
    throw Error("space_form_inequality requires a declared space-form constant");
  return inequality_report(s, p, *s.space_form_c, slack_tol);
}

ObstructionReport obstruction_probe(const DwpImmersionScenario& s,
                                    const std::vector<Vec>& points,
                                    const HypothesisTags& tags, int budget,
                                    std::uint64_t seed, double hypothesis_tol) {
  if (!tags.any()) throw Error("obstruction_probe: scenario declares no hypothesis");
  ObstructionReport r;
  const int n1 = s.n(1), n2 = s.n(2);
  r.lhs_max = -std::numeric_limits<double>::infinity();
  for (const Vec& p : points) {
    double lhs = 0.0;
    for (int i = 1; i <= 2; ++i) {
      const double lap = leaf_laplacian(s, i, p);
      const double f = s.warp_value(i, p);
      lhs += (i == 1 ? n2 : n1) * lap / f;
      if (tags.harmonic) r.harmonic_residual = std::max(r.harmonic_residual, std::abs(lap));
      if (tags.eigen) {
        const double lambda = (*tags.eigen)[i - 1];
        r.eigen_residual = std::max(r.eigen_residual, std::abs(lap - lambda * f));
      }
    }
    r.lhs_max = std::max(r.lhs_max, lhs);
    if (tags.minimal) {
      const Mat g_amb = metric_at(*s.ambient.product(), s.product_immersion.map_point(p));
      const Vec h = mean_curvature(s.product_immersion, p).ambient;
      r.minimal_residual = std::max(r.minimal_residual, std::sqrt(h.dot(g_amb * h)));
    }
    r.max_k = std::max(r.max_k, max_ambient_sectional(s, p, budget, seed));
  }
  r.hypotheses_ok = r.harmonic_residual <= hypothesis_tol &&
                    r.eigen_residual <= hypothesis_tol &&
                    r.minimal_residual <= hypothesis_tol;

  if (tags.minimal && tags.eigen)
    r.bound = n2 * (*tags.eigen)[0] + n1 * (*tags.eigen)[1];
  else if (tags.minimal && tags.harmonic)
    r.bound = 0.0;  // harmonic warps: max K~ >= 0
  else
    r.bound = r.lhs_max;  // minimality alone bounds n1 n2 max K~ by the left side

  if (tags.minimal)
    r.consistent = r.hypotheses_ok && (n1 * n2 * r.max_k >= r.bound - 1e-8);
  else
    r.consistent = r.hypotheses_ok;
  return r;
}

}  // namespace dwarp
