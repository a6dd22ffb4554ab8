#include "dwarp/dwp.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace dwarp {

namespace {

constexpr double kUnitTolerance = 1e-8;

void check_positive_on_samples(const ChartedManifold& chart, const ScalarExpr& f,
                               const char* label) {
  std::mt19937_64 rng(0x5eedu);
  for (int trial = 0; trial < 64; ++trial) {
    const Vec p = chart.sample_point(rng, 0.02);
    const double v = eval(f, chart.assignment(p));
    if (!(v > 0.0)) {
      std::string msg = std::string(label) + " = " + to_string(f) +
                        " is not positive on '" + chart.name() + "' at (";
      for (int i = 0; i < p.size(); ++i)
        msg += (i ? ", " : "") + std::to_string(p[i]);
      throw Error(msg + ")");
    }
  }
}

}  // namespace

Vec DoublyWarpedProduct::join(const Vec& p1, const Vec& p2) const {
  Vec p(dim(1) + dim(2));
  p.head(dim(1)) = p1;
  p.tail(dim(2)) = p2;
  return p;
}

Vec DoublyWarpedProduct::factor_point(int i, const Vec& p) const {
  return i == 1 ? Vec(p.head(dim(1))) : Vec(p.tail(dim(2)));
}

Vec DoublyWarpedProduct::block(int i, const Vec& v) const {
  return i == 1 ? Vec(v.head(dim(1))) : Vec(v.tail(dim(2)));
}

Vec DoublyWarpedProduct::lift(int i, const Vec& factor_components) const {
  Vec v = Vec::Zero(dim(1) + dim(2));
  if (i == 1) v.head(dim(1)) = factor_components;
  else v.tail(dim(2)) = factor_components;
  return v;
}

VectorFieldExpr DoublyWarpedProduct::lift_field(int i, const VectorFieldExpr& field) const {
  VectorFieldExpr out = VectorFieldExpr::zero(dim(1) + dim(2));
  const int offset = i == 1 ? 0 : dim(1);
  for (int k = 0; k < field.dim(); ++k) out.comps[offset + k] = field.comps[k];
  return out;
}

DoublyWarpedProduct build_dwp(ChartPtr factor1, ChartPtr factor2, ScalarExpr f1,
                              ScalarExpr f2) {
  for (const auto& v : free_variables(f1))
    if (std::find(factor1->coords().begin(), factor1->coords().end(), v) ==
        factor1->coords().end())
      throw Error("warping function f1 uses variable '" + v +
                  "' not on factor '" + factor1->name() + "'");
  for (const auto& v : free_variables(f2))
    if (std::find(factor2->coords().begin(), factor2->coords().end(), v) ==
        factor2->coords().end())
      throw Error("warping function f2 uses variable '" + v +
                  "' not on factor '" + factor2->name() + "'");

  check_positive_on_samples(*factor1, f1, "f1");
  check_positive_on_samples(*factor2, f2, "f2");

  const int n1 = factor1->dim(), n2 = factor2->dim();
  const int n = n1 + n2;
  std::vector<std::string> coords = factor1->coords();
  coords.insert(coords.end(), factor2->coords().begin(), factor2->coords().end());
  std::vector<Interval> domain;
  for (int i = 0; i < n1; ++i) domain.push_back(factor1->domain(i));
  for (int i = 0; i < n2; ++i) domain.push_back(factor2->domain(i));

  std::vector<std::vector<ScalarExpr>> g(n, std::vector<ScalarExpr>(n, ScalarExpr(0.0)));
  const ScalarExpr f1sq = f1 * f1, f2sq = f2 * f2;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j) g[i][j] = f2sq * factor1->metric_entry(i, j);
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n2; ++j) g[n1 + i][n1 + j] = f1sq * factor2->metric_entry(i, j);

  DoublyWarpedProduct w;
  w.product_ = ChartedManifold::create(factor1->name() + "_x_" + factor2->name(),
                                       std::move(coords), std::move(g), std::move(domain));
  w.factor1_ = std::move(factor1);
  w.factor2_ = std::move(factor2);
  w.f1_ = std::move(f1);
  w.f2_ = std::move(f2);

  // U_i = -grad((ln f_i) o pi_i). In the block metric the gradient of a
  // factor-i function keeps only its block-i components, scaled by 1/f_j^2.
  const auto make_u = [&w](int i) {
    const ChartedManifold& fac = *w.factor(i);
    const int ni = fac.dim();
    std::vector<std::vector<ScalarExpr>> gi(ni, std::vector<ScalarExpr>(ni));
    for (int a = 0; a < ni; ++a)
      for (int b = 0; b < ni; ++b) gi[a][b] = fac.metric_entry(a, b);
    std::vector<ScalarExpr> dln(ni);
    for (int a = 0; a < ni; ++a) dln[a] = diff(log(w.warp(i)), fac.coords()[a]);
    std::vector<ScalarExpr> grad_fac = cramer_solve(gi, dln);
    const ScalarExpr other_sq = w.warp(3 - i) * w.warp(3 - i);
    VectorFieldExpr u = VectorFieldExpr::zero(w.dim(1) + w.dim(2));
    const int offset = i == 1 ? 0 : w.dim(1);
    for (int a = 0; a < ni; ++a) u.comps[offset + a] = -(grad_fac[a] / other_sq);
    return u;
  };
  w.u1_ = make_u(1);
  w.u2_ = make_u(2);
  return w;
}

LiftedFieldSum make_lifted_sum(const DoublyWarpedProduct& w, VectorFieldExpr part1,
                               VectorFieldExpr part2) {
  if (part1.dim() != w.dim(1) || part2.dim() != w.dim(2))
    throw Error("lifted field sum: component count does not match the factors");
  for (int i = 1; i <= 2; ++i) {
    const VectorFieldExpr& part = i == 1 ? part1 : part2;
    const auto& coords = w.factor(i)->coords();
    for (const ScalarExpr& c : part.comps)
      for (const auto& v : free_variables(c))
        if (std::find(coords.begin(), coords.end(), v) == coords.end())
          throw Error("lifted field of factor " + std::to_string(i) +
                      " uses foreign variable '" + v + "'");
  }
  return LiftedFieldSum{std::move(part1), std::move(part2)};
}

VectorFieldExpr realize(const DoublyWarpedProduct& w, const LiftedFieldSum& x) {
  VectorFieldExpr out = w.lift_field(1, x.part1);
  for (int k = 0; k < w.dim(2); ++k) out.comps[w.dim(1) + k] = x.part2.comps[k];
  return out;
}

TangentVector wedge(const ChartedManifold& chart, const TangentVector& x,
                    const TangentVector& y, const TangentVector& z) {
  if (x.point.size() != y.point.size() || x.point.size() != z.point.size() ||
      (x.point - y.point).norm() != 0.0 || (x.point - z.point).norm() != 0.0)
    throw Error("wedge: mismatched base points");
  const Mat g = metric_at(chart, x.point);
  const double yz = y.components.dot(g * z.components);
  const double xz = x.components.dot(g * z.components);
  return TangentVector{x.point, yz * x.components - xz * y.components};
}

namespace {

struct DwpPointData {
  PointGeometry geo;             // product chart geometry
  std::array<Vec, 2> u;          // U_1, U_2 values
  std::array<Vec, 2> x_parts, y_parts;  // realized block vectors, zero-padded
  Vec x, y;
};

DwpPointData dwp_point_data(const DoublyWarpedProduct& w, const LiftedFieldSum& x,
                            const LiftedFieldSum& y, const Vec& p) {
  DwpPointData d{point_geometry(*w.product(), p), {}, {}, {}, {}, {}};
  for (int i = 1; i <= 2; ++i)
    d.u[i - 1] = field_value(*w.product(), w.u_field(i), p);
  const Vec p1 = w.factor_point(1, p), p2 = w.factor_point(2, p);
  d.x_parts[0] = w.lift(1, field_value(*w.factor(1), x.part1, p1));
  d.x_parts[1] = w.lift(2, field_value(*w.factor(2), x.part2, p2));
  d.y_parts[0] = w.lift(1, field_value(*w.factor(1), y.part1, p1));
  d.y_parts[1] = w.lift(2, field_value(*w.factor(2), y.part2, p2));
  d.x = d.x_parts[0] + d.x_parts[1];
  d.y = d.y_parts[0] + d.y_parts[1];
  return d;
}

Vec wedge_apply(const PointGeometry& geo, const Vec& a, const Vec& b, const Vec& z) {
  return inner(geo, b, z) * a - inner(geo, a, z) * b;
}

}  // namespace

TangentVector dwp_connection_closed_form(const DoublyWarpedProduct& w,
                                         const LiftedFieldSum& x, const LiftedFieldSum& y,
                                         const Vec& p) {
  const DwpPointData d = dwp_point_data(w, x, y, p);

  // Direct-product connection: factor covariant derivatives, lifted.
  const Vec p1 = w.factor_point(1, p), p2 = w.factor_point(2, p);
  Vec nabla0 = w.lift(1, covariant_derivative(*w.factor(1), x.part1, y.part1, p1).components) +
               w.lift(2, covariant_derivative(*w.factor(2), x.part2, y.part2, p2).components);

  Vec out = nabla0;
  for (int i = 1; i <= 2; ++i) {
    const int j = 3 - i;
    const Vec& u = d.u[i - 1];
    const Vec& xj = d.x_parts[j - 1];
    const Vec& yj = d.y_parts[j - 1];
    out += inner(d.geo, xj, yj) * u - inner(d.geo, d.x, u) * yj - inner(d.geo, d.y, u) * xj;
  }
  return TangentVector{p, out};
}

TangentVector dwp_curvature_closed_form(const DoublyWarpedProduct& w,
                                        const LiftedFieldSum& x, const LiftedFieldSum& y,
                                        const LiftedFieldSum& z, const Vec& p) {
  const DwpPointData d = dwp_point_data(w, x, y, p);
  const Vec p1 = w.factor_point(1, p), p2 = w.factor_point(2, p);
  const Vec zv = w.lift(1, field_value(*w.factor(1), z.part1, p1)) +
                 w.lift(2, field_value(*w.factor(2), z.part2, p2));

  // R0: factor curvature tensors, lifted.
  Vec out = w.lift(1, riemann_tensor(*w.factor(1), x.part1, y.part1, z.part1, p1).components) +
            w.lift(2, riemann_tensor(*w.factor(2), x.part2, y.part2, z.part2, p2).components);

  const VectorFieldExpr x_realized = realize(w, x);
  const VectorFieldExpr y_realized = realize(w, y);
  for (int i = 1; i <= 2; ++i) {
    const int j = 3 - i;
    const Vec& u = d.u[i - 1];
    const Vec nabla_x_u =
        covariant_derivative(d.geo, x_realized, w.u_field(i)).components;
    const Vec nabla_y_u =
        covariant_derivative(d.geo, y_realized, w.u_field(i)).components;
    const Vec ax = nabla_x_u - inner(d.geo, d.x, u) * u;
    const Vec ay = nabla_y_u - inner(d.geo, d.y, u) * u;
    out += wedge_apply(d.geo, ax, d.y_parts[j - 1], zv);
    out -= wedge_apply(d.geo, ay, d.x_parts[j - 1], zv);
  }
  for (int i = 1; i <= 2; ++i)
    for (int k = 1; k <= 2; ++k) {
      const double uu = inner(d.geo, d.u[i - 1], d.u[k - 1]);
      if (uu == 0.0) continue;
      out += uu * wedge_apply(d.geo, d.x_parts[(3 - i) - 1], d.y_parts[(3 - k) - 1], zv);
    }
  return TangentVector{p, out};
}

double mixed_sectional_closed_form(const DoublyWarpedProduct& w, const TangentVector& x,
                                   const TangentVector& z, const Vec& p) {
  const PointGeometry geo = point_geometry(*w.product(), p);
  if (w.block(2, x.components).norm() != 0.0)
    throw Error("mixed sectional: X must lie in block 1");
  if (w.block(1, z.components).norm() != 0.0)
    throw Error("mixed sectional: Z must lie in block 2");
  if (std::abs(inner(geo, x.components, x.components) - 1.0) > kUnitTolerance ||
      std::abs(inner(geo, z.components, z.components) - 1.0) > kUnitTolerance)
    throw Error("mixed sectional: inputs must be unit vectors");

  const Vec p1 = w.factor_point(1, p), p2 = w.factor_point(2, p);
  const Vec xf = w.block(1, x.components);
  const Vec zf = w.block(2, z.components);
  const Mat h1 = hessian_matrix(*w.factor(1), w.warp(1), p1);
  const Mat h2 = hessian_matrix(*w.factor(2), w.warp(2), p2);
  const double f1 = eval(w.warp(1), w.factor(1)->assignment(p1));
  const double f2 = eval(w.warp(2), w.factor(2)->assignment(p2));
  return -xf.dot(h1 * xf) / f1 - zf.dot(h2 * zf) / f2;
}

}  // namespace dwarp
