#include "dwarp/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace dwarp {

namespace {

std::string format_point(const Vec& p) {
  std::string out = "(";
  char buf[32];
  for (int i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", p[i]);
    out += (i ? ", " : "") + std::string(buf);
  }
  return out + ")";
}

struct RunContext {
  const ScenarioFile& file;
  const DwpImmersionScenario& s;
  std::vector<Vec> points;
  std::uint64_t seed = 0;
  int budget = 128;
  ScenarioValidation validation;
};

ScalarExpr random_poly(const std::vector<std::string>& coords, std::mt19937_64& rng) {
  ScalarExpr e(2.0 * uniform01(rng) - 1.0);
  for (const std::string& c : coords) {
    const ScalarExpr x = ScalarExpr::var(c);
    e = e + ScalarExpr(2.0 * uniform01(rng) - 1.0) * x;
    e = e + ScalarExpr(uniform01(rng) - 0.5) * x * x;
  }
  return e;
}

VectorFieldExpr random_field(const ChartedManifold& chart, std::mt19937_64& rng) {
  VectorFieldExpr f;
  for (int i = 0; i < chart.dim(); ++i) f.comps.push_back(random_poly(chart.coords(), rng));
  return f;
}

LiftedFieldSum random_lifted_sum(const DoublyWarpedProduct& w, std::mt19937_64& rng) {
  return make_lifted_sum(w, random_field(*w.factor(1), rng), random_field(*w.factor(2), rng));
}

Vec random_components(int n, std::mt19937_64& rng) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = 2.0 * uniform01(rng) - 1.0;
  return v;
}

// Gram-Schmidt over the coordinate basis taken in reverse order; the second,
// independent frame construction used by the frame-independence checks.
std::vector<Vec> reversed_frame(const PointGeometry& geo) {
  const int n = geo.chart->dim();
  std::vector<Vec> frame;
  for (int i = n - 1; i >= 0; --i) {
    Vec v = Vec::Zero(n);
    v[i] = 1.0;
    for (const Vec& e : frame) v -= inner(geo, v, e) * e;
    frame.push_back(v / std::sqrt(inner(geo, v, v)));
  }
  return frame;
}

using CheckFn = std::function<void(const RunContext&, const CheckInfo&,
                                   std::vector<CheckRecord>&)>;

CheckRecord make_record(const CheckInfo& info, double residual, double tol,
                        std::vector<std::pair<std::string, double>> values = {},
                        std::string note = "", std::string point = "-") {
  CheckRecord r;
  r.check = info.name;
  r.statement = info.statement;
  r.point = std::move(point);
  r.values = std::move(values);
  r.residual = residual;
  r.tolerance = tol;
  r.verdict = residual <= tol ? "pass" : "fail";
  r.note = std::move(note);
  return r;
}

CheckRecord agreement_record(const CheckInfo& info, Flag left, Flag right,
                             const std::string& what,
                             std::vector<std::pair<std::string, double>> values = {}) {
  CheckRecord r;
  r.check = info.name;
  r.statement = info.statement;
  r.values = std::move(values);
  r.note = what + ": " + to_label(left) + " vs " + to_label(right);
  if (left == Flag::kIndeterminate || right == Flag::kIndeterminate) {
    r.verdict = "indeterminate";
  } else {
    r.verdict = left == right ? "pass" : "fail";
    r.residual = left == right ? 0.0 : 1.0;
    r.tolerance = 0.0;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Check implementations
// ---------------------------------------------------------------------------

void check_composition(const RunContext& ctx, const CheckInfo& info,
                       std::vector<CheckRecord>& out) {
  std::vector<std::pair<std::string, double>> values{
      {"warp_composition", ctx.validation.warp_composition}};
  double residual = ctx.validation.warp_composition;
  std::string note;
  if (ctx.s.space_form_c) {
    values.emplace_back("space_form_residual", ctx.validation.space_form);
    residual = std::max(residual, ctx.validation.space_form);
    note = "c = " + std::to_string(*ctx.s.space_form_c);
  }
  out.push_back(make_record(info, residual, 1e-6, std::move(values), note));
}

void check_isometry(const RunContext& ctx, const CheckInfo& info,
                    std::vector<CheckRecord>& out) {
  const double residual =
      std::max({ctx.validation.factor1_isometry, ctx.validation.factor2_isometry,
                ctx.validation.product_isometry});
  out.push_back(make_record(info, residual, 1e-8,
                            {{"factor1", ctx.validation.factor1_isometry},
                             {"factor2", ctx.validation.factor2_isometry},
                             {"product", ctx.validation.product_isometry}}));
}

void check_metric_blocks(const RunContext& ctx, const CheckInfo& info,
                         std::vector<CheckRecord>& out) {
  double residual = 0.0;
  double min_warp = std::numeric_limits<double>::infinity();
  for (const DoublyWarpedProduct* w : {&ctx.s.source, &ctx.s.ambient}) {
    std::mt19937_64 rng(ctx.seed ^ 0x11u);
    for (int t = 0; t < 8; ++t) {
      const Vec p1 = w->factor(1)->sample_point(rng);
      const Vec p2 = w->factor(2)->sample_point(rng);
      const Vec p = w->join(p1, p2);
      const Mat g = metric_at(*w->product(), p);
      const Mat g1 = metric_at(*w->factor(1), p1);
      const Mat g2 = metric_at(*w->factor(2), p2);
      const double f1 = eval(w->warp(1), w->factor(1)->assignment(p1));
      const double f2 = eval(w->warp(2), w->factor(2)->assignment(p2));
      min_warp = std::min({min_warp, f1, f2});
      const int n1 = w->dim(1), n2 = w->dim(2);
      residual = std::max(residual,
                          (g.topLeftCorner(n1, n1) - f2 * f2 * g1).cwiseAbs().maxCoeff());
      residual = std::max(
          residual, (g.bottomRightCorner(n2, n2) - f1 * f1 * g2).cwiseAbs().maxCoeff());
      residual = std::max(residual, g.topRightCorner(n1, n2).cwiseAbs().maxCoeff());
    }
  }
  out.push_back(make_record(info, residual, 1e-10, {{"min_warp", min_warp}}));
}

void check_u_field(const RunContext& ctx, const CheckInfo& info,
                   std::vector<CheckRecord>& out) {
  double residual = 0.0, block_leak = 0.0;
  for (const DoublyWarpedProduct* w : {&ctx.s.source, &ctx.s.ambient}) {
    std::mt19937_64 rng(ctx.seed ^ 0x22u);
    for (int t = 0; t < 6; ++t) {
      const Vec p = w->join(w->factor(1)->sample_point(rng), w->factor(2)->sample_point(rng));
      for (int i = 1; i <= 2; ++i) {
        const Vec u = field_value(*w->product(), w->u_field(i), p);
        const Vec oracle =
            -gradient(*w->product(), log(w->warp(i)), p).components;
        residual = std::max(residual, (u - oracle).cwiseAbs().maxCoeff());
        block_leak = std::max(block_leak, w->block(3 - i, u).cwiseAbs().maxCoeff());
      }
    }
  }
  out.push_back(make_record(info, std::max(residual, block_leak), 1e-8,
                            {{"gradient_residual", residual}, {"block_leak", block_leak}}));
}

void check_connection_closed_form(const RunContext& ctx, const CheckInfo& info,
                                  std::vector<CheckRecord>& out) {
  std::mt19937_64 rng(ctx.seed ^ 0x33u);
  double residual = 0.0;
  for (const Vec& p : ctx.points) {
    for (int draw = 0; draw < 2; ++draw) {
      const LiftedFieldSum x = random_lifted_sum(ctx.s.source, rng);
      const LiftedFieldSum y = random_lifted_sum(ctx.s.source, rng);
      const Vec closed = dwp_connection_closed_form(ctx.s.source, x, y, p).components;
      const Vec oracle = covariant_derivative(*ctx.s.source.product(),
                                              realize(ctx.s.source, x),
                                              realize(ctx.s.source, y), p)
                             .components;
      residual = std::max(residual, (closed - oracle).cwiseAbs().maxCoeff());
    }
  }
  out.push_back(make_record(info, residual, 1e-6));
}

void check_curvature_closed_form(const RunContext& ctx, const CheckInfo& info,
                                 std::vector<CheckRecord>& out) {
  std::mt19937_64 rng(ctx.seed ^ 0x44u);
  double residual = 0.0;
  for (const Vec& p : ctx.points) {
    for (int draw = 0; draw < 2; ++draw) {
      const LiftedFieldSum x = random_lifted_sum(ctx.s.source, rng);
      const LiftedFieldSum y = random_lifted_sum(ctx.s.source, rng);
      const LiftedFieldSum z = random_lifted_sum(ctx.s.source, rng);
      const Vec closed = dwp_curvature_closed_form(ctx.s.source, x, y, z, p).components;
      const Vec oracle =
          riemann_tensor(*ctx.s.source.product(), realize(ctx.s.source, x),
                         realize(ctx.s.source, y), realize(ctx.s.source, z), p)
              .components;
      residual = std::max(residual, (closed - oracle).cwiseAbs().maxCoeff());
    }
  }
  out.push_back(make_record(info, residual, 1e-6));
}

void check_mixed_sectional(const RunContext& ctx, const CheckInfo& info,
                           std::vector<CheckRecord>& out) {
  double residual = 0.0;
  for (const Vec& p : ctx.points) {
    const std::vector<Vec> d1 = distribution_frame(ctx.s, 1, p);
    const std::vector<Vec> d2 = distribution_frame(ctx.s, 2, p);
    for (const Vec& x : d1)
      for (const Vec& z : d2) {
        const double closed = mixed_sectional_closed_form(
            ctx.s.source, TangentVector{p, x}, TangentVector{p, z}, p);
        const double oracle = sectional_curvature(*ctx.s.source.product(), p,
                                                  TangentVector{p, x}, TangentVector{p, z});
        residual = std::max(residual, std::abs(closed - oracle));
      }
  }
  out.push_back(make_record(info, residual, 1e-6));
}

void check_sff_invariants(const RunContext& ctx, const CheckInfo& info,
                          std::vector<CheckRecord>& out) {
  double symmetry = 0.0, tangency = 0.0, weingarten = 0.0, frame_indep = 0.0;
  std::vector<VectorFieldExpr> eta_fields;
  for (int i = 1; i <= 2; ++i)
    for (const VectorFieldExpr& f : factor_normal_fields(ctx.s, i)) eta_fields.push_back(f);

  std::mt19937_64 rng(ctx.seed ^ 0x55u);
  for (const Vec& p : ctx.points) {
    const SecondFundamentalSample sample =
        second_fundamental_sample(ctx.s.product_immersion, p);
    symmetry = std::max(symmetry, sample.symmetry_residual);
    tangency = std::max(tangency, sample.tangency_residual);

    // Weingarten split: the tangential part of the ambient derivative of a
    // normal field equals -dphi(A_eta X).
    const Vec q = ctx.s.product_immersion.map_point(p);
    const Mat g_amb = metric_at(*ctx.s.ambient.product(), q);
    const Mat jac = ctx.s.product_immersion.jacobian(p);
    for (const VectorFieldExpr& eta_field : eta_fields) {
      const VarAssignment at = ctx.s.source.product()->assignment(p);
      Vec eta(ctx.s.ambient.product()->dim());
      for (int a = 0; a < eta.size(); ++a) eta[a] = eval(eta_field.comps[a], at);
      const TangentVector x{p, random_components(ctx.s.n(), rng)};
      const Vec deriv = ambient_field_derivative(ctx.s.product_immersion, p, x.components,
                                                 eta_field);
      const Vec a_eta_x =
          shape_operator_apply(ctx.s.product_immersion, p, NormalVector{p, eta, 0.0}, x)
              .components;
      const Vec d_eta =
          normal_connection(ctx.s.product_immersion, p, x, eta_field).ambient;
      const Vec split = deriv + jac * a_eta_x - d_eta;
      weingarten = std::max(weingarten, std::sqrt(split.dot(g_amb * split)));
    }

    // Mean curvature from the coordinate-order frame vs the reversed frame.
    const PointGeometry src_geo = point_geometry(*ctx.s.source.product(), p);
    const Vec h_fwd = mean_curvature(ctx.s.product_immersion, p).ambient;
    Vec acc = Vec::Zero(ctx.s.ambient.product()->dim());
    for (const Vec& e : reversed_frame(src_geo)) {
      acc += second_fundamental_form(ctx.s.product_immersion, p, TangentVector{p, e},
                                     TangentVector{p, e})
                 .ambient;
    }
    const Vec h_rev = acc / static_cast<double>(ctx.s.n());
    frame_indep = std::max(frame_indep, (h_fwd - h_rev).cwiseAbs().maxCoeff());
  }
  out.push_back(make_record(info, std::max({symmetry / 1e-9, tangency / 1e-8,
                                            weingarten / 1e-8, frame_indep / 1e-9}),
                            1.0,
                            {{"symmetry", symmetry},
                             {"tangency", tangency},
                             {"weingarten", weingarten},
                             {"mean_frame_independence", frame_indep}},
                            "residual is the worst ratio to its own bound"));
}

void check_gauss_equation(const RunContext& ctx, const CheckInfo& info,
                          std::vector<CheckRecord>& out) {
  std::mt19937_64 rng(ctx.seed ^ 0x66u);
  double residual = 0.0;
  const int n = ctx.s.n();
  for (const Vec& p : ctx.points)
    for (int draw = 0; draw < 3; ++draw) {
      const TangentVector x{p, random_components(n, rng)};
      const TangentVector y{p, random_components(n, rng)};
      const TangentVector z{p, random_components(n, rng)};
      const TangentVector w{p, random_components(n, rng)};
      residual = std::max(
          residual, gauss_equation_residual(ctx.s.product_immersion, p, x, y, z, w));
    }
  out.push_back(make_record(info, residual, 1e-6));
}

void check_classification(const RunContext& ctx, const CheckInfo& info,
                          std::vector<CheckRecord>& out) {
  const ClassificationReport product = classify(ctx.s.product_immersion, ctx.points);
  CheckRecord r;
  r.check = info.name;
  r.statement = info.statement;
  r.values = {{"geodesic_residual", product.geodesic_residual},
              {"umbilic_residual", product.umbilic_residual},
              {"minimal_residual", product.minimal_residual}};
  r.note = std::string("TG=") + to_label(product.totally_geodesic) +
           " TU=" + to_label(product.totally_umbilical) +
           " minimal=" + to_label(product.minimal);
  const bool indeterminate = product.totally_geodesic == Flag::kIndeterminate ||
                             product.totally_umbilical == Flag::kIndeterminate ||
                             product.minimal == Flag::kIndeterminate;
  r.verdict = indeterminate ? "indeterminate" : "pass";
  out.push_back(std::move(r));
}

void check_mixed_totally_geodesic(const RunContext& ctx, const CheckInfo& info,
                                  std::vector<CheckRecord>& out) {
  double residual = 0.0;
  for (const Vec& p : ctx.points)
    residual = std::max(residual, h_decomposition_check(ctx.s, p).mixed_residual);
  out.push_back(make_record(info, residual, 1e-8));
}

void check_h_decomposition(const RunContext& ctx, const CheckInfo& info,
                           std::vector<CheckRecord>& out) {
  double b1 = 0.0, b2 = 0.0;
  for (const Vec& p : ctx.points) {
    const HDecomposition d = h_decomposition_check(ctx.s, p);
    b1 = std::max(b1, d.block1_residual);
    b2 = std::max(b2, d.block2_residual);
  }
  out.push_back(make_record(info, std::max(b1, b2), 1e-6,
                            {{"block1", b1}, {"block2", b2}}));
}

void check_norm_identity(const RunContext& ctx, const CheckInfo& info,
                         std::vector<CheckRecord>& out) {
  double identity = 0.0, min_gap = std::numeric_limits<double>::infinity(), max_gap = 0.0;
  bool inequality = true;
  for (const Vec& p : ctx.points) {
    const NormIdentity ni = norm_identity_check(ctx.s, p);
    identity = std::max(identity, ni.identity_residual);
    inequality = inequality && ni.inequality_holds;
    min_gap = std::min(min_gap, ni.equality_gap);
    max_gap = std::max(max_gap, ni.equality_gap);
  }
  out.push_back(make_record(info, identity, 1e-6,
                            {{"min_equality_gap", min_gap}, {"max_equality_gap", max_gap}},
                            inequality ? "" : "lower bound violated"));
  if (!inequality) out.back().verdict = "fail";

  // Equality case: both factors totally geodesic exactly when the gap closes.
  std::vector<Vec> pts1, pts2;
  for (const Vec& p : ctx.points) {
    pts1.push_back(ctx.s.source.factor_point(1, p));
    pts2.push_back(ctx.s.source.factor_point(2, p));
  }
  const Flag factors_tg = [&] {
    const Flag a = classify(ctx.s.phi1, pts1).totally_geodesic;
    const Flag b = classify(ctx.s.phi2, pts2).totally_geodesic;
    if (a == Flag::kNo || b == Flag::kNo) return Flag::kNo;
    if (a == Flag::kYes && b == Flag::kYes) return Flag::kYes;
    return Flag::kIndeterminate;
  }();
  out.push_back(agreement_record(info, flag_from_residual(max_gap, 1e-6), factors_tg,
                                 "equality gap closes vs factors totally geodesic",
                                 {{"max_equality_gap", max_gap}}));
}

void check_factor_geodesy(const RunContext& ctx, const CheckInfo& info,
                          std::vector<CheckRecord>& out) {
  const NiGeodesy g1 = ni_geodesy_check(ctx.s, 1, ctx.points);
  const NiGeodesy g2 = ni_geodesy_check(ctx.s, 2, ctx.points);
  for (int i = 1; i <= 2; ++i) {
    const NiGeodesy& g = i == 1 ? g1 : g2;
    out.push_back(agreement_record(
        info, g.direct_verdict, g.derived_verdict,
        "N" + std::to_string(i) + "-totally-geodesic direct vs derived",
        {{"h_restricted", g.hi_residual},
         {"factor_geodesic", g.factor_geodesic_residual},
         {"dln_rho_other", g.dln_rho_j_max}}));
  }
  const Flag combined = [&] {
    if (g1.direct_verdict == Flag::kNo || g2.direct_verdict == Flag::kNo) return Flag::kNo;
    if (g1.direct_verdict == Flag::kYes && g2.direct_verdict == Flag::kYes)
      return Flag::kYes;
    return Flag::kIndeterminate;
  }();
  const Flag product_tg = classify(ctx.s.product_immersion, ctx.points).totally_geodesic;
  out.push_back(agreement_record(info, product_tg, combined,
                                 "totally geodesic vs N1- and N2-totally geodesic"));
}

void check_umbilical(const RunContext& ctx, const CheckInfo& info,
                     std::vector<CheckRecord>& out) {
  const UmbilicalCheck u = umbilical_check(ctx.s, ctx.points);
  out.push_back(agreement_record(info, u.composite_verdict, u.factor_verdict,
                                 "composite umbilicity vs factor umbilicity",
                                 {{"composite_umbilic", u.composite_umbilic_residual},
                                  {"composite_mean_formula", u.composite_mean_formula_residual},
                                  {"factor1_umbilic", u.factor_umbilic_residual[0]},
                                  {"factor1_mean_formula", u.factor_mean_formula_residual[0]},
                                  {"factor2_umbilic", u.factor_umbilic_residual[1]},
                                  {"factor2_mean_formula", u.factor_mean_formula_residual[1]}}));
}

void check_minimality(const RunContext& ctx, const CheckInfo& info,
                      std::vector<CheckRecord>& out) {
  const MinimalityCheck m = minimality_check(ctx.s, ctx.points);
  for (int i = 1; i <= 2; ++i) {
    const Flag direct = flag_from_residual(m.ni_minimal_residual[i - 1], 1e-6);
    const Flag factor_min = flag_from_residual(m.factor_minimal_residual[i - 1], 1e-6);
    const Flag dln = flag_from_residual(m.dln_rho_j_max[i - 1], 1e-6);
    const Flag derived = (factor_min == Flag::kNo || dln == Flag::kNo) ? Flag::kNo
                         : (factor_min == Flag::kYes && dln == Flag::kYes)
                             ? Flag::kYes
                             : Flag::kIndeterminate;
    out.push_back(agreement_record(info, direct, derived,
                                   "N" + std::to_string(i) + "-minimal direct vs derived",
                                   {{"partial_mean", m.ni_minimal_residual[i - 1]},
                                    {"factor_mean", m.factor_minimal_residual[i - 1]},
                                    {"dln_rho_other", m.dln_rho_j_max[i - 1]}}));
  }
  const double stmt2 = std::max(m.factor_relation_residual[0], m.factor_relation_residual[1]);
  out.push_back(agreement_record(info, m.minimal_verdict,
                                 flag_from_residual(stmt2, 1e-5),
                                 "minimal vs factor mean-curvature relations",
                                 {{"h_norm", m.h_norm_max},
                                  {"statement2_factor1", m.factor_relation_residual[0]},
                                  {"statement2_factor2", m.factor_relation_residual[1]}}));
  out.push_back(make_record(info, m.trace_identity_residual, 1e-6,
                            {{"eq_minimal_norm", m.eq_minimal_norm}},
                            "trace identity against n H"));
  out.push_back(agreement_record(info, m.minimal_verdict,
                                 flag_from_residual(m.eq_minimal_norm, 1e-6),
                                 "minimal vs vanishing of the trace identity"));
}

void check_partial_mean_curvature(const RunContext& ctx, const CheckInfo& info,
                                  std::vector<CheckRecord>& out) {
  double residual = 0.0, h1_max = 0.0, h2_max = 0.0;
  for (const Vec& p : ctx.points) {
    const Mat g_amb = metric_at(*ctx.s.ambient.product(), ctx.s.product_immersion.map_point(p));
    for (int i = 1; i <= 2; ++i) {
      const NormalVector hi = partial_mean_curvature(ctx.s, i, p);
      residual = std::max(residual, hi.normal_residual);
      const double norm = std::sqrt(hi.ambient.dot(g_amb * hi.ambient));
      (i == 1 ? h1_max : h2_max) = std::max(i == 1 ? h1_max : h2_max, norm);
    }
  }
  out.push_back(make_record(info, residual, 1e-8,
                            {{"h1_norm_max", h1_max}, {"h2_norm_max", h2_max}}));
}

void check_shape_operator_closed_form(const RunContext& ctx, const CheckInfo& info,
                                      std::vector<CheckRecord>& out) {
  std::mt19937_64 rng(ctx.seed ^ 0x77u);
  double a_res = 0.0, d_res = 0.0;
  int tested = 0;
  for (int i = 1; i <= 2; ++i) {
    const std::vector<VectorFieldExpr> etas = factor_normal_fields(ctx.s, i);
    for (const VectorFieldExpr& eta : etas)
      for (const Vec& p : ctx.points)
        for (int draw = 0; draw < 2; ++draw) {
          const TangentVector x{p, random_components(ctx.s.n(), rng)};
          const ShapeOperatorCheck c =
              shape_operator_closed_form_check(ctx.s, i, eta, p, x);
          a_res = std::max(a_res, c.a_residual);
          d_res = std::max(d_res, c.d_residual);
          ++tested;
        }
  }
  if (tested == 0) {
    out.push_back(make_record(info, 0.0, 1e-6, {},
                              "no factor-aligned normal directions (codimension zero)"));
    return;
  }
  out.push_back(make_record(info, std::max(a_res, d_res), 1e-6,
                            {{"shape_operator", a_res}, {"normal_connection", d_res}}));
}

void check_h1_dot_h2(const RunContext& ctx, const CheckInfo& info,
                     std::vector<CheckRecord>& out) {
  double residual = 0.0, lhs_max = 0.0;
  for (const Vec& p : ctx.points) {
    const H1DotH2 h = h1_dot_h2_check(ctx.s, p);
    residual = std::max(residual, h.residual);
    lhs_max = std::max(lhs_max, std::abs(h.lhs));
  }
  out.push_back(make_record(info, residual, 1e-6, {{"inner_product_max", lhs_max}}));
}

void check_a_h_closed_form(const RunContext& ctx, const CheckInfo& info,
                           std::vector<CheckRecord>& out) {
  double r1 = 0.0, r2 = 0.0;
  for (const Vec& p : ctx.points) {
    const AhClosedForm a = a_h_closed_form_check(ctx.s, p);
    r1 = std::max(r1, a.h1_residual);
    r2 = std::max(r2, a.h2_residual);
  }
  out.push_back(make_record(info, std::max(r1, r2), 1e-6, {{"a_h1", r1}, {"a_h2", r2}}));
}

void check_perpendicularity_criterion(const RunContext& ctx, const CheckInfo& info,
                   std::vector<CheckRecord>& out) {
  bool agree = true;
  double worst = 0.0;
  for (const Vec& p : ctx.points) {
    const H1DotH2 h = h1_dot_h2_check(ctx.s, p);
    const bool perpendicular = std::abs(h.lhs) <= 1e-6;
    const bool sum_matches =
        std::abs(h.delta1_term + h.delta2_term - *ctx.s.space_form_c) <= 1e-6;
    if (perpendicular != sum_matches) {
      agree = false;
      worst = std::max(worst, std::abs(h.lhs));
    }
  }
  out.push_back(make_record(info, agree ? 0.0 : std::max(worst, 1.0), 1e-6, {},
                            "two-sided perpendicularity criterion"));
}

void check_eigenfunction_perpendicularity(const RunContext& ctx, const CheckInfo& info,
                   std::vector<CheckRecord>& out) {
  const double c = *ctx.s.space_form_c;
  double hypothesis = 0.0;
  for (const Vec& p : ctx.points)
    for (int i = 1; i <= 2; ++i)
      hypothesis = std::max(hypothesis,
                            std::abs(leaf_laplacian(ctx.s, i, p) -
                                     0.5 * ctx.s.n(i) * c * ctx.s.warp_value(i, p)));
  if (hypothesis > 1e-6) {
    CheckRecord r;
    r.check = info.name;
    r.statement = info.statement;
    r.verdict = "skipped";
    r.residual = hypothesis;
    r.note = "eigenfunction hypothesis not satisfied";
    out.push_back(std::move(r));
    return;
  }
  double residual = 0.0;
  for (const Vec& p : ctx.points)
    residual = std::max(residual, std::abs(h1_dot_h2_check(ctx.s, p).lhs));
  out.push_back(
      make_record(info, residual, 1e-6, {{"hypothesis_residual", hypothesis}}));
}

void check_harmonic_perpendicularity(const RunContext& ctx, const CheckInfo& info,
                    std::vector<CheckRecord>& out) {
  double hypothesis = std::abs(*ctx.s.space_form_c);
  for (const Vec& p : ctx.points)
    for (int i = 1; i <= 2; ++i)
      hypothesis = std::max(hypothesis, std::abs(leaf_laplacian(ctx.s, i, p)));
  if (hypothesis > 1e-6) {
    CheckRecord r;
    r.check = info.name;
    r.statement = info.statement;
    r.verdict = "skipped";
    r.residual = hypothesis;
    r.note = "needs c = 0 and harmonic warps";
    out.push_back(std::move(r));
    return;
  }
  double residual = 0.0;
  for (const Vec& p : ctx.points)
    residual = std::max(residual, std::abs(h1_dot_h2_check(ctx.s, p).lhs));
  out.push_back(make_record(info, residual, 1e-8, {{"hypothesis_residual", hypothesis}}));
}

void check_max_sectional(const RunContext& ctx, const CheckInfo& info,
                         std::vector<CheckRecord>& out) {
  double determinism = 0.0, k_min = 0.0, k_max = 0.0;
  bool first = true;
  for (const Vec& p : ctx.points) {
    const double k1 = max_ambient_sectional(ctx.s, p, ctx.budget, ctx.seed);
    const double k2 = max_ambient_sectional(ctx.s, p, ctx.budget, ctx.seed);
    determinism = std::max(determinism, std::abs(k1 - k2));
    k_min = first ? k1 : std::min(k_min, k1);
    k_max = first ? k1 : std::max(k_max, k1);
    first = false;
  }
  out.push_back(make_record(info, determinism, 0.0,
                            {{"estimate_min", k_min}, {"estimate_max", k_max}},
                            "repeat run with the same seed must agree exactly"));
}

void inequality_records(const RunContext& ctx, const CheckInfo& info, bool space_form,
                        std::vector<CheckRecord>& out) {
  double slack_violation = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  Vec tightest_point;
  bool implication_ok = true, converse_ok = true;
  int equality_points = 0;
  for (const Vec& p : ctx.points) {
    const InequalityReport r = space_form
                                   ? space_form_inequality(ctx.s, p)
                                   : fundamental_inequality(ctx.s, p, ctx.budget, ctx.seed);
    if (!r.holds) slack_violation = std::max(slack_violation, r.lhs - r.rhs);
    if (r.gap < min_gap) {
      min_gap = r.gap;
      tightest_point = p;
    }
    if (r.equality) {
      ++equality_points;
      if (!r.equality_flags_set) implication_ok = false;
    }
    if (r.equality_flags_set && !r.equality) converse_ok = false;
  }
  out.push_back(make_record(info, slack_violation, 1e-8,
                            {{"min_gap", min_gap},
                             {"equality_points", static_cast<double>(equality_points)}},
                            implication_ok && converse_ok
                                ? ""
                                : (implication_ok ? "equality-case flags set without equality"
                                                  : "equality without the equality-case flags"),
                            format_point(tightest_point)));
  if (!implication_ok || !converse_ok) out.back().verdict = "fail";
}

void check_fundamental_inequality(const RunContext& ctx, const CheckInfo& info,
                          std::vector<CheckRecord>& out) {
  inequality_records(ctx, info, false, out);
}

void check_space_form_inequality(const RunContext& ctx, const CheckInfo& info,
                          std::vector<CheckRecord>& out) {
  inequality_records(ctx, info, true, out);
}

void check_obstruction(const RunContext& ctx, const CheckInfo& info,
                       std::vector<CheckRecord>& out) {
  const ObstructionReport r = obstruction_probe(ctx.s, ctx.points, ctx.file.hypothesis,
                                                ctx.budget, ctx.seed);
  CheckRecord rec;
  rec.check = info.name;
  rec.statement = info.statement;
  rec.values = {{"harmonic_residual", r.harmonic_residual},
                {"eigen_residual", r.eigen_residual},
                {"minimal_residual", r.minimal_residual},
                {"max_k", r.max_k},
                {"bound", r.bound}};
  if (!r.hypotheses_ok) {
    rec.verdict = "fail";
    rec.residual =
        std::max({r.harmonic_residual, r.eigen_residual, r.minimal_residual});
    rec.tolerance = 1e-6;
    rec.note = "declared hypothesis rejected";
  } else {
    rec.verdict = r.consistent ? "pass" : "fail";
    rec.residual = r.consistent ? 0.0 : r.bound - ctx.s.n(1) * ctx.s.n(2) * r.max_k;
    rec.tolerance = 1e-8;
  }
  out.push_back(std::move(rec));
}

struct RegistryEntry {
  CheckInfo info;
  CheckFn fn;
};

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> entries = [] {
    std::vector<RegistryEntry> r;
    const auto add = [&r](CheckInfo info, CheckFn fn) {
      r.push_back({std::move(info), std::move(fn)});
    };
    add({"composition",
         "induced warps equal the ambient warps along the factor immersions; a declared "
         "curvature constant matches the ambient",
         {"compose_scenario", "build_dwp"}, 1e-6, false, false, false},
        check_composition);
    add({"isometry", "factor and product maps are isometric immersions",
         {"isometry_residual", "pushforward"}, 1e-8, false, false, false},
        check_isometry);
    add({"metric_blocks",
         "product metric has zero cross blocks and blocks f2^2 g1, f1^2 g2 with positive warps",
         {"build_dwp"}, 1e-10, false, false, false},
        check_metric_blocks);
    add({"u_field",
         "U_i = -grad((ln f_i) o pi_i) in the product metric, supported on block i",
         {"u_field"}, 1e-8, false, false, false},
        check_u_field);
    add({"connection_closed_form",
         "closed-form doubly warped connection matches the Christoffel computation",
         {"dwp_connection_closed_form"}, 1e-6, false, false, false},
        check_connection_closed_form);
    add({"curvature_closed_form",
         "closed-form doubly warped curvature matches the direct Riemann tensor",
         {"dwp_curvature_closed_form", "wedge"}, 1e-6, false, false, false},
        check_curvature_closed_form);
    add({"mixed_sectional",
         "mixed-plane sectional curvature from the warp Hessians matches the direct value",
         {"mixed_sectional_closed_form"}, 1e-6, false, false, false},
        check_mixed_sectional);
    add({"sff_invariants",
         "second fundamental form is symmetric and normal-valued; Weingarten split holds; "
         "mean curvature is frame independent",
         {"second_fundamental_form", "shape_operator", "mean_curvature"}, 1.0, false,
         false, true},
        check_sff_invariants);
    add({"gauss_equation", "Gauss equation residual vanishes on random tangent 4-tuples",
         {"gauss_equation_residual"}, 1e-6, false, false, true},
        check_gauss_equation);
    add({"classification", "totally geodesic / totally umbilical / minimal flags",
         {"classify"}, 1e-6, false, false, true},
        check_classification);
    add({"mixed_totally_geodesic", "h(X,Z) = 0 for X in D1 and Z in D2",
         {"h_decomposition_check"}, 1e-8, false, false, true},
        check_mixed_totally_geodesic);
    add({"h_decomposition",
         "h equals the direct-product h minus <.,.> D ln rho_j on each block",
         {"h_decomposition_check"}, 1e-6, false, false, true},
        check_h_decomposition);
    add({"norm_identity",
         "|h|^2 = |h0|^2 + n1 |D ln rho2|^2 + n2 |D ln rho1|^2; equality exactly for "
         "totally geodesic factors",
         {"norm_identity_check"}, 1e-6, false, false, true},
        check_norm_identity);
    add({"factor_geodesy",
         "N_i-total geodesy equals factor total geodesy with D ln rho_j = 0; totally "
         "geodesic equals both",
         {"ni_geodesy_check"}, 1e-6, false, false, true},
        check_factor_geodesy);
    add({"umbilical",
         "totally umbilical with H = -(D ln rho1 + D ln rho2) exactly when the factors "
         "are umbilical with H = -D ln rho_i",
         {"umbilical_check"}, 1e-6, false, false, true},
        check_umbilical);
    add({"minimality",
         "N_i-minimality and minimality against the factor mean-curvature relations and "
         "the trace identity",
         {"minimality_check", "mean_curvature"}, 1e-6, false, false, true},
        check_minimality);
    add({"partial_mean_curvature", "partial mean curvatures are normal to the source",
         {"partial_mean_curvature"}, 1e-8, false, false, true},
        check_partial_mean_curvature);
    add({"shape_operator_closed_form",
         "A_eta and D_X eta from direct-product data plus warp terms match the direct "
         "Weingarten computation",
         {"shape_operator_closed_form", "normal_connection", "shape_operator"}, 1e-6,
         false, false, true},
        check_shape_operator_closed_form);
    add({"h1_dot_h2",
         "<H1,H2> = Delta^1 f1/(n1 f1) + Delta^2 f2/(n2 f2) - c",
         {"h1_dot_h2_check", "partial_mean_curvature"}, 1e-6, true, false, true},
        check_h1_dot_h2);
    add({"a_h_closed_form",
         "A_{H_i} acts on the opposite block through the warp Hessian and factor Laplacian",
         {"a_h_closed_form_check"}, 1e-6, true, false, true},
        check_a_h_closed_form);
    add({"perpendicularity_criterion",
         "H1 and H2 are perpendicular exactly when the Laplacian terms sum to c",
         {"h1_dot_h2_check"}, 1e-6, true, false, true},
        check_perpendicularity_criterion);
    add({"eigenfunction_perpendicularity",
         "warps that are Laplace eigenfunctions with eigenvalues n_i c / 2 force "
         "perpendicular partial mean curvatures",
         {"h1_dot_h2_check"}, 1e-6, true, false, true},
        check_eigenfunction_perpendicularity);
    add({"harmonic_perpendicularity", "c = 0 with harmonic warps forces perpendicular partial mean curvatures",
         {"h1_dot_h2_check"}, 1e-8, true, false, true},
        check_harmonic_perpendicularity);
    add({"max_sectional",
         "deterministic maximum ambient sectional curvature over tangent 2-planes",
         {"max_ambient_sectional"}, 0.0, false, false, true},
        check_max_sectional);
    add({"fundamental_inequality",
         "n2 D1f1/f1 + n1 D2f2/f2 <= (n^2/4)|H|^2 + n1 n2 max K; equality exactly for "
         "mixed totally geodesic immersions with n1 H1 = n2 H2",
         {"fundamental_inequality", "max_ambient_sectional"}, 1e-8, false, false, true},
        check_fundamental_inequality);
    add({"space_form_inequality", "the same inequality with max K replaced by the constant c",
         {"space_form_inequality"}, 1e-8, true, false, true},
        check_space_form_inequality);
    add({"obstruction",
         "declared hypothesis class validated; minimal scenarios satisfy the derived "
         "curvature bound",
         {"obstruction_probe"}, 1e-8, false, true, true},
        check_obstruction);
    return r;
  }();
  return entries;
}

}  // namespace

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> out;
    for (const RegistryEntry& e : registry()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

const CheckInfo* find_check(const std::string& name) {
  for (const CheckInfo& info : check_registry())
    if (info.name == name) return &info;
  return nullptr;
}

CheckReport run_checks(const ScenarioFile& file, const RunOptions& opts) {
  CheckReport report;
  report.scenario = file.name;
  report.seed = opts.seed;

  RunContext ctx{file, file.scenario, {}, opts.seed, opts.budget, {}};

  // Sample points.
  const int count = opts.points_override.value_or(file.samples.count);
  const ChartedManifold& chart = *file.scenario.source.product();
  if (file.samples.kind == SampleSpec::Kind::kGrid) {
    const int per_axis = std::max(1, count);
    std::vector<Vec> pts{Vec(chart.dim())};
    for (int axis = 0; axis < chart.dim(); ++axis) {
      std::vector<Vec> next;
      for (const Vec& base : pts)
        for (int j = 0; j < per_axis; ++j) {
          Vec p = base;
          const Interval& d = chart.domain(axis);
          const double pad = file.samples.margin * d.width();
          p[axis] = d.lo + pad + (j + 0.5) / per_axis * (d.width() - 2.0 * pad);
          next.push_back(p);
        }
      pts = std::move(next);
    }
    ctx.points = std::move(pts);
  } else {
    std::mt19937_64 rng(opts.seed);
    for (int i = 0; i < count; ++i)
      ctx.points.push_back(chart.sample_point(rng, file.samples.margin));
  }

  ctx.validation = validate_scenario(file.scenario, opts.seed, 8);
  const bool isometry_ok =
      std::max({ctx.validation.factor1_isometry, ctx.validation.factor2_isometry,
                ctx.validation.product_isometry}) <= 1e-8;

  // Requested checks in registry order; the gates always run first.
  const auto requested = [&](const std::string& name) {
    if (name == "composition" || name == "isometry") return true;  // always-run gates
    if (!opts.only_checks.empty() &&
        std::find(opts.only_checks.begin(), opts.only_checks.end(), name) ==
            opts.only_checks.end())
      return false;
    for (const CheckRequest& req : file.checks)
      if (req.name == name) return true;
    return false;
  };
  for (const CheckRequest& req : file.checks)
    if (!find_check(req.name))
      throw Error("scenario '" + file.name + "' requests unknown check '" + req.name + "'");

  for (const RegistryEntry& entry : registry()) {
    if (!requested(entry.info.name)) continue;
    std::optional<double> file_tol;
    for (const CheckRequest& req : file.checks)
      if (req.name == entry.info.name && req.tol) file_tol = req.tol;

    std::vector<CheckRecord> records;
    if (entry.info.needs_isometry && !isometry_ok) {
      CheckRecord r;
      r.check = entry.info.name;
      r.statement = entry.info.statement;
      r.verdict = "skipped";
      r.note = "isometry gate failed";
      records.push_back(std::move(r));
    } else if (entry.info.needs_c && !file.scenario.space_form_c) {
      CheckRecord r;
      r.check = entry.info.name;
      r.statement = entry.info.statement;
      r.verdict = "error";
      r.note = "scenario declares no space-form constant";
      records.push_back(std::move(r));
    } else if (entry.info.needs_hypothesis && !file.hypothesis.any()) {
      CheckRecord r;
      r.check = entry.info.name;
      r.statement = entry.info.statement;
      r.verdict = "error";
      r.note = "scenario declares no hypothesis class";
      records.push_back(std::move(r));
    } else {
      try {
        entry.fn(ctx, entry.info, records);
      } catch (const Error& e) {
        CheckRecord r;
        r.check = entry.info.name;
        r.statement = entry.info.statement;
        r.verdict = "error";
        r.note = e.what();
        records.push_back(std::move(r));
      }
    }
    // Per-check tolerance overrides re-derive the verdict from the residual.
    for (CheckRecord& r : records) {
      const std::optional<double> tol =
          opts.tol_override ? opts.tol_override : file_tol;
      if (tol && (r.verdict == "pass" || r.verdict == "fail")) {
        r.tolerance = *tol;
        r.verdict = r.residual <= r.tolerance ? "pass" : "fail";
      }
      report.records.push_back(std::move(r));
    }
  }
  return report;
}

const BundledScenario* find_bundled(const std::string& name) {
  for (const BundledScenario& b : bundled_scenarios())
    if (b.name == name) return &b;
  return nullptr;
}

}  // namespace dwarp
