// Acceptance suite: one numbered end-to-end criterion per core guarantee of
// the engine, each with a pinned tolerance and one pass/fail line. Exit
// status is nonzero when any criterion fails.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "dwarp/chen_inequality.hpp"
#include "dwarp/runner.hpp"

using namespace dwarp;

namespace {

int g_failures = 0;

void report(int number, const std::string& what, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", number, what.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double uniform_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ScenarioFile load(const std::string& name) {
  return load_scenario_text(find_bundled(name)->text, name);
}

std::vector<Vec> sample_points(const DwpImmersionScenario& s, std::mt19937_64& rng,
                               int count) {
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) pts.push_back(s.source.product()->sample_point(rng));
  return pts;
}

ScalarExpr random_poly(const std::vector<std::string>& coords, std::mt19937_64& rng) {
  ScalarExpr e(2.0 * uniform_real(rng) - 1.0);
  for (const std::string& c : coords) {
    const ScalarExpr x = ScalarExpr::var(c);
    e = e + ScalarExpr(2.0 * uniform_real(rng) - 1.0) * x +
        ScalarExpr(uniform_real(rng) - 0.5) * x * x;
  }
  return e;
}

LiftedFieldSum random_sum(const DoublyWarpedProduct& w, std::mt19937_64& rng) {
  VectorFieldExpr p1, p2;
  for (int i = 0; i < w.dim(1); ++i) p1.comps.push_back(random_poly(w.factor(1)->coords(), rng));
  for (int i = 0; i < w.dim(2); ++i) p2.comps.push_back(random_poly(w.factor(2)->coords(), rng));
  return make_lifted_sum(w, std::move(p1), std::move(p2));
}

const std::vector<std::string> kClosedFormScenarios = {
    "polar_plane", "sphere_warped", "flat_doubly_warped", "surface_of_revolution_catenoid",
    "generic_4d_doubly_warped"};

void criterion_1_connection() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (const std::string& name : kClosedFormScenarios) {
    const DoublyWarpedProduct w = load(name).scenario.source;
    for (int draw = 0; draw < 20; ++draw) {
      const Vec p = w.join(w.factor(1)->sample_point(rng), w.factor(2)->sample_point(rng));
      const LiftedFieldSum x = random_sum(w, rng);
      const LiftedFieldSum y = random_sum(w, rng);
      const Vec closed = dwp_connection_closed_form(w, x, y, p).components;
      const Vec oracle =
          covariant_derivative(*w.product(), realize(w, x), realize(w, y), p).components;
      worst = std::max(worst, (closed - oracle).cwiseAbs().maxCoeff());
    }
  }
  report(1, "closed-form connection vs Christoffel oracle, 5 scenarios x 20 draws",
         worst <= 1e-6, "max residual " + fmt(worst));
}

void criterion_2_curvature() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  for (const std::string& name : kClosedFormScenarios) {
    const DoublyWarpedProduct w = load(name).scenario.source;
    for (int draw = 0; draw < 20; ++draw) {
      const Vec p = w.join(w.factor(1)->sample_point(rng), w.factor(2)->sample_point(rng));
      const LiftedFieldSum x = random_sum(w, rng);
      const LiftedFieldSum y = random_sum(w, rng);
      const LiftedFieldSum z = random_sum(w, rng);
      const Vec closed = dwp_curvature_closed_form(w, x, y, z, p).components;
      const Vec oracle = riemann_tensor(*w.product(), realize(w, x), realize(w, y),
                                        realize(w, z), p)
                             .components;
      worst = std::max(worst, (closed - oracle).cwiseAbs().maxCoeff());
    }
  }
  report(2, "closed-form curvature vs direct Riemann tensor, 5 scenarios x 20 draws",
         worst <= 1e-6, "max residual " + fmt(worst));
}

void criterion_3_calibration() {
  const ScalarExpr th = ScalarExpr::var("th");
  auto sphere = ChartedManifold::create(
      "sphere", {"th", "ph"},
      {{ScalarExpr(1.0), ScalarExpr(0.0)}, {ScalarExpr(0.0), sin(th) * sin(th)}},
      {{0.1, 3.04}, {0.0, 6.3}});
  std::mt19937_64 rng(103);
  double sphere_dev = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Vec p = sphere->sample_point(rng);
    TangentVector x{p, Vec(2)}, y{p, Vec(2)};
    x.components << 1.0, 0.4 * uniform_real(rng);
    y.components << -0.3 * uniform_real(rng), 1.0;
    sphere_dev = std::max(sphere_dev, std::abs(sectional_curvature(*sphere, p, x, y) - 1.0));
  }

  const ScalarExpr r = ScalarExpr::var("r"), s = ScalarExpr::var("s");
  auto flat = ChartedManifold::create(
      "flat_dwp", {"r", "s"}, {{s * s, ScalarExpr(0.0)}, {ScalarExpr(0.0), r * r}},
      {{0.3, 4.0}, {0.3, 4.0}});
  double flat_dev = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Vec p = flat->sample_point(rng);
    TangentVector x{p, Vec(2)}, y{p, Vec(2)};
    x.components << 1.0, 0.3 * uniform_real(rng);
    y.components << 0.2 * uniform_real(rng), 1.0;
    flat_dev = std::max(flat_dev, std::abs(sectional_curvature(*flat, p, x, y)));
  }

  auto line = ChartedManifold::create("line", {"x"}, {{ScalarExpr(1.0)}}, {{-3.0, 3.0}});
  double lap_dev = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Vec p = line->sample_point(rng);
    lap_dev = std::max(lap_dev, std::abs(laplacian(*line, cos(ScalarExpr::var("x")), p) -
                                         std::cos(p[0])));
  }

  report(3, "convention calibration: sphere K=1, flat chart K=0, Laplacian of cos = +cos",
         sphere_dev <= 1e-6 && flat_dev <= 1e-8 && lap_dev <= 1e-8,
         "sphere " + fmt(sphere_dev) + ", flat " + fmt(flat_dev) + ", sign " + fmt(lap_dev));
}

void criterion_4_mixed_geodesy() {
  std::mt19937_64 rng(104);
  double worst = 0.0;
  for (const BundledScenario& b : bundled_scenarios()) {
    const ScenarioFile sc = load(b.name);
    for (const Vec& p : sample_points(sc.scenario, rng, 6))
      worst = std::max(worst, h_decomposition_check(sc.scenario, p).mixed_residual);
  }
  report(4, "mixed total geodesy |h(X,Z)| across D1 x D2 on every bundled scenario",
         worst <= 1e-8, "max residual " + fmt(worst));
}

void criterion_5_norm_identity() {
  std::mt19937_64 rng(105);
  double worst = 0.0;
  bool flags_agree = true;
  std::string flag_detail;
  for (const BundledScenario& b : bundled_scenarios()) {
    const ScenarioFile sc = load(b.name);
    const auto pts = sample_points(sc.scenario, rng, 8);
    double max_gap = 0.0;
    for (const Vec& p : pts) {
      const NormIdentity ni = norm_identity_check(sc.scenario, p);
      worst = std::max(worst, ni.identity_residual);
      max_gap = std::max(max_gap, ni.equality_gap);
    }
    std::vector<Vec> pts1, pts2;
    for (const Vec& p : pts) {
      pts1.push_back(sc.scenario.source.factor_point(1, p));
      pts2.push_back(sc.scenario.source.factor_point(2, p));
    }
    const bool factors_tg =
        classify(sc.scenario.phi1, pts1).totally_geodesic == Flag::kYes &&
        classify(sc.scenario.phi2, pts2).totally_geodesic == Flag::kYes;
    const bool equality = max_gap <= 1e-6;
    if (equality != factors_tg) {
      flags_agree = false;
      flag_detail = " disagreement on " + b.name;
    }
  }
  report(5, "norm identity with equality exactly for totally geodesic factors",
         worst <= 1e-6 && flags_agree, "max relative residual " + fmt(worst) + flag_detail);
}

void criterion_6_shape_operator() {
  std::mt19937_64 rng(106);
  double worst = 0.0;
  int scenarios_used = 0, points_used = 0;
  const std::vector<std::string> names = {"surface_of_revolution_catenoid",
                                          "cylinder_of_revolution", "sphere_of_revolution",
                                          "generic_4d_doubly_warped", "harmonic_case"};
  for (const std::string& name : names) {
    const ScenarioFile sc = load(name);
    bool used = false;
    for (int i = 1; i <= 2; ++i) {
      const auto etas = factor_normal_fields(sc.scenario, i);
      for (const VectorFieldExpr& eta : etas) {
        used = true;
        for (const Vec& p : sample_points(sc.scenario, rng, 10)) {
          Vec xc(sc.scenario.n());
          for (int k = 0; k < xc.size(); ++k) xc[k] = 2.0 * uniform_real(rng) - 1.0;
          const ShapeOperatorCheck c =
              shape_operator_closed_form_check(sc.scenario, i, eta, p, TangentVector{p, xc});
          worst = std::max(worst, std::max(c.a_residual, c.d_residual));
          ++points_used;
        }
      }
    }
    if (used) ++scenarios_used;
  }
  report(6, "shape operator and normal connection closed forms vs direct Weingarten",
         worst <= 1e-6 && scenarios_used == 5,
         "max residual " + fmt(worst) + " over " + std::to_string(scenarios_used) +
             " scenarios, " + std::to_string(points_used) + " point checks");
}

void criterion_7_h1_dot_h2() {
  std::mt19937_64 rng(107);
  double worst = 0.0;
  double harmonic_worst = 0.0;
  for (const BundledScenario& b : bundled_scenarios()) {
    const ScenarioFile sc = load(b.name);
    if (!sc.scenario.space_form_c) continue;
    for (const Vec& p : sample_points(sc.scenario, rng, 8))
      worst = std::max(worst, h1_dot_h2_check(sc.scenario, p).residual);
  }
  const std::vector<std::string> harmonic_names = {"harmonic_case", "flat_doubly_warped"};
  for (const std::string& name : harmonic_names) {
    const ScenarioFile sc = load(name);
    for (const Vec& p : sample_points(sc.scenario, rng, 8))
      harmonic_worst =
          std::max(harmonic_worst, std::abs(h1_dot_h2_check(sc.scenario, p).lhs));
  }
  report(7, "<H1,H2> identity on space forms; perpendicularity for harmonic warps at c=0",
         worst <= 1e-6 && harmonic_worst <= 1e-8,
         "identity " + fmt(worst) + ", harmonic |<H1,H2>| " + fmt(harmonic_worst));
}

void criterion_8_a_h_closed_form() {
  std::mt19937_64 rng(108);
  double worst = 0.0;
  for (const BundledScenario& b : bundled_scenarios()) {
    const ScenarioFile sc = load(b.name);
    if (!sc.scenario.space_form_c) continue;
    for (const Vec& p : sample_points(sc.scenario, rng, 8)) {
      const AhClosedForm a = a_h_closed_form_check(sc.scenario, p);
      worst = std::max(worst, std::max(a.h1_residual, a.h2_residual));
    }
  }
  report(8, "A_{H_i} closed forms vs direct computation per frame vector", worst <= 1e-6,
         "max residual " + fmt(worst));
}

void criterion_9_minimality() {
  std::mt19937_64 rng(109);
  const ScenarioFile cat = load("surface_of_revolution_catenoid");
  const MinimalityCheck mc =
      minimality_check(cat.scenario, sample_points(cat.scenario, rng, 10));
  const double stmt2 = std::max(mc.factor_relation_residual[0], mc.factor_relation_residual[1]);

  const ScenarioFile cyl = load("cylinder_of_revolution");
  const MinimalityCheck mcyl =
      minimality_check(cyl.scenario, sample_points(cyl.scenario, rng, 10));

  const bool pass = mc.h_norm_max <= 1e-6 && stmt2 <= 1e-5 &&
                    std::abs(mcyl.h_norm_max - 1.0) <= 1e-6 &&
                    mcyl.minimal_verdict == Flag::kNo;
  report(9, "catenoid minimal with the factor mean-curvature relation; cylinder |H| = 1",
         pass,
         "catenoid |H| " + fmt(mc.h_norm_max) + ", relation " + fmt(stmt2) +
             ", cylinder |H| " + fmt(mcyl.h_norm_max));
}

void criterion_10_inequality() {
  std::mt19937_64 rng(110);
  bool holds = true, equality_case = true, flags_ok = true;
  double worst_violation = 0.0;
  for (const BundledScenario& b : bundled_scenarios()) {
    const ScenarioFile sc = load(b.name);
    for (const Vec& p : sample_points(sc.scenario, rng, 8)) {
      std::vector<InequalityReport> reports;
      reports.push_back(fundamental_inequality(sc.scenario, p, 64, 777));
      if (sc.scenario.space_form_c) reports.push_back(space_form_inequality(sc.scenario, p));
      for (const InequalityReport& r : reports) {
        if (!r.holds) {
          holds = false;
          worst_violation = std::max(worst_violation, r.lhs - r.rhs);
        }
        if (r.equality && !r.equality_flags_set) flags_ok = false;
        if (r.equality_flags_set && !r.equality) flags_ok = false;
      }
    }
  }
  {
    const ScenarioFile flat = load("flat_doubly_warped");
    for (const Vec& p : sample_points(flat.scenario, rng, 8)) {
      const InequalityReport r = space_form_inequality(flat.scenario, p);
      if (!(r.equality && r.equality_flags_set)) equality_case = false;
    }
  }
  report(10, "inequalities hold everywhere; flat identity scenario reaches equality with "
             "both flags; equality iff flags",
         holds && equality_case && flags_ok,
         holds ? "no violations; equality handling consistent"
               : "violation " + fmt(worst_violation));
}

void criterion_11_oracles() {
  std::mt19937_64 rng(111);
  double deriv_worst = 0.0;
  int draws = 0;
  while (draws < 200) {
    ScalarExpr e(uniform_real(rng));
    const std::vector<std::string> vars = {"x", "y"};
    for (const std::string& v : vars) {
      const ScalarExpr xv = ScalarExpr::var(v);
      e = e + ScalarExpr(2.0 * uniform_real(rng) - 1.0) * xv +
          ScalarExpr(uniform_real(rng) - 0.5) * xv * xv +
          ScalarExpr(uniform_real(rng) - 0.5) * sin(xv) +
          ScalarExpr(uniform_real(rng) - 0.5) * exp(ScalarExpr(0.4) * xv);
    }
    const VarAssignment at{{"x", 2.0 * uniform_real(rng) - 1.0},
                           {"y", 2.0 * uniform_real(rng) - 1.0}};
    const double exact = eval(diff(e, "x"), at);
    const double fd = fd_diff(e, "x", at, 1e-4);
    deriv_worst = std::max(deriv_worst,
                           std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
    ++draws;
  }

  const ScalarExpr th = ScalarExpr::var("th");
  auto sphere = ChartedManifold::create(
      "sphere", {"th", "ph"},
      {{ScalarExpr(1.0), ScalarExpr(0.0)}, {ScalarExpr(0.0), sin(th) * sin(th)}},
      {{0.1, 3.04}, {0.0, 6.3}});
  double tensor_worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Vec p = sphere->sample_point(rng);
    const PointGeometry geo = point_geometry(*sphere, p);
    const CurvatureTensor curv = curvature_tensor(geo);
    Vec x(2), y(2), z(2), w(2);
    for (Vec* v : {&x, &y, &z, &w})
      for (int i = 0; i < 2; ++i) (*v)[i] = 2.0 * uniform_real(rng) - 1.0;
    const auto r_apply = [&](const Vec& a, const Vec& b, const Vec& c) {
      Vec out = Vec::Zero(2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              out[l] += a[i] * b[j] * c[k] * curv.up[i][j](k, l);
      return out;
    };
    tensor_worst = std::max(tensor_worst, (r_apply(x, y, z) + r_apply(y, z, x) +
                                           r_apply(z, x, y))
                                              .cwiseAbs()
                                              .maxCoeff());
    const auto lowered = [&](const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
      return r_apply(a, b, c).dot(geo.g * d);
    };
    tensor_worst =
        std::max(tensor_worst, std::abs(lowered(x, y, z, w) - lowered(z, w, x, y)));
  }

  const ScenarioFile sc = load("surface_of_revolution_catenoid");
  RunOptions opts;
  opts.seed = 2024;
  const bool deterministic =
      run_checks(sc, opts).to_json() == run_checks(sc, opts).to_json();

  report(11, "oracle hygiene: derivatives, tensor symmetries, byte-identical reports",
         deriv_worst <= 1e-5 && tensor_worst <= 1e-8 && deterministic,
         "derivative " + fmt(deriv_worst) + ", tensor " + fmt(tensor_worst) +
             (deterministic ? ", reports identical" : ", REPORTS DIFFER"));
}

}  // namespace

int main() {
  criterion_1_connection();
  criterion_2_curvature();
  criterion_3_calibration();
  criterion_4_mixed_geodesy();
  criterion_5_norm_identity();
  criterion_6_shape_operator();
  criterion_7_h1_dot_h2();
  criterion_8_a_h_closed_form();
  criterion_9_minimality();
  criterion_10_inequality();
  criterion_11_oracles();
  if (g_failures == 0) {
    std::printf("acceptance: all 11 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
