#include <doctest.h>

#include <cmath>
#include <random>

#include "dwarp/immersion.hpp"

using namespace dwarp;

namespace {

ChartPtr flat_chart(const std::string& name, std::vector<std::string> coords,
                    double lo = -3.0, double hi = 3.0) {
  const int n = static_cast<int>(coords.size());
  std::vector<std::vector<ScalarExpr>> g(n, std::vector<ScalarExpr>(n, ScalarExpr(0.0)));
  for (int i = 0; i < n; ++i) g[i][i] = ScalarExpr(1.0);
  std::vector<Interval> dom(n, Interval{lo, hi});
  return ChartedManifold::create(name, std::move(coords), std::move(g), std::move(dom));
}

Vec pt1(double a) {
  Vec p(1);
  p << a;
  return p;
}

Vec pt2(double a, double b) {
  Vec p(2);
  p << a, b;
  return p;
}

double uniform_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unit-speed circle of the given radius in the flat plane.
ImmersionSpec circle_immersion(double radius) {
  auto src = flat_chart("arc", {"s"}, 0.1, 6.0 * radius);
  auto tgt = flat_chart("plane2", {"x", "y"}, -3.0 * radius, 3.0 * radius);
  const ScalarExpr s = ScalarExpr::var("s");
  const ScalarExpr r(radius);
  return ImmersionSpec::create(src, tgt, {r * cos(s / r), r * sin(s / r)});
}

// Unit sphere as a graph over the standard chart diag(1, sin^2 u).
ImmersionSpec sphere_immersion() {
  const ScalarExpr u = ScalarExpr::var("u");
  const ScalarExpr v = ScalarExpr::var("v");
  auto src = ChartedManifold::create(
      "sphere_chart", {"u", "v"},
      {{ScalarExpr(1.0), ScalarExpr(0.0)}, {ScalarExpr(0.0), sin(u) * sin(u)}},
      {{0.3, 2.8}, {0.1, 6.2}});
  auto tgt = flat_chart("space3", {"x", "y", "z"}, -2.0, 2.0);
  return ImmersionSpec::create(src, tgt, {sin(u) * cos(v), sin(u) * sin(v), cos(u)});
}

// Unit cylinder (circle direction first) in flat 3-space.
ImmersionSpec cylinder_immersion() {
  const ScalarExpr a = ScalarExpr::var("a");
  auto src = flat_chart("cyl_chart", {"a", "h"}, 0.2, 2.8);
  auto tgt = flat_chart("space3", {"x", "y", "z"}, -4.0, 4.0);
  return ImmersionSpec::create(src, tgt, {cos(a), sin(a), ScalarExpr::var("h")});
}

// Catenoid with arc-length profile coordinate: an isometric immersion of the
// chart ds^2 + (1+s^2) da^2.
ImmersionSpec catenoid_immersion() {
  const ScalarExpr s = ScalarExpr::var("s");
  const ScalarExpr a = ScalarExpr::var("a");
  const ScalarExpr t = sqrt(ScalarExpr(1.0) + s * s);
  auto src = ChartedManifold::create(
      "catenoid_chart", {"s", "a"},
      {{ScalarExpr(1.0), ScalarExpr(0.0)},
       {ScalarExpr(0.0), ScalarExpr(1.0) + s * s}},
      {{-1.2, 1.2}, {0.1, 6.2}});
  auto tgt = flat_chart("space3", {"x", "y", "z"}, -4.0, 4.0);
  return ImmersionSpec::create(
      src, tgt, {t * cos(a), t * sin(a), log(s + sqrt(ScalarExpr(1.0) + s * s))});
}

std::vector<Vec> sample_points(const ImmersionSpec& phi, std::mt19937_64& rng, int n) {
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) pts.push_back(phi.source()->sample_point(rng));
  return pts;
}

}  // namespace

TEST_CASE("pushforward: identity, circle tangent, graph tangent") {
  auto line = flat_chart("line", {"t"});
  auto plane = flat_chart("plane2", {"x", "y"});

  const ImmersionSpec id =
      ImmersionSpec::create(line, flat_chart("line2", {"w"}), {ScalarExpr::var("t")});
  const TangentVector v{pt1(0.4), Vec::Ones(1)};
  CHECK(pushforward(id, pt1(0.4), v).components[0] == doctest::Approx(1.0));

  const ScalarExpr t = ScalarExpr::var("t");
  const ImmersionSpec circle = ImmersionSpec::create(line, plane, {cos(t), sin(t)});
  const TangentVector dt{pt1(0.0), Vec::Ones(1)};
  const TangentVector image = pushforward(circle, pt1(0.0), dt);
  CHECK(image.components[0] == doctest::Approx(0.0));
  CHECK(image.components[1] == doctest::Approx(1.0));

  const ImmersionSpec graph = ImmersionSpec::create(line, plane, {t, t * t});
  const TangentVector g = pushforward(graph, pt1(1.0), dt);
  CHECK(g.components[0] == doctest::Approx(1.0));
  CHECK(g.components[1] == doctest::Approx(2.0));
}

TEST_CASE("pushforward: rank-deficient Jacobian is rejected") {
  auto line = flat_chart("line", {"t"});
  auto plane = flat_chart("plane2", {"x", "y"});
  const ScalarExpr t = ScalarExpr::var("t");
  const ImmersionSpec bad = ImmersionSpec::create(line, plane, {t * t, t * t});
  CHECK_THROWS_AS(pushforward(bad, pt1(0.0), TangentVector{pt1(0.0), Vec::Ones(1)}),
                  Error);
}

TEST_CASE("isometry_residual: exact, violated and catenoid cases") {
  auto line = flat_chart("line", {"t"});
  auto plane = flat_chart("plane2", {"x", "y"});
  const ScalarExpr t = ScalarExpr::var("t");

  const ImmersionSpec arc = ImmersionSpec::create(line, plane, {cos(t), sin(t)});
  CHECK(isometry_residual(arc, pt1(0.7)) < 1e-14);

  const ImmersionSpec stretched =
      ImmersionSpec::create(line, plane, {ScalarExpr(2.0) * t, ScalarExpr(0.0)});
  CHECK(isometry_residual(stretched, pt1(0.5)) == doctest::Approx(3.0));

  const ImmersionSpec cat = catenoid_immersion();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i)
    CHECK(isometry_residual(cat, cat.source()->sample_point(rng)) < 1e-8);
}

TEST_CASE("second_fundamental_form: flat inclusion and circles") {
  auto line = flat_chart("line", {"t"});
  auto plane = flat_chart("plane2", {"x", "y"});
  const ScalarExpr t = ScalarExpr::var("t");
  const ImmersionSpec inclusion =
      ImmersionSpec::create(line, plane, {t, ScalarExpr(0.25)});
  const TangentVector unit{pt1(0.3), Vec::Ones(1)};
  CHECK(second_fundamental_form(inclusion, pt1(0.3), unit, unit).ambient.norm() < 1e-14);

  for (double radius : {1.0, 2.0}) {
    const ImmersionSpec circle = circle_immersion(radius);
    const Vec p = pt1(0.8 * radius);
    const NormalVector h = second_fundamental_form(circle, p, TangentVector{p, Vec::Ones(1)},
                                                   TangentVector{p, Vec::Ones(1)});
    CHECK(h.ambient.norm() == doctest::Approx(1.0 / radius).epsilon(1e-10));
    // Points toward the center.
    const Vec q = circle.map_point(p);
    CHECK((h.ambient + q / (radius * radius)).norm() < 1e-10);
    CHECK(h.normal_residual < 1e-10);

    // Finite-difference oracle: the derivative of the unit tangent field
    // along arc length is the curvature vector.
    const double hstep = 1e-5;
    const auto tangent_at = [&](double s) {
      Vec ds = Vec::Ones(1);
      return Vec(circle.jacobian(pt1(s)) * ds);
    };
    const Vec fd = (tangent_at(p[0] + hstep) - tangent_at(p[0] - hstep)) / (2.0 * hstep);
    CHECK((fd - h.ambient).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("shape_operator: flat, sphere and cylinder") {
  auto line = flat_chart("line", {"t"});
  auto plane = flat_chart("plane2", {"x", "y"});
  const ScalarExpr t = ScalarExpr::var("t");
  const ImmersionSpec inclusion =
      ImmersionSpec::create(line, plane, {t, ScalarExpr(0.0)});
  const NormalVector up{pt1(0.2), (Vec(2) << 0, 1).finished(), 0.0};
  CHECK(shape_operator(inclusion, pt1(0.2), up).cwiseAbs().maxCoeff() < 1e-14);

  const ImmersionSpec sphere = sphere_immersion();
  const Vec p = pt2(1.1, 2.3);
  const Vec outward = sphere.map_point(p);  // position = outward unit normal
  const Mat a = shape_operator(sphere, p, NormalVector{p, outward, 0.0});
  CHECK((a + Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);

  const ImmersionSpec cyl = cylinder_immersion();
  const Vec q = pt2(1.0, 0.5);
  Vec radial(3);
  radial << std::cos(1.0), std::sin(1.0), 0.0;
  const Mat ac = shape_operator(cyl, q, NormalVector{q, radial, 0.0});
  CHECK(std::abs(std::abs(ac(0, 0)) - 1.0) < 1e-9);
  CHECK(std::abs(ac(1, 1)) < 1e-10);
  CHECK(std::abs(ac(0, 1)) < 1e-10);

  // Non-normal eta is rejected.
  Vec not_normal(3);
  not_normal << 0.0, 0.0, 1.0;  // axis direction is tangent to the cylinder
  CHECK_THROWS_AS(shape_operator(cyl, q, NormalVector{q, not_normal, 0.0}), Error);
}

TEST_CASE("normal_connection: parallel normals and a rotating frame") {
  auto line = flat_chart("line", {"t"});
  auto plane = flat_chart("plane2", {"x", "y"});
  const ScalarExpr t = ScalarExpr::var("t");
  const ImmersionSpec inclusion =
      ImmersionSpec::create(line, plane, {t, ScalarExpr(0.0)});
  VectorFieldExpr const_normal = VectorFieldExpr::zero(2);
  const_normal.comps[1] = ScalarExpr(1.0);
  const TangentVector dt{pt1(0.1), Vec::Ones(1)};
  CHECK(normal_connection(inclusion, pt1(0.1), dt, const_normal).ambient.norm() < 1e-14);

  // Plane curve: the outward normal field of the unit circle has vanishing
  // normal connection (flat normal bundle).
  const ImmersionSpec circle = circle_immersion(1.0);
  VectorFieldExpr outward = VectorFieldExpr::zero(2);
  outward.comps[0] = cos(ScalarExpr::var("s"));
  outward.comps[1] = sin(ScalarExpr::var("s"));
  const Vec p = pt1(0.9);
  CHECK(normal_connection(circle, p, TangentVector{p, Vec::Ones(1)}, outward)
            .ambient.norm() < 1e-12);

  // Curve in 3-space with a rotating normal field, checked against a finite
  // difference of the field projected to the normal space.
  auto space = flat_chart("space3", {"x", "y", "z"}, -4.0, 4.0);
  const ImmersionSpec curve = ImmersionSpec::create(
      line, space, {cos(ScalarExpr::var("t")), sin(ScalarExpr::var("t")), ScalarExpr(0.0)});
  VectorFieldExpr eta = VectorFieldExpr::zero(3);
  // cos(t) * z-hat + sin(t) * inward radial: normal along the circle.
  eta.comps[0] = -sin(ScalarExpr::var("t")) * cos(ScalarExpr::var("t"));
  eta.comps[1] = -sin(ScalarExpr::var("t")) * sin(ScalarExpr::var("t"));
  eta.comps[2] = cos(ScalarExpr::var("t"));
  const Vec q = pt1(0.6);
  const Vec d_eta =
      normal_connection(curve, q, TangentVector{q, Vec::Ones(1)}, eta).ambient;

  const double hstep = 1e-6;
  const auto eta_at = [&](double tt) {
    Vec v(3);
    v << -std::sin(tt) * std::cos(tt), -std::sin(tt) * std::sin(tt), std::cos(tt);
    return v;
  };
  const Vec fd = (eta_at(q[0] + hstep) - eta_at(q[0] - hstep)) / (2.0 * hstep);
  const Vec fd_normal = project_to_normal(curve, q, fd).ambient;
  CHECK((d_eta - fd_normal).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("mean_curvature: flat, circle and catenoid") {
  auto line = flat_chart("line", {"t"});
  auto plane = flat_chart("plane2", {"x", "y"});
  const ImmersionSpec inclusion =
      ImmersionSpec::create(line, plane, {ScalarExpr::var("t"), ScalarExpr(0.0)});
  CHECK(mean_curvature(inclusion, pt1(0.4)).ambient.norm() < 1e-14);

  const ImmersionSpec circle = circle_immersion(2.0);
  CHECK(mean_curvature(circle, pt1(1.5)).ambient.norm() ==
        doctest::Approx(0.5).epsilon(1e-10));

  const ImmersionSpec cat = catenoid_immersion();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 6; ++i) {
    const Vec p = cat.source()->sample_point(rng);
    CHECK(mean_curvature(cat, p).ambient.norm() < 1e-6);
  }
}

TEST_CASE("gauss_equation_residual: flat, sphere, and the space-form variant") {
  auto line = flat_chart("line", {"t"});
  auto plane = flat_chart("plane2", {"x", "y"});
  const ImmersionSpec inclusion =
      ImmersionSpec::create(line, plane, {ScalarExpr::var("t"), ScalarExpr(0.0)});
  const TangentVector u{pt1(0.2), Vec::Ones(1)};
  CHECK(gauss_equation_residual(inclusion, pt1(0.2), u, u, u, u) < 1e-14);

  const ImmersionSpec sphere = sphere_immersion();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 6; ++i) {
    const Vec p = sphere.source()->sample_point(rng);
    TangentVector x{p, Vec(2)}, y{p, Vec(2)}, z{p, Vec(2)}, w{p, Vec(2)};
    for (TangentVector* v : {&x, &y, &z, &w})
      v->components << 2.0 * uniform_real(rng) - 1.0, 2.0 * uniform_real(rng) - 1.0;
    CHECK(gauss_equation_residual(sphere, p, x, y, z, w) < 1e-6);

    // Space-form variant with the ambient constant c = 0: the intrinsic
    // curvature is reproduced by the h products.
    const PointGeometry src_geo = point_geometry(*sphere.source(), p);
    const CurvatureTensor curv = curvature_tensor(src_geo);
    const double intrinsic = [&] {
      double acc = 0.0;
      for (int i2 = 0; i2 < 2; ++i2)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              acc += x.components[i2] * y.components[j] * z.components[k] *
                     curv.up[i2][j](k, l) * (src_geo.g * w.components)[l];
      return acc;
    }();
    const Mat g_amb = metric_at(*sphere.target(), sphere.map_point(p));
    const auto h_of = [&](const TangentVector& a, const TangentVector& b) {
      return second_fundamental_form(sphere, p, a, b).ambient;
    };
    const double rhs =                        h_of(y, z).dot(g_amb * h_of(x, w)) -
                       h_of(x, z).dot(g_amb * h_of(y, w));
    CHECK(std::abs(intrinsic - rhs) < 1e-6);
  }
}

TEST_CASE("classify: hyperplane, sphere, catenoid") {
  auto line = flat_chart("line", {"t"});
  auto plane = flat_chart("plane2", {"x", "y"});
  const ImmersionSpec inclusion =
      ImmersionSpec::create(line, plane, {ScalarExpr::var("t"), ScalarExpr(0.1)});
  std::mt19937_64 rng(9);
  const ClassificationReport hyper = classify(inclusion, sample_points(inclusion, rng, 8));
  CHECK(hyper.totally_geodesic == Flag::kYes);
  CHECK(hyper.totally_umbilical == Flag::kYes);
  CHECK(hyper.minimal == Flag::kYes);

  const ImmersionSpec sphere = sphere_immersion();
  const ClassificationReport round = classify(sphere, sample_points(sphere, rng, 8));
  CHECK(round.totally_geodesic == Flag::kNo);
  CHECK(round.totally_umbilical == Flag::kYes);
  CHECK(round.minimal == Flag::kNo);

  const ImmersionSpec cat = catenoid_immersion();
  const ClassificationReport minimal = classify(cat, sample_points(cat, rng, 8));
  CHECK(minimal.totally_geodesic == Flag::kNo);
  CHECK(minimal.totally_umbilical == Flag::kNo);
  CHECK(minimal.minimal == Flag::kYes);

  CHECK_THROWS_AS(classify(cat, sample_points(cat, rng, 5)), Error);  // needs >= 8
}

TEST_CASE("second fundamental form invariants at random draws") {
  const ImmersionSpec sphere = sphere_immersion();
  const ImmersionSpec cat = catenoid_immersion();
  std::mt19937_64 rng(11);
  for (const ImmersionSpec* phi : {&sphere, &cat}) {
    for (int i = 0; i < 5; ++i) {
      const Vec p = phi->source()->sample_point(rng);
      const SecondFundamentalSample s = second_fundamental_sample(*phi, p);
      CHECK(s.symmetry_residual < 1e-9);
      CHECK(s.tangency_residual < 1e-8);

      // Weingarten consistency: <A_eta X, Y> = <h(X,Y), eta> in the frame.
      for (std::size_t r = 0; r < s.normal_frame.size(); ++r) {
        const Mat a = shape_operator(*phi, p, NormalVector{p, s.normal_frame[r], 0.0});
        CHECK((a - s.h[r]).cwiseAbs().maxCoeff() < 1e-8);
      }

      // Mean curvature is frame independent: the sampled frame trace equals
      // the mean_curvature computation.
      Vec trace = Vec::Zero(phi->target_dim());
      for (int a = 0; a < phi->source_dim(); ++a)
        for (std::size_t r = 0; r < s.normal_frame.size(); ++r)
          trace += s.h[r](a, a) * s.normal_frame[r];
      const Vec mean = mean_curvature(*phi, p).ambient;
      CHECK((trace / phi->source_dim() - mean).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("normal_frame: deterministic and orthonormal") {
  const ImmersionSpec cat = catenoid_immersion();
  std::mt19937_64 rng(13);
  const Vec p = cat.source()->sample_point(rng);
  const auto f1 = normal_frame(cat, p);
  const auto f2 = normal_frame(cat, p);
  REQUIRE(f1.size() == 1);
  CHECK((f1[0] - f2[0]).norm() == 0.0);
  const Mat g = metric_at(*cat.target(), cat.map_point(p));
  CHECK(f1[0].dot(g * f1[0]) == doctest::Approx(1.0).epsilon(1e-12));
}
