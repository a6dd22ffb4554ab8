#include "dwarp/immersion.hpp"

#include <algorithm>
#include <cmath>

namespace dwarp {

namespace {

constexpr double kNormalTolerance = 1e-8;
constexpr double kRankTolerance = 1e-10;

struct AmbientFrameData {
  PointGeometry geo;        // ambient geometry at phi(p)
  Mat jac;                  // J(p)
  Mat jgj;                  // J^T g J
  Eigen::LDLT<Mat> solver;  // of jgj
};

AmbientFrameData ambient_data(const ImmersionSpec& phi, const Vec& p) {
  AmbientFrameData d{point_geometry(*phi.target(), phi.map_point(p)), phi.jacobian(p), {}, {}};
  d.jgj = d.jac.transpose() * d.geo.g * d.jac;
  d.solver.compute(d.jgj);
  return d;
}

// Splits an ambient vector into tangential coefficients and the normal part.
Vec normal_projection(const AmbientFrameData& d, const Vec& v, Vec* tangential_coeffs) {
  const Vec coeffs = d.solver.solve(d.jac.transpose() * (d.geo.g * v));
  if (tangential_coeffs) *tangential_coeffs = coeffs;
  return v - d.jac * coeffs;
}

double normality_residual(const AmbientFrameData& d, const Vec& v) {
  const Vec t = d.jac.transpose() * (d.geo.g * v);
  return t.size() == 0 ? 0.0 : t.cwiseAbs().maxCoeff();
}

void check_rank(const ImmersionSpec& phi, const Mat& jac) {
  Eigen::JacobiSVD<Mat> svd(jac);
  const Vec sv = svd.singularValues();
  if (sv.size() == 0 || !(sv[sv.size() - 1] > kRankTolerance * std::max(1.0, sv[0])))
    throw Error("immersion '" + phi.source()->name() + "' -> '" + phi.target()->name() +
                "': Jacobian is rank deficient");
}

Vec gauss_derivative(const AmbientFrameData& d, const ImmersionSpec& phi, const Vec& p,
                     const Vec& x, const Vec& y) {
  const int m = phi.target_dim(), n = phi.source_dim();
  const std::vector<Mat> d2 = phi.second_derivatives(p);
  Vec out(m);
  const Vec jx = d.jac * x, jy = d.jac * y;
  for (int a = 0; a < m; ++a) {
    double acc = x.dot(d2[a] * y);
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) acc += d.geo.gamma[a](b, c) * jx[b] * jy[c];
    out[a] = acc;
  }
  (void)n;
  return out;
}

}  // namespace

const char* to_label(Flag f) {
  switch (f) {
    case Flag::kYes: return "yes";
    case Flag::kNo: return "no";
    default: return "indeterminate";
  }
}

Flag flag_from_residual(double residual, double tol) {
  if (residual <= tol) return Flag::kYes;
  if (residual >= 10.0 * tol) return Flag::kNo;
  return Flag::kIndeterminate;
}

ImmersionSpec ImmersionSpec::create(ChartPtr source, ChartPtr target,
                                    std::vector<ScalarExpr> components) {
  if (static_cast<int>(components.size()) != target->dim())
    throw Error("immersion into '" + target->name() + "' needs " +
                std::to_string(target->dim()) + " components");
  if (target->dim() < source->dim())
    throw Error("immersion '" + source->name() + "' -> '" + target->name() +
                "': target dimension is smaller than the source");
  const auto& coords = source->coords();
  for (const ScalarExpr& c : components)
    for (const auto& v : free_variables(c))
      if (std::find(coords.begin(), coords.end(), v) == coords.end())
        throw Error("immersion component uses undeclared variable '" + v + "'");

  ImmersionSpec phi;
  const int m = target->dim(), n = source->dim();
  phi.jac_.assign(m, std::vector<ScalarExpr>(n));
  phi.d2_.assign(m, std::vector<std::vector<ScalarExpr>>(n, std::vector<ScalarExpr>(n)));
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) {
      phi.jac_[a][i] = diff(components[a], coords[i]);
      for (int j = 0; j < n; ++j) phi.d2_[a][i][j] = diff(phi.jac_[a][i], coords[j]);
    }
  phi.source_ = std::move(source);
  phi.target_ = std::move(target);
  phi.comps_ = std::move(components);
  return phi;
}

Vec ImmersionSpec::map_point(const Vec& p) const {
  const VarAssignment at = source_->assignment(p);
  Vec q(target_dim());
  for (int a = 0; a < target_dim(); ++a) q[a] = eval(comps_[a], at);
  if (!target_->contains(q))
    throw DomainError("immersion image leaves the domain of chart '" + target_->name() +
                      "'");
  return q;
}

Mat ImmersionSpec::jacobian(const Vec& p) const {
  const VarAssignment at = source_->assignment(p);
  Mat j(target_dim(), source_dim());
  for (int a = 0; a < target_dim(); ++a)
    for (int i = 0; i < source_dim(); ++i) j(a, i) = eval(jac_[a][i], at);
  return j;
}

std::vector<Mat> ImmersionSpec::second_derivatives(const Vec& p) const {
  const VarAssignment at = source_->assignment(p);
  std::vector<Mat> out(target_dim(), Mat(source_dim(), source_dim()));
  for (int a = 0; a < target_dim(); ++a)
    for (int i = 0; i < source_dim(); ++i)
      for (int j = 0; j < source_dim(); ++j) out[a](i, j) = eval(d2_[a][i][j], at);
  return out;
}

TangentVector pushforward(const ImmersionSpec& phi, const Vec& p, const TangentVector& x) {
  const Mat j = phi.jacobian(p);
  check_rank(phi, j);
  return TangentVector{phi.map_point(p), j * x.components};
}

double isometry_residual(const ImmersionSpec& phi, const Vec& p) {
  const Mat j = phi.jacobian(p);
  const Mat gm = metric_at(*phi.target(), phi.map_point(p));
  const Mat gn = metric_at(*phi.source(), p);
  return (j.transpose() * gm * j - gn).cwiseAbs().maxCoeff();
}

Vec ambient_gauss_derivative(const ImmersionSpec& phi, const Vec& p, const Vec& x,
                             const Vec& y) {
  const AmbientFrameData d = ambient_data(phi, p);
  return gauss_derivative(d, phi, p, x, y);
}

NormalVector second_fundamental_form(const ImmersionSpec& phi, const Vec& p,
                                     const TangentVector& x, const TangentVector& y) {
  const AmbientFrameData d = ambient_data(phi, p);
  check_rank(phi, d.jac);
  const Vec amb = gauss_derivative(d, phi, p, x.components, y.components);
  const Vec h = normal_projection(d, amb, nullptr);
  return NormalVector{p, h, normality_residual(d, h)};
}

Mat shape_operator(const ImmersionSpec& phi, const Vec& p, const NormalVector& eta) {
  const AmbientFrameData d = ambient_data(phi, p);
  const double scale = std::sqrt(std::max(1.0, inner(d.geo, eta.ambient, eta.ambient)));
  if (normality_residual(d, eta.ambient) > kNormalTolerance * scale)
    throw Error("shape operator: eta is not normal to the immersed source");
  const PointGeometry source_geo = point_geometry(*phi.source(), p);
  const std::vector<Vec> frame = orthonormal_frame(source_geo);
  const int n = phi.source_dim();
  Mat a(n, n);
  for (int r = 0; r < n; ++r)
    for (int s = r; s < n; ++s) {
      const Vec amb = gauss_derivative(d, phi, p, frame[r], frame[s]);
      a(r, s) = a(s, r) = inner(d.geo, amb, eta.ambient);
    }
  // h = amb - tangential, and eta is normal, so <amb, eta> = <h, eta>.
  return a;
}

TangentVector shape_operator_apply(const ImmersionSpec& phi, const Vec& p,
                                   const NormalVector& eta, const TangentVector& x) {
  const AmbientFrameData d = ambient_data(phi, p);
  const double scale = std::sqrt(std::max(1.0, inner(d.geo, eta.ambient, eta.ambient)));
  if (normality_residual(d, eta.ambient) > kNormalTolerance * scale)
    throw Error("shape operator: eta is not normal to the immersed source");
  const PointGeometry source_geo = point_geometry(*phi.source(), p);
  const std::vector<Vec> frame = orthonormal_frame(source_geo);
  Vec out = Vec::Zero(phi.source_dim());
  for (const Vec& e : frame) {
    const Vec amb = gauss_derivative(d, phi, p, x.components, e);
    out += inner(d.geo, amb, eta.ambient) * e;
  }
  return TangentVector{p, out};
}

Vec ambient_field_derivative(const ImmersionSpec& phi, const Vec& p, const Vec& x,
                             const VectorFieldExpr& field) {
  if (field.dim() != phi.target_dim())
    throw Error("ambient field must have one component per target coordinate");
  const AmbientFrameData d = ambient_data(phi, p);
  const VarAssignment at = phi.source()->assignment(p);
  const Vec jx = d.jac * x;
  Vec values(phi.target_dim());
  for (int a = 0; a < phi.target_dim(); ++a) values[a] = eval(field.comps[a], at);
  Vec out(phi.target_dim());
  for (int a = 0; a < phi.target_dim(); ++a) {
    double acc = 0.0;
    for (int i = 0; i < phi.source_dim(); ++i)
      acc += x[i] * eval(diff(field.comps[a], phi.source()->coords()[i]), at);
    for (int b = 0; b < phi.target_dim(); ++b)
      for (int c = 0; c < phi.target_dim(); ++c)
        acc += d.geo.gamma[a](b, c) * jx[b] * values[c];
    out[a] = acc;
  }
  return out;
}

NormalVector normal_connection(const ImmersionSpec& phi, const Vec& p,
                               const TangentVector& x, const VectorFieldExpr& eta_field) {
  const AmbientFrameData d = ambient_data(phi, p);
  const VarAssignment at = phi.source()->assignment(p);
  Vec eta(phi.target_dim());
  for (int a = 0; a < phi.target_dim(); ++a) eta[a] = eval(eta_field.comps[a], at);
  const double scale = std::sqrt(std::max(1.0, inner(d.geo, eta, eta)));
  if (normality_residual(d, eta) > kNormalTolerance * scale)
    throw Error("normal connection: eta is not normal along the immersion");
  const Vec deriv = ambient_field_derivative(phi, p, x.components, eta_field);
  const Vec normal = normal_projection(d, deriv, nullptr);
  return NormalVector{p, normal, normality_residual(d, normal)};
}

NormalVector mean_curvature(const ImmersionSpec& phi, const Vec& p) {
  const AmbientFrameData d = ambient_data(phi, p);
  const PointGeometry source_geo = point_geometry(*phi.source(), p);
  const std::vector<Vec> frame = orthonormal_frame(source_geo);
  Vec acc = Vec::Zero(phi.target_dim());
  for (const Vec& e : frame) acc += gauss_derivative(d, phi, p, e, e);
  const Vec h = normal_projection(d, acc, nullptr) / static_cast<double>(frame.size());
  return NormalVector{p, h, normality_residual(d, h)};
}

NormalVector project_to_normal(const ImmersionSpec& phi, const Vec& p,
                               const Vec& ambient_vector) {
  const AmbientFrameData d = ambient_data(phi, p);
  const Vec normal = normal_projection(d, ambient_vector, nullptr);
  return NormalVector{p, normal, normality_residual(d, normal)};
}

double gauss_equation_residual(const ImmersionSpec& phi, const Vec& p,
                               const TangentVector& x, const TangentVector& y,
                               const TangentVector& z, const TangentVector& tw) {
  const AmbientFrameData d = ambient_data(phi, p);
  const CurvatureTensor ambient_curv = curvature_tensor(d.geo);
  const PointGeometry source_geo = point_geometry(*phi.source(), p);
  const CurvatureTensor source_curv = curvature_tensor(source_geo);

  const auto lowered = [](const PointGeometry& geo, const CurvatureTensor& curv,
                          const Vec& a, const Vec& b, const Vec& c, const Vec& e) {
    const int n = geo.chart->dim();
    double acc = 0.0;
    const Vec ge = geo.g * e;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (a[i] == 0.0 || b[j] == 0.0) continue;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            acc += a[i] * b[j] * c[k] * curv.up[i][j](k, l) * ge[l];
      }
    return acc;
  };

  const Vec jx = d.jac * x.components, jy = d.jac * y.components;
  const Vec jz = d.jac * z.components, jw = d.jac * tw.components;
  const double ambient_term = lowered(d.geo, ambient_curv, jx, jy, jz, jw);
  const double intrinsic_term =
      lowered(source_geo, source_curv, x.components, y.components, z.components,
              tw.components);

  const auto h_of = [&](const Vec& a, const Vec& b) {
    return normal_projection(d, gauss_derivative(d, phi, p, a, b), nullptr);
  };
  const Vec hxz = h_of(x.components, z.components);
  const Vec hyw = h_of(y.components, tw.components);
  const Vec hxw = h_of(x.components, tw.components);
  const Vec hyz = h_of(y.components, z.components);

  return std::abs(ambient_term - intrinsic_term - inner(d.geo, hxz, hyw) +
                  inner(d.geo, hxw, hyz));
}

std::vector<Vec> normal_frame(const ImmersionSpec& phi, const Vec& p) {
  const AmbientFrameData d = ambient_data(phi, p);
  const int m = phi.target_dim(), n = phi.source_dim();
  std::vector<Vec> normals;
  normals.reserve(m - n);
  for (int a = 0; a < m && static_cast<int>(normals.size()) < m - n; ++a) {
    Vec v = Vec::Zero(m);
    v[a] = 1.0;
    Vec w = normal_projection(d, v, nullptr);
    for (const Vec& nu : normals) w -= inner(d.geo, w, nu) * nu;
    const double norm2 = inner(d.geo, w, w);
    if (norm2 > 1e-12) normals.push_back(w / std::sqrt(norm2));
  }
  if (static_cast<int>(normals.size()) != m - n)
    throw Error("normal frame construction failed at the given point");
  return normals;
}

SecondFundamentalSample second_fundamental_sample(const ImmersionSpec& phi, const Vec& p) {
  const AmbientFrameData d = ambient_data(phi, p);
  check_rank(phi, d.jac);
  const PointGeometry source_geo = point_geometry(*phi.source(), p);

  SecondFundamentalSample s;
  s.point = p;
  s.tangent_frame = orthonormal_frame(source_geo);
  s.normal_frame = normal_frame(phi, p);
  const int n = phi.source_dim();
  const int codim = static_cast<int>(s.normal_frame.size());
  s.h.assign(codim, Mat::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Vec amb = gauss_derivative(d, phi, p, s.tangent_frame[a], s.tangent_frame[b]);
      const Vec h = normal_projection(d, amb, nullptr);
      s.tangency_residual = std::max(s.tangency_residual, normality_residual(d, h));
      for (int r = 0; r < codim; ++r) s.h[r](a, b) = inner(d.geo, h, s.normal_frame[r]);
    }
  for (const Mat& hr : s.h)
    s.symmetry_residual =
        std::max(s.symmetry_residual, (hr - hr.transpose()).cwiseAbs().maxCoeff());
  return s;
}

ClassificationReport classify(const ImmersionSpec& phi, const std::vector<Vec>& points,
                              double tol) {
  if (points.size() < 8)
    throw Error("classify requires at least 8 sample points");
  ClassificationReport r;
  for (const Vec& p : points) {
    const SecondFundamentalSample s = second_fundamental_sample(phi, p);
    const int n = phi.source_dim();
    Vec trace = Vec::Zero(static_cast<int>(s.h.size()));
    for (int rr = 0; rr < static_cast<int>(s.h.size()); ++rr) {
      const Mat& a = s.h[rr];
      r.geodesic_residual = std::max(r.geodesic_residual, a.cwiseAbs().maxCoeff());
      const double lambda = a.trace() / n;
      r.umbilic_residual = std::max(
          r.umbilic_residual, (a - lambda * Mat::Identity(n, n)).cwiseAbs().maxCoeff());
      trace[rr] = a.trace();
    }
    r.minimal_residual = std::max(r.minimal_residual, trace.norm() / n);
  }
  r.totally_geodesic = flag_from_residual(r.geodesic_residual, tol);
  r.totally_umbilical = flag_from_residual(r.umbilic_residual, tol);
  r.minimal = flag_from_residual(r.minimal_residual, tol);
  return r;
}

}  // namespace dwarp
