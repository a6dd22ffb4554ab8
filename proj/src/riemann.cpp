#include "dwarp/riemann.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace dwarp {

namespace {

constexpr double kDegeneratePlane = 1e-12;
constexpr double kFrameEps = 1e-14;

void check_in_domain(const ChartedManifold& chart, const Vec& p) {
  if (!chart.contains(p))
    throw DomainError("point outside the domain of chart '" + chart.name() + "'");
}

// Values and first derivatives of a field's components at a point.
struct FieldJet1 {
  Vec v;    // v(k) = F^k
  Mat d1;   // d1(m,k) = d_m F^k
};

// Adds second derivatives d2[m](l,k) = d_m d_l F^k.
struct FieldJet2 : FieldJet1 {
  std::vector<Mat> d2;
};

FieldJet1 field_jet1(const ChartedManifold& chart, const VectorFieldExpr& f,
                     const VarAssignment& at) {
  const int n = chart.dim();
  FieldJet1 jet;
  jet.v.resize(n);
  jet.d1.resize(n, n);
  for (int k = 0; k < n; ++k) {
    jet.v[k] = eval(f.comps[k], at);
    for (int m = 0; m < n; ++m) jet.d1(m, k) = eval(diff(f.comps[k], chart.coords()[m]), at);
  }
  return jet;
}

FieldJet2 field_jet2(const ChartedManifold& chart, const VectorFieldExpr& f,
                     const VarAssignment& at) {
  const int n = chart.dim();
  FieldJet2 jet;
  jet.v.resize(n);
  jet.d1.resize(n, n);
  jet.d2.assign(n, Mat(n, n));
  for (int k = 0; k < n; ++k) {
    jet.v[k] = eval(f.comps[k], at);
    for (int m = 0; m < n; ++m) {
      const ScalarExpr dm = diff(f.comps[k], chart.coords()[m]);
      jet.d1(m, k) = eval(dm, at);
      for (int l = 0; l < n; ++l) jet.d2[m](l, k) = eval(diff(dm, chart.coords()[l]), at);
    }
  }
  return jet;
}

// nabla along a plain vector (values only) of a field known through its jet.
Vec covariant_along(const PointGeometry& geo, const Vec& x, const FieldJet1& y) {
  const int n = geo.chart->dim();
  Vec out = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += x[i] * y.d1(i, k);
      for (int j = 0; j < n; ++j) acc += geo.gamma[k](i, j) * x[i] * y.v[j];
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

PointGeometry point_geometry(const ChartedManifold& chart, const Vec& p) {
  check_in_domain(chart, p);
  const int n = chart.dim();
  PointGeometry geo;
  geo.chart = &chart;
  geo.p = p;
  geo.at = chart.assignment(p);

  geo.g.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) geo.g(i, j) = eval(chart.metric_entry(i, j), geo.at);

  Eigen::SelfAdjointEigenSolver<Mat> eigs(geo.g);
  const double min_eig = eigs.eigenvalues().minCoeff();
  if (!(min_eig > 0.0))
    throw Error("metric of chart '" + chart.name() +
                "' is not positive definite (smallest eigenvalue " +
                std::to_string(min_eig) + ")");
  geo.g_inv = geo.g.inverse();

  geo.dg.assign(n, Mat(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) geo.dg[k](i, j) = eval(chart.metric_diff(k, i, j), geo.at);

  // Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
  geo.gamma.assign(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
          acc += geo.g_inv(k, l) *
                 (geo.dg[i](j, l) + geo.dg[j](i, l) - geo.dg[l](i, j));
        geo.gamma[k](i, j) = 0.5 * acc;
      }

  // d_m Gamma^k_ij via the product rule, with d_m g^{kl} = -g^{ka} d_m g_ab g^{bl}.
  std::vector<Mat> d2g_m(n);  // reused per m: d2g_m[k](i,j) = d_m d_k g_ij
  geo.dgamma.assign(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  for (int m = 0; m < n; ++m) {
    const Mat dginv_m = -geo.g_inv * geo.dg[m] * geo.g_inv;
    for (int k = 0; k < n; ++k) {
      d2g_m[k].resize(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          d2g_m[k](i, j) = eval(chart.metric_diff2(k, m, i, j), geo.at);
    }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int l = 0; l < n; ++l) {
            const double a = geo.dg[i](j, l) + geo.dg[j](i, l) - geo.dg[l](i, j);
            const double da = d2g_m[i](j, l) + d2g_m[j](i, l) - d2g_m[l](i, j);
            acc += dginv_m(k, l) * a + geo.g_inv(k, l) * da;
          }
          geo.dgamma[m][k](i, j) = 0.5 * acc;
        }
  }
  return geo;
}

CurvatureTensor curvature_tensor(const PointGeometry& geo) {
  const int n = geo.chart->dim();
  CurvatureTensor curv;
  curv.up.assign(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double acc = geo.dgamma[i][l](j, k) - geo.dgamma[j][l](i, k);
          for (int m = 0; m < n; ++m)
            acc += geo.gamma[l](i, m) * geo.gamma[m](j, k) -
                   geo.gamma[l](j, m) * geo.gamma[m](i, k);
          curv.up[i][j](k, l) = acc;
        }
  return curv;
}

double inner(const PointGeometry& geo, const Vec& x, const Vec& y) {
  return x.dot(geo.g * y);
}

Mat metric_at(const ChartedManifold& chart, const Vec& p) {
  return point_geometry(chart, p).g;
}

Mat inverse_metric_at(const ChartedManifold& chart, const Vec& p) {
  return point_geometry(chart, p).g_inv;
}

std::vector<Mat> christoffel(const ChartedManifold& chart, const Vec& p) {
  return point_geometry(chart, p).gamma;
}

TangentVector covariant_derivative(const PointGeometry& geo, const VectorFieldExpr& x,
                                   const VectorFieldExpr& y) {
  const FieldJet1 xj = field_jet1(*geo.chart, x, geo.at);
  const FieldJet1 yj = field_jet1(*geo.chart, y, geo.at);
  return TangentVector{geo.p, covariant_along(geo, xj.v, yj)};
}

TangentVector covariant_derivative(const ChartedManifold& chart, const VectorFieldExpr& x,
                                   const VectorFieldExpr& y, const Vec& p) {
  const PointGeometry geo = point_geometry(chart, p);
  return covariant_derivative(geo, x, y);
}

TangentVector riemann_tensor(const ChartedManifold& chart, const VectorFieldExpr& x,
                             const VectorFieldExpr& y, const VectorFieldExpr& z,
                             const Vec& p) {
  const PointGeometry geo = point_geometry(chart, p);
  const int n = chart.dim();
  const FieldJet1 xj = field_jet1(chart, x, geo.at);
  const FieldJet1 yj = field_jet1(chart, y, geo.at);
  const FieldJet2 zj = field_jet2(chart, z, geo.at);

  // Jet of W = nabla_A Z at p for A given by its own jet.
  const auto nabla_jet = [&](const FieldJet1& aj) {
    FieldJet1 w;
    w.v.resize(n);
    w.d1.resize(n, n);
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += aj.v[i] * zj.d1(i, k);
        for (int j = 0; j < n; ++j) acc += geo.gamma[k](i, j) * aj.v[i] * zj.v[j];
      }
      w.v[k] = acc;
    }
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += aj.d1(m, i) * zj.d1(i, k) + aj.v[i] * zj.d2[m](i, k);
          for (int j = 0; j < n; ++j)
            acc += geo.dgamma[m][k](i, j) * aj.v[i] * zj.v[j] +
                   geo.gamma[k](i, j) * (aj.d1(m, i) * zj.v[j] + aj.v[i] * zj.d1(m, j));
        }
        w.d1(m, k) = acc;
      }
    return w;
  };

  const FieldJet1 wy = nabla_jet(yj);  // nabla_Y Z
  const FieldJet1 wx = nabla_jet(xj);  // nabla_X Z

  const Vec first = covariant_along(geo, xj.v, wy);
  const Vec second = covariant_along(geo, yj.v, wx);

  Vec bracket(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int m = 0; m < n; ++m) acc += xj.v[m] * yj.d1(m, i) - yj.v[m] * xj.d1(m, i);
    bracket[i] = acc;
  }
  Vec third = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += bracket[i] * zj.d1(i, k);
      for (int j = 0; j < n; ++j) acc += geo.gamma[k](i, j) * bracket[i] * zj.v[j];
    }
    third[k] = acc;
  }

  return TangentVector{p, first - second - third};
}

double sectional_curvature(const PointGeometry& geo, const CurvatureTensor& curv,
                           const Vec& x, const Vec& y) {
  const int n = geo.chart->dim();
  const double xx = inner(geo, x, x);
  const double yy = inner(geo, y, y);
  const double xy = inner(geo, x, y);
  const double gram = xx * yy - xy * xy;
  if (gram < kDegeneratePlane) throw Error("sectional curvature of a degenerate plane");
  // <R(x,y)y, x> = x^i y^j y^k x^l' g_{l l'} R^l
  double num = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (x[i] == 0.0 || y[j] == 0.0) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double rl = curv.up[i][j](k, l);
          if (rl == 0.0) continue;
          double lower = 0.0;
          for (int lp = 0; lp < n; ++lp) lower += geo.g(l, lp) * x[lp];
          num += x[i] * y[j] * y[k] * rl * lower;
        }
    }
  return num / gram;
}

double sectional_curvature(const ChartedManifold& chart, const Vec& p,
                           const TangentVector& x, const TangentVector& y) {
  const PointGeometry geo = point_geometry(chart, p);
  const CurvatureTensor curv = curvature_tensor(geo);
  return sectional_curvature(geo, curv, x.components, y.components);
}

TangentVector gradient(const ChartedManifold& chart, const ScalarExpr& psi, const Vec& p) {
  const PointGeometry geo = point_geometry(chart, p);
  const int n = chart.dim();
  Vec dpsi(n);
  for (int j = 0; j < n; ++j) dpsi[j] = eval(diff(psi, chart.coords()[j]), geo.at);
  return TangentVector{p, geo.g_inv * dpsi};
}

VectorFieldExpr gradient_field(const ChartedManifold& chart, const ScalarExpr& psi) {
  const int n = chart.dim();
  std::vector<std::vector<ScalarExpr>> g(n, std::vector<ScalarExpr>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g[i][j] = chart.metric_entry(i, j);
  std::vector<ScalarExpr> dpsi(n);
  for (int j = 0; j < n; ++j) dpsi[j] = diff(psi, chart.coords()[j]);
  VectorFieldExpr out;
  out.comps = cramer_solve(g, dpsi);
  return out;
}

Mat hessian_matrix(const PointGeometry& geo, const ScalarExpr& psi) {
  const ChartedManifold& chart = *geo.chart;
  const int n = chart.dim();
  Vec dpsi(n);
  std::vector<ScalarExpr> dpsi_expr(n);
  for (int j = 0; j < n; ++j) {
    dpsi_expr[j] = diff(psi, chart.coords()[j]);
    dpsi[j] = eval(dpsi_expr[j], geo.at);
  }
  Mat h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = eval(diff(dpsi_expr[i], chart.coords()[j]), geo.at);
      for (int k = 0; k < n; ++k) acc -= geo.gamma[k](i, j) * dpsi[k];
      h(i, j) = acc;
    }
  return h;
}

Mat hessian_matrix(const ChartedManifold& chart, const ScalarExpr& psi, const Vec& p) {
  return hessian_matrix(point_geometry(chart, p), psi);
}

double hessian(const ChartedManifold& chart, const ScalarExpr& psi, const Vec& p,
               const TangentVector& x, const TangentVector& y) {
  const Mat h = hessian_matrix(chart, psi, p);
  return x.components.dot(h * y.components);
}

double laplacian(const ChartedManifold& chart, const ScalarExpr& psi, const Vec& p) {
  const PointGeometry geo = point_geometry(chart, p);
  const Mat h = hessian_matrix(geo, psi);
  const std::vector<Vec> frame = orthonormal_frame(geo);
  double tr = 0.0;
  for (const Vec& e : frame) tr += e.dot(h * e);
  return -tr;
}

std::vector<Vec> orthonormal_frame(const PointGeometry& geo) {
  const int n = geo.chart->dim();
  std::vector<Vec> frame;
  frame.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec v = Vec::Zero(n);
    v[i] = 1.0;
    for (const Vec& e : frame) v -= inner(geo, v, e) * e;
    const double norm2 = inner(geo, v, v);
    if (!(norm2 > kFrameEps))
      throw Error("orthonormal frame: metric is singular at the point");
    frame.push_back(v / std::sqrt(norm2));
  }
  return frame;
}

std::vector<TangentVector> orthonormal_frame(const ChartedManifold& chart, const Vec& p) {
  const PointGeometry geo = point_geometry(chart, p);
  std::vector<TangentVector> out;
  for (const Vec& e : orthonormal_frame(geo)) out.push_back(TangentVector{p, e});
  return out;
}

ScalarExpr symbolic_determinant(const std::vector<std::vector<ScalarExpr>>& m) {
  const int n = static_cast<int>(m.size());
  if (n == 1) return m[0][0];
  ScalarExpr det(0.0);
  for (int col = 0; col < n; ++col) {
    std::vector<std::vector<ScalarExpr>> minor(n - 1, std::vector<ScalarExpr>(n - 1));
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == col) continue;
        minor[r - 1][cc++] = m[r][c];
      }
    }
    const ScalarExpr term = m[0][col] * symbolic_determinant(minor);
    det = (col % 2 == 0) ? det + term : det - term;
  }
  return det;
}

std::vector<ScalarExpr> cramer_solve(const std::vector<std::vector<ScalarExpr>>& a,
                                     const std::vector<ScalarExpr>& b) {
  const int n = static_cast<int>(a.size());
  const ScalarExpr det = symbolic_determinant(a);
  std::vector<ScalarExpr> x(n);
  for (int k = 0; k < n; ++k) {
    std::vector<std::vector<ScalarExpr>> ak = a;
    for (int r = 0; r < n; ++r) ak[r][k] = b[r];
    x[k] = symbolic_determinant(ak) / det;
  }
  return x;
}

}  // namespace dwarp
