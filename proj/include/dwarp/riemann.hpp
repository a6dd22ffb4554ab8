#pragma once

#include <vector>

#include "dwarp/chart.hpp"

namespace dwarp {

/// Metric data evaluated exactly at one point: g, its inverse, the
/// Christoffel symbols and their first coordinate derivatives. Derivatives
/// come from the chart's symbolic metric derivatives, so everything here is
/// exact up to floating point.
struct PointGeometry {
  const ChartedManifold* chart = nullptr;
  Vec p;
  VarAssignment at;
  Mat g;
  Mat g_inv;
  std::vector<Mat> dg;                  // dg[k](i,j) = d_k g_ij
  std::vector<Mat> gamma;               // gamma[k](i,j) = Gamma^k_ij
  std::vector<std::vector<Mat>> dgamma;  // dgamma[m][k](i,j) = d_m Gamma^k_ij
};

PointGeometry point_geometry(const ChartedManifold& chart, const Vec& p);

/// Full curvature tensor at a point: up[i][j](k,l) is the coefficient of
/// d_l in R(d_i, d_j) d_k under the convention
/// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
/// which makes the unit sphere's sectional curvature +1.
struct CurvatureTensor {
  std::vector<std::vector<Mat>> up;
};

CurvatureTensor curvature_tensor(const PointGeometry& geo);

double inner(const PointGeometry& geo, const Vec& x, const Vec& y);

/// Metric evaluated at p; throws on domain violation or a non-positive
/// definite result (the smallest eigenvalue estimate is reported).
Mat metric_at(const ChartedManifold& chart, const Vec& p);

Mat inverse_metric_at(const ChartedManifold& chart, const Vec& p);

/// Christoffel symbols Gamma^k_ij as one matrix per upper index.
std::vector<Mat> christoffel(const ChartedManifold& chart, const Vec& p);

/// (nabla_X Y)^k = X^i d_i Y^k + Gamma^k_ij X^i Y^j at p.
TangentVector covariant_derivative(const ChartedManifold& chart, const VectorFieldExpr& x,
                                   const VectorFieldExpr& y, const Vec& p);
TangentVector covariant_derivative(const PointGeometry& geo, const VectorFieldExpr& x,
                                   const VectorFieldExpr& y);

/// R(X,Y)Z at p for expression fields, evaluated through second-order field
/// jets and exact Christoffel derivatives.
TangentVector riemann_tensor(const ChartedManifold& chart, const VectorFieldExpr& x,
                             const VectorFieldExpr& y, const VectorFieldExpr& z,
                             const Vec& p);

/// K(X ^ Y) = <R(X,Y)Y, X> / (|X|^2 |Y|^2 - <X,Y>^2) for tangent vectors,
/// extended as constant-coefficient fields. Throws when the plane is
/// degenerate (Gram determinant below 1e-12).
double sectional_curvature(const ChartedManifold& chart, const Vec& p,
                           const TangentVector& x, const TangentVector& y);
double sectional_curvature(const PointGeometry& geo, const CurvatureTensor& curv,
                           const Vec& x, const Vec& y);

/// Gradient components g^ij d_j psi at p.
TangentVector gradient(const ChartedManifold& chart, const ScalarExpr& psi, const Vec& p);

/// Symbolic gradient field, with the inverse metric obtained by Cramer's rule
/// on the symbolic metric. Intended for small charts (n <= 4).
VectorFieldExpr gradient_field(const ChartedManifold& chart, const ScalarExpr& psi);

/// Hessian H^psi(X,Y) = XY psi - (nabla_X Y) psi, evaluated tensorially:
/// X^i Y^j (d_i d_j psi - Gamma^k_ij d_k psi).
double hessian(const ChartedManifold& chart, const ScalarExpr& psi, const Vec& p,
               const TangentVector& x, const TangentVector& y);

/// Coordinate components H_ij of the Hessian at p.
Mat hessian_matrix(const ChartedManifold& chart, const ScalarExpr& psi, const Vec& p);
Mat hessian_matrix(const PointGeometry& geo, const ScalarExpr& psi);

/// Laplacian with the sign convention Delta psi = -trace H^psi, i.e. the sum
/// of (nabla_e e) psi - e e psi over an orthonormal frame. On the flat line
/// Delta cos = +cos; eigenfunctions carry positive eigenvalues. This is the
/// convention every downstream identity and inequality in this project uses.
double laplacian(const ChartedManifold& chart, const ScalarExpr& psi, const Vec& p);

/// Orthonormal frame by unpivoted Gram-Schmidt on the coordinate basis, in
/// coordinate order; deterministic.
std::vector<TangentVector> orthonormal_frame(const ChartedManifold& chart, const Vec& p);
std::vector<Vec> orthonormal_frame(const PointGeometry& geo);

/// Symbolic determinant by cofactor expansion; intended for small matrices.
ScalarExpr symbolic_determinant(const std::vector<std::vector<ScalarExpr>>& m);

/// Solves A x = b symbolically by Cramer's rule.
std::vector<ScalarExpr> cramer_solve(const std::vector<std::vector<ScalarExpr>>& a,
                                     const std::vector<ScalarExpr>& b);

}  // namespace dwarp
