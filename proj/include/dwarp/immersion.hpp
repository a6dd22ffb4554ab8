#pragma once

#include <optional>
#include <vector>

#include "dwarp/riemann.hpp"

namespace dwarp {

/// Tri-state classification verdict. Residuals that land between the pass
/// threshold and ten times it are reported as indeterminate rather than
/// silently classified.
enum class Flag { kYes, kNo, kIndeterminate };

const char* to_label(Flag f);
Flag flag_from_residual(double residual, double tol);

/// A smooth map between charts given by one target-coordinate expression per
/// component, with symbolic first and second derivatives precomputed. The
/// geometry operations below require it to be an isometric immersion, which
/// isometry_residual() measures.
class ImmersionSpec {
 public:
  /// Empty spec; usable only as a placeholder before assignment.
  ImmersionSpec() = default;

  static ImmersionSpec create(ChartPtr source, ChartPtr target,
                              std::vector<ScalarExpr> components);

  const ChartPtr& source() const { return source_; }
  const ChartPtr& target() const { return target_; }
  const std::vector<ScalarExpr>& components() const { return comps_; }
  int source_dim() const { return source_->dim(); }
  int target_dim() const { return target_->dim(); }

  Vec map_point(const Vec& p) const;
  /// Jacobian J(p), target_dim x source_dim.
  Mat jacobian(const Vec& p) const;
  /// Second derivatives d_i d_j phi^A at p; result[A](i,j).
  std::vector<Mat> second_derivatives(const Vec& p) const;

 private:
  ChartPtr source_, target_;
  std::vector<ScalarExpr> comps_;
  std::vector<std::vector<ScalarExpr>> jac_;           // [A][i]
  std::vector<std::vector<std::vector<ScalarExpr>>> d2_;  // [A][i][j]
};

/// A vector at a source point expressed in ambient components and verified to
/// be g-orthogonal to the immersed tangent space; normal_residual records the
/// largest inner product with a tangent frame vector found at construction.
struct NormalVector {
  Vec source_point;
  Vec ambient;
  double normal_residual = 0.0;
};

/// One point's worth of second-fundamental-form data: orthonormal tangent and
/// normal frames and the components h(e_a, e_b) in the normal frame.
struct SecondFundamentalSample {
  Vec point;
  std::vector<Vec> tangent_frame;        // source components
  std::vector<Vec> normal_frame;         // ambient components
  std::vector<Mat> h;                    // h[r](a,b) = <h(e_a,e_b), nu_r>
  double symmetry_residual = 0.0;
  double tangency_residual = 0.0;        // largest tangential leak of h
};

/// dphi(X): ambient components J(p) X. Throws if the Jacobian is rank
/// deficient at p.
TangentVector pushforward(const ImmersionSpec& phi, const Vec& p, const TangentVector& x);

/// max_ij |(J^T gM J - gN)_ij| at p; zero exactly when phi is isometric at p.
double isometry_residual(const ImmersionSpec& phi, const Vec& p);

/// Ambient derivative along X of the constant-coefficient extension of Y:
/// X^i Y^j (d_i d_j phi^A + Gamma^A_BC J^B_i J^C_j). The Gauss formula splits
/// this into dphi(nabla_X Y) + h(X,Y).
Vec ambient_gauss_derivative(const ImmersionSpec& phi, const Vec& p, const Vec& x,
                             const Vec& y);

/// h(X,Y): the normal projection of the ambient Gauss derivative. Symmetric
/// and purely normal.
NormalVector second_fundamental_form(const ImmersionSpec& phi, const Vec& p,
                                     const TangentVector& x, const TangentVector& y);

/// Matrix of A_eta in the deterministic orthonormal tangent frame:
/// A(a,b) = <h(e_a,e_b), eta>. Throws if eta fails the normality check.
Mat shape_operator(const ImmersionSpec& phi, const Vec& p, const NormalVector& eta);

/// A_eta X as a tangent vector on the source.
TangentVector shape_operator_apply(const ImmersionSpec& phi, const Vec& p,
                                   const NormalVector& eta, const TangentVector& x);

/// Normal connection D_X eta for a normal field given by ambient-component
/// expressions in the source coordinates: the normal projection of the
/// ambient derivative of eta along X.
NormalVector normal_connection(const ImmersionSpec& phi, const Vec& p,
                               const TangentVector& x, const VectorFieldExpr& eta_field);

/// Raw ambient derivative of an ambient-component field along X (used to
/// check the Weingarten split against -A_eta X + D_X eta).
Vec ambient_field_derivative(const ImmersionSpec& phi, const Vec& p, const Vec& x,
                             const VectorFieldExpr& field);

/// H = (1/n) sum_a h(e_a, e_a) over the orthonormal tangent frame.
NormalVector mean_curvature(const ImmersionSpec& phi, const Vec& p);

/// g-orthogonal projection of an ambient vector onto the normal space at p.
NormalVector project_to_normal(const ImmersionSpec& phi, const Vec& p,
                               const Vec& ambient_vector);

/// | <R~(X,Y)Z,W> - <R(X,Y)Z,W> - <h(X,Z),h(Y,W)> + <h(X,W),h(Y,Z)> | with
/// the ambient curvature evaluated on pushforwards.
double gauss_equation_residual(const ImmersionSpec& phi, const Vec& p,
                               const TangentVector& x, const TangentVector& y,
                               const TangentVector& z, const TangentVector& tw);

/// Deterministic orthonormal frame of the normal space at p: ambient
/// coordinate directions projected against the tangent space and previously
/// accepted normals, in coordinate order.
std::vector<Vec> normal_frame(const ImmersionSpec& phi, const Vec& p);

/// Tangent frame, normal frame and h components at one point.
SecondFundamentalSample second_fundamental_sample(const ImmersionSpec& phi, const Vec& p);

struct ClassificationReport {
  Flag totally_geodesic = Flag::kIndeterminate;
  Flag totally_umbilical = Flag::kIndeterminate;
  Flag minimal = Flag::kIndeterminate;
  double geodesic_residual = 0.0;   // max |h|
  double umbilic_residual = 0.0;    // max |A_eta - (tr/n) I| over unit normals
  double minimal_residual = 0.0;    // max |H|
};

/// Classifies over sample points (at least 8). Residual thresholds follow
/// flag_from_residual with the given tolerance.
ClassificationReport classify(const ImmersionSpec& phi, const std::vector<Vec>& points,
                              double tol = 1e-6);

}  // namespace dwarp
