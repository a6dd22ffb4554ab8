#pragma once

#include <array>
#include <string>

#include "dwarp/riemann.hpp"

namespace dwarp {

/// A doubly warped product of two charted factors: the product chart carries
/// the block metric f2^2 g1 (+) f1^2 g2, where f1 lives on factor 1 and f2 on
/// factor 2. Setting f2 = 1 reproduces the singly warped product, f1 = f2 = 1
/// the direct product.
class DoublyWarpedProduct {
 public:
  /// Empty product; usable only as a placeholder before assignment.
  DoublyWarpedProduct() = default;

  const ChartPtr& factor(int i) const { return i == 1 ? factor1_ : factor2_; }
  /// Warping function f_i, an expression in factor i's coordinates.
  const ScalarExpr& warp(int i) const { return i == 1 ? f1_ : f2_; }
  const ChartPtr& product() const { return product_; }
  int dim(int i) const { return factor(i)->dim(); }

  /// The field U_i = -grad((ln f_i) o pi_i) taken in the product metric,
  /// precomputed symbolically. Its components vanish outside block i.
  const VectorFieldExpr& u_field(int i) const { return i == 1 ? u1_ : u2_; }

  Vec join(const Vec& p1, const Vec& p2) const;
  Vec factor_point(int i, const Vec& p) const;
  /// Components of block i of a product-chart vector.
  Vec block(int i, const Vec& v) const;
  /// Zero-pads factor components into a product-chart vector.
  Vec lift(int i, const Vec& factor_components) const;
  VectorFieldExpr lift_field(int i, const VectorFieldExpr& field) const;

 private:
  friend DoublyWarpedProduct build_dwp(ChartPtr factor1, ChartPtr factor2, ScalarExpr f1,
                                       ScalarExpr f2);

  ChartPtr factor1_, factor2_, product_;
  ScalarExpr f1_{1.0}, f2_{1.0};
  VectorFieldExpr u1_, u2_;
};

/// Builds the product chart and validates that both warping functions are
/// strictly positive on a deterministic sample of their domains.
DoublyWarpedProduct build_dwp(ChartPtr factor1, ChartPtr factor2, ScalarExpr f1,
                              ScalarExpr f2);

/// A vector field written as the sum of two lifted factor fields,
/// X = X^1 + X^2; part i depends only on factor i's coordinates.
struct LiftedFieldSum {
  VectorFieldExpr part1;
  VectorFieldExpr part2;
};

LiftedFieldSum make_lifted_sum(const DoublyWarpedProduct& w, VectorFieldExpr part1,
                               VectorFieldExpr part2);

/// The sum realized as a field on the product chart.
VectorFieldExpr realize(const DoublyWarpedProduct& w, const LiftedFieldSum& x);

/// (X ^ Y)Z = <Y,Z> X - <X,Z> Y with the chart metric; bilinear and
/// antisymmetric in (X,Y). All three vectors must share a base point.
TangentVector wedge(const ChartedManifold& chart, const TangentVector& x,
                    const TangentVector& y, const TangentVector& z);

/// Levi-Civita connection of the doubly warped metric from factor data:
///   nabla_X Y = nabla0_X Y
///             + sum_i ( <X^j, Y^j> U_i - <X, U_i> Y^j - <Y, U_i> X^j ),
/// j opposite to i, with nabla0 the direct-product connection and every inner
/// product taken in the doubly warped metric. The U_i couple to the opposite
/// block: the same-index pairing fails the Christoffel oracle already on the
/// polar plane, while this form matches it to machine precision.
TangentVector dwp_connection_closed_form(const DoublyWarpedProduct& w,
                                         const LiftedFieldSum& x, const LiftedFieldSum& y,
                                         const Vec& p);

/// Curvature of the doubly warped metric from factor data:
///   R(X,Y)Z = R0(X,Y)Z
///           + sum_i { (nabla_X U_i - <X,U_i> U_i) ^ Y^j
///                   - (nabla_Y U_i - <Y,U_i> U_i) ^ X^j } Z
///           + sum_{i,k} <U_i, U_k> (X^j(i) ^ Y^j(k)) Z,
/// with j(i) the block opposite to i, matching the convention of
/// riemann_tensor on the product chart.
TangentVector dwp_curvature_closed_form(const DoublyWarpedProduct& w,
                                        const LiftedFieldSum& x, const LiftedFieldSum& y,
                                        const LiftedFieldSum& z, const Vec& p);

/// Sectional curvature of the mixed plane spanned by a unit X in block 1 and
/// a unit Z in block 2:
///   K = (1/f1)((nabla1_X X) f1 - X X f1) + (1/f2)((nabla2_Z Z) f2 - Z Z f2),
/// i.e. minus the factor Hessians of the warps on the block components.
/// Throws if either vector deviates from unit norm by more than 1e-8 or has
/// components outside its block.
double mixed_sectional_closed_form(const DoublyWarpedProduct& w, const TangentVector& x,
                                   const TangentVector& z, const Vec& p);

}  // namespace dwarp
