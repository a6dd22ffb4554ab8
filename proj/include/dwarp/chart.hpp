#pragma once

#include <Eigen/Dense>

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dwarp/expr.hpp"

namespace dwarp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Open interval (lo, hi) bounding one coordinate.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Draws a uniform double in [0,1) from the top 53 bits of the generator, so
/// results are identical across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class ChartedManifold;
using ChartPtr = std::shared_ptr<const ChartedManifold>;

/// A single coordinate chart: dimension, coordinate names, a symmetric matrix
/// of metric expressions and an open box domain. First and second symbolic
/// derivatives of the metric entries are precomputed at construction, which is
/// what keeps every downstream curvature quantity exact at a point.
///
/// Immutable after construction; shared freely between threads.
class ChartedManifold {
 public:
  static ChartPtr create(std::string name, std::vector<std::string> coords,
                         std::vector<std::vector<ScalarExpr>> metric,
                         std::vector<Interval> domain);

  int dim() const { return static_cast<int>(coords_.size()); }
  const std::string& name() const { return name_; }
  const std::vector<std::string>& coords() const { return coords_; }
  const ScalarExpr& metric_entry(int i, int j) const { return g_[idx(i, j)]; }
  /// d_k g_ij
  const ScalarExpr& metric_diff(int k, int i, int j) const {
    return dg_[k * dim() * dim() + idx(i, j)];
  }
  /// d_k d_l g_ij
  const ScalarExpr& metric_diff2(int k, int l, int i, int j) const {
    return d2g_[(k * dim() + l) * dim() * dim() + idx(i, j)];
  }
  const Interval& domain(int i) const { return domain_[i]; }

  bool contains(const Vec& p, double margin = 0.0) const;
  /// Binds each coordinate name to the matching component of p.
  VarAssignment assignment(const Vec& p) const;
  /// Uniform draw from the domain box shrunk by the given relative margin.
  Vec sample_point(std::mt19937_64& rng, double margin = 0.05) const;

 private:
  ChartedManifold() = default;
  int idx(int i, int j) const { return i * dim() + j; }

  std::string name_;
  std::vector<std::string> coords_;
  std::vector<ScalarExpr> g_;    // row-major n*n
  std::vector<ScalarExpr> dg_;   // k*n*n + i*n + j
  std::vector<ScalarExpr> d2g_;  // ((k*n)+l)*n*n + i*n + j
  std::vector<Interval> domain_;
};

/// A point on a chart together with a component vector in the chart basis.
struct TangentVector {
  Vec point;
  Vec components;
};

/// A vector field given by one expression per chart coordinate.
struct VectorFieldExpr {
  std::vector<ScalarExpr> comps;

  static VectorFieldExpr zero(int n) {
    return VectorFieldExpr{std::vector<ScalarExpr>(static_cast<std::size_t>(n))};
  }
  static VectorFieldExpr constant(const Vec& v);
  int dim() const { return static_cast<int>(comps.size()); }
};

/// Component values of the field at a point of the chart.
Vec field_value(const ChartedManifold& chart, const VectorFieldExpr& field, const Vec& p);

/// Lie bracket [X,Y]^i = X^m d_m Y^i - Y^m d_m X^i as a field.
VectorFieldExpr lie_bracket(const ChartedManifold& chart, const VectorFieldExpr& x,
                            const VectorFieldExpr& y);

}  // namespace dwarp
