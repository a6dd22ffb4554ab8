#include "dwarp/chart.hpp"

#include <set>
#include <utility>

namespace dwarp {

ChartPtr ChartedManifold::create(std::string name, std::vector<std::string> coords,
                                 std::vector<std::vector<ScalarExpr>> metric,
                                 std::vector<Interval> domain) {
  const int n = static_cast<int>(coords.size());
  if (n <= 0) throw Error("manifold '" + name + "': dimension must be positive");
  if (static_cast<int>(metric.size()) != n)
    throw Error("manifold '" + name + "': metric must be " + std::to_string(n) + "x" +
                std::to_string(n));
  for (const auto& row : metric)
    if (static_cast<int>(row.size()) != n)
      throw Error("manifold '" + name + "': metric must be square");
  if (static_cast<int>(domain.size()) != n)
    throw Error("manifold '" + name + "': one domain interval per coordinate required");
  std::set<std::string> unique(coords.begin(), coords.end());
  if (static_cast<int>(unique.size()) != n)
    throw Error("manifold '" + name + "': duplicate coordinate names");
  for (int i = 0; i < n; ++i)
    if (!(domain[i].lo < domain[i].hi))
      throw Error("manifold '" + name + "': empty domain for coordinate " + coords[i]);

  // Metric entries may only use the chart's own coordinates.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (const auto& v : free_variables(metric[i][j]))
        if (!unique.count(v))
          throw Error("manifold '" + name + "': metric entry g(" + std::to_string(i + 1) +
                      "," + std::to_string(j + 1) + ") uses undeclared variable '" + v +
                      "'");

  auto chart = std::shared_ptr<ChartedManifold>(new ChartedManifold());
  chart->name_ = std::move(name);
  chart->coords_ = std::move(coords);
  chart->domain_ = std::move(domain);
  chart->g_.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) chart->g_.push_back(metric[i][j]);

  chart->dg_.reserve(static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        chart->dg_.push_back(diff(metric[i][j], chart->coords_[k]));

  chart->d2g_.reserve(static_cast<std::size_t>(n) * n * n * n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          chart->d2g_.push_back(
              diff(chart->dg_[k * n * n + i * n + j], chart->coords_[l]));

  // Symmetry sanity check at the domain center.
  Vec center(n);
  for (int i = 0; i < n; ++i) center[i] = 0.5 * (chart->domain_[i].lo + chart->domain_[i].hi);
  const VarAssignment at = chart->assignment(center);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double gij = eval(chart->metric_entry(i, j), at);
      const double gji = eval(chart->metric_entry(j, i), at);
      if (std::abs(gij - gji) > 1e-12 * (1.0 + std::abs(gij)))
        throw Error("manifold '" + chart->name_ + "': metric is not symmetric at the domain center");
    }

  return chart;
}

bool ChartedManifold::contains(const Vec& p, double margin) const {
  if (p.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    const double pad = margin * domain_[i].width();
    if (!(p[i] > domain_[i].lo + pad && p[i] < domain_[i].hi - pad)) return false;
  }
  return true;
}

VarAssignment ChartedManifold::assignment(const Vec& p) const {
  VarAssignment a;
  for (int i = 0; i < dim(); ++i) a.bind(coords_[i], p[i]);
  return a;
}

Vec ChartedManifold::sample_point(std::mt19937_64& rng, double margin) const {
  Vec p(dim());
  for (int i = 0; i < dim(); ++i) {
    const double pad = margin * domain_[i].width();
    p[i] = domain_[i].lo + pad + (domain_[i].width() - 2.0 * pad) * uniform01(rng);
  }
  return p;
}

VectorFieldExpr VectorFieldExpr::constant(const Vec& v) {
  VectorFieldExpr f;
  f.comps.reserve(static_cast<std::size_t>(v.size()));
  for (int i = 0; i < v.size(); ++i) f.comps.emplace_back(v[i]);
  return f;
}

Vec field_value(const ChartedManifold& chart, const VectorFieldExpr& field, const Vec& p) {
  if (field.dim() != chart.dim()) throw Error("vector field dimension mismatch");
  const VarAssignment at = chart.assignment(p);
  Vec v(chart.dim());
  for (int i = 0; i < chart.dim(); ++i) v[i] = eval(field.comps[i], at);
  return v;
}

VectorFieldExpr lie_bracket(const ChartedManifold& chart, const VectorFieldExpr& x,
                            const VectorFieldExpr& y) {
  const int n = chart.dim();
  VectorFieldExpr out = VectorFieldExpr::zero(n);
  for (int i = 0; i < n; ++i) {
    ScalarExpr acc(0.0);
    for (int m = 0; m < n; ++m) {
      acc = acc + x.comps[m] * diff(y.comps[i], chart.coords()[m]) -
            y.comps[m] * diff(x.comps[i], chart.coords()[m]);
    }
    out.comps[i] = acc;
  }
  return out;
}

}  // namespace dwarp
