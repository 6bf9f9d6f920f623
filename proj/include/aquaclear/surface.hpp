#pragma once

#include <vector>

namespace aqua {

// Natural cubic spline through (grid, values). Immutable after fit; evaluation
// clamps the query into the grid range, reproduces knot values exactly and is
// C2 inside.
class ValueCurve {
 public:
  ValueCurve() = default;
  static ValueCurve fit(std::vector<double> grid, std::vector<double> values);

  double eval(double x) const;
  const std::vector<double>& grid() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, y_, d2_;
};

// Tensor-product natural cubic spline over a rectangle. values is row-major:
// values[i * grid_y.size() + j] = f(grid_x[i], grid_y[j]). Queries outside the
// rectangle are clamped to it before evaluation.
class ValueSurface {
 public:
  ValueSurface() = default;
  static ValueSurface fit(std::vector<double> grid_x, std::vector<double> grid_y,
                          std::vector<double> values);

  double eval(double x, double y) const;
  const std::vector<double>& grid_x() const { return gx_; }
  const std::vector<double>& grid_y() const { return gy_; }
  const std::vector<double>& values() const { return f_; }
  bool empty() const { return f_.empty(); }

 private:
  std::vector<double> gx_, gy_;
  std::vector<double> f_;
  // Second derivatives: d2x_ of f along x (per y-column), d2y_ of f along y
  // (per x-row), d2xy_ of d2x_ along y. Together they make evaluation O(1)
  // after two cell lookups.
  std::vector<double> d2x_, d2y_, d2xy_;
};

}  // namespace aqua
