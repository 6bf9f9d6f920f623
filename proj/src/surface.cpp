#include "aquaclear/surface.hpp"

#include <algorithm>
#include <cmath>

#include "aquaclear/errors.hpp"

namespace aqua {

namespace {

// Second derivatives of the natural cubic spline through (x, y), n >= 3.
// Thomas-algorithm elimination; u is scratch of size n.
void spline_second_derivs(const double* x, const double* y, int n, double* d2,
                          double* u) {
  d2[0] = 0.0;
  u[0] = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    const double sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
    const double p = sig * d2[i - 1] + 2.0;
    d2[i] = (sig - 1.0) / p;
    double un = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) -
                (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    u[i] = (6.0 * un / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
  }
  d2[n - 1] = 0.0;
  for (int k = n - 2; k >= 1; --k) d2[k] = d2[k] * d2[k + 1] + u[k];
}

void check_grid(const std::vector<double>& g, const char* name) {
  if (g.size() < 4) throw SpecError(name, "grid needs at least 4 knots");
  for (size_t i = 0; i + 1 < g.size(); ++i)
    if (!(g[i] < g[i + 1])) throw SpecError(name, "grid must be strictly increasing");
}

int find_cell(const std::vector<double>& g, double x) {
  // Largest i with g[i] <= x, clamped to [0, n-2].
  const int n = static_cast<int>(g.size());
  int i = static_cast<int>(std::upper_bound(g.begin(), g.end(), x) - g.begin()) - 1;
  return std::clamp(i, 0, n - 2);
}

inline double eval_cell(double t0, double t1, double v0, double v1, double m0,
                        double m1, double t) {
  const double h = t1 - t0;
  const double A = (t1 - t) / h;
  const double B = 1.0 - A;
  return A * v0 + B * v1 +
         ((A * A * A - A) * m0 + (B * B * B - B) * m1) * (h * h) / 6.0;
}

}  // namespace

ValueCurve ValueCurve::fit(std::vector<double> grid, std::vector<double> values) {
  check_grid(grid, "curve.grid");
  if (grid.size() != values.size())
    throw DimensionMismatch("curve.values", "one value per knot");
  for (double v : values)
    if (!std::isfinite(v)) throw NonFiniteValue("curve.values", "must be finite");

  ValueCurve c;
  const int n = static_cast<int>(grid.size());
  c.x_ = std::move(grid);
  c.y_ = std::move(values);
  c.d2_.assign(n, 0.0);
  std::vector<double> u(n, 0.0);
  spline_second_derivs(c.x_.data(), c.y_.data(), n, c.d2_.data(), u.data());
  return c;
}

double ValueCurve::eval(double x) const {
  x = std::clamp(x, x_.front(), x_.back());
  const int i = find_cell(x_, x);
  return eval_cell(x_[i], x_[i + 1], y_[i], y_[i + 1], d2_[i], d2_[i + 1], x);
}

ValueSurface ValueSurface::fit(std::vector<double> grid_x,
                               std::vector<double> grid_y,
                               std::vector<double> values) {
  check_grid(grid_x, "surface.grid_x");
  check_grid(grid_y, "surface.grid_y");
  const int nx = static_cast<int>(grid_x.size());
  const int ny = static_cast<int>(grid_y.size());
  if (static_cast<int>(values.size()) != nx * ny)
    throw DimensionMismatch("surface.values", "need grid_x * grid_y values");
  for (double v : values)
    if (!std::isfinite(v)) throw NonFiniteValue("surface.values", "must be finite");

  ValueSurface s;
  s.gx_ = std::move(grid_x);
  s.gy_ = std::move(grid_y);
  s.f_ = std::move(values);
  s.d2x_.assign(nx * ny, 0.0);
  s.d2y_.assign(nx * ny, 0.0);
  s.d2xy_.assign(nx * ny, 0.0);

  std::vector<double> col(nx), d2(std::max(nx, ny)), u(std::max(nx, ny));
  // Along x for each y-column.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) col[i] = s.f_[i * ny + j];
    spline_second_derivs(s.gx_.data(), col.data(), nx, d2.data(), u.data());
    for (int i = 0; i < nx; ++i) s.d2x_[i * ny + j] = d2[i];
  }
  // Along y for each x-row of f and of d2x.
  for (int i = 0; i < nx; ++i) {
    spline_second_derivs(s.gy_.data(), &s.f_[i * ny], ny, &s.d2y_[i * ny], u.data());
    spline_second_derivs(s.gy_.data(), &s.d2x_[i * ny], ny, &s.d2xy_[i * ny],
                         u.data());
  }
  return s;
}

double ValueSurface::eval(double x, double y) const {
  x = std::clamp(x, gx_.front(), gx_.back());
  y = std::clamp(y, gy_.front(), gy_.back());
  const int ny = static_cast<int>(gy_.size());
  const int i = find_cell(gx_, x);
  const int j = find_cell(gy_, y);

  const double y0 = gy_[j], y1 = gy_[j + 1];
  const int r0 = i * ny + j, r1 = (i + 1) * ny + j;
  const double fi = eval_cell(y0, y1, f_[r0], f_[r0 + 1], d2y_[r0], d2y_[r0 + 1], y);
  const double fi1 = eval_cell(y0, y1, f_[r1], f_[r1 + 1], d2y_[r1], d2y_[r1 + 1], y);
  const double mi =
      eval_cell(y0, y1, d2x_[r0], d2x_[r0 + 1], d2xy_[r0], d2xy_[r0 + 1], y);
  const double mi1 =
      eval_cell(y0, y1, d2x_[r1], d2x_[r1 + 1], d2xy_[r1], d2xy_[r1 + 1], y);
  return eval_cell(gx_[i], gx_[i + 1], fi, fi1, mi, mi1, x);
}

}  // namespace aqua
