#pragma once

#include <cmath>
#include <utility>

namespace aqua {

struct BrentResult {
  double x = 0.0;
  double f = 0.0;
  int evals = 0;
};

// Brent's method for maximizing a unimodal function on [lo, hi].
// Golden-section steps with parabolic acceleration; terminates when the
// bracketing interval around the maximizer shrinks below xatol.
template <typename F>
BrentResult brent_maximize(F&& fn, double lo, double hi, double xatol = 1e-7,
                           int max_iter = 200) {
  const double golden = 0.3819660112501051;  // 2 - phi
  double a = lo, b = hi;
  double x = a + golden * (b - a);
  double w = x, v = x;
  double fx = fn(x);
  int evals = 1;
  double fw = fx, fv = fx;
  double d = 0.0, e = 0.0;

  for (int it = 0; it < max_iter; ++it) {
    double m = 0.5 * (a + b);
    double tol = xatol;
    if (std::abs(x - m) <= 2.0 * tol - 0.5 * (b - a)) break;

    bool parabolic = false;
    if (std::abs(e) > tol) {
      // Fit parabola through (v,fv), (w,fw), (x,fx).
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      double etmp = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * etmp) && p > q * (a - x) &&
          p < q * (b - x)) {
        d = p / q;
        double u = x + d;
        if (u - a < 2.0 * tol || b - u < 2.0 * tol)
          d = (m > x) ? tol : -tol;
        parabolic = true;
      }
    }
    if (!parabolic) {
      e = (x < m) ? b - x : a - x;
      d = golden * e;
    }
    double u = (std::abs(d) >= tol) ? x + d : x + (d > 0 ? tol : -tol);
    double fu = fn(u);
    ++evals;

    if (fu >= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu >= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu >= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx, evals};
}

}  // namespace aqua
