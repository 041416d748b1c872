#ifndef SSCI_BRENT_HPP
#define SSCI_BRENT_HPP

#include <cmath>
#include <utility>

namespace ssci {

template <class T>
struct MinResult {
  double x;
  double f;
  int evaluations;
};

/// Brent's bracketed scalar minimization (golden section with parabolic
/// interpolation), absolute interval tolerance tol_x.
template <class F>
MinResult<double> brent_minimize(F&& f, double lo, double hi, double tol_x,
                                 int max_iter = 200) {
  constexpr double golden = 0.3819660112501051;
  double a = lo, b = hi;
  double x = a + golden * (b - a);
  double w = x, v = x;
  double fx = f(x);
  double fw = fx, fv = fx;
  int evals = 1;
  double d = 0.0, e = 0.0;

  for (int iter = 0; iter < max_iter; ++iter) {
    double xm = 0.5 * (a + b);
    double tol1 = 1e-12 * std::fabs(x) + tol_x / 3.0;
    double tol2 = 2.0 * tol1;
    if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a)) break;

    bool use_golden = true;
    if (std::fabs(e) > tol1) {
      // Parabolic fit through x, v, w.
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      double etemp = e;
      e = d;
      if (std::fabs(p) < std::fabs(0.5 * q * etemp) && p > q * (a - x) &&
          p < q * (b - x)) {
        d = p / q;
        double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm >= x) ? tol1 : -tol1;
        use_golden = false;
      }
    }
    if (use_golden) {
      e = (x >= xm) ? a - x : b - x;
      d = golden * e;
    }
    double u = (std::fabs(d) >= tol1) ? x + d : x + ((d >= 0.0) ? tol1 : -tol1);
    double fu = f(u);
    ++evals;
    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx, evals};
}

}  // namespace ssci

#endif  // SSCI_BRENT_HPP
