#ifndef SSCI_MULTIVARIATE_BOUND_HPP
#define SSCI_MULTIVARIATE_BOUND_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssci/brent.hpp"
#include "ssci/special_functions.hpp"

namespace ssci {

inline constexpr double pi = 3.14159265358979323846;

struct BoundConstants {
  double c_simple;   // 3.85 * alpha^(-1/p)
  double c_refined;  // sqrt(2 e^2 a) * alpha^(-1/p)
  double a;          // inflation factor, in (1, 1.00086]
};

/// The norm-bound constant chain: a(p) = 1/(1 - exp(1 - 2 pi e^{p/4})),
/// c^2 = 2 e^2 alpha^{-2/p} a, and the rounded-up simple constant 3.85.
inline BoundConstants bound_constant(int p, double alpha) {
  if (p < 1) throw std::domain_error("bound_constant: p must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("bound_constant: alpha must be in (0,1)");
  const double a = 1.0 / (1.0 - std::exp(1.0 - 2.0 * pi * std::exp(p / 4.0)));
  const double scale = std::pow(alpha, -1.0 / p);
  return {3.85 * scale, std::exp(1.0) * std::sqrt(2.0 * a) * scale, a};
}

struct SeriesBound {
  double value;       // may exceed 1; a bound, not a probability
  bool exceeds_one;
};

/// Closed-form series bound on the miss probability,
/// (1/2pi) (2 e^{3/2} / c^2)^{p/2} (1 - log(1 - 2 e^2 / c^2)).
/// delta is already eliminated (the bound is the envelope over delta),
/// so the parameter is accepted for interface symmetry but unused.
inline SeriesBound miss_prob_series_bound(int p, double /*delta*/, double c) {
  if (p < 1) throw std::domain_error("miss_prob_series_bound: p must be >= 1");
  const double two_e2 = 2.0 * std::exp(2.0);
  if (!(c * c > two_e2))
    throw std::domain_error("miss_prob_series_bound: requires c^2 > 2 e^2");
  const double u = two_e2 / (c * c);
  const double value = (1.0 / (2.0 * pi)) *
                       std::pow(2.0 * std::exp(1.5) / (c * c), 0.5 * p) *
                       (1.0 - std::log1p(-u));
  return {value, value > 1.0};
}

/// Exact miss probability in the spherical case (Sigma = I scaled):
/// P{ chi'^2_p(2 delta) <= 2 delta / c^2 } with delta = ||nu||^2 / 2.
inline double exact_miss_prob_spherical(int p, double delta, double c) {
  if (p < 1) throw std::domain_error("exact_miss_prob_spherical: p must be >= 1");
  if (!(delta >= 0.0))
    throw std::domain_error("exact_miss_prob_spherical: delta must be >= 0");
  if (!(c > 0.0)) throw std::domain_error("exact_miss_prob_spherical: c must be > 0");
  if (delta == 0.0) return 0.0;
  return noncentral_chisq_cdf(2.0 * delta / (c * c), static_cast<double>(p),
                              2.0 * delta);
}

struct WorstCase {
  double worst_delta;
  double worst_miss;
};

/// Geometric default grid for the worst-case scan over delta.
inline std::vector<double> default_delta_grid() {
  std::vector<double> g;
  g.reserve(200);
  const double lo = 1e-4, hi = 1e3;
  for (int i = 0; i < 200; ++i)
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / 199.0));
  return g;
}

/// Grid argmax of the exact spherical miss probability followed by a
/// Brent polish on the bracketing cell.  Ties break to the smallest delta.
inline WorstCase worst_case_search(int p, double c,
                                   std::vector<double> delta_grid) {
  if (delta_grid.empty())
    throw std::invalid_argument("worst_case_search: empty delta grid");
  std::sort(delta_grid.begin(), delta_grid.end());

  std::size_t best_i = 0;
  double best_v = -1.0;
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    const double v = exact_miss_prob_spherical(p, delta_grid[i], c);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }

  const double lo = delta_grid[best_i == 0 ? 0 : best_i - 1];
  const double hi = delta_grid[std::min(best_i + 1, delta_grid.size() - 1)];
  WorstCase out{delta_grid[best_i], best_v};
  if (hi > lo) {
    auto neg = [p, c](double d) { return -exact_miss_prob_spherical(p, d, c); };
    auto m = brent_minimize(neg, lo, hi, 1e-10 * (1.0 + hi));
    if (-m.f > out.worst_miss) {
      out.worst_delta = m.x;
      out.worst_miss = -m.f;
    }
  }
  return out;
}

struct MvBoundReport {
  int p = 1;
  double alpha = 0.0;
  double c_simple = 0.0;
  double c_refined = 0.0;
  double a = 0.0;
  double worst_miss = 0.0;
  double worst_delta = 0.0;
};

/// Constants plus the worst-case spherical miss probability at c_simple.
inline MvBoundReport mv_bound_report(int p, double alpha) {
  const auto bc = bound_constant(p, alpha);
  const auto wc = worst_case_search(p, bc.c_simple, default_delta_grid());
  return {p, alpha, bc.c_simple, bc.c_refined, bc.a, wc.worst_miss,
          wc.worst_delta};
}

}  // namespace ssci

#endif  // SSCI_MULTIVARIATE_BOUND_HPP
