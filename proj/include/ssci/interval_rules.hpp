#ifndef SSCI_INTERVAL_RULES_HPP
#define SSCI_INTERVAL_RULES_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ssci/brent.hpp"
#include "ssci/special_functions.hpp"

namespace ssci {

/// Scale-sign invariant interval rule [c1*X, c2*X] (reversed for X < 0),
/// or the empty rule phi.  [0,0] normalizes to the empty rule.
class IntervalRule {
 public:
  static IntervalRule empty() { return IntervalRule(); }

  static IntervalRule proper(double c1, double c2) {
    if (c1 == 0.0 && c2 == 0.0) return empty();
    if (!(std::isfinite(c1) && std::isfinite(c2)))
      throw std::invalid_argument("IntervalRule: endpoints must be finite");
    if (!(c1 < c2))
      throw std::invalid_argument("IntervalRule: requires c1 < c2");
    IntervalRule r;
    r.empty_ = false;
    r.c1_ = c1;
    r.c2_ = c2;
    return r;
  }

  bool is_empty() const { return empty_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double length() const { return empty_ ? 0.0 : c2_ - c1_; }

 private:
  IntervalRule() = default;
  bool empty_ = true;
  double c1_ = 0.0;
  double c2_ = 0.0;
};

/// Finite probability mixture of interval rules (at most 8 components).
class MixtureRule {
 public:
  struct Component {
    IntervalRule rule;
    double weight;
  };

  explicit MixtureRule(std::vector<Component> components)
      : components_(std::move(components)) {
    if (components_.empty())
      throw std::invalid_argument("MixtureRule: needs at least one component");
    if (components_.size() > 8)
      throw std::invalid_argument("MixtureRule: at most 8 components");
    double sum = 0.0;
    for (const auto& c : components_) {
      if (!(c.weight > 0.0))
        throw std::invalid_argument("MixtureRule: weights must be positive");
      sum += c.weight;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("MixtureRule: weights must sum to 1");
  }

  const std::vector<Component>& components() const { return components_; }

 private:
  std::vector<Component> components_;
};

namespace detail {

// Endpoint reciprocals with the limit conventions c1 up to 0 (1/c1 -> -inf)
// and c2 down to 0 (1/c2 -> +inf).
inline double inv_lower(double c) {
  return c == 0.0 ? -std::numeric_limits<double>::infinity() : 1.0 / c;
}
inline double inv_upper(double c) {
  return c == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / c;
}

}  // namespace detail

/// Exact coverage probability of an interval rule at noncentrality lambda.
///
/// P = Phi(|l|(1 - 1/c2)) - Phi(|l|(1 - 1/c1)) + 1{c1 <= 0 <= c2},
/// derived from the defining event; depends on lambda only through |lambda|.
/// At lambda = 0 exactly, the event is the indicator that 0 is interior.
inline double coverage(double lambda, const IntervalRule& rule) {
  if (std::isnan(lambda)) throw std::domain_error("coverage: NaN lambda");
  if (rule.is_empty()) return 0.0;
  const bool contains_zero = rule.c1() <= 0.0 && 0.0 <= rule.c2();
  if (lambda == 0.0) return contains_zero ? 1.0 : 0.0;
  const double al = std::fabs(lambda);
  const double upper_arg = al * (1.0 - detail::inv_upper(rule.c2()));
  const double lower_arg = al * (1.0 - detail::inv_lower(rule.c1()));
  // With the indicator present, Phi(u) - Phi(l) + 1 = Phi(u) + Phi(-l);
  // the latter form keeps tail mass that the subtraction would cancel.
  if (contains_zero)
    return std_normal_cdf(upper_arg) + std_normal_cdf(-lower_arg);
  return std_normal_cdf(upper_arg) - std_normal_cdf(lower_arg);
}

inline double coverage_mixture(double lambda, const MixtureRule& mix) {
  double sum = 0.0;
  for (const auto& c : mix.components()) sum += c.weight * coverage(lambda, c.rule);
  return sum;
}

inline double expected_length(const MixtureRule& mix) {
  double sum = 0.0;
  for (const auto& c : mix.components()) sum += c.weight * c.rule.length();
  return sum;
}

/// d/dlambda of coverage_mixture for lambda > 0.  Terms whose Phi argument
/// coefficient is infinite (zero endpoint) are constant in lambda and
/// contribute 0.
inline double coverage_dlambda(double lambda, const MixtureRule& mix) {
  if (!(lambda > 0.0))
    throw std::domain_error("coverage_dlambda: requires lambda > 0");
  auto term = [lambda](double d) {
    if (std::isinf(d)) return 0.0;
    return d * std_normal_pdf(lambda * d);
  };
  double sum = 0.0;
  for (const auto& c : mix.components()) {
    if (c.rule.is_empty()) continue;
    const double du = 1.0 - detail::inv_upper(c.rule.c2());
    const double dl = 1.0 - detail::inv_lower(c.rule.c1());
    sum += c.weight * (term(du) - term(dl));
  }
  return sum;
}

/// Roots in c of the second-derivative factor l^2/c^2 - l^2/c - 2:
/// a1 = 1/t- < 0 and a2 = 1/t+ with t-+ = (1 -+ sqrt(1 + 8/l^2))/2.
struct InflectionPoints {
  double a1;
  double a2;
};

inline InflectionPoints inflection_points(double lambda) {
  if (!(lambda > 0.0))
    throw std::domain_error("inflection_points: requires lambda > 0");
  const double s = std::sqrt(1.0 + 8.0 / (lambda * lambda));
  const double t_minus = 0.5 * (1.0 - s);
  const double t_plus = 0.5 * (1.0 + s);
  return {1.0 / t_minus, 1.0 / t_plus};
}

enum class LimitPoint { zero_plus, infinity };

/// Closed-form limit of coverage_mixture as lambda -> 0+ or lambda -> inf.
inline double coverage_limit(const MixtureRule& mix, LimitPoint at) {
  double sum = 0.0;
  for (const auto& comp : mix.components()) {
    if (comp.rule.is_empty()) continue;
    const double c1 = comp.rule.c1();
    const double c2 = comp.rule.c2();
    const double ind = (c1 <= 0.0 && 0.0 <= c2) ? 1.0 : 0.0;
    double val;
    if (at == LimitPoint::zero_plus) {
      // Each Phi argument -> 0 unless the endpoint is exactly 0.
      const double upper = (c2 == 0.0) ? 0.0 : 0.5;
      const double lower = (c1 == 0.0) ? 1.0 : 0.5;
      val = upper - lower + ind;
    } else {
      auto step = [](double coef) {
        if (coef > 0.0) return 1.0;
        if (coef < 0.0) return 0.0;
        return 0.5;
      };
      const double upper = step(1.0 - detail::inv_upper(c2));
      const double lower = step(1.0 - detail::inv_lower(c1));
      val = upper - lower + ind;
    }
    sum += comp.weight * val;
  }
  return sum;
}

/// Sentinel for a minimum attained only in the lambda -> infinity limit.
inline constexpr double at_infinity = std::numeric_limits<double>::infinity();

struct LambdaMin {
  double lambda_star;             // argmin, or at_infinity
  double min_coverage;
  double derivative_bound_lambda; // lambda with positive derivative, or inf
  int evaluations;
};

/// Infimum of coverage_mixture over lambda in (0, inf).
///
/// Candidates: the lambda -> 0+ limit, a Brent minimization over
/// (1e-8, lambda_up], and the lambda -> inf limit when no finite upper
/// bound is found.  lambda_up is the first integer 2, 3, ... <= 1000 where
/// the lambda-derivative is positive.  Flat objectives report the left
/// bracket end as lambda_star.
inline LambdaMin min_coverage(const MixtureRule& mix, double tol) {
  if (!(tol > 0.0 && tol < 1e-3))
    throw std::domain_error("min_coverage: tol must be in (0, 1e-3)");
  constexpr double eps = 1e-8;

  int evals = 0;
  double lambda_up = at_infinity;
  for (double lam = 2.0; lam <= 1000.0; lam += 1.0) {
    ++evals;
    if (coverage_dlambda(lam, mix) > 0.0) {
      lambda_up = lam;
      break;
    }
  }

  LambdaMin result;
  result.lambda_star = eps;
  result.min_coverage = coverage_limit(mix, LimitPoint::zero_plus);
  result.derivative_bound_lambda = lambda_up;

  if (std::isfinite(lambda_up)) {
    auto obj = [&mix](double lam) { return coverage_mixture(lam, mix); };
    auto m = brent_minimize(obj, eps, lambda_up, 1e-8);
    evals += m.evaluations;
    if (m.f < result.min_coverage) {
      result.lambda_star = m.x;
      result.min_coverage = m.f;
    }
  }
  // The infimum can sit at the lambda -> infinity limit even when the
  // derivative scan found a sign change (multimodal mixtures), so the
  // limit is always a candidate.
  const double lim_inf = coverage_limit(mix, LimitPoint::infinity);
  if (lim_inf < result.min_coverage) {
    result.lambda_star = at_infinity;
    result.min_coverage = lim_inf;
  }
  result.evaluations = evals;
  return result;
}

}  // namespace ssci

#endif  // SSCI_INTERVAL_RULES_HPP
