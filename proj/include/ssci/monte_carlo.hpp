#ifndef SSCI_MONTE_CARLO_HPP
#define SSCI_MONTE_CARLO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ssci/interval_rules.hpp"
#include "ssci/rng.hpp"

namespace ssci {

/// Seed, replication count and substream split for a simulation run.
/// Results depend only on (seed, n, streams), never on scheduling.
struct SimConfig {
  std::uint64_t seed = 0;
  std::int64_t n = 1;
  int streams = 1;
};

struct SimEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
};

namespace detail {

inline void check_config(const SimConfig& cfg) {
  if (cfg.n < 1) throw std::domain_error("SimConfig: n must be >= 1");
  if (cfg.streams < 1) throw std::domain_error("SimConfig: streams must be >= 1");
}

// Replication range [begin, end) handled by substream s.
inline std::pair<std::int64_t, std::int64_t> stream_range(const SimConfig& cfg,
                                                          int s) {
  const std::int64_t lo = cfg.n * s / cfg.streams;
  const std::int64_t hi = cfg.n * (s + 1) / cfg.streams;
  return {lo, hi};
}

inline SimEstimate from_hits(std::int64_t hits, std::int64_t n) {
  const double est = static_cast<double>(hits) / static_cast<double>(n);
  return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(n)),
          n};
}

// The defining coverage event: c1 X <= mu <= c2 X for X > 0, reversed
// for X < 0.
inline bool covers(const IntervalRule& r, double x, double mu) {
  if (r.is_empty()) return false;
  if (x > 0.0) return r.c1() * x <= mu && mu <= r.c2() * x;
  if (x < 0.0) return r.c2() * x <= mu && mu <= r.c1() * x;
  return mu == 0.0;
}

}  // namespace detail

/// Hit fraction of the invariant-interval coverage event with
/// X ~ Normal(lambda, 1) and the component drawn by mixture weight.
/// Each replication consumes exactly two uniforms (X, then component),
/// so runs with the same seed are pathwise coupled across rules.
inline SimEstimate simulate_univariate(const MixtureRule& mix, double lambda,
                                       const SimConfig& cfg) {
  detail::check_config(cfg);
  const auto& comps = mix.components();
  std::int64_t hits = 0;
  for (int s = 0; s < cfg.streams; ++s) {
    auto [lo, hi] = detail::stream_range(cfg, s);
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(s));
    for (std::int64_t i = lo; i < hi; ++i) {
      const double x = lambda + rng.next_normal();
      const double u = rng.next_uniform();
      double cum = 0.0;
      const IntervalRule* rule = &comps.back().rule;
      for (const auto& c : comps) {
        cum += c.weight;
        if (u <= cum) {
          rule = &c.rule;
          break;
        }
      }
      if (detail::covers(*rule, x, lambda)) ++hits;
    }
  }
  return detail::from_hits(hits, cfg.n);
}

/// Fraction of {||mu|| <= c ||X||} with independent coordinates
/// X_i ~ Normal(mu_i, sigma_eigs_i).
inline SimEstimate simulate_multivariate(const std::vector<double>& mu,
                                         const std::vector<double>& sigma_eigs,
                                         double c, const SimConfig& cfg) {
  detail::check_config(cfg);
  if (mu.size() != sigma_eigs.size() || mu.empty())
    throw std::invalid_argument("simulate_multivariate: dimension mismatch");
  for (double e : sigma_eigs)
    if (!(e > 0.0))
      throw std::domain_error("simulate_multivariate: eigenvalues must be > 0");
  if (!(c > 0.0)) throw std::domain_error("simulate_multivariate: c must be > 0");

  std::vector<double> sd(sigma_eigs.size());
  std::transform(sigma_eigs.begin(), sigma_eigs.end(), sd.begin(),
                 [](double e) { return std::sqrt(e); });
  double mu_norm2 = 0.0;
  for (double m : mu) mu_norm2 += m * m;

  std::int64_t hits = 0;
  for (int s = 0; s < cfg.streams; ++s) {
    auto [lo, hi] = detail::stream_range(cfg, s);
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(s));
    for (std::int64_t i = lo; i < hi; ++i) {
      double x_norm2 = 0.0;
      for (std::size_t j = 0; j < mu.size(); ++j) {
        const double x = mu[j] + sd[j] * rng.next_normal();
        x_norm2 += x * x;
      }
      if (mu_norm2 <= c * c * x_norm2) ++hits;
    }
  }
  return detail::from_hits(hits, cfg.n);
}

/// Sorted sample of sum_i lambda_i Y_i^2 with Y_i ~ Normal(nu_i, 1),
/// exposed as an empirical CDF for distributional tests.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples)
      : samples_(std::move(samples)) {
    std::sort(samples_.begin(), samples_.end());
  }

  double operator()(double x) const {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(it - samples_.begin()) /
           static_cast<double>(samples_.size());
  }

  const std::vector<double>& sorted_samples() const { return samples_; }

 private:
  std::vector<double> samples_;
};

inline EmpiricalCdf sample_weighted_chisq(const std::vector<double>& lambdas,
                                          const std::vector<double>& nus,
                                          const SimConfig& cfg) {
  detail::check_config(cfg);
  if (lambdas.size() != nus.size() || lambdas.empty())
    throw std::invalid_argument("sample_weighted_chisq: dimension mismatch");
  for (double l : lambdas)
    if (!(l >= 1.0))
      throw std::domain_error("sample_weighted_chisq: weights must be >= 1");

  std::vector<double> samples(static_cast<std::size_t>(cfg.n));
  for (int s = 0; s < cfg.streams; ++s) {
    auto [lo, hi] = detail::stream_range(cfg, s);
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(s));
    for (std::int64_t i = lo; i < hi; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < lambdas.size(); ++j) {
        const double y = nus[j] + rng.next_normal();
        sum += lambdas[j] * y * y;
      }
      samples[static_cast<std::size_t>(i)] = sum;
    }
  }
  return EmpiricalCdf(std::move(samples));
}

}  // namespace ssci

#endif  // SSCI_MONTE_CARLO_HPP
