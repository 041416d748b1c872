#ifndef SSCI_TESTS_TEST_UTIL_HPP
#define SSCI_TESTS_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ssci/interval_rules.hpp"

namespace ssci::testutil {

// Positive endpoints too close to 1 give Phi-argument coefficients near 0
// and very slow lambda limits; snap them to exactly 1 (coefficient 0).
inline double snap(double c) {
  return (c > 0.85 && c < 1.15) ? 1.0 : c;
}

// Random interval rules spanning all sign patterns of (c1, c2), with
// |endpoint| >= 0.25 or exactly 0 so dense lambda grids resolve the
// coverage curvature.
inline IntervalRule random_rule(std::mt19937& gen) {
  std::uniform_int_distribution<int> pattern(0, 5);
  std::uniform_real_distribution<double> mag(0.25, 3.0);
  switch (pattern(gen)) {
    case 0:  // c1 < 0 < c2
      return IntervalRule::proper(-mag(gen), snap(mag(gen)));
    case 1:  // 0 = c1 < c2
      return IntervalRule::proper(0.0, snap(mag(gen)));
    case 2: {  // 0 < c1 < c2
      double a = snap(mag(gen));
      double b = snap(mag(gen));
      if (a > b) std::swap(a, b);
      if (a == b) b = a + 1.0;
      return IntervalRule::proper(a, b);
    }
    case 3: {  // c1 < c2 < 0
      double a = -mag(gen), b = -mag(gen);
      return IntervalRule::proper(std::min(a, b) - 0.01, std::max(a, b));
    }
    case 4:  // c1 < c2 = 0
      return IntervalRule::proper(-mag(gen), 0.0);
    default:
      return IntervalRule::empty();
  }
}

inline MixtureRule random_mixture(std::mt19937& gen) {
  std::uniform_int_distribution<int> ncomp(1, 2);
  std::uniform_real_distribution<double> wdist(0.1, 1.0);
  const int n = ncomp(gen);
  std::vector<MixtureRule::Component> comps;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double w = wdist(gen);
    comps.push_back({random_rule(gen), w});
    total += w;
  }
  for (auto& c : comps) c.weight /= total;
  // Renormalize exactly.
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < comps.size(); ++i) sum += comps[i].weight;
  comps.back().weight = 1.0 - sum;
  return MixtureRule(std::move(comps));
}

// Dense lambda-grid oracle for the minimal coverage over lambda > 0.
inline double dense_grid_min_coverage(const MixtureRule& mix, double lam_max = 80.0,
                                      double step = 1e-3) {
  double best = coverage_limit(mix, LimitPoint::zero_plus);
  for (double lam = step; lam <= lam_max; lam += step) {
    best = std::min(best, coverage_mixture(lam, mix));
  }
  return best;
}

}  // namespace ssci::testutil

#endif  // SSCI_TESTS_TEST_UTIL_HPP
