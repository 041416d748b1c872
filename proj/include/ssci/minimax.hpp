#ifndef SSCI_MINIMAX_HPP
#define SSCI_MINIMAX_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ssci/interval_rules.hpp"

namespace ssci {

/// Candidate two-point mixture families.  The enumerator order is the
/// tie-break order: on equal values Case2 wins, then Case1, Case3, Case7.
enum class CaseId { case2, case1, case3, case7, small_h };

inline const char* case_name(CaseId c) {
  switch (c) {
    case CaseId::case1: return "CASE1";
    case CaseId::case2: return "CASE2";
    case CaseId::case3: return "CASE3";
    case CaseId::case7: return "CASE7";
    case CaseId::small_h: return "SMALL_H";
  }
  return "?";
}

/// Free parameters of a candidate family.  a1 is the second (less
/// negative) lower endpoint; unused coordinates are fixed at 0.
struct CandidateParams {
  double c1 = 0.0;
  double a1 = 0.0;
  double p = 0.0;
};

struct OptimResult {
  double h = 0.0;
  CaseId case_id = CaseId::small_h;
  CandidateParams params;
  double c2 = 0.0;
  double min_coverage = 0.0;
  double lambda_star = 0.0;
  bool converged = false;
  long evaluations = 0;
};

/// The upper endpoint that closes the mixture's expected length to h.
inline double close_length(CaseId case_id, const CandidateParams& params, double h) {
  if (!(h > 0.0)) throw std::domain_error("close_length: h must be > 0");
  const double p = params.p;
  auto need_p_below_1 = [p] {
    if (p == 1.0)
      throw std::domain_error("close_length: p = 1 is infeasible for this case");
  };
  switch (case_id) {
    case CaseId::case2:
      return h + p * params.c1 + (1.0 - p) * params.a1;
    case CaseId::case7:
      need_p_below_1();
      return params.c1 + h / (1.0 - p);
    case CaseId::case1:
      need_p_below_1();
      return params.c1 + (h - p * (1.0 - params.a1)) / (1.0 - p);
    case CaseId::case3:
      need_p_below_1();
      return (h - p * (1.0 - params.a1)) / (1.0 - p);
    case CaseId::small_h:
      return 1.0;
  }
  throw std::logic_error("close_length: unknown case");
}

/// Constraint set of a case at a given closed c2.
inline bool feasible(CaseId case_id, const CandidateParams& params, double c2) {
  if (!(c2 > 1.0)) return false;
  const double c1 = params.c1;
  const double a1 = params.a1;
  switch (case_id) {
    case CaseId::case2:
      return -c2 < c1 && c1 < a1 && a1 < 0.0;
    case CaseId::case1:
      return -c2 < c1 && c1 < 0.0 && -1.0 <= a1 && a1 < 0.0;
    case CaseId::case3:
      return -c2 < a1 && a1 < 0.0;
    case CaseId::case7:
      return -c2 < c1 && c1 < 0.0;
    case CaseId::small_h:
      return true;
  }
  return false;
}

/// Assemble the case's mixture at expected length h.  Zero-weight
/// components are dropped, so p = 0 and p = 1 give degenerate
/// single-interval rules.
inline MixtureRule build_mixture(CaseId case_id, const CandidateParams& params,
                                 double h) {
  if (case_id == CaseId::small_h) {
    if (!(h > 0.0 && h <= 1.0))
      throw std::domain_error("build_mixture: SMALL_H needs 0 < h <= 1");
    std::vector<MixtureRule::Component> comps;
    comps.push_back({IntervalRule::proper(0.0, 1.0), h});
    if (h < 1.0) comps.push_back({IntervalRule::empty(), 1.0 - h});
    return MixtureRule(std::move(comps));
  }

  const double c2 = close_length(case_id, params, h);
  if (!feasible(case_id, params, c2))
    throw std::invalid_argument("build_mixture: infeasible parameters");
  const double p = params.p;

  auto two_point = [](IntervalRule first, double w, IntervalRule second) {
    std::vector<MixtureRule::Component> comps;
    if (w > 0.0) comps.push_back({first, w});
    if (w < 1.0) comps.push_back({second, 1.0 - w});
    return MixtureRule(std::move(comps));
  };

  switch (case_id) {
    case CaseId::case1:
      return two_point(IntervalRule::proper(params.a1, 1.0), p,
                       IntervalRule::proper(params.c1, c2));
    case CaseId::case2:
      return two_point(IntervalRule::proper(params.c1, c2), p,
                       IntervalRule::proper(params.a1, c2));
    case CaseId::case3:
      return two_point(IntervalRule::proper(params.a1, 1.0), p,
                       IntervalRule::proper(0.0, c2));
    case CaseId::case7:
      return two_point(IntervalRule::empty(), p,
                       IntervalRule::proper(params.c1, c2));
    default:
      throw std::logic_error("build_mixture: unknown case");
  }
}

namespace detail {

inline constexpr double inner_tol = 1e-7;

// Lower-endpoint grid {-0.00001 - mesh*k : k = 0..200}, ascending.
inline std::vector<double> endpoint_grid(double mesh) {
  std::vector<double> g;
  g.reserve(201);
  for (int k = 200; k >= 0; --k) g.push_back(-0.00001 - mesh * k);
  return g;
}

// Probability grid {0, mesh, ..., < 1} with 0.99999 appended.
inline std::vector<double> probability_grid(double mesh) {
  std::vector<double> g;
  for (int k = 0;; ++k) {
    double p = mesh * k;
    if (p >= 1.0 - 0.5 * mesh) break;
    g.push_back(p);
  }
  g.push_back(0.99999);
  return g;
}

// Which of (c1, a1, p) a case actually varies.
inline std::array<bool, 3> active_dims(CaseId case_id) {
  switch (case_id) {
    case CaseId::case1:
    case CaseId::case2: return {true, true, true};
    case CaseId::case3: return {false, true, true};
    case CaseId::case7: return {true, false, true};
    default: return {false, false, false};
  }
}

// Objective: minimal coverage of the case's mixture, -1 when infeasible.
inline double case_objective(CaseId case_id, const CandidateParams& params,
                             double h, long& evaluations) {
  double c2;
  try {
    c2 = close_length(case_id, params, h);
  } catch (const std::domain_error&) {
    return -1.0;
  }
  if (!feasible(case_id, params, c2)) return -1.0;
  ++evaluations;
  return min_coverage(build_mixture(case_id, params, h), inner_tol).min_coverage;
}

// Deterministic compass (pattern) search maximizing f over a box.
// Step starts at step0, halves on failure, stops below step_min.
struct CompassResult {
  std::vector<double> x;
  double f;
  bool converged;
  long evaluations;
};

template <class F>
CompassResult compass_maximize(F&& f, std::vector<double> x,
                                  const std::vector<double>& lo,
                                  const std::vector<double>& hi,
                                  double step0 = 0.05, double step_min = 1e-7,
                                  long max_evals = 100000) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  double fx = f(x);
  long evals = 1;
  double step = step0;
  while (step >= step_min && evals < max_evals) {
    double best_f = fx;
    std::vector<double> best_x = x;
    for (std::size_t i = 0; i < n && evals < max_evals; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        std::vector<double> cand = x;
        cand[i] = std::clamp(cand[i] + sgn * step, lo[i], hi[i]);
        if (cand[i] == x[i]) continue;
        double fc = f(cand);
        ++evals;
        if (fc > best_f) {
          best_f = fc;
          best_x = cand;
        }
      }
    }
    if (best_f > fx) {
      fx = best_f;
      x = std::move(best_x);
    } else {
      step *= 0.5;
    }
  }
  return {std::move(x), fx, step < step_min, evals};
}

}  // namespace detail

struct GridResult {
  CandidateParams params;
  double value;
  long evaluations;
};

/// Exhaustive scan of the case's parameter grid.  Infeasible points are
/// skipped; ties break to the lexicographically smaller (c1, a1, p).
inline GridResult grid_search(CaseId case_id, double h, double mesh) {
  if (!(h > 1.0)) throw std::domain_error("grid_search: requires h > 1");
  if (!(mesh > 0.0)) throw std::domain_error("grid_search: mesh must be > 0");
  const auto active = detail::active_dims(case_id);
  const auto eg = detail::endpoint_grid(mesh);
  const auto pg = detail::probability_grid(mesh);
  const std::vector<double> zero{0.0};

  const auto& c1s = active[0] ? eg : zero;
  const auto& a1s = active[1] ? eg : zero;

  GridResult best{{}, -1.0, 0};
  bool found = false;
  for (double c1 : c1s) {
    for (double a1 : a1s) {
      for (double p : pg) {
        CandidateParams params{c1, a1, p};
        double v = detail::case_objective(case_id, params, h, best.evaluations);
        if (v < 0.0) continue;
        if (!found || v > best.value) {
          best.params = params;
          best.value = v;
          found = true;
        }
      }
    }
  }
  if (!found) throw std::runtime_error("grid_search: no feasible grid point");
  return best;
}

/// Box-constrained compass-search refinement around a grid seed.  The box
/// is start +- radius clipped to the feasibility region (endpoints capped
/// at -1e-6, p at 0.999999, lower caps from the seed's closed c2).
inline OptimResult refine(CaseId case_id, double h, const CandidateParams& start,
                          double radius) {
  if (!(radius > 0.0)) throw std::domain_error("refine: radius must be > 0");
  const double c2_seed = close_length(case_id, start, h);
  if (!feasible(case_id, start, c2_seed))
    throw std::invalid_argument("refine: start must be feasible");

  const auto active = detail::active_dims(case_id);
  std::vector<double> x, lo, hi;
  std::vector<int> dim_index;  // maps search coords to (c1, a1, p)
  if (active[0]) {
    x.push_back(start.c1);
    lo.push_back(std::max(start.c1 - radius, -c2_seed));
    hi.push_back(std::min(start.c1 + radius, -1e-6));
    dim_index.push_back(0);
  }
  if (active[1]) {
    double low_cap = (case_id == CaseId::case2) ? start.c1
                     : (case_id == CaseId::case1) ? -1.0
                                                  : -c2_seed;
    x.push_back(start.a1);
    lo.push_back(std::max(start.a1 - radius, low_cap));
    hi.push_back(std::min(start.a1 + radius, -1e-6));
    dim_index.push_back(1);
  }
  x.push_back(start.p);
  lo.push_back(std::max(start.p - radius, 0.0));
  hi.push_back(std::min(start.p + radius, 0.999999));
  dim_index.push_back(2);

  long evaluations = 0;
  auto unpack = [&](const std::vector<double>& v) {
    CandidateParams params = start;
    for (std::size_t i = 0; i < v.size(); ++i) {
      switch (dim_index[i]) {
        case 0: params.c1 = v[i]; break;
        case 1: params.a1 = v[i]; break;
        case 2: params.p = v[i]; break;
      }
    }
    return params;
  };
  auto obj = [&](const std::vector<double>& v) {
    return detail::case_objective(case_id, unpack(v), h, evaluations);
  };

  auto res = detail::compass_maximize(obj, x, lo, hi);

  OptimResult out;
  out.h = h;
  out.case_id = case_id;
  out.params = unpack(res.x);
  out.c2 = close_length(case_id, out.params, h);
  out.min_coverage = res.f;
  out.converged = res.converged;
  out.evaluations = evaluations;
  out.lambda_star =
      min_coverage(build_mixture(case_id, out.params, h), detail::inner_tol)
          .lambda_star;
  return out;
}

/// Full max-min solve at expected length h: closed form for h <= 1, grid
/// search plus refinement over Cases 2, 1, 3, 7 otherwise.
inline OptimResult solve(double h, double mesh = 0.1) {
  if (!(h > 0.0)) throw std::domain_error("solve: h must be > 0");
  if (h <= 1.0) {
    OptimResult out;
    out.h = h;
    out.case_id = CaseId::small_h;
    out.params = CandidateParams{0.0, 0.0, h};
    out.c2 = 1.0;
    auto lm = min_coverage(build_mixture(CaseId::small_h, out.params, h),
                           detail::inner_tol);
    out.min_coverage = lm.min_coverage;
    out.lambda_star = lm.lambda_star;
    out.converged = true;
    out.evaluations = lm.evaluations;
    return out;
  }

  std::optional<OptimResult> best;
  for (CaseId case_id :
       {CaseId::case2, CaseId::case1, CaseId::case3, CaseId::case7}) {
    GridResult grid;
    try {
      grid = grid_search(case_id, h, mesh);
    } catch (const std::runtime_error&) {
      continue;  // no feasible grid point for this case
    }
    OptimResult refined = refine(case_id, h, grid.params, mesh);
    refined.evaluations += grid.evaluations;
    if (!best || refined.min_coverage > best->min_coverage) best = refined;
  }
  if (!best) throw std::runtime_error("solve: all cases infeasible");
  return *best;
}

struct SweepRow {
  double h = 0.0;
  bool ok = false;
  OptimResult result;
  std::string error;
};

/// solve() applied per h; per-h failures are recorded in the row.  Rows
/// keep input order; the optional thread count only partitions work.
inline std::vector<SweepRow> sweep(const std::vector<double>& h_values,
                                   double mesh, int threads = 1) {
  if (h_values.empty()) throw std::domain_error("sweep: empty h grid");
  std::vector<SweepRow> rows(h_values.size());
  auto run = [&](std::size_t i) {
    rows[i].h = h_values[i];
    try {
      rows[i].result = solve(h_values[i], mesh);
      rows[i].ok = true;
    } catch (const std::exception& e) {
      rows[i].ok = false;
      rows[i].error = e.what();
    }
  };
  if (threads <= 1 || h_values.size() == 1) {
    for (std::size_t i = 0; i < h_values.size(); ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    const int nt = std::min<std::size_t>(threads, h_values.size());
    for (int t = 0; t < nt; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < h_values.size(); i += nt) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace ssci

#endif  // SSCI_MINIMAX_HPP
