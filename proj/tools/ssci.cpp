// ssci: exact coverage, minimax mixture rules, and the multivariate
// norm-bound for single-observation normal confidence intervals.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ssci/interval_rules.hpp"
#include "ssci/minimax.hpp"
#include "ssci/monte_carlo.hpp"
#include "ssci/multivariate_bound.hpp"

namespace {

constexpr const char* tool_version = "0.1.0";

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_numeric = 3;

using ordered_json = nlohmann::ordered_json;

// Fixed 10-significant-digit decimal formatting so outputs are
// byte-stable across runs and thread counts.
std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

std::string fmt(long long x) { return std::to_string(x); }

struct OutputOptions {
  std::string format = "csv";
  std::string out_path;  // empty -> stdout
};

// One key=value manifest describing the resolved run parameters.
// Embedded as comment lines in CSV and as a "manifest" object in JSON.
using Manifest = std::vector<std::pair<std::string, std::string>>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void write_output(const OutputOptions& opts, const std::string& subcommand,
                  const Manifest& manifest, const Table& table) {
  std::ostringstream os;
  if (opts.format == "json") {
    ordered_json doc;
    ordered_json man;
    man["tool"] = "ssci";
    man["version"] = tool_version;
    man["subcommand"] = subcommand;
    for (const auto& [k, v] : manifest) man[k] = v;
    doc["manifest"] = man;
    ordered_json rows = ordered_json::array();
    for (const auto& r : table.rows) {
      ordered_json row;
      for (std::size_t i = 0; i < table.columns.size(); ++i)
        row[table.columns[i]] = r[i];
      rows.push_back(row);
    }
    doc["rows"] = rows;
    os << doc.dump(2) << "\n";
  } else {
    os << "# ssci " << tool_version << " " << subcommand << "\n# ";
    for (std::size_t i = 0; i < manifest.size(); ++i) {
      if (i) os << " ";
      os << manifest[i].first << "=" << manifest[i].second;
    }
    os << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) os << ",";
      os << table.columns[i];
    }
    os << "\n";
    for (const auto& r : table.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) os << ",";
        os << r[i];
      }
      os << "\n";
    }
  }
  if (opts.out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(opts.out_path, std::ios::binary);
    if (!f) throw CLI::ValidationError("--out", "cannot open output file");
    f << os.str();
  }
}

// Range syntax: a single value "x" or "start:stop:step" inclusive.
std::vector<double> parse_range(const std::string& text) {
  std::vector<double> out;
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) {
    out.push_back(std::stod(text));
    return out;
  }
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw CLI::ValidationError("range", "expected start:stop:step");
  const double start = std::stod(text.substr(0, c1));
  const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(text.substr(c2 + 1));
  if (!(step > 0.0)) throw CLI::ValidationError("range", "step must be > 0");
  for (double v = start; v <= stop + 1e-12; v += step) out.push_back(v);
  if (out.empty()) throw CLI::ValidationError("range", "empty range");
  return out;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<std::string> optim_columns() {
  return {"h",  "case",        "c1",           "a1",        "c2",
          "p",  "lambda_star", "min_coverage", "converged", "evaluations"};
}

std::vector<std::string> optim_row(const ssci::OptimResult& r) {
  return {fmt(r.h),
          ssci::case_name(r.case_id),
          fmt(r.params.c1),
          fmt(r.params.a1),
          fmt(r.c2),
          fmt(r.params.p),
          fmt(r.lambda_star),
          fmt(r.min_coverage),
          r.converged ? "true" : "false",
          fmt(static_cast<long long>(r.evaluations))};
}

// The 60-point (lambda, rule) arbitration grid: 5 noncentralities by 12
// rules spanning every sign pattern of (c1, c2).
struct GridRule {
  double c1, c2;
};

const std::vector<double>& verify_lambdas() {
  static const std::vector<double> v{0.25, 0.5, 1.0, 2.0, 4.0};
  return v;
}

const std::vector<GridRule>& verify_rules() {
  static const std::vector<GridRule> v{
      {-2.0, 2.0}, {-1.0, 2.0}, {-0.5, 1.0}, {0.0, 1.0},
      {0.0, 2.0},  {1.0, 3.0},  {0.5, 2.0},  {-2.0, -0.5},
      {-3.0, -1.0}, {-1.0, 0.0}, {-2.0, 0.0}, {1.5, 4.0}};
  return v;
}

int run_coverage(const OutputOptions& out, const std::string& lambda_text,
                 double c1, double c2, bool empty, bool mc_check,
                 std::uint64_t seed, long long n, int threads) {
  (void)threads;
  const auto lambdas = parse_range(lambda_text);
  const ssci::IntervalRule rule =
      empty ? ssci::IntervalRule::empty() : ssci::IntervalRule::proper(c1, c2);
  ssci::MixtureRule mix({{rule, 1.0}});

  Manifest man{{"lambda", lambda_text},
               {"c1", empty ? "empty" : fmt(c1)},
               {"c2", empty ? "empty" : fmt(c2)},
               {"mc_check", mc_check ? "true" : "false"}};
  if (mc_check) {
    man.push_back({"seed", std::to_string(seed)});
    man.push_back({"n", std::to_string(n)});
  }

  Table table;
  table.columns = {"lambda", "coverage"};
  if (mc_check) {
    table.columns.push_back("mc_estimate");
    table.columns.push_back("mc_se");
  }
  for (double lam : lambdas) {
    std::vector<std::string> row{fmt(lam), fmt(ssci::coverage(lam, rule))};
    if (mc_check) {
      auto est = ssci::simulate_univariate(mix, lam, {seed, n, 1});
      row.push_back(fmt(est.estimate));
      row.push_back(fmt(est.std_error));
    }
    table.rows.push_back(std::move(row));
  }
  write_output(out, "coverage", man, table);
  return exit_ok;
}

int run_optimize(const OutputOptions& out, double h, double mesh,
                 const std::string& case_restrict) {
  Manifest man{{"h", fmt(h)}, {"mesh", fmt(mesh)}, {"case", case_restrict.empty() ? "auto" : case_restrict}};
  Table table;
  table.columns = optim_columns();

  ssci::OptimResult res;
  if (case_restrict.empty() || h <= 1.0) {
    res = ssci::solve(h, mesh);
  } else {
    static const std::map<std::string, ssci::CaseId> names{
        {"CASE1", ssci::CaseId::case1},
        {"CASE2", ssci::CaseId::case2},
        {"CASE3", ssci::CaseId::case3},
        {"CASE7", ssci::CaseId::case7}};
    auto it = names.find(case_restrict);
    if (it == names.end())
      throw CLI::ValidationError("--case", "unknown case " + case_restrict);
    auto grid = ssci::grid_search(it->second, h, mesh);
    res = ssci::refine(it->second, h, grid.params, mesh);
    res.evaluations += grid.evaluations;
  }
  table.rows.push_back(optim_row(res));
  write_output(out, "optimize", man, table);
  return exit_ok;
}

int run_sweep(const OutputOptions& out, const std::string& h_grid, double mesh,
              int threads) {
  const auto hs = parse_range(h_grid);
  for (double h : hs)
    if (!(h > 0.0)) throw CLI::ValidationError("--h-grid", "h must be > 0");
  Manifest man{{"h_grid", h_grid},
               {"mesh", fmt(mesh)},
               {"threads", std::to_string(threads)}};
  auto rows = ssci::sweep(hs, mesh, threads);

  Table table;
  table.columns = optim_columns();
  bool any_ok = false;
  for (const auto& r : rows) {
    if (r.ok) {
      any_ok = true;
      table.rows.push_back(optim_row(r.result));
    } else {
      std::vector<std::string> row(table.columns.size(), "nan");
      row[0] = fmt(r.h);
      row[1] = "ERROR";
      table.rows.push_back(std::move(row));
    }
  }
  write_output(out, "sweep", man, table);
  return any_ok ? exit_ok : exit_numeric;
}

int run_verify_mc(const OutputOptions& out, std::uint64_t seed, long long n) {
  Manifest man{{"seed", std::to_string(seed)}, {"n", std::to_string(n)}};
  Table table;
  table.columns = {"lambda", "c1", "c2", "analytic", "mc_estimate", "mc_se", "ok"};
  bool all_ok = true;
  for (const auto& gr : verify_rules()) {
    const auto rule = ssci::IntervalRule::proper(gr.c1, gr.c2);
    ssci::MixtureRule mix({{rule, 1.0}});
    for (double lam : verify_lambdas()) {
      const double analytic = ssci::coverage(lam, rule);
      const auto est = ssci::simulate_univariate(mix, lam, {seed, n, 1});
      const bool ok =
          std::fabs(analytic - est.estimate) <= 4.0 * std::max(est.std_error, 1e-12);
      all_ok = all_ok && ok;
      table.rows.push_back({fmt(lam), fmt(gr.c1), fmt(gr.c2), fmt(analytic),
                            fmt(est.estimate), fmt(est.std_error),
                            ok ? "true" : "false"});
    }
  }
  write_output(out, "verify-mc", man, table);
  return all_ok ? exit_ok : exit_numeric;
}

Table mv_report_table(const ssci::MvBoundReport& rep) {
  Table table;
  table.columns = {"p", "alpha", "c_simple", "c_refined", "a", "worst_miss",
                   "worst_delta"};
  table.rows.push_back({fmt(static_cast<long long>(rep.p)), fmt(rep.alpha),
                        fmt(rep.c_simple), fmt(rep.c_refined), fmt(rep.a),
                        fmt(rep.worst_miss), fmt(rep.worst_delta)});
  return table;
}

int run_mv_bound(const OutputOptions& out, int p, double alpha) {
  const auto rep = ssci::mv_bound_report(p, alpha);
  Manifest man{{"p", std::to_string(p)}, {"alpha", fmt(alpha)}};
  write_output(out, "mv-bound", man, mv_report_table(rep));
  return exit_ok;
}

int run_mv_verify(const OutputOptions& out, int p, double alpha,
                  const std::string& mu_text, const std::string& eigs_text,
                  std::uint64_t seed, long long n) {
  const auto mu = parse_csv_doubles(mu_text);
  const auto eigs = parse_csv_doubles(eigs_text);
  if (static_cast<int>(mu.size()) != p || static_cast<int>(eigs.size()) != p)
    throw CLI::ValidationError("--mu/--sigma-eigs", "expected p entries");
  const auto rep = ssci::mv_bound_report(p, alpha);
  const auto est = ssci::simulate_multivariate(mu, eigs, rep.c_simple,
                                               {seed, n, 1});
  const bool ok = est.estimate >= 1.0 - alpha - 4.0 * est.std_error;

  Manifest man{{"p", std::to_string(p)},   {"alpha", fmt(alpha)},
               {"mu", mu_text},            {"sigma_eigs", eigs_text},
               {"seed", std::to_string(seed)}, {"n", std::to_string(n)}};
  Table table = mv_report_table(rep);
  table.columns.push_back("estimate");
  table.columns.push_back("std_error");
  table.columns.push_back("ok");
  table.rows[0].push_back(fmt(est.estimate));
  table.rows[0].push_back(fmt(est.std_error));
  table.rows[0].push_back(ok ? "true" : "false");
  write_output(out, "mv-verify", man, table);
  return ok ? exit_ok : exit_numeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-observation confidence intervals for a normal mean"};
  app.require_subcommand(1);

  OutputOptions out;
  std::uint64_t seed = 12345;
  int threads = 1;
  app.add_option("--format", out.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", out.out_path, "Output path (default stdout)");
  app.add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads for sweeps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // coverage
  auto* cov = app.add_subcommand("coverage", "Exact coverage of one rule");
  std::string lambda_text;
  double c1 = 0.0, c2 = 0.0;
  bool empty = false, mc_check = false;
  long long n = 1000000;
  cov->add_option("--lambda", lambda_text, "lambda value or start:stop:step")
      ->required();
  cov->add_option("--c1", c1, "Lower multiplier");
  cov->add_option("--c2", c2, "Upper multiplier");
  cov->add_flag("--empty", empty, "Use the empty rule");
  cov->add_flag("--mc-check", mc_check, "Append a Monte Carlo cross-check");
  cov->add_option("--n", n, "Monte Carlo replications")->check(CLI::PositiveNumber);

  // optimize
  auto* opt = app.add_subcommand("optimize", "Minimax rule at one length h");
  double h = 0.0, mesh = 0.1;
  std::string case_restrict;
  opt->set_help_flag("--help", "Print help");  // frees -h/--h for the length
  opt->add_option("--h", h, "Expected length")->required();
  opt->add_option("--mesh", mesh, "Grid mesh")->capture_default_str();
  opt->add_option("--case", case_restrict, "Restrict to CASE1/CASE2/CASE3/CASE7");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Minimax rules over a grid of h");
  std::string h_grid;
  double sweep_mesh = 0.1;
  swp->add_option("--h-grid", h_grid, "start:stop:step")->required();
  swp->add_option("--mesh", sweep_mesh, "Grid mesh")->capture_default_str();

  // verify-mc
  auto* vmc = app.add_subcommand("verify-mc",
                                 "Monte Carlo arbitration of the coverage formula");
  long long vmc_n = 1000000;
  vmc->add_option("--n", vmc_n, "Replications per grid point")
      ->check(CLI::PositiveNumber);

  // mv-bound
  auto* mvb = app.add_subcommand("mv-bound", "Multivariate norm-bound constants");
  int mv_p = 1;
  double mv_alpha = 0.05;
  mvb->add_option("--p", mv_p, "Dimension")->required();
  mvb->add_option("--alpha", mv_alpha, "Miss probability target")->required();

  // mv-verify
  auto* mvv = app.add_subcommand("mv-verify",
                                 "Simulated check of the norm-bound guarantee");
  int mvv_p = 1;
  double mvv_alpha = 0.05;
  std::string mu_text, eigs_text;
  long long mvv_n = 1000000;
  mvv->add_option("--p", mvv_p, "Dimension")->required();
  mvv->add_option("--alpha", mvv_alpha, "Miss probability target")->required();
  mvv->add_option("--mu", mu_text, "Comma-separated mean vector")->required();
  mvv->add_option("--sigma-eigs", eigs_text, "Comma-separated eigenvalues")
      ->required();
  mvv->add_option("--n", mvv_n, "Replications")->check(CLI::PositiveNumber);

  // Let the global flags (--format, --out, --seed, --threads) appear
  // after the subcommand as well.
  for (CLI::App* sub : {cov, opt, swp, vmc, mvb, mvv}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (cov->parsed()) {
      if (!empty && !(c1 < c2) && !(c1 == 0.0 && c2 == 0.0)) {
        std::cerr << "coverage: requires c1 < c2 (or --empty)\n";
        return exit_usage;
      }
      return run_coverage(out, lambda_text, c1, c2, empty, mc_check, seed, n,
                          threads);
    }
    if (opt->parsed()) {
      if (!(h > 0.0)) {
        std::cerr << "optimize: h must be > 0\n";
        return exit_usage;
      }
      return run_optimize(out, h, mesh, case_restrict);
    }
    if (swp->parsed()) return run_sweep(out, h_grid, sweep_mesh, threads);
    if (vmc->parsed()) return run_verify_mc(out, seed, vmc_n);
    if (mvb->parsed()) {
      if (mv_p < 1 || !(mv_alpha > 0.0 && mv_alpha < 1.0)) {
        std::cerr << "mv-bound: requires p >= 1 and alpha in (0,1)\n";
        return exit_usage;
      }
      return run_mv_bound(out, mv_p, mv_alpha);
    }
    if (mvv->parsed()) {
      if (mvv_p < 1 || !(mvv_alpha > 0.0 && mvv_alpha < 1.0)) {
        std::cerr << "mv-verify: requires p >= 1 and alpha in (0,1)\n";
        return exit_usage;
      }
      return run_mv_verify(out, mvv_p, mvv_alpha, mu_text, eigs_text, seed, mvv_n);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numeric;
  }
  return exit_usage;
}
