// Command-line front end: model dispatch, parameter sweeps, figure-data
// emission, and the Monte Carlo validation suite.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "portopt/blocks.hpp"
#include "portopt/distributions.hpp"
#include "portopt/json_io.hpp"
#include "portopt/returns.hpp"
#include "portopt/scenario.hpp"
#include "portopt/univariate.hpp"
#include "portopt/validate.hpp"
#include "portopt/wishart.hpp"

namespace {

using namespace portopt;

/// 17 significant digits: round-trip exact for 64-bit floats.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct OutputFile {
  std::ofstream file;
  std::ostream& stream;

  explicit OutputFile(const std::string& path)
      : file(path.empty() ? std::ofstream() : std::ofstream(path)),
        stream(path.empty() ? std::cout : file) {
    if (!path.empty() && !file) throw SchemaError("cannot open output: " + path);
  }
};

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::DomainBreach: return "domain_breach";
  }
  return "unknown";
}

Json report_json(const SolveReport& r) {
  return Json{{"iterations", r.iterations},
              {"grad_norm", r.grad_norm},
              {"objective", r.objective},
              {"status", status_name(r.status)}};
}

Json weights_json(const Vec& w) {
  Json arr = Json::array();
  for (int i = 0; i < w.size(); ++i) arr.push_back(w[i]);
  return arr;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw SchemaError("empty grid: " + csv);
  return out;
}

struct AllocateArgs {
  std::string model;
  std::string input;
  std::string out;
  double b = 0.0;
  double p = -1.0;  // two-state override; negative means "from file"
  double tol = 1e-9;
  int max_iter = 10000;
  bool long_only = false;
  double budget = std::numeric_limits<double>::quiet_NaN();
};

int cmd_allocate(const AllocateArgs& args) {
  SolverOptions opts;
  opts.tol = args.tol;
  opts.max_iter = args.max_iter;

  ConstraintSet cs;
  if (args.long_only) cs.nonneg = true;
  if (std::isfinite(args.budget)) cs.budget = args.budget;

  Json result;
  SolveStatus status = SolveStatus::Converged;

  if (args.model == "univariate") {
    UnivariateProblem p = univariate_from_json(read_json_file(args.input));
    const double w = solve_cubic(p);
    result["weights"] = Json::array({w});
    result["diagnostics"] = {{"weight_bound", p.weight_bound()}};
    result["report"] = {{"status", "converged"}};
  } else if (args.model == "wishart") {
    Json j = read_json_file(args.input);
    PortfolioProblem problem = problem_from_json(j, {"alpha"});
    if (!j.contains("alpha")) throw SchemaError("missing field /alpha");
    WishartAllocProblem wp{problem, j.at("alpha").get<double>()};
    AllocationResult res =
        cs.empty() ? solve_weights_full(wp)
                   : solve_weights_constrained(wp, cs, opts);
    result["weights"] = weights_json(res.weights);
    result["diagnostics"] = {{"d", res.diagnostics.d},
                             {"q", res.diagnostics.q},
                             {"g", res.diagnostics.g},
                             {"multiple_roots", res.diagnostics.multiple_roots}};
    result["report"] = report_json(res.report);
    status = res.report.status;
  } else if (args.model == "block1") {
    BlockProblem1 bp = block1_from_json(read_json_file(args.input));
    auto [w, report] = solve_model1(bp.spec, bp.beliefs, bp.risk_aversion, cs, opts);
    result["weights"] = weights_json(w);
    result["diagnostics"] = {{"num_blocks", bp.spec.structure.num_blocks}};
    result["report"] = report_json(report);
    status = report.status;
  } else if (args.model == "block2") {
    BlockProblem2 bp = block2_from_json(read_json_file(args.input));
    Model2Solution sol = solve_model2(bp.spec, bp.beliefs, bp.risk_aversion, cs,
                                      cs.empty(), opts);
    result["weights"] = weights_json(sol.weights);
    result["diagnostics"] = {{"block_weights", weights_json(sol.block_weights)}};
    result["report"] = report_json(sol.report);
    status = sol.report.status;
  } else if (args.model == "two-state") {
    TwoStateScenario sc = scenario_from_json(read_json_file(args.input));
    if (args.p >= 0.0) sc.p = args.p;
    sc.validate();
    auto [w, report] = solve_two_state(sc, cs, opts);
    result["weights"] = weights_json(w);
    result["diagnostics"] = {{"p", sc.p}, {"lse", lse_objective(sc, w)}};
    result["report"] = report_json(report);
    status = report.status;
  } else if (args.model == "minimax") {
    Json j = read_json_file(args.input);
    Json wrap;  // reuse the strict matrix reader via the sigma field
    for (const auto& [k, v] : j.items()) {
      if (k != "sigma") throw SchemaError("unknown field /" + k);
      wrap = v;
    }
    if (wrap.is_null()) throw SchemaError("missing field /sigma");
    Mat m(wrap.size(), wrap.size());
    for (std::size_t r = 0; r < wrap.size(); ++r) {
      for (std::size_t c = 0; c < wrap[r].size(); ++c) {
        m(r, c) = wrap[r][c].get<double>();
      }
    }
    auto [w, report] = minimax_portfolio(CovMatrix(m), args.b, opts);
    result["weights"] = weights_json(w);
    result["diagnostics"] = {{"b", args.b}, {"max_weight", w.maxCoeff()}};
    result["report"] = report_json(report);
    status = report.status;
  } else {
    throw SchemaError("unknown model: " + args.model);
  }

  OutputFile out(args.out);
  out.stream << result.dump(2) << "\n";
  return status == SolveStatus::Converged ? 0 : 2;
}

int cmd_scaling(const std::string& model, const std::string& q_csv,
                const std::string& alpha_csv, const std::string& out_path) {
  const auto qs = parse_grid(q_csv);
  const auto alphas = parse_grid(alpha_csv);
  OutputFile out(out_path);
  out.stream << "q,alpha,g\n";
  for (double q : qs) {
    for (double alpha : alphas) {
      const double g =
          model == "laplace" ? scaling_g_laplace(q) : scaling_g_wishart(q, alpha);
      out.stream << fmt(q) << "," << fmt(alpha) << "," << fmt(g) << "\n";
    }
  }
  return 0;
}

int cmd_sample(double sigma_min, double sigma, double alpha, int n,
               std::uint64_t seed, const std::string& out_path) {
  ShiftedGammaNoise model{alpha, sigma * sigma, sigma_min * sigma_min};
  model.validate();
  RngStream rng(seed);
  const auto samples = sample_shifted_gamma(model, rng, n);
  OutputFile out(out_path);
  out.stream << "sample_index,value\n";
  for (int i = 0; i < n; ++i) {
    out.stream << i << "," << fmt(std::sqrt(samples[i])) << "\n";
  }
  return 0;
}

int cmd_wishart_sim(double sigma_a, double sigma_b, double rho, double alpha,
                    int n, std::uint64_t seed, const std::string& out_path) {
  Mat sigma(2, 2);
  sigma << sigma_a * sigma_a, rho * sigma_a * sigma_b, rho * sigma_a * sigma_b,
      sigma_b * sigma_b;
  WishartNoiseModel model{alpha, CovMatrix(sigma)};
  model.validate();
  RngStream rng(seed);
  const auto samples = sample_wishart(model, rng, n);
  OutputFile out(out_path);
  out.stream << "sample_index,vol_a,vol_b,corr\n";
  for (int i = 0; i < n; ++i) {
    const Mat& s = samples[i];
    const double va = std::sqrt(s(0, 0)), vb = std::sqrt(s(1, 1));
    out.stream << i << "," << fmt(va) << "," << fmt(vb) << ","
               << fmt(s(0, 1) / (va * vb)) << "\n";
  }
  return 0;
}

int cmd_posterior(const std::string& dist, const std::string& n_csv,
                  const std::string& param_csv, int points,
                  const std::string& out_path) {
  OutputFile out(out_path);
  const auto ns = parse_grid(n_csv);
  const auto params = parse_grid(param_csv);
  if (dist == "variance") {
    out.stream << "n,s,sigma2,pdf\n";
    for (double nd : ns) {
      const int n = static_cast<int>(nd);
      for (double s : params) {
        const double s2 = s * s;
        for (int i = 1; i <= points; ++i) {
          const double sigma2 = 5.0 * s2 * i / points;
          out.stream << n << "," << fmt(s) << "," << fmt(sigma2) << ","
                     << fmt(scaled_inv_chi2_pdf(sigma2, n, s2)) << "\n";
        }
      }
    }
  } else if (dist == "correlation") {
    out.stream << "n,r,rho,pdf\n";
    for (double nd : ns) {
      const int n = static_cast<int>(nd);
      for (double r : params) {
        for (int i = 1; i < points; ++i) {
          const double rho = -1.0 + 2.0 * i / points;
          out.stream << n << "," << fmt(r) << "," << fmt(rho) << ","
                     << fmt(conditional_correlation_pdf(rho, r, n)) << "\n";
        }
      }
    }
  } else {
    throw SchemaError("unknown distribution: " + dist);
  }
  return 0;
}

int cmd_vol_corr(const std::string& input, int min_rows,
                 const std::string& out_path) {
  const ReturnsTable table = load_returns_csv_file(input);
  const VolCorrResult res = compute_vol_corr(table, min_rows);
  OutputFile out(out_path);
  out.stream << "# volatility annualized by sqrt(252); per-asset std then "
                "cross-sectional mean\n";
  out.stream << "# correlation: mean pairwise Pearson within the month\n";
  out.stream << "# huber_slope=" << fmt(res.huber_slope)
             << " huber_intercept=" << fmt(res.huber_intercept) << "\n";
  out.stream << "# dropped_rows=" << table.dropped_rows << "\n";
  for (const auto& w : res.warnings) out.stream << "# skipped " << w << "\n";
  out.stream << "month,avg_volatility,avg_correlation\n";
  for (const auto& m : res.months) {
    out.stream << m.month << "," << fmt(m.avg_volatility) << ","
               << fmt(m.avg_correlation) << "\n";
  }
  return 0;
}

int cmd_validate(std::uint64_t seed, int n_samples, double gw_bias,
                 const std::string& out_path) {
  ValidationConfig cfg;
  cfg.seed = seed;
  cfg.n_samples = n_samples;
  cfg.gw_bias = gw_bias;
  const auto checks = run_validation(cfg);
  OutputFile out(out_path);
  out.stream << "check,analytic,mc_estimate,mc_se,z_score,pass\n";
  for (const auto& c : checks) {
    out.stream << c.name << "," << fmt(c.analytic) << "," << fmt(c.mc_estimate)
               << "," << fmt(c.mc_se) << "," << fmt(c.z) << ","
               << (c.pass ? "true" : "false") << "\n";
  }
  return all_passed(checks) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CARA portfolio allocation under covariance uncertainty"};
  app.require_subcommand(1);

  AllocateArgs alloc;
  auto* sc_alloc = app.add_subcommand("allocate", "Solve an allocation problem");
  sc_alloc->add_option("--model", alloc.model,
                       "univariate|wishart|block1|block2|two-state|minimax")
      ->required();
  sc_alloc->add_option("--input", alloc.input, "problem JSON")->required();
  sc_alloc->add_option("--out", alloc.out, "output path (default stdout)");
  sc_alloc->add_option("--b", alloc.b, "minimax risk weight");
  sc_alloc->add_option("--p", alloc.p, "two-state normal-regime probability");
  sc_alloc->add_option("--tol", alloc.tol, "solver tolerance");
  sc_alloc->add_option("--max-iter", alloc.max_iter, "solver iteration cap");
  sc_alloc->add_flag("--long-only", alloc.long_only, "require w >= 0");
  sc_alloc->add_option("--budget", alloc.budget, "equality sum(w) = budget");

  std::string sc_model = "wishart", q_grid = "0.01,0.1,1,10,100",
              alpha_grid = "1,10,100,1000", sc_out;
  auto* sc_scaling = app.add_subcommand("scaling", "Scaling-function sweep CSV");
  sc_scaling->add_option("--model", sc_model, "wishart|laplace");
  sc_scaling->add_option("--q", q_grid, "comma-separated q grid");
  sc_scaling->add_option("--alpha", alpha_grid, "comma-separated alpha grid");
  sc_scaling->add_option("--out", sc_out, "output path");

  double sp_sigma_min = 0.1, sp_sigma = 0.15, sp_alpha = 100.0;
  int sp_n = 100000;
  std::uint64_t sp_seed = 1;
  std::string sp_out;
  auto* sc_sample = app.add_subcommand("sample", "Shifted-gamma volatility samples");
  sc_sample->add_option("--sigma-min", sp_sigma_min, "volatility floor");
  sc_sample->add_option("--sigma", sp_sigma, "stochastic volatility scale");
  sc_sample->add_option("--alpha", sp_alpha, "noise parameter");
  sc_sample->add_option("--n", sp_n, "sample count");
  sc_sample->add_option("--seed", sp_seed, "RNG seed");
  sc_sample->add_option("--out", sp_out, "output path");

  double ws_sa = 0.2, ws_sb = 0.4, ws_rho = 0.5, ws_alpha = 1000.0;
  int ws_n = 100000;
  std::uint64_t ws_seed = 1;
  std::string ws_out;
  auto* sc_wsim = app.add_subcommand("wishart-sim", "2-D Wishart vol/corr samples");
  sc_wsim->add_option("--sigma-a", ws_sa, "volatility of asset A");
  sc_wsim->add_option("--sigma-b", ws_sb, "volatility of asset B");
  sc_wsim->add_option("--rho", ws_rho, "target correlation");
  sc_wsim->add_option("--alpha", ws_alpha, "noise parameter");
  sc_wsim->add_option("--n", ws_n, "sample count");
  sc_wsim->add_option("--seed", ws_seed, "RNG seed");
  sc_wsim->add_option("--out", ws_out, "output path");

  std::string po_dist = "variance", po_n = "20,60,252", po_param = "0.15,0.25,0.30",
              po_out;
  int po_points = 400;
  auto* sc_post = app.add_subcommand("posterior", "Posterior pdf curves CSV");
  sc_post->add_option("--dist", po_dist, "variance|correlation");
  sc_post->add_option("--n", po_n, "comma-separated sample sizes");
  sc_post->add_option("--param", po_param,
                      "comma-separated sample vol (variance) or sample corr");
  sc_post->add_option("--points", po_points, "grid resolution");
  sc_post->add_option("--out", po_out, "output path");

  std::string vc_input, vc_out;
  int vc_min_rows = 15;
  auto* sc_vc = app.add_subcommand("vol-corr", "Monthly volatility/correlation CSV");
  sc_vc->add_option("--input", vc_input, "daily returns CSV")->required();
  sc_vc->add_option("--min-rows", vc_min_rows, "minimum rows per month");
  sc_vc->add_option("--out", vc_out, "output path");

  std::uint64_t va_seed = 1;
  int va_n = 100000;
  double va_bias = 0.0;
  std::string va_out;
  auto* sc_val = app.add_subcommand("validate", "Closed-form vs Monte Carlo suite");
  sc_val->add_option("--seed", va_seed, "RNG seed");
  sc_val->add_option("--n-samples", va_n, "samples per check");
  sc_val->add_option("--gw-bias", va_bias, "bias injected into the scaling check");
  sc_val->add_option("--out", va_out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc_alloc->parsed()) return cmd_allocate(alloc);
    if (sc_scaling->parsed()) return cmd_scaling(sc_model, q_grid, alpha_grid, sc_out);
    if (sc_sample->parsed())
      return cmd_sample(sp_sigma_min, sp_sigma, sp_alpha, sp_n, sp_seed, sp_out);
    if (sc_wsim->parsed())
      return cmd_wishart_sim(ws_sa, ws_sb, ws_rho, ws_alpha, ws_n, ws_seed, ws_out);
    if (sc_post->parsed())
      return cmd_posterior(po_dist, po_n, po_param, po_points, po_out);
    if (sc_vc->parsed()) return cmd_vol_corr(vc_input, vc_min_rows, vc_out);
    if (sc_val->parsed()) return cmd_validate(va_seed, va_n, va_bias, va_out);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
