#include "portopt/json_io.hpp"

#include <fstream>

namespace portopt {
namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      throw SchemaError("unknown field at " + where + "/" + key);
    }
  }
}

const Json& require(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError("missing field " + where + "/" + key);
  return j.at(key);
}

double get_number(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number()) throw SchemaError(where + "/" + key + " must be a number");
  return v.get<double>();
}

double get_number_or(const Json& j, const std::string& key, double fallback,
                     const std::string& where) {
  if (!j.contains(key)) return fallback;
  return get_number(j, key, where);
}

Vec get_vector(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_array() || v.empty()) {
    throw SchemaError(where + "/" + key + " must be a non-empty array");
  }
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw SchemaError(where + "/" + key + "/" + std::to_string(i) +
                        " must be a number");
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

Mat get_matrix(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_array() || v.empty() || !v[0].is_array()) {
    throw SchemaError(where + "/" + key + " must be an array of arrays");
  }
  const std::size_t rows = v.size(), cols = v[0].size();
  Mat out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!v[r].is_array() || v[r].size() != cols) {
      throw SchemaError(where + "/" + key + "/" + std::to_string(r) +
                        " has inconsistent row length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!v[r][c].is_number()) {
        throw SchemaError(where + "/" + key + " entries must be numbers");
      }
      out(r, c) = v[r][c].get<double>();
    }
  }
  return out;
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw SchemaError("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

PortfolioProblem problem_from_json(const Json& j,
                                   const std::set<std::string>& extra_allowed) {
  std::set<std::string> allowed = {"mu0", "sigma", "sigma0_diag", "risk_aversion",
                                   "risk_free"};
  allowed.insert(extra_allowed.begin(), extra_allowed.end());
  check_keys(j, allowed, "");
  Vec mu0 = get_vector(j, "mu0", "");
  Mat sigma = get_matrix(j, "sigma", "");
  Vec sigma0 = j.contains("sigma0_diag") ? get_vector(j, "sigma0_diag", "")
                                         : Vec::Zero(mu0.size());
  const double a = get_number(j, "risk_aversion", "");
  const double r0 = get_number_or(j, "risk_free", 0.0, "");
  return PortfolioProblem(ReturnBeliefs{std::move(mu0), std::move(sigma0)},
                          CovMatrix(std::move(sigma)), a, r0);
}

UnivariateProblem univariate_from_json(const Json& j) {
  check_keys(j, {"mu0", "sigma_sq", "sigma_min_sq", "sigma0_sq", "alpha",
                 "risk_aversion"},
             "");
  UnivariateProblem p;
  p.mu0 = get_number(j, "mu0", "");
  p.sigma_sq = get_number(j, "sigma_sq", "");
  p.sigma_min_sq = get_number_or(j, "sigma_min_sq", 0.0, "");
  p.sigma0_sq = get_number_or(j, "sigma0_sq", 0.0, "");
  p.alpha = get_number(j, "alpha", "");
  p.a = get_number(j, "risk_aversion", "");
  p.validate();
  return p;
}

namespace {

BlockStructure structure_from_json(const Json& j) {
  const Json& v = require(j, "assignments", "");
  if (!v.is_array() || v.empty()) {
    throw SchemaError("/assignments must be a non-empty array of block ids");
  }
  BlockStructure s;
  int max_block = -1;
  for (const auto& e : v) {
    if (!e.is_number_integer()) {
      throw SchemaError("/assignments entries must be integers");
    }
    const int b = e.get<int>();
    s.assignments.push_back(b);
    max_block = std::max(max_block, b);
  }
  s.num_blocks = max_block + 1;
  s.validate();
  return s;
}

ReturnBeliefs beliefs_from_json(const Json& j, int dim) {
  Vec mu0 = get_vector(j, "mu0", "");
  Vec sigma0 = j.contains("sigma0_diag") ? get_vector(j, "sigma0_diag", "")
                                         : Vec::Zero(dim);
  ReturnBeliefs b{std::move(mu0), std::move(sigma0)};
  b.validate();
  if (b.dim() != dim) throw SchemaError("belief length must match assignments");
  return b;
}

std::vector<double> get_double_list(const Json& j, const std::string& key,
                                    std::size_t len) {
  const Vec v = get_vector(j, key, "");
  if (static_cast<std::size_t>(v.size()) != len) {
    throw SchemaError("/" + key + " must have one entry per block");
  }
  return {v.data(), v.data() + v.size()};
}

}  // namespace

BlockProblem1 block1_from_json(const Json& j) {
  check_keys(j, {"assignments", "mu0", "sigma0_diag", "risk_aversion", "sigma_sq",
                 "sigma_min_sq", "alpha", "correlation"},
             "");
  BlockProblem1 out;
  out.spec.structure = structure_from_json(j);
  const auto k = static_cast<std::size_t>(out.spec.structure.num_blocks);
  out.spec.sigma_sq = get_double_list(j, "sigma_sq", k);
  out.spec.sigma_min_sq = j.contains("sigma_min_sq")
                              ? get_double_list(j, "sigma_min_sq", k)
                              : std::vector<double>(k, 0.0);
  out.spec.alpha = get_double_list(j, "alpha", k);
  const Json& corr = require(j, "correlation", "");
  if (!corr.is_array() || corr.size() != k) {
    throw SchemaError("/correlation must be an array of K matrices");
  }
  for (std::size_t i = 0; i < k; ++i) {
    Json wrap;
    wrap["m"] = corr[i];
    out.spec.correlation.push_back(get_matrix(wrap, "m", "/correlation"));
  }
  out.spec.validate();
  out.beliefs = beliefs_from_json(j, out.spec.structure.dim());
  out.risk_aversion = get_number(j, "risk_aversion", "");
  return out;
}

BlockProblem2 block2_from_json(const Json& j) {
  check_keys(j, {"assignments", "mu0", "sigma0_diag", "risk_aversion", "sigma_sq",
                 "sigma_min_sq", "alpha", "rho"},
             "");
  BlockProblem2 out;
  out.spec.structure = structure_from_json(j);
  const int k = out.spec.structure.num_blocks;
  out.spec.sigma_sq = get_number(j, "sigma_sq", "");
  out.spec.sigma_min_sq = get_number_or(j, "sigma_min_sq", 0.0, "");
  out.spec.alpha = get_number(j, "alpha", "");
  const Json& rho = require(j, "rho", "");
  if (rho.is_array() && !rho.empty() && rho[0].is_array()) {
    out.spec.rho = get_matrix(j, "rho", "");
  } else if (rho.is_array() &&
             rho.size() == static_cast<std::size_t>(k * (k + 1) / 2)) {
    // Flat upper triangle, row-major.
    out.spec.rho = Mat(k, k);
    std::size_t pos = 0;
    for (int r = 0; r < k; ++r) {
      for (int c = r; c < k; ++c, ++pos) {
        if (!rho[pos].is_number()) throw SchemaError("/rho entries must be numbers");
        out.spec.rho(r, c) = out.spec.rho(c, r) = rho[pos].get<double>();
      }
    }
  } else {
    throw SchemaError("/rho must be a K x K matrix or a flat upper triangle of length K(K+1)/2");
  }
  out.spec.validate();
  out.beliefs = beliefs_from_json(j, out.spec.structure.dim());
  out.risk_aversion = get_number(j, "risk_aversion", "");
  return out;
}

TwoStateScenario scenario_from_json(const Json& j) {
  check_keys(j, {"p", "risk_aversion", "normal", "stressed"}, "");
  const Json& normal = require(j, "normal", "");
  check_keys(normal, {"mu", "sigma"}, "/normal");
  const Json& stressed = require(j, "stressed", "");
  check_keys(stressed, {"mu", "sigma", "spec"}, "/stressed");

  Vec mu_n = get_vector(normal, "mu", "/normal");
  CovMatrix sigma_n(get_matrix(normal, "sigma", "/normal"));
  Vec mu_s = get_vector(stressed, "mu", "/stressed");
  CovMatrix sigma_s = [&]() {
    if (stressed.contains("sigma") == stressed.contains("spec")) {
      throw SchemaError("/stressed needs exactly one of sigma or spec");
    }
    if (stressed.contains("sigma")) {
      return CovMatrix(get_matrix(stressed, "sigma", "/stressed"));
    }
    const Json& spec = stressed.at("spec");
    check_keys(spec, {"sigma_s", "rho_s"}, "/stressed/spec");
    StressedCovSpec s;
    s.sigma_s = get_number(spec, "sigma_s", "/stressed/spec");
    s.rho_s = get_number(spec, "rho_s", "/stressed/spec");
    s.dim = static_cast<int>(mu_s.size());
    return build_stressed_cov(s);
  }();

  TwoStateScenario sc{get_number(j, "p", ""),     std::move(mu_n),
                      std::move(sigma_n),          std::move(mu_s),
                      std::move(sigma_s),          get_number(j, "risk_aversion", "")};
  sc.validate();
  return sc;
}

}  // namespace portopt
