#pragma once

#include <set>
#include <string>

#include <json.hpp>

#include "portopt/blocks.hpp"
#include "portopt/scenario.hpp"
#include "portopt/types.hpp"
#include "portopt/univariate.hpp"

namespace portopt {

using Json = nlohmann::json;

Json read_json_file(const std::string& path);

/// Strict schema: any key outside {mu0, sigma, sigma0_diag, risk_aversion,
/// risk_free} plus extra_allowed is rejected with its JSON pointer.
PortfolioProblem problem_from_json(const Json& j,
                                   const std::set<std::string>& extra_allowed = {});

UnivariateProblem univariate_from_json(const Json& j);

struct BlockProblem1 {
  Model1Spec spec;
  ReturnBeliefs beliefs;
  double risk_aversion;
};
struct BlockProblem2 {
  Model2Spec spec;
  ReturnBeliefs beliefs;
  double risk_aversion;
};

BlockProblem1 block1_from_json(const Json& j);
BlockProblem2 block2_from_json(const Json& j);

TwoStateScenario scenario_from_json(const Json& j);

}  // namespace portopt
