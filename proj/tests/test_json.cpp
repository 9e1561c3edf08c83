#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "portopt/json_io.hpp"

using namespace portopt;

TEST_CASE("portfolio problem round trip") {
  Json j = Json::parse(R"({
    "mu0": [0.05, 0.03],
    "sigma": [[0.04, 0.02], [0.02, 0.09]],
    "sigma0_diag": [0.001, 0.002],
    "risk_aversion": 2.0,
    "risk_free": 0.01
  })");
  auto p = problem_from_json(j);
  CHECK(p.dim() == 2);
  CHECK(p.mu0()[0] == doctest::Approx(0.04));  // risk-free folded in
  CHECK(p.sigma0_diag()[1] == 0.002);
  CHECK(p.risk_aversion() == 2.0);
}

TEST_CASE("unknown fields rejected with a pointer path") {
  Json j = Json::parse(R"({
    "mu0": [0.05],
    "sigma": [[0.04]],
    "risk_aversion": 1.0,
    "bogus": 1
  })");
  CHECK_THROWS_WITH_AS(problem_from_json(j), doctest::Contains("/bogus"),
                       SchemaError);
}

TEST_CASE("missing and malformed fields rejected") {
  CHECK_THROWS_AS(
      problem_from_json(Json::parse(R"({"mu0": [0.05], "sigma": [[0.04]]})")),
      SchemaError);
  CHECK_THROWS_AS(problem_from_json(Json::parse(
                      R"({"mu0": "x", "sigma": [[0.04]], "risk_aversion": 1})")),
                  SchemaError);
  CHECK_THROWS_AS(
      problem_from_json(Json::parse(
          R"({"mu0": [0.05], "sigma": [[0.04, 0.01]], "risk_aversion": 1})")),
      SchemaError);
}

TEST_CASE("univariate problem parsing") {
  Json j = Json::parse(R"({
    "mu0": 0.05, "sigma_sq": 0.0225, "sigma_min_sq": 0.01,
    "sigma0_sq": 0.0025, "alpha": 100, "risk_aversion": 1.0
  })");
  auto p = univariate_from_json(j);
  CHECK(p.alpha == 100.0);
  CHECK(p.sigma_min_sq == 0.01);
}

TEST_CASE("block model 1 parsing") {
  Json j = Json::parse(R"({
    "assignments": [0, 0, 1],
    "mu0": [0.05, 0.03, 0.04],
    "sigma0_diag": [0.001, 0.0, 0.002],
    "risk_aversion": 1.5,
    "sigma_sq": [0.0225, 0.04],
    "sigma_min_sq": [0.01, 0.0],
    "alpha": [50, 30],
    "correlation": [[[1.0, 0.3], [0.3, 1.0]], [[1.0]]]
  })");
  auto bp = block1_from_json(j);
  CHECK(bp.spec.structure.num_blocks == 2);
  CHECK(bp.spec.correlation[0](0, 1) == 0.3);
  CHECK(bp.risk_aversion == 1.5);
}

TEST_CASE("block model 2 parsing with matrix and flat rho") {
  Json full = Json::parse(R"({
    "assignments": [0, 0, 1, 1],
    "mu0": [0.05, 0.05, 0.03, 0.03],
    "risk_aversion": 1.0,
    "sigma_sq": 0.04,
    "alpha": 25,
    "rho": [[0.6, 0.2], [0.2, 0.4]]
  })");
  auto a = block2_from_json(full);

  Json flat = full;
  flat["rho"] = Json::array({0.6, 0.2, 0.4});  // upper triangle, row-major
  auto b = block2_from_json(flat);
  CHECK((a.spec.rho - b.spec.rho).norm() == 0.0);
  CHECK(a.spec.rho(1, 0) == 0.2);
}

TEST_CASE("scenario parsing with explicit and spec-built stressed sigma") {
  Json j = Json::parse(R"({
    "p": 0.9,
    "risk_aversion": 2.0,
    "normal": {"mu": [0.06, 0.04], "sigma": [[0.0225, 0.009], [0.009, 0.04]]},
    "stressed": {"mu": [-0.3, -0.25], "spec": {"sigma_s": 0.45, "rho_s": 0.8}}
  })");
  auto sc = scenario_from_json(j);
  CHECK(sc.p == 0.9);
  CHECK(sc.sigma_s.matrix()(0, 0) == doctest::Approx(0.2025));
  CHECK(sc.sigma_s.matrix()(0, 1) == doctest::Approx(0.2025 * 0.8));

  Json both = j;
  both["stressed"]["sigma"] = Json::array({Json::array({0.2, 0.0}),
                                           Json::array({0.0, 0.2})});
  CHECK_THROWS_AS(scenario_from_json(both), SchemaError);

  Json neither = j;
  neither["stressed"].erase("spec");
  CHECK_THROWS_AS(scenario_from_json(neither), SchemaError);
}

TEST_CASE("file loading errors") {
  CHECK_THROWS_AS(read_json_file("/nonexistent/path.json"), SchemaError);
}
