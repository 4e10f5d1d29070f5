#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fpc::cli {

/// Scalar hinge prox (a, b, gamma) -> z. The suite drives every check through
/// this function so a faulty branch shows up in all of them.
using ScalarProx = std::function<double(double a, double b, double gamma)>;

struct VerifyOptions {
  std::uint64_t seed = 0;
  int prox_cases = 10000;
  double prox_slack = 1e-9;
  int monotone_instances = 20;
  int monotone_iters = 200;
  double monotone_slack = 1e-12;
  int lp_instances = 10;
  double admm_tol = 1e-12;
  int admm_max_iters = 2000000;
  double gap_tol = 1e-6;
  double kkt_tol = 1e-6;
  ScalarProx prox;  // empty: the library's hinge_scalar
};

struct CheckResult {
  std::string name;
  bool pass = true;
  nlohmann::json detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool pass() const;
  nlohmann::json to_json() const;
};

/// Golden-section minimum of the scalar prox objective on a bracket that
/// contains every candidate minimizer. Returns the objective value.
double prox_oracle_minimum(double a, double b, double gamma);

/// Checks, in order: prox_oracle, monotonicity, duality_gap, kkt.
VerifyReport run_verify(const VerifyOptions& options);

}  // namespace fpc::cli
