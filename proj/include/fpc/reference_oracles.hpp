#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "fpc/poly_features.hpp"

namespace fpc {

/// Largest instance the LP oracle accepts.
inline constexpr std::size_t kMaxLpRows = 500;

/// Multipliers of the dual LP
///   max 1^T a  s.t.  a + c = (1/m) 1,  A^T Diag(y) a = 0,  a, c >= 0.
struct DualSolution {
  Eigen::VectorXd a;
  Eigen::VectorXd c;
  double value = 0.0;   // 1^T a
  int pivots = 0;
};

/// Solves the dual LP with a dense bounded-variable revised simplex
/// (Bland's rule, basis refactorized every pivot). For small instances only:
/// throws InvalidArgument when m > kMaxLpRows, NumericalError when the
/// iteration limit is hit or phase one cannot reach feasibility.
DualSolution solve_dual_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& y);
DualSolution solve_dual_lp(const DesignMatrix& dm, const Eigen::VectorXd& y);

/// Box-constrained LP  min c^T x  s.t.  E x = b,  0 <= x <= upper.
/// Entries of `upper` may be +infinity. The dual LP above is one instance;
/// exposed so the simplex can be tested on hand-solvable problems.
struct BoxLp {
  Eigen::MatrixXd e;
  Eigen::VectorXd b;
  Eigen::VectorXd cost;
  Eigen::VectorXd upper;
};

struct BoxLpSolution {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Optimal;
  Eigen::VectorXd x;
  double objective = 0.0;
  int pivots = 0;
};

BoxLpSolution solve_box_lp(const BoxLp& lp, int max_pivots = 200000);

/// Maximum violations of the optimality conditions for the pair (u, dual).
/// Slackness residuals are raw; `a_inf_norm` is reported so callers can scale.
struct KktReport {
  double dual_feasibility = 0.0;     // max(-a_i, -c_i, |a_i + c_i - 1/m|)
  double stationarity = 0.0;         // ||A^T Diag(y) a||_inf
  double slackness_a = 0.0;          // max |a_i (1 - xi_i - y_i (Au)_i)|
  double slackness_c = 0.0;          // max |c_i xi_i|
  double duality_gap = 0.0;          // primal objective - 1^T a
  double primal_objective = 0.0;
  double dual_value = 0.0;
  double a_inf_norm = 0.0;           // ||A||_inf (max abs row sum)
  double tol = 0.0;
  bool pass = false;

  double max_violation() const;
  nlohmann::json to_json() const;
};

/// Stationarity and both slackness terms are compared against tol scaled by
/// max(1, ||A||_inf); dual feasibility and |gap| against tol.
KktReport check_kkt(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                    const DualSolution& dual, double tol);

enum class StepRule { Constant, InverseSqrt };

struct SubgradientResult {
  Eigen::VectorXd u;                   // best iterate
  std::vector<double> best_objective;  // best objective after each iteration
};

/// Plain subgradient descent on (1/m) sum (1 - y_i (Au)_i)_+ from u = 0 (or
/// `u0`). Step k (1-based) is step0 or step0 / sqrt(k). When step0 <= 0 it
/// defaults to 1 / max_i ||A_i||^2.
SubgradientResult subgradient_baseline(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                       int iters, StepRule rule, double step0 = 0.0,
                                       const Eigen::VectorXd& u0 = {});

}  // namespace fpc
