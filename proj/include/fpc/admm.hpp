#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fpc/poly_features.hpp"

namespace fpc {

struct AdmmParams {
  double alpha = 1.0;    // proximal weight on u
  double beta = 1.0;     // augmented Lagrangian weight
  double tol = 5e-4;     // threshold on the squared H-norm step
  int max_iters = 5;
  /// Extension: compare step / (n + 2m) against tol instead of the raw step.
  bool normalized_tol = false;

  /// Throws InvalidArgument on a non-positive alpha, beta, tol or max_iters.
  void validate() const;
};

/// One ADMM iterate p = (u, v, w).
struct AdmmState {
  Eigen::VectorXd u;  // n coefficients
  Eigen::VectorXd v;  // m, tracks A u
  Eigen::VectorXd w;  // m multipliers
  int k = 0;

  /// (0, y, 0).
  static AdmmState initial(std::size_t n, const Eigen::VectorXd& y);
};

struct IterationRecord {
  int iter = 0;                 // k of the iterate p^k produced by this step
  double objective = 0.0;       // (1/m) sum (1 - y_i (A u^k)_i)_+
  double h_step_sq = 0.0;       // ||p^k - p^{k-1}||_H^2
  double primal_residual = 0.0; // ||A u^k - v^k||_2
};

enum class StopReason { Tolerance, MaxIterations };

std::string_view to_string(StopReason reason);

struct IterationTrace {
  std::vector<IterationRecord> records;
  StopReason stop = StopReason::MaxIterations;

  std::size_t iterations() const noexcept { return records.size(); }

  /// Index of the first record whose step exceeds its predecessor's by more
  /// than slack, comparing records k and k-1 for k >= first. nullopt when
  /// the step sequence is non-increasing.
  std::optional<std::size_t> first_increase(double slack, std::size_t first = 1) const;

  /// Columns: iter,objective,h_step_sq,primal_residual.
  void write_csv(std::ostream& out) const;
};

/// Solution of (beta A^T A + alpha I) u = alpha u^k + beta A^T v^k - A^T w^k.
Eigen::VectorXd update_u(const AdmmState& state, const DesignMatrix& dm, const AdmmParams& params);

/// Hinge_{m beta}(y, A u^{k+1} + w^k / beta); `au_next` is A u^{k+1}.
Eigen::VectorXd update_v(const Eigen::VectorXd& au_next, const Eigen::VectorXd& w,
                         const Eigen::VectorXd& y, const AdmmParams& params);

/// w^k + beta (A u^{k+1} - v^{k+1}).
Eigen::VectorXd update_w(const Eigen::VectorXd& w, const Eigen::VectorXd& au_next,
                         const Eigen::VectorXd& v_next, const AdmmParams& params);

/// alpha ||du||^2 + beta ||dv||^2 + ||dw||^2 / beta.
double h_step_norm_sq(const AdmmState& prev, const AdmmState& next, const AdmmParams& params);

/// (1/m) sum_i (1 - y_i (Au)_i)_+ given the products Au.
double hinge_objective(const Eigen::VectorXd& au, const Eigen::VectorXd& y);

struct AdmmResult {
  AdmmState state;
  IterationTrace trace;
};

/// Vector prox used by the v-update; swappable for fault-injection tests.
using VectorProx = std::function<Eigen::VectorXd(const Eigen::VectorXd& y,
                                                 const Eigen::VectorXd& z, double gamma)>;

/// Iterates the u, v, w updates from `init` (default (0, y, 0)) until the
/// squared H-norm step drops below tol or max_iters iterations have run.
/// Throws NumericalError if an iterate becomes non-finite.
AdmmResult solve(const DesignMatrix& dm, const Eigen::VectorXd& y, const AdmmParams& params,
                 std::optional<AdmmState> init = std::nullopt, const VectorProx& prox = {});

}  // namespace fpc
