#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "fpc/admm.hpp"
#include "fpc/dataset.hpp"
#include "fpc/poly_features.hpp"

namespace fpc {

/// Per-dimension min-max map onto [0,1]. A constant column maps to 0.
struct MinMaxScaler {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  bool enabled = true;

  static MinMaxScaler fit(const RowMatrix& x, bool enabled = true);
  std::size_t dim() const noexcept { return static_cast<std::size_t>(lo.size()); }
  void transform_point(std::span<const double> in, std::span<double> out) const;
  RowMatrix transform(const RowMatrix& x) const;
};

struct TrainOptions {
  int degree = 9;
  CenterScheme scheme = CenterScheme::FirstN;
  AdmmParams admm;
  std::uint64_t seed = 0;
  bool scale_inputs = true;
  std::optional<std::size_t> n_override;
  int threads = 1;
  bool verify_centers = true;
};

struct TrainingSummary {
  std::size_t m = 0;
  AdmmParams params;
  CenterScheme scheme = CenterScheme::FirstN;
  std::uint64_t seed = 0;
  int iterations = 0;
  StopReason stop = StopReason::MaxIterations;
  double final_objective = 0.0;
  double final_h_step = 0.0;
  double train_seconds = 0.0;
};

/// f(x) = sum_j u_j (1 + eta_j . scale(x))^s. Immutable after training.
class FpcModel {
 public:
  FpcModel(KernelDegree s, RowMatrix centers, Eigen::VectorXd coefficients, MinMaxScaler scaling,
           TrainingSummary summary = {});

  KernelDegree degree() const noexcept { return s_; }
  const RowMatrix& centers() const noexcept { return centers_; }
  const Eigen::VectorXd& coefficients() const noexcept { return coef_; }
  const MinMaxScaler& scaling() const noexcept { return scaling_; }
  const TrainingSummary& summary() const noexcept { return summary_; }
  std::size_t input_dim() const noexcept { return scaling_.dim(); }
  /// Number of centers.
  std::size_t sparsity() const noexcept { return static_cast<std::size_t>(coef_.size()); }

  double decision_value(std::span<const double> x) const;
  /// sign(f(x)) with sign(0) = +1.
  int predict(std::span<const double> x) const;
  Eigen::VectorXd decision_values(const RowMatrix& x) const;
  std::vector<int> predict(const RowMatrix& x) const;

  /// Copy with all coefficients multiplied by factor.
  FpcModel scaled(double factor) const;

 private:
  // Same summation order for single points and batches, so both paths agree
  // bit for bit.
  double expansion(std::span<const double> scaled_x) const;

  KernelDegree s_;
  RowMatrix centers_;  // in scaled input space
  Eigen::VectorXd coef_;
  MinMaxScaler scaling_;
  TrainingSummary summary_;
};

/// scale -> generate_centers -> build_design_matrix -> ADMM solve.
/// Throws EmptyDataError for an empty dataset and DataFormatError for labels
/// outside {-1,+1}. When `trace` is non-null the full iteration trace is
/// copied into it.
FpcModel train(const Dataset& data, const TrainOptions& options, IterationTrace* trace = nullptr);

int predict(const FpcModel& model, std::span<const double> x);

struct ConfusionCounts {
  std::size_t true_pos = 0;
  std::size_t true_neg = 0;
  std::size_t false_pos = 0;
  std::size_t false_neg = 0;
};

struct EvalReport {
  double accuracy = 0.0;       // percent
  double train_seconds = 0.0;
  double test_seconds = 0.0;
  std::size_t sparsity = 0;    // number of centers
  std::size_t samples = 0;
  ConfusionCounts confusion;

  double error_rate() const noexcept { return 1.0 - accuracy / 100.0; }
  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

/// Throws EmptyDataError on an empty split.
EvalReport evaluate(const FpcModel& model, const Dataset& data);

/// min{ceil((m / ln m)^(1/d)), 10}, at least 1.
int max_degree(std::size_t m, std::size_t d);

struct DegreeCandidate {
  int degree = 1;
  std::optional<std::size_t> n;  // explicit center count, if any
  EvalReport validation;
};

struct DegreeSelection {
  int best_degree = 1;
  std::optional<std::size_t> best_n;
  std::vector<DegreeCandidate> candidates;
};

struct SelectOptions {
  /// Defaults to 1..max_degree(m, d).
  std::vector<int> degrees;
  /// Optional grid of center counts tried for every degree (outer s, inner n).
  std::vector<std::size_t> center_counts;
  TrainOptions train;
};

/// Trains one model per candidate and keeps the best validation accuracy;
/// ties go to the smaller degree, then to the smaller n.
DegreeSelection select_degree(const Dataset& train_data, const Dataset& validation,
                              const SelectOptions& options);

}  // namespace fpc
