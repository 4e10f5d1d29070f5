#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "fpc/dataset.hpp"

namespace fpc {

/// Degree s of the polynomial kernel (1 + x.x')^s.
class KernelDegree {
 public:
  explicit KernelDegree(int s);

  int value() const noexcept { return s_; }
  friend bool operator==(KernelDegree, KernelDegree) = default;

 private:
  int s_;
};

enum class CenterScheme {
  UniformRandom,    // i.i.d. uniform in the bounding box of the inputs
  FirstN,           // the leading n inputs, in file order
  RandomSubsample,  // n inputs drawn without replacement
};

std::string_view to_string(CenterScheme scheme);
/// Accepts "uniform", "firstn", "subsample" (and the enum spellings).
CenterScheme parse_center_scheme(std::string_view text);

/// C(s + d, d): dimension of the space of d-variate polynomials of total
/// degree <= s. Throws OverflowError when the value does not fit 64 bits.
std::uint64_t feature_dim(KernelDegree s, std::size_t d);

/// base^s by repeated squaring.
double int_pow(double base, int s) noexcept;

/// (1 + sum_i x(i) * x2(i))^s. The dot product is accumulated left to right,
/// so the result is bit-identical to the entries of build_design_matrix.
double kernel_eval(std::span<const double> x, std::span<const double> x2,
                   KernelDegree s);

struct CenterSet {
  RowMatrix centers;  // n x d
  CenterScheme scheme = CenterScheme::FirstN;
  // Bookkeeping from the fundamental-system check.
  int redraws = 0;
  std::size_t dropped = 0;
  std::optional<double> rank_ratio;  // sigma_min / sigma_max when checked

  std::size_t size() const noexcept { return static_cast<std::size_t>(centers.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(centers.cols()); }
  std::span<const double> center(std::size_t j) const {
    return {centers.data() + j * dim(), dim()};
  }
};

struct CenterOptions {
  /// Replaces the default n = min{C(s+d, d), m}. Still capped at m for the
  /// data-drawn schemes.
  std::optional<std::size_t> n_override;
  /// Run the fundamental-system check (see unisolvence_ratio).
  bool verify = true;
  double rank_tolerance = 1e-10;
};

/// Centers for the given degree. n = min{C(s+d,d), m} unless overridden.
/// FirstN is deterministic; the random schemes are reproducible from seed.
///
/// When verify is set and n <= C(s+d,d), the centers are checked to span the
/// full polynomial space. Random schemes redraw on failure; FirstN (and random
/// schemes after repeated failures) skips inputs that are linearly dependent
/// on the ones already accepted, logging a warning.
CenterSet generate_centers(const Dataset& data, KernelDegree s, CenterScheme scheme,
                           std::uint64_t seed, const CenterOptions& options = {});

/// sigma_min / sigma_max of the n x C(s+d,d) matrix of tensor Chebyshev
/// polynomials of total degree <= s evaluated at the centers, after mapping
/// the centers' bounding box to [-1,1]^d. A nonzero ratio means the kernel
/// sections K_s(eta_j, .) are linearly independent; the Chebyshev basis keeps
/// this measurable in double precision where the kernel Gram matrix is not.
/// Returns nullopt when the check is skipped (n above 2000, n greater than
/// the space dimension, or too expensive).
std::optional<double> unisolvence_ratio(const RowMatrix& centers, KernelDegree s);

/// A_ij = (1 + x_i.eta_j)^s together with the Cholesky factor of
/// (beta A^T A + alpha I), computed once and shared by all ADMM iterations.
class DesignMatrix {
 public:
  DesignMatrix(Eigen::MatrixXd a, double alpha, double beta, int threads = 1);

  const Eigen::MatrixXd& a() const noexcept { return a_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  std::size_t rows() const noexcept { return static_cast<std::size_t>(a_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(a_.cols()); }

  /// (beta A^T A + alpha I)^{-1} rhs, with up to three steps of iterative
  /// refinement against the unformed operator.
  Eigen::VectorXd solve_normal(const Eigen::VectorXd& rhs) const;
  /// (beta A^T A + alpha I) z, reconstructed from the cached factor.
  Eigen::VectorXd apply_normal(const Eigen::VectorXd& z) const;

  /// A^T A accumulated over row blocks in a fixed order; peak extra memory is
  /// O(n^2 * threads).
  static Eigen::MatrixXd gram(const Eigen::MatrixXd& a, int threads = 1);

 private:
  static constexpr int kRefineSteps = 3;

  Eigen::MatrixXd a_;
  double alpha_;
  double beta_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

/// Fills A from kernel_eval and factorizes. Throws InvalidArgument when
/// alpha or beta is not positive.
DesignMatrix build_design_matrix(const Dataset& data, const CenterSet& centers,
                                 KernelDegree s, double alpha, double beta,
                                 int threads = 1);

/// Just the m x n kernel matrix; used for prediction on held-out points.
Eigen::MatrixXd kernel_matrix(const RowMatrix& points, const RowMatrix& centers,
                              KernelDegree s);

}  // namespace fpc
