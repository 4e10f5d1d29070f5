#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace fpc {

/// Row-major so that a sample is a contiguous span of d doubles.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Feature rows with labels in {-1, +1}. Row order is significant: the
/// FirstN center scheme picks the leading rows.
struct Dataset {
  RowMatrix x;        // m x d
  Eigen::VectorXd y;  // m labels, each -1.0 or +1.0

  std::size_t size() const noexcept { return static_cast<std::size_t>(x.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(x.cols()); }
  bool empty() const noexcept { return x.rows() == 0; }

  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * dim(), dim()};
  }

  /// Rows picked in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Throws DataFormatError when a label is not exactly -1 or +1, or
  /// DimensionMismatch when x and y disagree on m.
  void validate_labels() const;
};

struct SplitFractions {
  double train = 0.5;
  double validation = 0.25;
  double test = 0.25;
};

struct DatasetSplits {
  Dataset train;
  Dataset validation;
  Dataset test;
};

/// Seeded shuffle followed by a contiguous cut. Validation and test get
/// floor(m * fraction) rows each; train gets the remainder.
DatasetSplits split_dataset(const Dataset& data, SplitFractions fractions,
                            std::uint64_t seed);

}  // namespace fpc
