#include "fpc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "fpc/error.hpp"

namespace fpc {

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(indices.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(indices[r]);
    if (indices[r] >= size()) throw InvalidArgument("subset index out of range");
    out.x.row(static_cast<Eigen::Index>(r)) = x.row(i);
    out.y(static_cast<Eigen::Index>(r)) = y(i);
  }
  return out;
}

void Dataset::validate_labels() const {
  if (x.rows() != y.size()) {
    throw DimensionMismatch("dataset has " + std::to_string(x.rows()) + " rows but " +
                            std::to_string(y.size()) + " labels");
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 1.0 && y(i) != -1.0) {
      throw DataFormatError("label at row " + std::to_string(i) +
                            " is not in {-1,+1}: " + std::to_string(y(i)));
    }
  }
}

DatasetSplits split_dataset(const Dataset& data, SplitFractions fractions,
                            std::uint64_t seed) {
  const double total = fractions.train + fractions.validation + fractions.test;
  if (fractions.train < 0 || fractions.validation < 0 || fractions.test < 0 ||
      total > 1.0 + 1e-12) {
    throw InvalidArgument("split fractions must be non-negative and sum to at most 1");
  }
  const std::size_t m = data.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(m) * fractions.validation));
  const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(m) * fractions.test));
  const std::size_t n_train = m - n_val - n_test;

  std::span<const std::size_t> all(order);
  DatasetSplits out;
  out.train = data.subset(all.subspan(0, n_train));
  out.validation = data.subset(all.subspan(n_train, n_val));
  out.test = data.subset(all.subspan(n_train + n_val, n_test));
  return out;
}

}  // namespace fpc
