#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "fpc/dataset.hpp"

namespace fpc {

/// Bayes boundary of the toy problem on [0,1]:
///   h(t) = ((1 - 2t)_+^5 (32 t^2 + 10 t + 1) + 1) / 2.
/// Throws InvalidArgument for t outside [0,1].
double bayes_h(double t);

/// Clean label of a point in [0,1]^2: +1 on or above the curve, else -1.
double bayes_label(double x1, double x2);

enum class NoiseKind {
  GlobalUniform,  // flips floor(m * ratio) labels chosen uniformly
  BandNearBayes,  // flips only points with |x2 - h(x1)| <= width
  FarFromBayes,   // flips only points with |x2 - h(x1)| > width
};

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view text);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::GlobalUniform;
  double ratio = 0.0;  // fraction of the eligible region that is flipped
  double width = 0.1;  // vertical band half-width, band kinds only

  void validate() const;
};

struct ToyData {
  Dataset data;
  std::vector<std::size_t> flipped;  // indices whose label was reversed, ascending
  std::size_t eligible = 0;          // size of the region noise was drawn from
  /// flipped.size() / m; differs from ratio for the band kinds.
  double effective_flip_fraction() const;
  /// Fraction of +1 labels.
  double positive_fraction() const;
};

/// m points uniform on [0,1]^2 labelled by the Bayes rule, with the noise of
/// `noise` applied. Exactly floor(eligible * ratio) labels are flipped.
ToyData generate_toy(std::size_t m, const NoiseSpec& noise, std::uint64_t seed);

/// Noise-free sample drawn by the same procedure.
Dataset generate_test(std::size_t m, std::uint64_t seed);

}  // namespace fpc
