#include "fpc/synthetic_data.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fpc/error.hpp"

namespace fpc {

double bayes_h(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InvalidArgument("bayes_h: t=" + std::to_string(t) + " is outside [0,1]");
  }
  const double base = std::max(0.0, 1.0 - 2.0 * t);
  const double b2 = base * base;
  return (b2 * b2 * base * (32.0 * t * t + 10.0 * t + 1.0) + 1.0) / 2.0;
}

double bayes_label(double x1, double x2) { return x2 >= bayes_h(x1) ? 1.0 : -1.0; }

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::GlobalUniform: return "global";
    case NoiseKind::BandNearBayes: return "band";
    case NoiseKind::FarFromBayes: return "far";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "global") return NoiseKind::GlobalUniform;
  if (text == "band") return NoiseKind::BandNearBayes;
  if (text == "far") return NoiseKind::FarFromBayes;
  throw InvalidArgument("unknown noise kind '" + std::string(text) + "' (expected global, band or far)");
}

void NoiseSpec::validate() const {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw InvalidArgument("noise ratio must lie in [0,1]");
  if (kind != NoiseKind::GlobalUniform && !(width > 0.0)) {
    throw InvalidArgument("noise band width must be positive");
  }
}

double ToyData::effective_flip_fraction() const {
  return data.empty() ? 0.0 : static_cast<double>(flipped.size()) / static_cast<double>(data.size());
}

double ToyData::positive_fraction() const {
  return data.empty() ? 0.0 : (data.y.array() > 0).count() / static_cast<double>(data.size());
}

ToyData generate_toy(std::size_t m, const NoiseSpec& noise, std::uint64_t seed) {
  noise.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ToyData out;
  out.data.x.resize(static_cast<Eigen::Index>(m), 2);
  out.data.y.resize(static_cast<Eigen::Index>(m));
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double x1 = unit(rng);
    const double x2 = unit(rng);
    out.data.x(r, 0) = x1;
    out.data.x(r, 1) = x2;
    out.data.y(r) = bayes_label(x1, x2);
    const double dist = std::abs(x2 - bayes_h(x1));
    const bool in_region = noise.kind == NoiseKind::GlobalUniform ||
                           (noise.kind == NoiseKind::BandNearBayes && dist <= noise.width) ||
                           (noise.kind == NoiseKind::FarFromBayes && dist > noise.width);
    if (in_region) eligible.push_back(i);
  }
  out.eligible = eligible.size();

  const auto flips = static_cast<std::size_t>(
      std::floor(static_cast<double>(eligible.size()) * noise.ratio));
  for (std::size_t j = 0; j < flips; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, eligible.size() - 1);
    std::swap(eligible[j], eligible[pick(rng)]);
  }
  out.flipped.assign(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(flips));
  std::sort(out.flipped.begin(), out.flipped.end());
  for (auto i : out.flipped) out.data.y(static_cast<Eigen::Index>(i)) *= -1.0;
  return out;
}

Dataset generate_test(std::size_t m, std::uint64_t seed) {
  return generate_toy(m, NoiseSpec{NoiseKind::GlobalUniform, 0.0, 0.1}, seed).data;
}

}  // namespace fpc
