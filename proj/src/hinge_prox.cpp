#include "fpc/hinge_prox.hpp"

#include <algorithm>
#include <string>

#include "fpc/error.hpp"

namespace fpc {

namespace {

void require_positive_gamma(double gamma) {
  if (!(gamma > 0.0)) {
    throw InvalidArgument("hinge prox weight gamma must be positive, got " + std::to_string(gamma));
  }
}

inline double hinge_unchecked(double a, double b, double gamma) noexcept {
  if (a == 0.0) return b;
  const double ab = a * b;
  if (ab <= 1.0 - a * a / gamma) return b + a / gamma;
  if (ab < 1.0) return 1.0 / a;
  return b;
}

}  // namespace

double hinge_scalar(double a, double b, double gamma) {
  require_positive_gamma(gamma);
  return hinge_unchecked(a, b, gamma);
}

double hinge_label(double label, double b, double gamma) {
  require_positive_gamma(gamma);
  const double ab = label * b;
  if (ab <= 1.0 - 1.0 / gamma) return b + label / gamma;
  if (ab < 1.0) return label;  // 1/a == a for a = +-1
  return b;
}

Eigen::VectorXd hinge_vector(const Eigen::VectorXd& y, const Eigen::VectorXd& z, double gamma) {
  require_positive_gamma(gamma);
  if (y.size() != z.size()) {
    throw DimensionMismatch("hinge_vector: y has length " + std::to_string(y.size()) +
                            " but z has length " + std::to_string(z.size()));
  }
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = hinge_unchecked(y(i), z(i), gamma);
  return out;
}

double hinge_prox_objective(double a, double b, double gamma, double z) noexcept {
  return std::max(0.0, 1.0 - a * z) + 0.5 * gamma * (z - b) * (z - b);
}

}  // namespace fpc
