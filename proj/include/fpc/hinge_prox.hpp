#pragma once

#include <Eigen/Core>

namespace fpc {

/// argmin_z  max{0, 1 - a z} + (gamma/2) (z - b)^2, in closed form:
///
///   b              if a == 0
///   b + a/gamma    if a b <= 1 - a^2/gamma
///   1/a            if 1 - a^2/gamma < a b < 1
///   b              if a b >= 1
///
/// Cases are tested in this order, so a boundary point takes the first
/// matching branch (all branches agree there). Throws InvalidArgument unless
/// gamma > 0.
double hinge_scalar(double a, double b, double gamma);

/// Same operator specialized to a label a in {-1,+1}, where a^2 = 1.
double hinge_label(double label, double b, double gamma);

/// Componentwise hinge_scalar(y_i, z_i, gamma).
Eigen::VectorXd hinge_vector(const Eigen::VectorXd& y, const Eigen::VectorXd& z, double gamma);

/// The objective hinge_scalar minimizes; exposed for oracle checks.
double hinge_prox_objective(double a, double b, double gamma, double z) noexcept;

}  // namespace fpc
