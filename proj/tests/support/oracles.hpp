#pragma once

// Reference computations written independently of the library code they
// check. Slow and simple on purpose.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace fpc::testing {

/// C(n, k) from Pascal's triangle in 128-bit integers.
inline unsigned __int128 pascal_binomial(unsigned n, unsigned k) {
  std::vector<unsigned __int128> row(k + 1, 0);
  row[0] = 1;
  for (unsigned i = 1; i <= n; ++i) {
    for (unsigned j = std::min(i, k); j > 0; --j) row[j] += row[j - 1];
  }
  return row[k];
}

/// (1 + x.x2)^s in long double with a plain multiplication loop.
inline long double kernel_long(const std::vector<double>& x, const std::vector<double>& x2, int s) {
  long double dot = 1.0L;
  for (std::size_t i = 0; i < x.size(); ++i) dot += static_cast<long double>(x[i]) * x2[i];
  long double r = 1.0L;
  for (int i = 0; i < s; ++i) r *= dot;
  return r;
}

inline double prox_objective_ref(double a, double b, double gamma, double z) {
  return std::max(0.0, 1.0 - a * z) + 0.5 * gamma * (z - b) * (z - b);
}

/// Golden-section minimum value of the scalar prox objective. The bracket
/// contains every point where the convex objective can be minimal.
inline double golden_prox_min(double a, double b, double gamma) {
  const double reach = 10.0 * std::abs(a) / gamma + 10.0 + (a != 0.0 ? std::abs(1.0 / a) : 0.0);
  double lo = b - reach - std::abs(b);
  double hi = b + reach + std::abs(b);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - r * (hi - lo);
  double d = lo + r * (hi - lo);
  double fc = prox_objective_ref(a, b, gamma, c);
  double fd = prox_objective_ref(a, b, gamma, d);
  for (int it = 0; it < 300; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - r * (hi - lo);
      fc = prox_objective_ref(a, b, gamma, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + r * (hi - lo);
      fd = prox_objective_ref(a, b, gamma, d);
    }
  }
  return std::min(fc, fd);
}

/// Minimum of the prox objective over an evenly spaced grid.
inline double grid_prox_min(double a, double b, double gamma, double lo, double hi, int points) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double z = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    best = std::min(best, prox_objective_ref(a, b, gamma, z));
  }
  return best;
}

/// (1/m) sum (1 - y_i (A u)_i)_+ with an explicit loop.
inline double hinge_loss_ref(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& u) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double au = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) au += a(i, j) * u(j);
    total += std::max(0.0, 1.0 - y(i) * au);
  }
  return total / static_cast<double>(a.rows());
}

/// Optimal value of  max 1^T a  s.t.  0 <= a <= 1/m,  A^T Diag(y) a = 0  by
/// enumerating basic solutions: every vertex has all but rank(E) coordinates
/// at a bound. Exponential; for m up to about 10.
inline double dual_lp_by_vertices(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  const int m = static_cast<int>(a.rows());
  const double cap = 1.0 / m;
  Eigen::MatrixXd e = (y.asDiagonal() * a).transpose();  // n x m
  double best = -std::numeric_limits<double>::infinity();

  // free: bitmask of coordinates solved from the equations; the rest sit at
  // 0 or cap according to `upper`.
  for (int free = 0; free < (1 << m); ++free) {
    const int k = __builtin_popcount(static_cast<unsigned>(free));
    if (k > e.rows()) continue;
    std::vector<int> free_idx;
    std::vector<int> fixed_idx;
    for (int i = 0; i < m; ++i) ((free >> i) & 1 ? free_idx : fixed_idx).push_back(i);
    Eigen::MatrixXd ef(e.rows(), k);
    for (int j = 0; j < k; ++j) ef.col(j) = e.col(free_idx[j]);
    for (int upper = 0; upper < (1 << fixed_idx.size()); ++upper) {
      Eigen::VectorXd t = Eigen::VectorXd::Zero(m);
      for (std::size_t j = 0; j < fixed_idx.size(); ++j) {
        if ((upper >> j) & 1) t(fixed_idx[j]) = cap;
      }
      const Eigen::VectorXd rhs = -(e * t);
      Eigen::VectorXd sol = Eigen::VectorXd::Zero(k);
      if (k > 0) sol = ef.colPivHouseholderQr().solve(rhs);
      for (int j = 0; j < k; ++j) t(free_idx[j]) = sol(j);
      if ((e * t).cwiseAbs().maxCoeff() > 1e-9) continue;
      if (t.minCoeff() < -1e-12 || t.maxCoeff() > cap + 1e-12) continue;
      best = std::max(best, t.sum());
    }
  }
  return best;
}

/// Composite Simpson integral of f over [lo, hi] with `intervals` (even) panels.
template <typename F>
double simpson(F f, double lo, double hi, int intervals) {
  const double h = (hi - lo) / intervals;
  double s = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Gaussian design matrix and random +-1 labels.
struct RandomInstance {
  Eigen::MatrixXd a;
  Eigen::VectorXd y;
};

inline RandomInstance random_instance(std::mt19937_64& rng, int m, int n) {
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(0.5);
  RandomInstance inst{Eigen::MatrixXd(m, n), Eigen::VectorXd(m)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) inst.a(i, j) = normal(rng);
    inst.y(i) = coin(rng) ? 1.0 : -1.0;
  }
  return inst;
}

}  // namespace fpc::testing
