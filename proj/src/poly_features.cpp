#include "fpc/poly_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/SVD>

#include "fpc/error.hpp"
#include "fpc/log.hpp"

namespace fpc {

namespace {

constexpr std::size_t kMaxCheckedCenters = 2000;
// Skip the unisolvence SVD when n^2 * N exceeds this many flops.
constexpr double kMaxCheckCost = 4e9;
constexpr int kMaxRedraws = 5;
constexpr double kGreedyResidualTol = 1e-8;
constexpr Eigen::Index kGramBlockRows = 2048;

std::uint64_t feature_dim_or_max(KernelDegree s, std::size_t d) {
  try {
    return feature_dim(s, d);
  } catch (const OverflowError&) {
    return std::numeric_limits<std::uint64_t>::max();
  }
}

// Multi-indices of total degree <= s in d variables, one per row.
std::vector<std::vector<int>> multi_indices(int s, std::size_t d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(d, 0);
  auto rec = [&](auto&& self, std::size_t k, int budget) -> void {
    if (k == d) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= budget; ++e) {
      cur[k] = e;
      self(self, k + 1, budget - e);
    }
    cur[k] = 0;
  };
  rec(rec, 0, s);
  return out;
}

// Tensor Chebyshev features of one point; lo/hi map the box to [-1,1]^d.
class ChebyshevBasis {
 public:
  ChebyshevBasis(int s, std::size_t d, Eigen::VectorXd lo, Eigen::VectorXd hi)
      : s_(s), d_(d), lo_(std::move(lo)), hi_(std::move(hi)), alphas_(multi_indices(s, d)) {}

  std::size_t size() const noexcept { return alphas_.size(); }

  Eigen::VectorXd features(std::span<const double> x) const {
    Eigen::MatrixXd t(static_cast<Eigen::Index>(d_), s_ + 1);
    for (std::size_t k = 0; k < d_; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const double range = hi_(kk) - lo_(kk);
      const double z = range > 0 ? 2.0 * (x[k] - lo_(kk)) / range - 1.0 : 0.0;
      t(kk, 0) = 1.0;
      if (s_ >= 1) t(kk, 1) = z;
      for (int e = 2; e <= s_; ++e) t(kk, e) = 2.0 * z * t(kk, e - 1) - t(kk, e - 2);
    }
    Eigen::VectorXd f(static_cast<Eigen::Index>(alphas_.size()));
    for (std::size_t c = 0; c < alphas_.size(); ++c) {
      double v = 1.0;
      for (std::size_t k = 0; k < d_; ++k) v *= t(static_cast<Eigen::Index>(k), alphas_[c][k]);
      f(static_cast<Eigen::Index>(c)) = v;
    }
    return f;
  }

 private:
  int s_;
  std::size_t d_;
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
  std::vector<std::vector<int>> alphas_;
};

bool check_applicable(std::size_t n, std::uint64_t space_dim) {
  if (n == 0 || n > kMaxCheckedCenters || n > space_dim) return false;
  const double cost = static_cast<double>(n) * static_cast<double>(n) *
                      static_cast<double>(space_dim);
  return cost <= kMaxCheckCost;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(const RowMatrix& pts) {
  Eigen::VectorXd lo = pts.colwise().minCoeff().transpose();
  Eigen::VectorXd hi = pts.colwise().maxCoeff().transpose();
  return {lo, hi};
}

// Accepts candidates in order while they add a new direction to the span of
// Chebyshev features; stops at `target` accepted rows.
RowMatrix greedy_independent(const RowMatrix& candidates, std::size_t target,
                             KernelDegree s, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  const std::size_t d = static_cast<std::size_t>(candidates.cols());
  ChebyshevBasis basis(s.value(), d, lo, hi);
  const auto space = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd q(space, static_cast<Eigen::Index>(target));
  std::vector<Eigen::Index> accepted;
  for (Eigen::Index i = 0; i < candidates.rows() && accepted.size() < target; ++i) {
    const std::span<const double> row(candidates.data() + i * candidates.cols(), d);
    Eigen::VectorXd f = basis.features(row);
    const double norm = f.norm();
    if (norm == 0.0) continue;
    const auto k = static_cast<Eigen::Index>(accepted.size());
    for (int pass = 0; pass < 2; ++pass) {
      f -= q.leftCols(k) * (q.leftCols(k).transpose() * f);
    }
    const double res = f.norm();
    if (res <= kGreedyResidualTol * norm) continue;
    q.col(k) = f / res;
    accepted.push_back(i);
  }
  RowMatrix out(static_cast<Eigen::Index>(accepted.size()), candidates.cols());
  for (std::size_t r = 0; r < accepted.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = candidates.row(accepted[r]);
  }
  return out;
}

RowMatrix draw_centers(const Dataset& data, CenterScheme scheme, std::size_t n,
                       std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(data.dim());
  RowMatrix out(static_cast<Eigen::Index>(n), d);
  switch (scheme) {
    case CenterScheme::FirstN:
      out = data.x.topRows(static_cast<Eigen::Index>(n));
      break;
    case CenterScheme::RandomSubsample: {
      // Partial Fisher-Yates: the first n slots are a uniform sample
      // without replacement.
      std::vector<std::size_t> idx(data.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      for (std::size_t j = 0; j < n; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, idx.size() - 1);
        std::swap(idx[j], idx[pick(rng)]);
        out.row(static_cast<Eigen::Index>(j)) = data.x.row(static_cast<Eigen::Index>(idx[j]));
      }
      break;
    }
    case CenterScheme::UniformRandom: {
      const auto [lo, hi] = bounding_box(data.x);
      for (Eigen::Index j = 0; j < out.rows(); ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
          std::uniform_real_distribution<double> u(lo(k), hi(k));
          out(j, k) = hi(k) > lo(k) ? u(rng) : lo(k);
        }
      }
      break;
    }
  }
  return out;
}

// Candidate stream for the greedy fallback.
RowMatrix fallback_candidates(const Dataset& data, CenterScheme scheme, std::size_t n,
                              std::mt19937_64& rng) {
  const std::size_t budget = std::max<std::size_t>(20 * n, 64);
  switch (scheme) {
    case CenterScheme::FirstN:
      return data.x.topRows(static_cast<Eigen::Index>(std::min(budget, data.size())));
    case CenterScheme::RandomSubsample:
      return draw_centers(data, scheme, std::min(budget, data.size()), rng);
    case CenterScheme::UniformRandom:
      return draw_centers(data, scheme, budget, rng);
  }
  return {};
}

}  // namespace

KernelDegree::KernelDegree(int s) : s_(s) {
  if (s < 1) throw InvalidArgument("kernel degree must be >= 1, got " + std::to_string(s));
}

std::string_view to_string(CenterScheme scheme) {
  switch (scheme) {
    case CenterScheme::UniformRandom: return "uniform";
    case CenterScheme::FirstN: return "firstn";
    case CenterScheme::RandomSubsample: return "subsample";
  }
  return "unknown";
}

CenterScheme parse_center_scheme(std::string_view text) {
  if (text == "uniform" || text == "UniformRandom") return CenterScheme::UniformRandom;
  if (text == "firstn" || text == "FirstN") return CenterScheme::FirstN;
  if (text == "subsample" || text == "RandomSubsample") return CenterScheme::RandomSubsample;
  throw InvalidArgument("unknown center scheme '" + std::string(text) +
                        "' (expected uniform, firstn or subsample)");
}

std::uint64_t feature_dim(KernelDegree s, std::size_t d) {
  if (d < 1) throw InvalidArgument("input dimension must be >= 1");
  // C(s+d, k) with k = min(s, d); every prefix product is itself a binomial
  // coefficient, so each division is exact.
  const auto sd = static_cast<unsigned __int128>(s.value()) + d;
  const auto k = std::min<unsigned __int128>(static_cast<unsigned __int128>(s.value()), d);
  unsigned __int128 r = 1;
  for (unsigned __int128 i = 1; i <= k; ++i) {
    r = r * (sd - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      throw OverflowError("feature_dim overflows 64 bits for s=" + std::to_string(s.value()) +
                          ", d=" + std::to_string(d));
    }
  }
  return static_cast<std::uint64_t>(r);
}

double int_pow(double base, int s) noexcept {
  double result = 1.0;
  while (s > 0) {
    if (s & 1) result *= base;
    base *= base;
    s >>= 1;
  }
  return result;
}

double kernel_eval(std::span<const double> x, std::span<const double> x2, KernelDegree s) {
  if (x.size() != x2.size()) {
    throw DimensionMismatch("kernel_eval: dimensions " + std::to_string(x.size()) + " and " +
                            std::to_string(x2.size()) + " differ");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * x2[i];
  return int_pow(1.0 + dot, s.value());
}

std::optional<double> unisolvence_ratio(const RowMatrix& centers, KernelDegree s) {
  const auto n = static_cast<std::size_t>(centers.rows());
  const std::size_t d = static_cast<std::size_t>(centers.cols());
  if (d == 0) return std::nullopt;
  const std::uint64_t space = feature_dim_or_max(s, d);
  if (!check_applicable(n, space)) return std::nullopt;

  const auto [lo, hi] = bounding_box(centers);
  ChebyshevBasis basis(s.value(), d, lo, hi);
  Eigen::MatrixXd v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < n; ++j) {
    v.row(static_cast<Eigen::Index>(j)) =
        basis.features({centers.data() + j * d, d}).transpose();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(v);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

CenterSet generate_centers(const Dataset& data, KernelDegree s, CenterScheme scheme,
                           std::uint64_t seed, const CenterOptions& options) {
  if (data.empty()) throw EmptyDataError("generate_centers: dataset is empty");
  const std::size_t m = data.size();
  const std::uint64_t space = feature_dim_or_max(s, data.dim());

  std::size_t n = options.n_override.value_or(
      static_cast<std::size_t>(std::min<std::uint64_t>(space, m)));
  if (scheme != CenterScheme::UniformRandom) n = std::min(n, m);
  if (n == 0) throw InvalidArgument("generate_centers: requested zero centers");

  CenterSet out;
  out.scheme = scheme;
  const bool verify = options.verify && check_applicable(n, space);

  for (int attempt = 0;; ++attempt) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(attempt)};
    std::mt19937_64 rng(seq);
    out.centers = draw_centers(data, scheme, n, rng);
    if (!verify) return out;

    const auto ratio = unisolvence_ratio(out.centers, s);
    out.rank_ratio = ratio;
    if (!ratio || *ratio > options.rank_tolerance) return out;

    if (scheme != CenterScheme::FirstN && attempt + 1 < kMaxRedraws) {
      ++out.redraws;
      log::warn("centers are not a fundamental system (rank ratio " + std::to_string(*ratio) +
                "); redrawing");
      continue;
    }

    // Deterministic fallback: keep only inputs that add a new direction.
    const RowMatrix candidates = fallback_candidates(data, scheme, n, rng);
    const auto [lo, hi] = bounding_box(candidates);
    out.centers = greedy_independent(candidates, n, s, lo, hi);
    out.dropped = n - static_cast<std::size_t>(out.centers.rows());
    out.rank_ratio = unisolvence_ratio(out.centers, s);
    std::ostringstream msg;
    msg << "centers are not a fundamental system; kept " << out.centers.rows() << " of " << n
        << " independent " << to_string(scheme) << " centers";
    if (out.rank_ratio) msg << " (rank ratio " << *out.rank_ratio << ")";
    log::warn(msg.str());
    if (out.centers.rows() == 0) throw InternalError("no independent centers found");
    return out;
  }
}

DesignMatrix::DesignMatrix(Eigen::MatrixXd a, double alpha, double beta, int threads)
    : a_(std::move(a)), alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw InvalidArgument("alpha and beta must be positive");
  }
  Eigen::MatrixXd normal = gram(a_, threads);
  normal *= beta_;
  normal.diagonal().array() += alpha_;
  factor_.compute(normal);
  if (factor_.info() != Eigen::Success) {
    throw NumericalError("Cholesky factorization of beta*A^T A + alpha*I failed (n=" +
                         std::to_string(a_.cols()) + ", alpha=" + std::to_string(alpha) + ")");
  }
}

Eigen::VectorXd DesignMatrix::solve_normal(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = factor_.solve(rhs);
  // Residuals use the unformed operator; the factor alone loses accuracy once
  // beta*A^T A dwarfs alpha (high degrees). A step is kept only if it helps.
  auto residual = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    return rhs - (beta_ * (a_.transpose() * (a_ * z)) + alpha_ * z);
  };
  Eigen::VectorXd r = residual(x);
  double r_norm = r.norm();
  for (int step = 0; step < kRefineSteps && r_norm > 0.0; ++step) {
    Eigen::VectorXd candidate = x + factor_.solve(r);
    Eigen::VectorXd r_next = residual(candidate);
    const double next_norm = r_next.norm();
    if (!(next_norm < r_norm)) break;
    x = std::move(candidate);
    r = std::move(r_next);
    r_norm = next_norm;
  }
  return x;
}

Eigen::VectorXd DesignMatrix::apply_normal(const Eigen::VectorXd& z) const {
  return factor_.matrixL() * (factor_.matrixU() * z);
}

Eigen::MatrixXd DesignMatrix::gram(const Eigen::MatrixXd& a, int threads) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index blocks = (m + kGramBlockRows - 1) / kGramBlockRows;
  const auto workers = static_cast<Eigen::Index>(
      std::clamp<Eigen::Index>(threads, 1, std::max<Eigen::Index>(blocks, 1)));

  // Worker t owns a contiguous run of blocks; partials are summed in worker
  // order, so the result depends only on (m, threads).
  std::vector<Eigen::MatrixXd> partial(static_cast<std::size_t>(workers),
                                       Eigen::MatrixXd::Zero(n, n));
  auto run = [&](Eigen::Index t) {
    const Eigen::Index b0 = blocks * t / workers;
    const Eigen::Index b1 = blocks * (t + 1) / workers;
    auto& g = partial[static_cast<std::size_t>(t)];
    for (Eigen::Index b = b0; b < b1; ++b) {
      const Eigen::Index r0 = b * kGramBlockRows;
      const Eigen::Index len = std::min(kGramBlockRows, m - r0);
      g.selfadjointView<Eigen::Lower>().rankUpdate(a.middleRows(r0, len).transpose());
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (Eigen::Index t = 0; t < workers; ++t) pool.emplace_back(run, t);
  }
  Eigen::MatrixXd g = std::move(partial[0]);
  for (std::size_t t = 1; t < partial.size(); ++t) g += partial[t];
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

Eigen::MatrixXd kernel_matrix(const RowMatrix& points, const RowMatrix& centers, KernelDegree s) {
  if (points.cols() != centers.cols()) {
    throw DimensionMismatch("kernel_matrix: points have dimension " +
                            std::to_string(points.cols()) + " but centers have " +
                            std::to_string(centers.cols()));
  }
  const auto d = static_cast<std::size_t>(points.cols());
  Eigen::MatrixXd a(points.rows(), centers.rows());
  for (Eigen::Index j = 0; j < centers.rows(); ++j) {
    const std::span<const double> eta(centers.data() + j * centers.cols(), d);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      a(i, j) = kernel_eval({points.data() + i * points.cols(), d}, eta, s);
    }
  }
  return a;
}

DesignMatrix build_design_matrix(const Dataset& data, const CenterSet& centers, KernelDegree s,
                                 double alpha, double beta, int threads) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw InvalidArgument("alpha and beta must be positive (alpha=" + std::to_string(alpha) +
                          ", beta=" + std::to_string(beta) + ")");
  }
  return DesignMatrix(kernel_matrix(data.x, centers.centers, s), alpha, beta, threads);
}

}  // namespace fpc
