#include "fpc/admm.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "fpc/error.hpp"
#include "fpc/hinge_prox.hpp"

namespace fpc {

void AdmmParams::validate() const {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
}

AdmmState AdmmState::initial(std::size_t n, const Eigen::VectorXd& y) {
  AdmmState s;
  s.u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  s.v = y;
  s.w = Eigen::VectorXd::Zero(y.size());
  return s;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Tolerance: return "tolerance";
    case StopReason::MaxIterations: return "max_iters";
  }
  return "unknown";
}

std::optional<std::size_t> IterationTrace::first_increase(double slack, std::size_t first) const {
  for (std::size_t k = std::max<std::size_t>(first, 1); k < records.size(); ++k) {
    if (records[k].h_step_sq > records[k - 1].h_step_sq + slack) return k;
  }
  return std::nullopt;
}

void IterationTrace::write_csv(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "iter,objective,h_step_sq,primal_residual\n";
  for (const auto& r : records) {
    out << r.iter << ',' << r.objective << ',' << r.h_step_sq << ',' << r.primal_residual << '\n';
  }
  out.precision(old_precision);
}

Eigen::VectorXd update_u(const AdmmState& state, const DesignMatrix& dm, const AdmmParams& params) {
  const Eigen::VectorXd rhs =
      params.alpha * state.u + dm.a().transpose() * (params.beta * state.v - state.w);
  return dm.solve_normal(rhs);
}

Eigen::VectorXd update_v(const Eigen::VectorXd& au_next, const Eigen::VectorXd& w,
                         const Eigen::VectorXd& y, const AdmmParams& params) {
  const double gamma = static_cast<double>(y.size()) * params.beta;
  return hinge_vector(y, au_next + w / params.beta, gamma);
}

Eigen::VectorXd update_w(const Eigen::VectorXd& w, const Eigen::VectorXd& au_next,
                         const Eigen::VectorXd& v_next, const AdmmParams& params) {
  return w + params.beta * (au_next - v_next);
}

double h_step_norm_sq(const AdmmState& prev, const AdmmState& next, const AdmmParams& params) {
  if (prev.u.size() != next.u.size() || prev.v.size() != next.v.size() ||
      prev.w.size() != next.w.size()) {
    throw DimensionMismatch("h_step_norm_sq: states have different dimensions");
  }
  return params.alpha * (next.u - prev.u).squaredNorm() +
         params.beta * (next.v - prev.v).squaredNorm() +
         (next.w - prev.w).squaredNorm() / params.beta;
}

double hinge_objective(const Eigen::VectorXd& au, const Eigen::VectorXd& y) {
  if (au.size() != y.size()) throw DimensionMismatch("hinge_objective: length mismatch");
  if (y.size() == 0) return 0.0;
  return (1.0 - y.array() * au.array()).max(0.0).sum() / static_cast<double>(y.size());
}

AdmmResult solve(const DesignMatrix& dm, const Eigen::VectorXd& y, const AdmmParams& params,
                 std::optional<AdmmState> init, const VectorProx& prox) {
  params.validate();
  const auto m = static_cast<Eigen::Index>(dm.rows());
  const auto n = static_cast<Eigen::Index>(dm.cols());
  if (y.size() != m) {
    throw DimensionMismatch("solve: " + std::to_string(y.size()) + " labels for " +
                            std::to_string(m) + " rows");
  }

  AdmmResult result;
  AdmmState& cur = result.state;
  cur = init ? std::move(*init) : AdmmState::initial(static_cast<std::size_t>(n), y);
  if (cur.u.size() != n || cur.v.size() != m || cur.w.size() != m) {
    throw DimensionMismatch("solve: initial state does not match the design matrix");
  }

  const double gamma = static_cast<double>(m) * params.beta;
  const double tol_scale =
      params.normalized_tol ? static_cast<double>(n + 2 * m) : 1.0;
  const Eigen::MatrixXd& a = dm.a();

  AdmmState next;
  Eigen::VectorXd au(m);
  result.trace.records.reserve(static_cast<std::size_t>(std::min(params.max_iters, 1 << 16)));

  for (int it = 0; it < params.max_iters; ++it) {
    next.u = update_u(cur, dm, params);
    au.noalias() = a * next.u;
    const Eigen::VectorXd z = au + cur.w / params.beta;
    next.v = prox ? prox(y, z, gamma) : hinge_vector(y, z, gamma);
    next.w = update_w(cur.w, au, next.v, params);
    next.k = cur.k + 1;

    if (!next.u.allFinite() || !next.v.allFinite() || !next.w.allFinite()) {
      std::ostringstream msg;
      msg << "ADMM produced a non-finite iterate at k=" << next.k << " (|u|=" << cur.u.norm()
          << ", |v|=" << cur.v.norm() << ", |w|=" << cur.w.norm() << ", alpha=" << params.alpha
          << ", beta=" << params.beta << ")";
      throw NumericalError(msg.str());
    }

    IterationRecord rec;
    rec.iter = next.k;
    rec.h_step_sq = h_step_norm_sq(cur, next, params);
    rec.objective = hinge_objective(au, y);
    rec.primal_residual = (au - next.v).norm();
    result.trace.records.push_back(rec);

    std::swap(cur, next);
    if (rec.h_step_sq / tol_scale < params.tol) {
      result.trace.stop = StopReason::Tolerance;
      return result;
    }
  }
  result.trace.stop = StopReason::MaxIterations;
  return result;
}

}  // namespace fpc
