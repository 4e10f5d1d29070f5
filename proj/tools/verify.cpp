#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Core>

#include "fpc/admm.hpp"
#include "fpc/hinge_prox.hpp"
#include "fpc/poly_features.hpp"
#include "fpc/reference_oracles.hpp"

namespace fpc::cli {
namespace {

struct Instance {
  Eigen::MatrixXd a;
  Eigen::VectorXd y;
};

Instance random_instance(std::mt19937_64& rng, int m_lo, int m_hi, int n_lo, int n_hi) {
  std::uniform_int_distribution<int> m_dist(m_lo, m_hi);
  std::uniform_int_distribution<int> n_dist(n_lo, n_hi);
  std::normal_distribution<double> normal;
  const int m = m_dist(rng);
  const int n = n_dist(rng);
  Instance inst{Eigen::MatrixXd(m, n), Eigen::VectorXd(m)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) inst.a(i, j) = normal(rng);
  }
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < m; ++i) inst.y(i) = coin(rng) ? 1.0 : -1.0;
  return inst;
}

VectorProx vector_prox(const ScalarProx& prox) {
  if (!prox) return {};
  return [prox](const Eigen::VectorXd& y, const Eigen::VectorXd& z, double gamma) {
    Eigen::VectorXd out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = prox(y(i), z(i), gamma);
    return out;
  };
}

CheckResult check_prox(const VerifyOptions& opt, const ScalarProx& prox, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> point(-5.0, 5.0);
  std::uniform_real_distribution<double> log_gamma(-3.0, 3.0);

  int violations = 0;
  double worst = 0.0;
  nlohmann::json first;
  for (int t = 0; t < opt.prox_cases; ++t) {
    const double pick = unit(rng);
    double a = coef(rng);
    if (pick < 0.4) a = unit(rng) < 0.5 ? -1.0 : 1.0;
    else if (pick < 0.5) a = 0.0;
    const double b = point(rng);
    const double gamma = std::pow(10.0, log_gamma(rng));

    const double z = prox(a, b, gamma);
    const double got = hinge_prox_objective(a, b, gamma, z);
    const double best = prox_oracle_minimum(a, b, gamma);
    const double excess = got - best;
    worst = std::max(worst, excess);
    if (!(excess <= opt.prox_slack)) {
      if (violations == 0) {
        first = {{"a", a}, {"b", b}, {"gamma", gamma}, {"z", z},
                 {"objective", got}, {"oracle", best}};
      }
      ++violations;
    }
  }
  CheckResult r{"prox_oracle", violations == 0,
                {{"cases", opt.prox_cases}, {"violations", violations}, {"worst_excess", worst}}};
  if (violations > 0) r.detail["first_violation"] = first;
  return r;
}

CheckResult check_monotone(const VerifyOptions& opt, const ScalarProx& prox,
                           std::mt19937_64& rng) {
  constexpr double kAlphas[] = {1e-3, 1.0, 10.0};
  constexpr double kBetas[] = {1e-2, 1.0, 1e2};
  std::uniform_int_distribution<int> pick(0, 2);
  const VectorProx vprox = vector_prox(prox);

  int violations = 0;
  nlohmann::json first;
  for (int t = 0; t < opt.monotone_instances; ++t) {
    Instance inst = random_instance(rng, 20, 200, 3, 20);
    AdmmParams p;
    p.alpha = kAlphas[pick(rng)];
    p.beta = kBetas[pick(rng)];
    p.tol = 1e-300;
    p.max_iters = opt.monotone_iters;
    const DesignMatrix dm(inst.a, p.alpha, p.beta);
    const AdmmResult res = solve(dm, inst.y, p, std::nullopt, vprox);
    if (auto k = res.trace.first_increase(opt.monotone_slack)) {
      if (violations == 0) {
        first = {{"instance", t},
                 {"m", inst.a.rows()},
                 {"n", inst.a.cols()},
                 {"alpha", p.alpha},
                 {"beta", p.beta},
                 {"iter", res.trace.records[*k].iter},
                 {"step", res.trace.records[*k].h_step_sq},
                 {"previous", res.trace.records[*k - 1].h_step_sq}};
      }
      ++violations;
    }
  }
  CheckResult r{"monotonicity", violations == 0,
                {{"instances", opt.monotone_instances},
                 {"iterations", opt.monotone_iters},
                 {"violations", violations}}};
  if (violations > 0) r.detail["first_violation"] = first;
  return r;
}

}  // namespace

double prox_oracle_minimum(double a, double b, double gamma) {
  double lo = b;
  double hi = b;
  const double shifted = b + a / gamma;
  lo = std::min(lo, shifted);
  hi = std::max(hi, shifted);
  if (a != 0.0) {
    lo = std::min(lo, 1.0 / a);
    hi = std::max(hi, 1.0 / a);
  }
  lo -= 1.0;
  hi += 1.0;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double z) { return hinge_prox_objective(a, b, gamma, z); };
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({f1, f2, f(0.5 * (lo + hi))});
}

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    nlohmann::json entry = c.detail;
    entry["name"] = c.name;
    entry["pass"] = c.pass;
    list.push_back(std::move(entry));
  }
  return {{"pass", pass()}, {"checks", std::move(list)}};
}

VerifyReport run_verify(const VerifyOptions& options) {
  const ScalarProx prox =
      options.prox ? options.prox : ScalarProx([](double a, double b, double g) {
        return hinge_scalar(a, b, g);
      });
  std::mt19937_64 rng(options.seed);
  VerifyReport report;
  report.checks.push_back(check_prox(options, prox, rng));
  report.checks.push_back(check_monotone(options, prox, rng));

  // Duality gap and KKT share the ADMM / LP solve of each instance.
  const VectorProx vprox = vector_prox(options.prox);
  int gap_fail = 0;
  int kkt_fail = 0;
  double worst_gap = 0.0;
  double worst_kkt = 0.0;
  nlohmann::json instances = nlohmann::json::array();
  for (int t = 0; t < options.lp_instances; ++t) {
    Instance inst = random_instance(rng, 20, 60, 2, 8);
    AdmmParams p;
    p.tol = options.admm_tol;
    p.max_iters = options.admm_max_iters;
    const DesignMatrix dm(inst.a, p.alpha, p.beta);
    const AdmmResult res = solve(dm, inst.y, p, std::nullopt, vprox);
    const DualSolution dual = solve_dual_lp(inst.a, inst.y);
    const KktReport kkt = check_kkt(inst.a, inst.y, res.state.u, dual, options.kkt_tol);
    const double gap = std::abs(kkt.primal_objective - dual.value);
    const bool gap_ok = gap <= options.gap_tol;
    worst_gap = std::max(worst_gap, gap);
    worst_kkt = std::max(worst_kkt, kkt.max_violation());
    gap_fail += gap_ok ? 0 : 1;
    kkt_fail += kkt.pass ? 0 : 1;
    instances.push_back({{"m", inst.a.rows()},
                         {"n", inst.a.cols()},
                         {"iterations", res.trace.iterations()},
                         {"primal", kkt.primal_objective},
                         {"dual", dual.value},
                         {"gap", gap}});
  }
  report.checks.push_back({"duality_gap",
                           gap_fail == 0,
                           {{"instances", instances},
                            {"tol", options.gap_tol},
                            {"worst", worst_gap},
                            {"failures", gap_fail}}});
  report.checks.push_back({"kkt",
                           kkt_fail == 0,
                           {{"instances", options.lp_instances},
                            {"tol", options.kkt_tol},
                            {"worst_violation", worst_kkt},
                            {"failures", kkt_fail}}});
  return report;
}

}  // namespace fpc::cli
