#include "fpc/fpc_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#include "fpc/error.hpp"

namespace fpc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

MinMaxScaler MinMaxScaler::fit(const RowMatrix& x, bool enabled) {
  MinMaxScaler s;
  s.enabled = enabled;
  if (enabled && x.rows() > 0) {
    s.lo = x.colwise().minCoeff().transpose();
    s.hi = x.colwise().maxCoeff().transpose();
  } else {
    s.lo = Eigen::VectorXd::Zero(x.cols());
    s.hi = Eigen::VectorXd::Ones(x.cols());
  }
  return s;
}

void MinMaxScaler::transform_point(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dim() || out.size() != dim()) {
    throw DimensionMismatch("scaler expects dimension " + std::to_string(dim()) + ", got " +
                            std::to_string(in.size()));
  }
  for (std::size_t k = 0; k < in.size(); ++k) {
    if (!enabled) {
      out[k] = in[k];
      continue;
    }
    const auto kk = static_cast<Eigen::Index>(k);
    const double range = hi(kk) - lo(kk);
    out[k] = range > 0.0 ? (in[k] - lo(kk)) / range : 0.0;
  }
}

RowMatrix MinMaxScaler::transform(const RowMatrix& x) const {
  RowMatrix out(x.rows(), x.cols());
  const auto d = static_cast<std::size_t>(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    transform_point({x.data() + i * x.cols(), d}, {out.data() + i * out.cols(), d});
  }
  return out;
}

FpcModel::FpcModel(KernelDegree s, RowMatrix centers, Eigen::VectorXd coefficients,
                   MinMaxScaler scaling, TrainingSummary summary)
    : s_(s), centers_(std::move(centers)), coef_(std::move(coefficients)),
      scaling_(std::move(scaling)), summary_(summary) {
  if (centers_.rows() != coef_.size()) {
    throw DimensionMismatch("model has " + std::to_string(centers_.rows()) + " centers but " +
                            std::to_string(coef_.size()) + " coefficients");
  }
  if (static_cast<std::size_t>(centers_.cols()) != scaling_.dim() ||
      scaling_.lo.size() != scaling_.hi.size()) {
    throw DimensionMismatch("model scaling dimension does not match the centers");
  }
}

double FpcModel::decision_value(std::span<const double> x) const {
  const std::size_t d = input_dim();
  if (x.size() != d) {
    throw DimensionMismatch("predict: expected a point of dimension " + std::to_string(d) +
                            ", got " + std::to_string(x.size()));
  }
  std::vector<double> z(d);
  scaling_.transform_point(x, z);
  return expansion(z);
}

double FpcModel::expansion(std::span<const double> z) const {
  const std::size_t d = z.size();
  double f = 0.0;
  for (Eigen::Index j = 0; j < coef_.size(); ++j) {
    f += coef_(j) * kernel_eval(z, {centers_.data() + j * centers_.cols(), d}, s_);
  }
  return f;
}

int FpcModel::predict(std::span<const double> x) const { return decision_value(x) >= 0.0 ? 1 : -1; }

Eigen::VectorXd FpcModel::decision_values(const RowMatrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != input_dim()) {
    throw DimensionMismatch("predict: expected dimension " + std::to_string(input_dim()) +
                            ", got " + std::to_string(x.cols()));
  }
  const RowMatrix z = scaling_.transform(x);
  const auto d = static_cast<std::size_t>(z.cols());
  Eigen::VectorXd f(x.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) f(i) = expansion({z.data() + i * z.cols(), d});
  return f;
}

std::vector<int> FpcModel::predict(const RowMatrix& x) const {
  const Eigen::VectorXd f = decision_values(x);
  std::vector<int> out(static_cast<std::size_t>(f.size()));
  for (Eigen::Index i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(i)] = f(i) >= 0.0 ? 1 : -1;
  return out;
}

FpcModel FpcModel::scaled(double factor) const {
  return FpcModel(s_, centers_, coef_ * factor, scaling_, summary_);
}

FpcModel train(const Dataset& data, const TrainOptions& options, IterationTrace* trace) {
  if (data.empty()) throw EmptyDataError("train: dataset is empty");
  data.validate_labels();
  options.admm.validate();
  const KernelDegree s(options.degree);
  const auto start = Clock::now();

  MinMaxScaler scaler = MinMaxScaler::fit(data.x, options.scale_inputs);
  Dataset scaled{scaler.transform(data.x), data.y};

  CenterOptions copts;
  copts.n_override = options.n_override;
  copts.verify = options.verify_centers;
  CenterSet centers = generate_centers(scaled, s, options.scheme, options.seed, copts);

  const DesignMatrix dm =
      build_design_matrix(scaled, centers, s, options.admm.alpha, options.admm.beta, options.threads);
  AdmmResult result = solve(dm, data.y, options.admm);

  TrainingSummary summary;
  summary.m = data.size();
  summary.params = options.admm;
  summary.scheme = options.scheme;
  summary.seed = options.seed;
  summary.iterations = static_cast<int>(result.trace.iterations());
  summary.stop = result.trace.stop;
  if (!result.trace.records.empty()) {
    summary.final_objective = result.trace.records.back().objective;
    summary.final_h_step = result.trace.records.back().h_step_sq;
  }
  summary.train_seconds = seconds_since(start);
  if (trace) *trace = std::move(result.trace);
  return FpcModel(s, std::move(centers.centers), std::move(result.state.u), std::move(scaler), summary);
}

int predict(const FpcModel& model, std::span<const double> x) { return model.predict(x); }

nlohmann::json EvalReport::to_json() const {
  return {
      {"TestAcc", accuracy},
      {"TrainTime", train_seconds},
      {"TestTime", test_seconds},
      {"sparsity", sparsity},
      {"samples", samples},
      {"confusion",
       {{"true_pos", confusion.true_pos},
        {"true_neg", confusion.true_neg},
        {"false_pos", confusion.false_pos},
        {"false_neg", confusion.false_neg}}},
  };
}

std::string EvalReport::csv_header() {
  return "TestAcc,TrainTime,TestTime,sparsity,samples,true_pos,true_neg,false_pos,false_neg";
}

std::string EvalReport::csv_row() const {
  std::ostringstream out;
  out.precision(10);
  out << accuracy << ',' << train_seconds << ',' << test_seconds << ',' << sparsity << ','
      << samples << ',' << confusion.true_pos << ',' << confusion.true_neg << ','
      << confusion.false_pos << ',' << confusion.false_neg;
  return out.str();
}

EvalReport evaluate(const FpcModel& model, const Dataset& data) {
  if (data.empty()) throw EmptyDataError("evaluate: split is empty");
  data.validate_labels();
  EvalReport r;
  const auto start = Clock::now();
  const std::vector<int> labels = model.predict(data.x);
  r.test_seconds = seconds_since(start);
  r.train_seconds = model.summary().train_seconds;
  r.sparsity = model.sparsity();
  r.samples = data.size();

  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool truth_pos = data.y(static_cast<Eigen::Index>(i)) > 0.0;
    const bool pred_pos = labels[i] > 0;
    if (truth_pos && pred_pos) ++r.confusion.true_pos;
    if (!truth_pos && !pred_pos) ++r.confusion.true_neg;
    if (!truth_pos && pred_pos) ++r.confusion.false_pos;
    if (truth_pos && !pred_pos) ++r.confusion.false_neg;
    if (truth_pos == pred_pos) ++correct;
  }
  r.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(data.size());
  return r;
}

int max_degree(std::size_t m, std::size_t d) {
  if (d == 0) throw InvalidArgument("max_degree: dimension must be >= 1");
  if (m < 2) return 1;
  const double md = static_cast<double>(m);
  const double bound = std::ceil(std::pow(md / std::log(md), 1.0 / static_cast<double>(d)));
  return static_cast<int>(std::clamp(bound, 1.0, 10.0));
}

DegreeSelection select_degree(const Dataset& train_data, const Dataset& validation,
                              const SelectOptions& options) {
  if (validation.empty()) throw EmptyDataError("select_degree: validation split is empty");
  if (train_data.empty()) throw EmptyDataError("select_degree: training split is empty");

  std::vector<int> degrees = options.degrees;
  if (degrees.empty()) {
    const int smax = max_degree(train_data.size(), train_data.dim());
    for (int s = 1; s <= smax; ++s) degrees.push_back(s);
  }
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  if (degrees.empty()) throw InvalidArgument("select_degree: no candidate degrees");

  std::vector<std::optional<std::size_t>> counts;
  if (options.center_counts.empty()) {
    counts.emplace_back(std::nullopt);
  } else {
    std::vector<std::size_t> sorted = options.center_counts;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (auto n : sorted) counts.emplace_back(n);
  }

  DegreeSelection out;
  double best_acc = -1.0;
  for (int s : degrees) {
    for (const auto& n : counts) {
      TrainOptions topts = options.train;
      topts.degree = s;
      topts.n_override = n;
      const FpcModel model = train(train_data, topts);
      DegreeCandidate cand{s, n, evaluate(model, validation)};
      if (cand.validation.accuracy > best_acc) {
        best_acc = cand.validation.accuracy;
        out.best_degree = s;
        out.best_n = n;
      }
      out.candidates.push_back(std::move(cand));
    }
  }
  return out;
}

}  // namespace fpc
