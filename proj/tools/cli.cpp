#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fpc/fpc_model.hpp"
#include "fpc/log.hpp"
#include "fpc/persistence_io.hpp"
#include "fpc/synthetic_data.hpp"

namespace fpc::cli {
namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InvalidArgument("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

/// "3", "1,4,9" or "1-10" (inclusive).
std::vector<int> parse_int_list(std::string_view text, std::string_view what) {
  std::vector<int> values;
  for (std::string_view part : split(text, ',')) {
    const std::size_t dash = part.find('-', 1);
    if (dash == std::string_view::npos) {
      values.push_back(parse_number<int>(part, what));
      continue;
    }
    const int lo = parse_number<int>(part.substr(0, dash), what);
    const int hi = parse_number<int>(part.substr(dash + 1), what);
    if (hi < lo) throw InvalidArgument("empty range '" + std::string(part) + "' for " + std::string(what));
    for (int v = lo; v <= hi; ++v) values.push_back(v);
  }
  return values;
}

std::vector<std::size_t> parse_size_list(std::string_view text, std::string_view what) {
  std::vector<std::size_t> values;
  for (std::string_view part : split(text, ',')) values.push_back(parse_number<std::size_t>(part, what));
  return values;
}

/// kind:ratio[:width], e.g. global:0.10 or band:0.2:0.05.
NoiseSpec parse_noise(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() < 2 || parts.size() > 3) {
    throw InvalidArgument("noise must look like kind:ratio[:width], got '" + std::string(text) + "'");
  }
  NoiseSpec spec;
  spec.kind = parse_noise_kind(parts[0]);
  spec.ratio = parse_number<double>(parts[1], "noise ratio");
  if (parts.size() == 3) spec.width = parse_number<double>(parts[2], "noise width");
  spec.validate();
  return spec;
}

SplitFractions parse_split(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw InvalidArgument("split needs three fractions train,validation,test");
  SplitFractions f{parse_number<double>(parts[0], "split"), parse_number<double>(parts[1], "split"),
                   parse_number<double>(parts[2], "split")};
  if (f.train < 0 || f.validation < 0 || f.test < 0 || f.train + f.validation + f.test > 1.0 + 1e-12) {
    throw InvalidArgument("split fractions must be non-negative and sum to at most 1");
  }
  return f;
}

// splitmix64: independent streams for train and test draws of one seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct CsvFlags {
  bool header = false;
  std::string labels = "pm1";

  CsvOptions options(bool features_only = false) const {
    CsvOptions o;
    o.header = header;
    o.labels = labels == "01" ? LabelEncoding::ZeroOne : LabelEncoding::PlusMinusOne;
    o.features_only = features_only;
    return o;
  }
};

void add_csv_flags(CLI::App* cmd, CsvFlags& flags) {
  cmd->add_flag("--header", flags.header, "Input CSV files start with a header line");
  cmd->add_option("--labels", flags.labels, "Label encoding of input files")
      ->check(CLI::IsMember({"pm1", "01"}))
      ->capture_default_str();
}

struct TrainFlags {
  int degree = 9;
  std::string scheme = "firstn";
  double alpha = 1.0;
  double beta = 1.0;
  double tol = 5e-4;
  int max_iters = 5;
  bool normalized_tol = false;
  std::uint64_t seed = 0;
  bool no_scale = false;
  bool no_verify = false;
  std::optional<std::size_t> centers;

  TrainOptions options(int threads) const {
    TrainOptions o;
    o.degree = degree;
    o.scheme = parse_center_scheme(scheme);
    o.admm.alpha = alpha;
    o.admm.beta = beta;
    o.admm.tol = tol;
    o.admm.max_iters = max_iters;
    o.admm.normalized_tol = normalized_tol;
    o.seed = seed;
    o.scale_inputs = !no_scale;
    o.verify_centers = !no_verify;
    o.n_override = centers;
    o.threads = threads;
    return o;
  }
};

void add_admm_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--alpha", f.alpha, "Proximal weight")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--beta", f.beta, "Augmented Lagrangian weight")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--tol", f.tol, "Stop when the squared H-norm step is below this")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--normalized-tol", f.normalized_tol, "Divide the step by n + 2m before comparing with --tol");
}

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_degree) {
  if (with_degree) {
    cmd->add_option("-s,--degree", f.degree, "Polynomial kernel degree")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--centers", f.centers, "Number of centers (default: dimension of the polynomial space)");
  }
  cmd->add_option("--scheme", f.scheme, "Center scheme")
      ->check(CLI::IsMember({"uniform", "firstn", "subsample"}))
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for center draws")->capture_default_str();
  cmd->add_flag("--no-scale", f.no_scale, "Skip min-max scaling of inputs");
  cmd->add_flag("--no-verify-centers", f.no_verify, "Skip the center rank check");
  add_admm_flags(cmd, f);
}

json summary_json(const FpcModel& model) {
  const TrainingSummary& s = model.summary();
  return {{"degree", model.degree().value()},
          {"centers", model.sparsity()},
          {"input_dim", model.input_dim()},
          {"m", s.m},
          {"scheme", std::string(to_string(s.scheme))},
          {"alpha", s.params.alpha},
          {"beta", s.params.beta},
          {"tol", s.params.tol},
          {"max_iters", s.params.max_iters},
          {"iterations", s.iterations},
          {"stop", std::string(to_string(s.stop))},
          {"final_objective", s.final_objective},
          {"final_h_step", s.final_h_step},
          {"train_seconds", s.train_seconds}};
}

// ---- simulate ----------------------------------------------------------

struct SimulateFlags {
  std::size_t m = 1000;
  std::size_t mtest = 1000;
  std::string noise = "global:0.10";
  std::uint64_t seed = 0;
  std::string train_out = "train.csv";
  std::string test_out = "test.csv";
  bool header = false;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  const NoiseSpec noise = parse_noise(f.noise);
  const ToyData toy = generate_toy(f.m, noise, derive_seed(f.seed, 0));
  const Dataset test = generate_test(f.mtest, derive_seed(f.seed, 1));
  save_csv(f.train_out, toy.data, f.header);
  save_csv(f.test_out, test, f.header);

  std::size_t test_pos = 0;
  for (Eigen::Index i = 0; i < test.y.size(); ++i) test_pos += test.y(i) > 0 ? 1 : 0;
  out << json{{"train", f.train_out},
              {"test", f.test_out},
              {"m", f.m},
              {"mtest", f.mtest},
              {"noise", std::string(to_string(noise.kind))},
              {"ratio", noise.ratio},
              {"eligible", toy.eligible},
              {"flips", toy.flipped.size()},
              {"train_positive_fraction", toy.positive_fraction()},
              {"test_positive_fraction",
               f.mtest == 0 ? 0.0 : static_cast<double>(test_pos) / static_cast<double>(f.mtest)}}
             .dump(2)
      << '\n';
  return kOk;
}

// ---- train -------------------------------------------------------------

struct TrainCmdFlags {
  std::string data;
  std::string model_out = "model.fpc";
  std::string trace_out;
  CsvFlags csv;
  TrainFlags train;
};

int cmd_train(const TrainCmdFlags& f, int threads, std::ostream& out) {
  const Dataset data = load_csv(f.data, f.csv.options());
  IterationTrace trace;
  const FpcModel model = train(data, f.train.options(threads), f.trace_out.empty() ? nullptr : &trace);
  save_model_file(f.model_out, model);
  if (!f.trace_out.empty()) {
    std::ofstream t(f.trace_out);
    if (!t) throw IoError("cannot open '" + f.trace_out + "' for writing");
    trace.write_csv(t);
    if (!t) throw IoError("write to '" + f.trace_out + "' failed");
  }
  json j = summary_json(model);
  j["model"] = f.model_out;
  j["train_accuracy"] = evaluate(model, data).accuracy;
  out << j.dump(2) << '\n';
  return kOk;
}

// ---- select-degree -----------------------------------------------------

struct SelectFlags {
  std::string data;
  std::string validation;
  std::string split = "0.5,0.25,0.25";
  std::uint64_t split_seed = 0;
  std::string degrees;
  std::string center_grid;
  std::string model_out;
  CsvFlags csv;
  TrainFlags train;
};

int cmd_select(const SelectFlags& f, int threads, std::ostream& out) {
  const Dataset all = load_csv(f.data, f.csv.options());
  Dataset train_part;
  Dataset validation;
  Dataset test;
  if (!f.validation.empty()) {
    train_part = all;
    validation = load_csv(f.validation, f.csv.options());
  } else {
    DatasetSplits splits = split_dataset(all, parse_split(f.split), f.split_seed);
    train_part = std::move(splits.train);
    validation = std::move(splits.validation);
    test = std::move(splits.test);
  }
  if (validation.empty()) throw EmptyDataError("select-degree: validation split is empty");

  SelectOptions opt;
  opt.train = f.train.options(threads);
  if (!f.degrees.empty()) opt.degrees = parse_int_list(f.degrees, "degrees");
  if (!f.center_grid.empty()) opt.center_counts = parse_size_list(f.center_grid, "center grid");
  const DegreeSelection sel = select_degree(train_part, validation, opt);

  json candidates = json::array();
  for (const DegreeCandidate& c : sel.candidates) {
    json entry = c.validation.to_json();
    entry["degree"] = c.degree;
    entry["n"] = c.validation.sparsity;
    candidates.push_back(std::move(entry));
  }
  json j{{"best_degree", sel.best_degree},
         {"s_max", max_degree(train_part.size(), train_part.dim())},
         {"train_size", train_part.size()},
         {"validation_size", validation.size()},
         {"candidates", std::move(candidates)}};
  if (sel.best_n) j["best_n"] = *sel.best_n;

  if (!f.model_out.empty() || !test.empty()) {
    TrainOptions best = opt.train;
    best.degree = sel.best_degree;
    if (sel.best_n) best.n_override = sel.best_n;
    const FpcModel model = train(train_part, best);
    if (!f.model_out.empty()) {
      save_model_file(f.model_out, model);
      j["model"] = f.model_out;
    }
    if (!test.empty()) j["test"] = evaluate(model, test).to_json();
  }
  out << j.dump(2) << '\n';
  return kOk;
}

// ---- predict / evaluate ------------------------------------------------

struct PredictFlags {
  std::string model;
  std::string data;
  std::string out;
  bool features_only = false;
  CsvFlags csv;
};

int cmd_predict(const PredictFlags& f, std::ostream& out) {
  const FpcModel model = load_model_file(f.model);
  const Dataset data = load_csv(f.data, f.csv.options(f.features_only));
  const Eigen::VectorXd values = model.decision_values(data.x);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!f.out.empty()) {
    file.open(f.out);
    if (!file) throw IoError("cannot open '" + f.out + "' for writing");
    sink = &file;
  }
  std::ostream& o = *sink;
  o.precision(17);
  o << "prediction,decision_value\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    o << (values(i) >= 0.0 ? 1 : -1) << ',' << values(i) << '\n';
  }
  if (!o) throw IoError("writing predictions failed");
  return kOk;
}

struct EvaluateFlags {
  std::string model;
  std::string data;
  std::string format = "json";
  CsvFlags csv;
};

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out) {
  const FpcModel model = load_model_file(f.model);
  const Dataset data = load_csv(f.data, f.csv.options());
  const EvalReport report = evaluate(model, data);
  if (f.format == "csv") {
    out << EvalReport::csv_header() << '\n' << report.csv_row() << '\n';
  } else {
    out << report.to_json().dump(2) << '\n';
  }
  return kOk;
}

// ---- bench -------------------------------------------------------------

struct BenchFlags {
  std::string sizes = "10000,20000,40000";
  std::string degrees = "9";
  int reps = 3;
  std::size_t mtest = 1000;
  std::string noise = "global:0.10";
  std::uint64_t seed = 0;
  std::string out;
  TrainFlags train;
};

int cmd_bench(const BenchFlags& f, int threads, std::ostream& out) {
  const std::vector<std::size_t> sizes = parse_size_list(f.sizes, "sizes");
  const std::vector<int> degrees = parse_int_list(f.degrees, "degrees");
  const NoiseSpec noise = parse_noise(f.noise);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!f.out.empty()) {
    file.open(f.out);
    if (!file) throw IoError("cannot open '" + f.out + "' for writing");
    sink = &file;
  }
  std::ostream& o = *sink;
  o << "m,s,n,rep,iterations,train_seconds,test_accuracy\n";
  for (int s : degrees) {
    for (std::size_t m : sizes) {
      for (int rep = 0; rep < f.reps; ++rep) {
        const std::uint64_t base = derive_seed(f.seed, static_cast<std::uint64_t>(rep));
        const ToyData toy = generate_toy(m, noise, derive_seed(base, 0));
        const Dataset test = generate_test(f.mtest, derive_seed(base, 1));
        TrainOptions opt = f.train.options(threads);
        opt.degree = s;
        const FpcModel model = train(toy.data, opt);
        const double acc = f.mtest > 0 ? evaluate(model, test).accuracy : 0.0;
        o << m << ',' << s << ',' << model.sparsity() << ',' << rep << ','
          << model.summary().iterations << ',' << model.summary().train_seconds << ',' << acc << '\n';
      }
    }
  }
  if (!o) throw IoError("writing benchmark table failed");
  return kOk;
}

// ---- verify ------------------------------------------------------------

int cmd_verify(VerifyOptions opt, const Hooks& hooks, std::ostream& out) {
  if (hooks.prox) opt.prox = hooks.prox;
  const VerifyReport report = run_verify(opt);
  out << report.to_json().dump(2) << '\n';
  return report.pass() ? kOk : kVerifyFailed;
}

}  // namespace

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return kInvalidArgument;
    case ErrorKind::DimensionMismatch: return kDimensionMismatch;
    case ErrorKind::Io: return kIo;
    case ErrorKind::DataFormat: return kDataFormat;
    case ErrorKind::EmptyData: return kEmptyData;
    case ErrorKind::ModelFormat: return kModelFormat;
    case ErrorKind::Overflow: return kOverflow;
    case ErrorKind::Numerical: return kNumerical;
    case ErrorKind::Internal: return kInternal;
  }
  return kInternal;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Hooks& hooks) {
  CLI::App app{"Fast polynomial kernel classification"};
  app.name("fpc");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  int threads = 1;
  bool verbose = false;
  bool quiet = false;
  app.add_option("--threads", threads, "Worker threads for the Gram accumulation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Write toy train/test CSV files");
  simulate->add_option("--m", sim.m, "Training samples")->capture_default_str();
  simulate->add_option("--mtest", sim.mtest, "Test samples")->capture_default_str();
  simulate->add_option("--noise", sim.noise, "kind:ratio[:width], kind in global|band|far")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--train-out", sim.train_out, "Training CSV path")->capture_default_str();
  simulate->add_option("--test-out", sim.test_out, "Test CSV path")->capture_default_str();
  simulate->add_flag("--header", sim.header, "Write a header line");

  TrainCmdFlags tr;
  auto* train_cmd = app.add_subcommand("train", "Fit a model and save it");
  train_cmd->add_option("--data", tr.data, "Training CSV")->required();
  train_cmd->add_option("-o,--out", tr.model_out, "Model file")->capture_default_str();
  train_cmd->add_option("--trace", tr.trace_out, "Write the per-iteration trace as CSV");
  add_csv_flags(train_cmd, tr.csv);
  add_train_flags(train_cmd, tr.train, true);

  SelectFlags sel;
  auto* select = app.add_subcommand("select-degree", "Pick the degree with the best validation accuracy");
  select->add_option("--data", sel.data, "Training CSV (split unless --validation is given)")->required();
  select->add_option("--validation", sel.validation, "Separate validation CSV");
  select->add_option("--split", sel.split, "train,validation,test fractions")->capture_default_str();
  select->add_option("--split-seed", sel.split_seed, "Shuffle seed for the split")->capture_default_str();
  select->add_option("--degrees", sel.degrees, "Candidates, e.g. 1-10 or 3,5,9 (default 1..s_max)");
  select->add_option("--center-grid", sel.center_grid, "Center counts tried for every degree, e.g. 20,50");
  select->add_option("-o,--out", sel.model_out, "Retrain the winner and save it here");
  add_csv_flags(select, sel.csv);
  add_train_flags(select, sel.train, false);

  PredictFlags pred;
  auto* predict_cmd = app.add_subcommand("predict", "Label the rows of a CSV file");
  predict_cmd->add_option("--model", pred.model, "Model file")->required();
  predict_cmd->add_option("--data", pred.data, "Input CSV")->required();
  predict_cmd->add_option("-o,--out", pred.out, "Output CSV (default stdout)");
  predict_cmd->add_flag("--features-only", pred.features_only, "Input rows carry no label column");
  add_csv_flags(predict_cmd, pred.csv);

  EvaluateFlags ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Accuracy, timings and sparsity on a labelled CSV");
  evaluate_cmd->add_option("--model", ev.model, "Model file")->required();
  evaluate_cmd->add_option("--data", ev.data, "Labelled CSV")->required();
  evaluate_cmd->add_option("--format", ev.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_csv_flags(evaluate_cmd, ev.csv);

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "Training time over a grid of sample sizes and degrees");
  bench_cmd->add_option("--sizes", bench.sizes, "Comma-separated m values")->capture_default_str();
  bench_cmd->add_option("--degrees", bench.degrees, "Degrees, e.g. 9 or 5-9")->capture_default_str();
  bench_cmd->add_option("--reps", bench.reps, "Repetitions per cell")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--mtest", bench.mtest, "Test samples per repetition")->capture_default_str();
  bench_cmd->add_option("--noise", bench.noise, "Noise of the training data")->capture_default_str();
  bench_cmd->add_option("--data-seed", bench.seed, "Seed for the generated data")->capture_default_str();
  bench_cmd->add_option("-o,--out", bench.out, "Output CSV (default stdout)");
  add_train_flags(bench_cmd, bench.train, false);

  VerifyOptions vopt;
  auto* verify = app.add_subcommand("verify", "Check the solver against reference oracles");
  verify->add_option("--seed", vopt.seed, "Seed for the generated instances")->capture_default_str();
  verify->add_option("--prox-cases", vopt.prox_cases, "Random (a, b, gamma) triples")->capture_default_str();
  verify->add_option("--monotone-instances", vopt.monotone_instances, "Instances for the step-norm check")
      ->capture_default_str();
  verify->add_option("--monotone-iters", vopt.monotone_iters, "Iterations per instance")->capture_default_str();
  verify->add_option("--lp-instances", vopt.lp_instances, "Instances compared with the dual LP")
      ->capture_default_str();
  verify->add_option("--tol", vopt.admm_tol, "ADMM tolerance for the LP comparison")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--gap-tol", vopt.gap_tol, "Allowed |primal - dual|")->capture_default_str();
  verify->add_option("--kkt-tol", vopt.kkt_tol, "Allowed KKT violation")->capture_default_str();

  std::vector<const char*> argv;
  argv.push_back("fpc");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const log::Level previous = log::level();
  if (quiet) log::set_level(log::Level::Quiet);
  else if (verbose) log::set_level(log::Level::Info);

  int code = kOk;
  try {
    if (*simulate) code = cmd_simulate(sim, out);
    else if (*train_cmd) code = cmd_train(tr, threads, out);
    else if (*select) code = cmd_select(sel, threads, out);
    else if (*predict_cmd) code = cmd_predict(pred, out);
    else if (*evaluate_cmd) code = cmd_evaluate(ev, out);
    else if (*bench_cmd) code = cmd_bench(bench, threads, out);
    else if (*verify) code = cmd_verify(vopt, hooks, out);
  } catch (const Error& e) {
    err << "fpc: error: " << e.what() << '\n';
    code = exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "fpc: internal error: " << e.what() << '\n';
    code = kInternal;
  }
  log::set_level(previous);
  return code;
}

}  // namespace fpc::cli
