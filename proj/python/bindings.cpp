#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fpc/admm.hpp"
#include "fpc/error.hpp"
#include "fpc/fpc_model.hpp"
#include "fpc/hinge_prox.hpp"
#include "fpc/persistence_io.hpp"
#include "fpc/poly_features.hpp"
#include "fpc/reference_oracles.hpp"
#include "fpc/synthetic_data.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

fpc::Dataset make_dataset(const fpc::RowMatrix& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) {
    throw fpc::DimensionMismatch("x has " + std::to_string(x.rows()) + " rows but y has " +
                                 std::to_string(y.size()) + " labels");
  }
  return fpc::Dataset{x, y};
}

py::dict summary_dict(const fpc::TrainingSummary& s) {
  return py::dict("m"_a = s.m, "alpha"_a = s.params.alpha, "beta"_a = s.params.beta,
                  "tol"_a = s.params.tol, "max_iters"_a = s.params.max_iters,
                  "scheme"_a = std::string(fpc::to_string(s.scheme)), "seed"_a = s.seed,
                  "iterations"_a = s.iterations, "stop"_a = std::string(fpc::to_string(s.stop)),
                  "final_objective"_a = s.final_objective, "final_h_step"_a = s.final_h_step,
                  "train_seconds"_a = s.train_seconds);
}

py::list trace_list(const fpc::IterationTrace& trace) {
  py::list out;
  for (const auto& r : trace.records) {
    out.append(py::dict("iter"_a = r.iter, "objective"_a = r.objective, "h_step_sq"_a = r.h_step_sq,
                        "primal_residual"_a = r.primal_residual));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Polynomial-feature hinge-loss classifier trained by proximal ADMM";

  // Translators run most-recent first, so the base class is registered first.
  auto& base = py::register_exception<fpc::Error>(m, "FpcError", PyExc_RuntimeError);
  py::register_exception<fpc::InvalidArgument>(m, "InvalidArgumentError", base.ptr());
  py::register_exception<fpc::DimensionMismatch>(m, "DimensionMismatchError", base.ptr());
  py::register_exception<fpc::IoError>(m, "IoError", base.ptr());
  py::register_exception<fpc::DataFormatError>(m, "DataFormatError", base.ptr());
  py::register_exception<fpc::EmptyDataError>(m, "EmptyDataError", base.ptr());
  py::register_exception<fpc::ModelFormatError>(m, "ModelFormatError", base.ptr());
  py::register_exception<fpc::NumericalError>(m, "NumericalError", base.ptr());

  m.def("feature_dim", [](int s, std::size_t d) { return fpc::feature_dim(fpc::KernelDegree(s), d); },
        "s"_a, "d"_a, "Dimension C(s+d, d) of the degree-s polynomial space in d variables.");
  m.def(
      "kernel_eval",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& xp, int s) {
        return fpc::kernel_eval({x.data(), static_cast<std::size_t>(x.size())},
                                {xp.data(), static_cast<std::size_t>(xp.size())}, fpc::KernelDegree(s));
      },
      "x"_a, "xp"_a, "s"_a, "(1 + x.xp)^s");
  m.def("max_degree", &fpc::max_degree, "m"_a, "d"_a);

  m.def("hinge_scalar", &fpc::hinge_scalar, "a"_a, "b"_a, "gamma"_a);
  m.def("hinge_vector", &fpc::hinge_vector, "y"_a, "z"_a, "gamma"_a);
  m.def("bayes_h", &fpc::bayes_h, "t"_a);

  m.def(
      "generate_toy",
      [](std::size_t count, const std::string& noise, double ratio, double width, std::uint64_t seed) {
        fpc::NoiseSpec spec{fpc::parse_noise_kind(noise), ratio, width};
        fpc::ToyData toy = fpc::generate_toy(count, spec, seed);
        return py::make_tuple(toy.data.x, toy.data.y, toy.flipped);
      },
      "m"_a, "noise"_a = "global", "ratio"_a = 0.0, "width"_a = 0.1, "seed"_a = 0,
      "Returns (X, y, flipped_indices).");
  m.def(
      "generate_test",
      [](std::size_t count, std::uint64_t seed) {
        fpc::Dataset d = fpc::generate_test(count, seed);
        return py::make_tuple(d.x, d.y);
      },
      "m"_a, "seed"_a = 0);

  py::class_<fpc::FpcModel>(m, "Model")
      .def_property_readonly("degree", [](const fpc::FpcModel& f) { return f.degree().value(); })
      .def_property_readonly("centers", &fpc::FpcModel::centers)
      .def_property_readonly("coefficients", &fpc::FpcModel::coefficients)
      .def_property_readonly("sparsity", &fpc::FpcModel::sparsity)
      .def_property_readonly("input_dim", &fpc::FpcModel::input_dim)
      .def_property_readonly("summary", [](const fpc::FpcModel& f) { return summary_dict(f.summary()); })
      .def("decision_values", &fpc::FpcModel::decision_values, "x"_a)
      .def("predict",
           [](const fpc::FpcModel& f, const fpc::RowMatrix& x) { return f.predict(x); }, "x"_a)
      .def("to_bytes",
           [](const fpc::FpcModel& f) {
             const std::vector<std::uint8_t> bytes = fpc::save_model(f);
             return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
           })
      .def_static("from_bytes",
                  [](const py::bytes& b) {
                    const std::string raw = b;
                    return fpc::load_model(
                        {reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()});
                  })
      .def("save", [](const fpc::FpcModel& f, const std::string& path) { fpc::save_model_file(path, f); })
      .def_static("load", [](const std::string& path) { return fpc::load_model_file(path); });

  m.def(
      "train",
      [](const fpc::RowMatrix& x, const Eigen::VectorXd& y, int degree, const std::string& scheme,
         double alpha, double beta, double tol, int max_iters, std::uint64_t seed, bool scale_inputs,
         std::optional<std::size_t> n_centers, int threads, bool return_trace) -> py::object {
        fpc::TrainOptions o;
        o.degree = degree;
        o.scheme = fpc::parse_center_scheme(scheme);
        o.admm.alpha = alpha;
        o.admm.beta = beta;
        o.admm.tol = tol;
        o.admm.max_iters = max_iters;
        o.seed = seed;
        o.scale_inputs = scale_inputs;
        o.n_override = n_centers;
        o.threads = threads;
        fpc::IterationTrace trace;
        fpc::FpcModel model = [&] {
          py::gil_scoped_release release;
          return fpc::train(make_dataset(x, y), o, return_trace ? &trace : nullptr);
        }();
        if (!return_trace) return py::cast(std::move(model));
        return py::make_tuple(std::move(model), trace_list(trace));
      },
      "x"_a, "y"_a, "degree"_a = 9, "scheme"_a = "firstn", "alpha"_a = 1.0, "beta"_a = 1.0,
      "tol"_a = 5e-4, "max_iters"_a = 5, "seed"_a = 0, "scale_inputs"_a = true,
      "n_centers"_a = py::none(), "threads"_a = 1, "return_trace"_a = false,
      "Fits a model; with return_trace=True returns (model, trace).");

  m.def(
      "evaluate",
      [](const fpc::FpcModel& model, const fpc::RowMatrix& x, const Eigen::VectorXd& y) {
        const fpc::EvalReport r = fpc::evaluate(model, make_dataset(x, y));
        return py::dict("accuracy"_a = r.accuracy, "train_seconds"_a = r.train_seconds,
                        "test_seconds"_a = r.test_seconds, "sparsity"_a = r.sparsity,
                        "samples"_a = r.samples);
      },
      "model"_a, "x"_a, "y"_a);

  m.def(
      "solve_admm",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double alpha, double beta, double tol,
         int max_iters) {
        fpc::AdmmParams p;
        p.alpha = alpha;
        p.beta = beta;
        p.tol = tol;
        p.max_iters = max_iters;
        const fpc::DesignMatrix dm(a, alpha, beta);
        const fpc::AdmmResult r = fpc::solve(dm, y, p);
        return py::dict("u"_a = r.state.u, "v"_a = r.state.v, "w"_a = r.state.w,
                        "iterations"_a = r.trace.iterations(),
                        "stop"_a = std::string(fpc::to_string(r.trace.stop)),
                        "objective"_a = fpc::hinge_objective(a * r.state.u, y),
                        "trace"_a = trace_list(r.trace));
      },
      "a"_a, "y"_a, "alpha"_a = 1.0, "beta"_a = 1.0, "tol"_a = 5e-4, "max_iters"_a = 5,
      "Proximal ADMM on min_u (1/m) sum (1 - y_i (A u)_i)_+ from (0, y, 0).");

  m.def(
      "solve_dual_lp",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
        const fpc::DualSolution d = fpc::solve_dual_lp(a, y);
        return py::dict("a"_a = d.a, "c"_a = d.c, "value"_a = d.value, "pivots"_a = d.pivots);
      },
      "a"_a, "y"_a, "Exact optimum of the dual LP (small instances).");
}
