#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flexp2/classic.hpp"
#include "flexp2/commands.hpp"
#include "flexp2/errors.hpp"
#include "flexp2/flexible.hpp"
#include "flexp2/io.hpp"
#include "flexp2/kernels.hpp"
#include "flexp2/metrics.hpp"
#include "flexp2/synth.hpp"

namespace py = pybind11;
using namespace flexp2;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coupled nonnegative PARAFAC2 decompositions";

  py::register_exception<Error>(m, "Error");

  py::class_<RaggedTensor>(m, "RaggedTensor")
      .def(py::init([](std::vector<Matrix> slices) { return RaggedTensor::from_slices(std::move(slices)); }),
           py::arg("slices"))
      .def_readonly("n", &RaggedTensor::n)
      .def_readonly("slices", &RaggedTensor::slices)
      .def_readonly("total_norm", &RaggedTensor::total_norm)
      .def_property_readonly("slice_widths", &RaggedTensor::slice_widths)
      .def("__len__", &RaggedTensor::num_slices);

  py::class_<Parafac2Factors>(m, "Parafac2Factors")
      .def(py::init<>())
      .def_readwrite("A", &Parafac2Factors::A)
      .def_readwrite("C", &Parafac2Factors::C)
      .def_readwrite("B", &Parafac2Factors::B)
      .def_readwrite("P", &Parafac2Factors::P)
      .def_readwrite("Bstar", &Parafac2Factors::Bstar)
      .def_property_readonly("rank", &Parafac2Factors::rank);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("rank", &SolverConfig::rank)
      .def_readwrite("max_iter", &SolverConfig::max_iter)
      .def_readwrite("rel_tol", &SolverConfig::rel_tol)
      .def_readwrite("snr_db", &SolverConfig::snr_db)
      .def_readwrite("mu_init_factor", &SolverConfig::mu_init_factor)
      .def_readwrite("mu_growth", &SolverConfig::mu_growth)
      .def_readwrite("mu_cap", &SolverConfig::mu_cap)
      .def_readwrite("nnls_inner_iters", &SolverConfig::nnls_inner_iters)
      .def_readwrite("seed", &SolverConfig::seed);

  py::enum_<Termination>(m, "Termination")
      .value("Converged", Termination::Converged)
      .value("MaxIter", Termination::MaxIter);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("objective_trace", &RunReport::objective_trace)
      .def_readonly("fit_residuals", &RunReport::fit_residuals)
      .def_readonly("coupling_residuals", &RunReport::coupling_residuals)
      .def_readonly("mu_trace", &RunReport::mu_trace)
      .def_readonly("iterations", &RunReport::iterations)
      .def_readonly("termination", &RunReport::termination)
      .def_readonly("wall_seconds", &RunReport::wall_seconds)
      .def_readonly("objective_increases", &RunReport::objective_increases)
      .def_readonly("mu_calibrated", &RunReport::mu_calibrated);

  py::class_<SynthSpec>(m, "SynthSpec")
      .def(py::init<>())
      .def_readwrite("n", &SynthSpec::n)
      .def_readwrite("m", &SynthSpec::m)
      .def_readwrite("K", &SynthSpec::K)
      .def_readwrite("rank", &SynthSpec::rank)
      .def_readwrite("sigma", &SynthSpec::sigma)
      .def_readwrite("seed", &SynthSpec::seed)
      .def_readwrite("shift_step", &SynthSpec::shift_step);

  py::class_<SynthGroundTruth>(m, "SynthGroundTruth")
      .def_readonly("A", &SynthGroundTruth::A)
      .def_readonly("C", &SynthGroundTruth::C)
      .def_readonly("B", &SynthGroundTruth::B)
      .def_readonly("sigma", &SynthGroundTruth::sigma)
      .def_readonly("seed", &SynthGroundTruth::seed);

  m.def("validate", [](const RaggedTensor& tensor) { validate(tensor); }, py::arg("tensor"));
  m.def("validate_config", [](const SolverConfig& config) { validate(config); }, py::arg("config"));
  m.def("reconstruct_slice", &reconstruct_slice, py::arg("factors"), py::arg("k"));
  m.def("fit_residuals", &fit_residuals, py::arg("tensor"), py::arg("factors"));
  m.def("normalize_columns", &normalize_columns, py::arg("matrix"));

  m.def(
      "nnls",
      [](const Matrix& gram, const Matrix& cross, const Matrix& x0, int inner_iters) {
        return nnls({gram, cross, x0}, inner_iters);
      },
      py::arg("gram"), py::arg("cross"), py::arg("x0"), py::arg("inner_iters") = 50);
  m.def(
      "procrustes", [](const Matrix& m_in) { return procrustes(m_in); }, py::arg("matrix"));
  m.def("khatri_rao", &khatri_rao, py::arg("x"), py::arg("y"));

  m.def("initial_factors", &initial_factors, py::arg("tensor"), py::arg("rank"), py::arg("seed"));
  m.def("run_classic",
        [](const RaggedTensor& tensor, const SolverConfig& config, const Parafac2Factors& init) {
          return run_classic(tensor, config, init);
        },
        py::arg("tensor"), py::arg("config"), py::arg("init"));
  m.def("run_flexible",
        [](const RaggedTensor& tensor, const SolverConfig& config, const Parafac2Factors& init) {
          return run_flexible(tensor, config, init);
        },
        py::arg("tensor"), py::arg("config"), py::arg("init"));

  m.def("gen_A", &gen_A, py::arg("n"), py::arg("rank"), py::arg("seed"));
  m.def("gen_C", &gen_C, py::arg("K"), py::arg("rank"), py::arg("seed"));
  m.def("gen_shifted_B", &gen_shifted_B, py::arg("m"), py::arg("rank"), py::arg("K"), py::arg("shift_step"),
        py::arg("seed"));
  m.def("gen_dataset", &gen_dataset, py::arg("spec"));

  m.def("align_columns", &align_columns, py::arg("est"), py::arg("truth"));
  m.def("relative_B_error", &relative_B_error, py::arg("est"), py::arg("truth"));
  m.def("relative_fit", &relative_fit, py::arg("tensor"), py::arg("factors"));

  m.def("save_p2rt", &save_p2rt, py::arg("tensor"), py::arg("path"));
  m.def("load_p2rt", &load_p2rt, py::arg("path"));
  m.def("save_truth", &save_truth, py::arg("truth"), py::arg("path"));
  m.def("load_truth", &load_truth, py::arg("path"));
}
