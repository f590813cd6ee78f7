#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "threshold_lab/model.hpp"
#include "threshold_lab/observables.hpp"
#include "threshold_lab/suites.hpp"
#include "threshold_lab/system_io.hpp"
#include "threshold_lab/threebody.hpp"
#include "threshold_lab/twobody.hpp"
#include "threshold_lab/universal.hpp"

namespace py = pybind11;
using namespace tlab;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

// Φ on the grid as an (Nu, N2, N1) array.
py::array_t<double> as_grid_array(const threebody::WaveFunction3& w) {
  const auto& g = w.grid;
  py::array_t<double> out({g.Nu, g.N2, g.N1});
  std::copy(w.values.begin(), w.values.end(), out.mutable_data());
  return out;
}

SystemSpec system_from_string(const std::string& text) {
  try {
    return system_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed system JSON: ") + e.what());
  }
}

py::dict suite_result(const suites::SuiteReport& r) {
  py::dict d;
  std::vector<std::string> files;
  for (const auto& f : r.files) files.push_back(f.string());
  d["files"] = files;
  d["exit_code"] = r.exitCode;
  d["status"] = r.status;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Threshold behaviour of three-body bound states";

  static py::exception<ConfigError> configError(m, "ConfigError", PyExc_ValueError);
  static py::exception<ConvergenceError> convergenceError(m, "ConvergenceError", PyExc_RuntimeError);
  static py::exception<AdmissibilityError> admissibilityError(m, "AdmissibilityError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(configError, e.what());
    } catch (const AdmissibilityError& e) {
      py::set_error(admissibilityError, e.what());
    } catch (const ConvergenceError& e) {
      py::set_error(convergenceError, e.what());
    }
  });

  py::enum_<PotentialFamily>(m, "PotentialFamily")
      .value("GAUSSIAN", PotentialFamily::Gaussian)
      .value("EXPONENTIAL", PotentialFamily::Exponential)
      .value("TRUNCATED_YUKAWA", PotentialFamily::TruncatedYukawa)
      .value("HARMONIC", PotentialFamily::Harmonic);

  py::class_<PairPotential>(m, "PairPotential")
      .def(py::init([](PotentialFamily f, double depth, double range) {
             PairPotential p{f, depth, range};
             p.validate();
             return p;
           }),
           py::arg("family"), py::arg("depth"), py::arg("range") = 1.0)
      .def_readwrite("family", &PairPotential::family)
      .def_readwrite("depth", &PairPotential::depth)
      .def_readwrite("range", &PairPotential::range)
      .def("value", &PairPotential::value, py::arg("r"))
      .def("__repr__", [](const PairPotential& p) {
        return "PairPotential(" + std::string(to_string(p.family)) + ", depth=" + std::to_string(p.depth) +
               ", range=" + std::to_string(p.range) + ")";
      });

  py::class_<SystemSpec>(m, "SystemSpec")
      .def_static("from_json", &system_from_string, py::arg("text"))
      .def_static("load", [](const std::string& path) { return load_system(path); }, py::arg("path"))
      .def("to_json", [](const SystemSpec& s) { return system_to_json(s).dump(); })
      .def_readwrite("v12", &SystemSpec::v12)
      .def_readwrite("v13", &SystemSpec::v13)
      .def_readwrite("v23", &SystemSpec::v23)
      .def_readwrite("lambda_", &SystemSpec::lambda);

  m.def("admissibility", [](const SystemSpec& s) { return suites::admissibility_json(admissibility_check(s)).dump(); },
        "Admissibility report as a JSON string.");

  // two-body
  m.def("critical_coupling", [](PotentialFamily f, double range) {
    return twobody::find_critical_coupling({f, 1.0, range}).gCritical;
  }, py::arg("family"), py::arg("range") = 1.0);
  m.def("twobody_sequence", [](PotentialFamily f, double range, double startE, int count) {
    const auto seq = twobody::energy_sequence({f, 1.0, range}, startE, 0.5, count);
    py::dict d;
    std::vector<double> g, e, k, dist;
    for (const auto& s : seq) {
      g.push_back(s.g);
      e.push_back(s.energy);
      k.push_back(s.k);
      dist.push_back(s.distance);
    }
    d["g"] = as_array(g);
    d["E"] = as_array(e);
    d["k"] = as_array(k);
    d["theorem1_distance"] = as_array(dist);
    return d;
  }, py::arg("family"), py::arg("range") = 1.0, py::arg("start_energy") = -0.1, py::arg("count") = 7);
  m.def("w_kernel", [](double y) {
    const auto c = twobody::w_kernel_check(y);
    return py::make_tuple(c.numeric, c.closedForm);
  }, py::arg("y"));

  // hyperradial limit
  m.def("theta_n", &universal::theta_n, py::arg("rho"), py::arg("theta"), py::arg("k"));
  m.def("d_theta_n", &universal::d_theta_n, py::arg("theta"), py::arg("k"));
  m.def("universal_limit", &universal::universal_limit, py::arg("theta"));
  m.def("theta_norm", &universal::theta_norm, py::arg("k"));
  m.def("radial_integral", &universal::radial_integral, py::arg("theta"), py::arg("k"));
  m.def("t_integral", &universal::t_integral, py::arg("theta"), py::arg("k"));
  m.def("pde_check", [](int n) {
    const auto c = universal::heuristic_pde_residual(n);
    py::dict d;
    d["residual"] = c.residual;
    d["boundary_derivative"] = c.boundaryDerivative;
    d["boundary_value"] = c.boundaryValue;
    d["boundary_ok"] = c.boundaryOk;
    return d;
  }, py::arg("n"));

  // three-body
  py::class_<threebody::WaveFunction3>(m, "WaveFunction")
      .def_readonly("energy", &threebody::WaveFunction3::energy)
      .def_readonly("lambda_", &threebody::WaveFunction3::lambda)
      .def_readonly("norm", &threebody::WaveFunction3::norm)
      .def_readonly("residual", &threebody::WaveFunction3::residual)
      .def_readonly("iterations", &threebody::WaveFunction3::iterations)
      .def_property_readonly("phi", &as_grid_array)
      .def_property_readonly("r1", [](const threebody::WaveFunction3& w) { return as_array(w.grid.r1Nodes); })
      .def_property_readonly("r2", [](const threebody::WaveFunction3& w) { return as_array(w.grid.r2Nodes); })
      .def_property_readonly("u", [](const threebody::WaveFunction3& w) { return as_array(w.grid.uNodes); })
      .def("spreading", &observables::spreading_diagnostic, py::arg("R"))
      .def("theorem2_distance", &observables::theorem2_distance, py::arg("k"))
      .def("angular_distribution", [](const threebody::WaveFunction3& w, int nRho, int nTheta) {
        const auto d = observables::angular_distribution(w, {nRho, nTheta});
        py::dict out;
        out["theta"] = as_array(d.thetaNodes);
        out["u"] = as_array(d.uNodes);
        py::array_t<double> D({d.uNodes.size(), d.thetaNodes.size()});
        std::copy(d.values.begin(), d.values.end(), D.mutable_data());
        out["D"] = D;
        out["normalization"] = d.normalization;
        out["l1_to_universal"] = observables::l1_distance_to_universal(d);
        out["u_flatness"] = observables::u_flatness(d);
        return out;
      }, py::arg("n_rho") = 400, py::arg("n_theta") = 48);

  m.def("oscillator_ground_state", [](int n, int nu, double rMax) {
    const auto g = threebody::build_grid(rMax, n, n, nu, 1.0);
    return threebody::ground_state(threebody::Hamiltonian(g, threebody::oscillator_potentials(g), 0.0));
  }, py::arg("n") = 64, py::arg("nu") = 8, py::arg("r_max") = 10.0,
     "Ground state of the r1^2 + r2^2 test family (exact energy 6).");

  m.def("ground_state", [](const SystemSpec& s, double lambda, double rMax, int n1, int n2, int nu) {
    py::gil_scoped_release release;
    return threebody::ground_state(s, lambda, threebody::build_grid(rMax, n1, n2, nu));
  }, py::arg("system"), py::arg("lambda_"), py::arg("r_max"), py::arg("n1") = 64, py::arg("n2") = 64,
     py::arg("nu") = 8);

  m.def("threshold_sequence", [](const SystemSpec& s, std::vector<double> targets, int n1, int n2, int nu,
                                 double rMaxFactor, int jobs) {
    threebody::SequenceOptions o;
    o.grid = {n1, n2, nu, rMaxFactor, 0.0};
    o.jobs = jobs;
    threebody::ThresholdSequence seq;
    {
      py::gil_scoped_release release;
      seq = threebody::generate_threshold_sequence(s, targets, o);
    }
    py::list entries;
    for (const auto& e : seq.entries) {
      py::dict d;
      d["target"] = e.target;
      d["lambda"] = e.lambda;
      d["E"] = e.energy;
      d["k"] = e.k;
      d["boundary_mass"] = e.boundaryMass;
      d["iterations"] = e.iterations;
      d["state"] = e.state;
      entries.append(d);
    }
    return py::make_tuple(entries, seq.complete, seq.message);
  }, py::arg("system"), py::arg("targets"), py::arg("n1") = 64, py::arg("n2") = 64, py::arg("nu") = 8,
     py::arg("rmax_factor") = 12.0, py::arg("jobs") = 1);

  // suites
  m.def("run_suite", [](const std::string& name, const std::string& configPath, const std::string& outputDir) {
    suites::ExperimentConfig c = configPath.empty() ? suites::ExperimentConfig{} : suites::load_config(configPath);
    if (!outputDir.empty()) c.outputDir = outputDir;
    if (name != "twobody" && name != "threebody" && name != "universal") {
      throw ConfigError("unknown suite '" + name + "'");
    }
    suites::SuiteReport r;
    {
      py::gil_scoped_release release;
      if (name == "twobody") r = suites::run_twobody_suite(c);
      if (name == "threebody") r = suites::run_threshold_suite(c);
      if (name == "universal") r = suites::run_universal_suite(c);
    }
    return suite_result(r);
  }, py::arg("name"), py::arg("config") = "", py::arg("output_dir") = "");
}
