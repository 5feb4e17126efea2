#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>

#include "ncd/error.hpp"
#include "ncd/experiments.hpp"
#include "ncd/report.hpp"

namespace py = pybind11;
using namespace ncd;

// SpectralField <-> 1-d float64 numpy array.
namespace pybind11::detail {
template <>
struct type_caster<SpectralField> {
  PYBIND11_TYPE_CASTER(SpectralField, const_name("numpy.ndarray[float64]"));

  type_caster() : value(std::size_t{1}) {}

  bool load(handle src, bool convert) {
    if (!convert && !array_t<double>::check_(src)) return false;
    auto arr = array_t<double, array::c_style | array::forcecast>::ensure(src);
    if (!arr || arr.ndim() != 1) return false;
    value = SpectralField(std::vector<double>(arr.data(), arr.data() + arr.size()));
    return true;
  }

  static handle cast(const SpectralField& f, return_value_policy, handle) {
    const auto c = f.coeffs();
    array_t<double> a(static_cast<ssize_t>(c.size()));
    std::copy(c.begin(), c.end(), a.mutable_data());
    return a.release();
  }
};
}  // namespace pybind11::detail

namespace {

// NoiseModel's first alternative is not default constructible, which the
// stock variant caster needs.
NoiseModel to_noise(const py::object& model) {
  if (py::isinstance<Additive>(model)) return model.cast<Additive>();
  if (py::isinstance<LinearMult>(model)) return model.cast<LinearMult>();
  if (py::isinstance<SineMult>(model)) return model.cast<SineMult>();
  throw py::type_error("noise must be Additive, LinearMult or SineMult");
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

// Reports travel as their JSON text; the Python layer parses them.
template <class Fn>
std::string released(Fn&& fn) {
  py::gil_scoped_release release;
  return fn().dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral Galerkin solver for the stochastic nonclassical diffusion equation";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<BlowUpError>(m, "BlowUpError", PyExc_ArithmeticError);
  py::register_exception<ExclusionBudgetError>(m, "ExclusionBudgetError", PyExc_RuntimeError);

  // Spectral core.
  m.def("eigenvalue", &eigenvalue, py::arg("k"));
  m.def("eval_basis", &eval_basis, py::arg("k"), py::arg("x"));
  m.def(
      "synthesize",
      [](const SpectralField& f, std::size_t nodes) { return to_array(synthesize(f, nodes).values); },
      py::arg("coeffs"), py::arg("nodes"));
  m.def(
      "analyze",
      [](std::vector<double> values, std::size_t n_modes) {
        return analyze(GridField{std::move(values)}, n_modes);
      },
      py::arg("values"), py::arg("n_modes"));
  m.def(
      "norm",
      [](const SpectralField& f, const std::string& space) {
        return norm(f, parse_sobolev(space));
      },
      py::arg("coeffs"), py::arg("space"));
  m.def("helmholtz_solve", &helmholtz_solve, py::arg("coeffs"), py::arg("epsilon"));
  m.def("cubic_projection", &cubic_projection, py::arg("coeffs"));

  // Models.
  py::class_<Cubic>(m, "Cubic").def(py::init<>());
  py::class_<Truncated>(m, "Truncated")
      .def(py::init<double>(), py::arg("radius"))
      .def_readwrite("radius", &Truncated::radius);
  py::class_<Linear>(m, "Linear")
      .def(py::init([](std::optional<SpectralField> forcing) {
             Linear l;
             if (forcing) l.forcing = [f = *forcing](double) { return f; };
             return l;
           }),
           py::arg("forcing") = py::none(),
           "Linear equation with an optional time-independent forcing f.");
  py::class_<Additive>(m, "Additive")
      .def(py::init<SpectralField, double>(), py::arg("profile"), py::arg("gamma"))
      .def_readwrite("profile", &Additive::profile)
      .def_readwrite("gamma", &Additive::gamma);
  py::class_<LinearMult>(m, "LinearMult")
      .def(py::init<double>(), py::arg("gamma"))
      .def_readwrite("gamma", &LinearMult::gamma);
  py::class_<SineMult>(m, "SineMult")
      .def(py::init<double>(), py::arg("gamma"))
      .def_readwrite("gamma", &SineMult::gamma);

  m.def(
      "drift",
      [](const SpectralField& f, double epsilon, const NonlinearityMode& mode, double t) {
        return drift({f, t, epsilon}, mode);
      },
      py::arg("coeffs"), py::arg("epsilon"), py::arg("mode") = NonlinearityMode{Cubic{}},
      py::arg("t") = 0.0);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init([](std::size_t n_modes) { return default_config(n_modes); }),
           py::arg("n_modes") = 32)
      .def_readwrite("epsilon", &SimConfig::epsilon)
      .def_readwrite("n_modes", &SimConfig::n_modes)
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("T", &SimConfig::horizon)
      .def_property(
          "scheme", [](const SimConfig& c) { return std::string(to_string(c.scheme)); },
          [](SimConfig& c, const std::string& s) { c.scheme = parse_scheme(s); })
      .def_readwrite("mode", &SimConfig::mode)
      .def_property(
          "noise",
          [](const SimConfig& c) {
            return std::visit([](const auto& model) { return py::cast(model); }, c.noise);
          },
          [](SimConfig& c, const py::object& model) { c.noise = to_noise(model); })
      .def_readwrite("u0", &SimConfig::u0)
      .def_readwrite("save_stride", &SimConfig::save_stride)
      .def_readwrite("seed", &SimConfig::seed)
      .def("validate", &SimConfig::validate)
      .def("hash", [](const SimConfig& c) { return config_hash(c); })
      .def("to_json", [](const SimConfig& c) { return to_json(c).dump(); });

  // Brownian paths.
  py::class_<BrownianPath>(m, "BrownianPath")
      .def_readonly("dt", &BrownianPath::dt)
      .def_readonly("seed", &BrownianPath::seed)
      .def_readonly("level", &BrownianPath::level)
      .def_property_readonly("increments",
                             [](const BrownianPath& p) { return to_array(p.increments); })
      .def_property_readonly("horizon", &BrownianPath::horizon)
      .def("checksum", [](const BrownianPath& p) { return checksum(p); })
      .def("__eq__", [](const BrownianPath& a, const BrownianPath& b) { return a == b; });
  m.def("sample_path", &sample_path, py::arg("T"), py::arg("dt"), py::arg("seed"));
  m.def("refine", &refine, py::arg("path"));
  m.def("coarsen", &coarsen, py::arg("path"));
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("sample_index"),
        py::arg("stream") = 0);
  m.def("sample_brownian_path", &sample_brownian_path, py::arg("config"), py::arg("sample_index"));

  // Trajectories.
  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("times", [](const Trajectory& t) { return to_array(t.times); })
      .def_property_readonly("coeffs",
                             [](const Trajectory& t) {
                               const std::size_t rows = t.size();
                               const std::size_t cols = rows ? t.fields[0].n_modes() : 0;
                               py::array_t<double> a({rows, cols});
                               auto v = a.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < rows; ++i) {
                                 for (std::size_t k = 0; k < cols; ++k) v(i, k) = t.fields[i][k];
                               }
                               return a;
                             })
      .def("__len__", &Trajectory::size);
  m.def(
      "simulate",
      [](const SimConfig& c, std::optional<BrownianPath> path) {
        const BrownianPath p = path ? *path : sample_brownian_path(c, 0);
        py::gil_scoped_release release;
        return simulate(c, p);
      },
      py::arg("config"), py::arg("path") = py::none(),
      "Runs one trajectory; without a path, sample 0 of the config's seed is used.");

  // Functionals.
  m.def(
      "bochner_norm",
      [](const Trajectory& t, const std::string& s) { return bochner_norm(t, parse_sobolev(s)); },
      py::arg("trajectory"), py::arg("space"));
  m.def(
      "shift_modulus",
      [](const Trajectory& t, double delta, const std::string& s, bool interior) {
        return shift_modulus(t, delta, parse_sobolev(s),
                             interior ? ShiftBoundary::Interior : ShiftBoundary::ZeroExtension);
      },
      py::arg("trajectory"), py::arg("delta"), py::arg("space") = "Hneg1",
      py::arg("interior") = false);
  m.def(
      "energy_residual",
      [](const Trajectory& t, const BrownianPath& p, const SimConfig& c) {
        const EnergyResidual r = energy_residual(t, p, c);
        py::dict d;
        d["max_abs"] = r.max_abs;
        d["cumulative"] = r.cumulative;
        d["series"] = to_array(r.series);
        return d;
      },
      py::arg("trajectory"), py::arg("path"), py::arg("config"));

  // Experiments, returned as report JSON text.
  m.def(
      "_mc_moments",
      [](const SimConfig& c, std::vector<double> eps, std::vector<double> ps, std::size_t samples,
         std::size_t workers) {
        return released([&] { return to_json(mc_moments(c, eps, ps, samples, workers)); });
      },
      py::arg("config"), py::arg("epsilons"), py::arg("ps"), py::arg("samples"),
      py::arg("workers"));
  m.def(
      "_ou_check",
      [](const SimConfig& c, int k, std::size_t samples, std::size_t workers) {
        return released([&] { return to_json(ou_oracle_check(c, k, samples, workers)); });
      },
      py::arg("config"), py::arg("k"), py::arg("samples"), py::arg("workers"));
  m.def("ou_config", &ou_config, py::arg("epsilon"), py::arg("k"), py::arg("gamma"),
        py::arg("T"), py::arg("dt"), py::arg("c0") = 1.0);
  m.def(
      "_modulus_scaling",
      [](const SimConfig& c, std::vector<double> deltas, const std::string& s,
         std::size_t samples, std::size_t workers, bool interior) {
        return released([&] {
          return to_json(modulus_scaling(
              c, deltas, parse_sobolev(s), samples, workers,
              interior ? ShiftBoundary::Interior : ShiftBoundary::ZeroExtension));
        });
      },
      py::arg("config"), py::arg("deltas"), py::arg("space"), py::arg("samples"),
      py::arg("workers"), py::arg("interior"));
  m.def(
      "_convergence_study",
      [](const SimConfig& c, std::vector<double> eps, std::size_t samples,
         std::optional<double> delta, double threshold, const std::string& s,
         std::size_t workers) {
        return released([&] {
          return to_json(
              convergence_study(c, eps, samples, delta, threshold, parse_sobolev(s), workers));
        });
      },
      py::arg("config"), py::arg("epsilons"), py::arg("samples"), py::arg("delta"),
      py::arg("threshold"), py::arg("space"), py::arg("workers"));
  m.def(
      "_energy_check",
      [](const SimConfig& c, int levels, std::size_t samples, std::size_t workers) {
        return released([&] { return to_json(energy_check(c, levels, samples, workers)); });
      },
      py::arg("config"), py::arg("levels"), py::arg("samples"), py::arg("workers"));
  m.def(
      "_strong_order",
      [](const SimConfig& c, int levels, std::size_t samples, std::size_t workers) {
        return released([&] { return to_json(strong_order(c, levels, samples, workers), c); });
      },
      py::arg("config"), py::arg("levels"), py::arg("samples"), py::arg("workers"));
}
