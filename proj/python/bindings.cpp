// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>
#include <numbers>

#include "nsbesov/besov_split.hpp"
#include "nsbesov/cli_harness.hpp"
#include "nsbesov/fourier_calculus.hpp"
#include "nsbesov/random_fields.hpp"

namespace py = pybind11;
using namespace nsbesov;

namespace {

// Partitions are cached per (n, box) so repeated calls skip the symbol build.
const Partition& partition_for(int n, double box) {
  static std::map<std::pair<int, double>, std::unique_ptr<Partition>> cache;
  auto& slot = cache[{n, box}];
  if (!slot) slot = std::make_unique<Partition>(build_partition(FrequencyGrid(n, box)));
  return *slot;
}

const Partition& partition_of(const SpectralField& f) { return partition_for(f.grid().n(), f.grid().length()); }

// JSON values cross the boundary through Python's own json module.
py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_python(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::array_t<cplx> coefficients(const SpectralField& f) {
  const auto n = py::ssize_t(f.grid().n());
  py::array_t<cplx> out({py::ssize_t(3), n, n, n});
  std::copy(f.data().begin(), f.data().end(), out.mutable_data());
  return out;
}

py::dict table_dict(const Table& t) {
  py::dict columns;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    py::list values;
    for (const auto& row : t.rows) std::visit([&](const auto& v) { values.append(v); }, row[c]);
    columns[py::str(t.columns[c])] = values;
  }
  return columns;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dyadic Besov splitting and energy-class Navier-Stokes solves on the periodic box.";

  static py::exception<Error> error(m, "NsbesovError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(reason_name(e.reason())) + ": " + e.what()).c_str());
    }
  });
  set_lint_sink([](const std::string&) {});

  py::class_<SpectralField>(m, "Field")
      .def_property_readonly("n", [](const SpectralField& f) { return f.grid().n(); })
      .def_property_readonly("box", [](const SpectralField& f) { return f.grid().length(); })
      .def_property_readonly("coefficients", &coefficients, "Copy of c(k), shape (3, n, n, n), FFTW order.")
      .def("l2_norm", [](const SpectralField& f) { return l2_norm(f); })
      .def("divergence_defect", [](const SpectralField& f) { return divergence_defect(f); })
      .def("save", [](const SpectralField& f, const std::string& path) { save_field(path, f); })
      .def("__add__", [](const SpectralField& a, const SpectralField& b) { return a + b; })
      .def("__sub__", [](const SpectralField& a, const SpectralField& b) { return a - b; })
      .def("__mul__", [](const SpectralField& a, double s) { return s * a; })
      .def("__rmul__", [](const SpectralField& a, double s) { return s * a; });

  m.def("load_field", [](const std::string& path) { return load_field<3>(path); });

  m.def(
      "random_field",
      [](int n, std::uint64_t seed, double p, double amplitude, double box) {
        FieldRecipe r;
        r.seed = seed;
        r.p = p;
        r.critical_norm = amplitude;
        return random_besov_field(partition_for(n, box), r);
      },
      py::arg("n") = 32, py::arg("seed") = 1, py::arg("p") = 4.0, py::arg("amplitude") = 1.0,
      py::arg("box") = 2.0 * std::numbers::pi, "Seeded divergence-free field with the given critical norm.");

  m.def(
      "besov_norm",
      [](const SpectralField& f, double s, double p, double q) {
        return besov_norm(f, s, p, q, partition_of(f)).value;
      },
      py::arg("field"), py::arg("s"), py::arg("p"), py::arg("q") = kInfinity);

  m.def(
      "exponents",
      [](double p) {
        const auto e = derive_exponents(p);
        py::dict d;
        d["p"] = e.p;
        d["alpha"] = e.alpha;
        d["p0"] = e.p0;
        d["p1"] = e.p1;
        d["p2"] = e.p2;
        d["theta_inf"] = e.theta_inf;
        d["theta_gen"] = e.theta_gen;
        d["delta"] = e.delta;
        d["delta1"] = e.delta1;
        d["delta2"] = e.delta2;
        d["kappa"] = e.kappa;
        d["beta_p"] = e.beta_p;
        d["gamma1"] = e.gamma1;
        d["gamma2"] = e.gamma2;
        d["decay_beta"] = e.decay_beta;
        return d;
      },
      py::arg("p"));

  m.def(
      "ledger_defects",
      [](double p) {
        std::vector<std::tuple<std::string, double, bool>> out;
        for (const auto& d : ledger_defects(derive_exponents(p))) out.emplace_back(d.relation, d.defect, d.holds);
        return out;
      },
      py::arg("p"));

  m.def(
      "compose_split",
      [](const SpectralField& g, double N, double p) {
        auto r = compose_split(g, N, derive_exponents(p), partition_of(g));
        py::dict norms;
        norms["N"] = r.norms.N;
        norms["data_critical"] = r.norms.data_critical;
        norms["bar_subcritical"] = r.norms.bar_subcritical;
        norms["tilde_l2"] = r.norms.tilde_l2;
        norms["bar_critical"] = r.norms.bar_critical;
        norms["tilde_critical"] = r.norms.tilde_critical;
        norms["reconstruction_error"] = r.norms.reconstruction_error;
        return py::make_tuple(std::move(r.bar), std::move(r.tilde), norms);
      },
      py::arg("field"), py::arg("N"), py::arg("p") = 4.0, "Returns (bar, tilde, norms).");

  m.def(
      "run_experiment",
      [](const py::dict& config) {
        const auto report = run_experiment(config_from_json(from_python(config)));
        py::dict tables;
        for (const auto& t : report.tables) tables[py::str(t.name)] = table_dict(t);
        py::dict out;
        out["pipeline"] = report.pipeline;
        out["passed"] = report.passed;
        out["certificate"] = to_python(report.certificate);
        out["tables"] = tables;
        return out;
      },
      py::arg("config"), "Runs one pipeline; config keys as in the JSON config file.");

  m.def(
      "emit_experiment",
      [](const py::dict& config, const std::string& dir) {
        std::vector<std::string> paths;
        for (const auto& p : emit_report(run_experiment(config_from_json(from_python(config))), dir))
          paths.push_back(p.string());
        return paths;
      },
      py::arg("config"), py::arg("dir"));
}
