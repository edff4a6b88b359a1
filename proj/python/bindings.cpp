#include "cscc/bn_model.hpp"
#include "cscc/errors.hpp"
#include "cscc/oracle.hpp"
#include "cscc/report.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>
#include <optional>
#include <string>

namespace py = pybind11;

namespace {

cscc::ModelFormat format_of(const std::string& name) {
  const auto f = cscc::parse_format(name);
  if (!f) throw py::value_error("unknown format '" + name + "'");
  return *f;
}

// Runs one decomposition; returns the JSON report as text.
std::string run(const std::string& text, const std::string& format, const std::string& name, bool saturation,
                unsigned threads, bool trimming, double trim_cutoff, std::optional<double> timeout, bool verify) {
  const cscc::LoadedModel model = cscc::load_model_text(text, format_of(format), name);
  cscc::RunConfig cfg;
  cfg.saturation = saturation;
  cfg.threads = threads;
  cfg.trimming = trimming;
  cfg.trim_cutoff_factor = trim_cutoff;
  cfg.record_relation = verify;
  if (timeout) cfg.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(*timeout * 1000.0));
  cscc::RunOutcome out;
  {
    py::gil_scoped_release unlocked;
    cscc::ModelGraph mg = cscc::build_graph(model);
    out = cscc::run_model(model, mg, cfg);
    if (verify && out.result.relation) {
      const cscc::VerifyOutcome v = cscc::verify(model, out.result);
      const bool ranges = v.oracle_min == out.report.nontrivial_min && v.oracle_max == out.report.nontrivial_max;
      out.report.verification = v.verdict.equal && ranges ? "equal"
                                : v.verdict.equal ? "mismatch: non-trivial SCC range differs from the oracle"
                                                  : "mismatch: " + v.verdict.describe();
    }
  }
  return cscc::to_json(out.report).dump();
}

py::dict expand_text(const std::string& text) {
  const cscc::PartialBooleanNetwork net = cscc::parse_bnet(text);
  const cscc::ExpandedNetwork ex = cscc::expand(net);
  py::list updates;
  for (const auto& u : ex.updates) updates.append(cscc::to_string(u, ex.variables, ex.inputs));
  py::dict d;
  d["variables"] = ex.variables;
  d["inputs"] = ex.inputs;
  d["updates"] = updates;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cscc, m) {
  m.doc() = "Coloured SCC decomposition of partially specified Boolean networks";

  py::register_exception<cscc::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<cscc::OracleLimitError>(m, "OracleLimitError", PyExc_RuntimeError);
  py::register_exception<cscc::ContractViolation>(m, "ContractViolation", PyExc_ValueError);

  m.def("_run", &run, py::arg("text"), py::arg("format"), py::arg("name"), py::arg("saturation"),
        py::arg("threads"), py::arg("trimming"), py::arg("trim_cutoff"), py::arg("timeout"), py::arg("verify"));
  m.def("expand", &expand_text, py::arg("text"),
        "Parse a bnet-psbn model and return its expanded variables, inputs and update formulas.");
  m.def(
      "generate", [](std::uint64_t seed) { return cscc::format_bnet(cscc::random_network(seed)); },
      py::arg("seed"), "Seeded random partially specified network in bnet-psbn text.");
}
