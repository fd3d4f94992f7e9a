// Thin pybind11 layer. Structured values cross the boundary as JSON text;
// the Python package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "judgebench/errors.hpp"
#include "judgebench/generator.hpp"
#include "judgebench/harness.hpp"
#include "judgebench/metrics.hpp"
#include "judgebench/oracle.hpp"
#include "judgebench/provider.hpp"
#include "judgebench/serialization.hpp"

namespace py = pybind11;
namespace jb = judgebench;
namespace fs = std::filesystem;

namespace {

jb::TravelConfig travel_from(const std::string& travel_json) {
  if (travel_json.empty()) return {};
  return jb::TravelConfig::from_json(nlohmann::json::parse(travel_json));
}

std::size_t generate(const fs::path& out, std::optional<std::uint64_t> seed, std::optional<std::size_t> users,
                     const std::string& config_json, const std::string& travel_json, int workers) {
  auto cfg = config_json.empty() ? jb::GeneratorConfig::defaults()
                                 : jb::GeneratorConfig::from_json(nlohmann::json::parse(config_json));
  if (seed) cfg.seed = *seed;
  if (users) cfg.n_user_blocks = *users;
  cfg.validate();
  const auto travel = travel_from(travel_json).make();
  const auto pairs = jb::assemble_dataset(cfg, jb::UtteranceBackend::template_backend(), *travel, workers);
  jb::write_dataset(out, pairs);
  return pairs.size();
}

std::string validate(const fs::path& dataset, const std::string& travel_json, int workers) {
  const auto pairs = jb::read_dataset(dataset);
  const auto report = jb::validate_dataset(pairs, *travel_from(travel_json).make(), workers);
  auto j = report.to_json();
  j["ok"] = report.ok();
  return j.dump();
}

std::string judge_pair(const std::string& pair_json, const std::string& travel_json) {
  const auto pair = jb::deserialize_pair(pair_json);
  const auto v = jb::judge_pair(pair.user, pair.system, *travel_from(travel_json).make());
  nlohmann::json violations = nlohmann::json::array();
  for (const auto c : v.violations) violations.push_back(std::string(jb::to_string(c)));
  return nlohmann::json{{"correct", v.correct}, {"violations", violations}}.dump();
}

std::string run(const std::string& config_json) {
  const auto cfg = jb::RunConfig::from_json(nlohmann::json::parse(config_json));
  jb::RunResult r;
  {
    py::gil_scoped_release release;
    r = jb::run_benchmark(cfg);
  }
  nlohmann::ordered_json j;
  j["run_dir"] = r.run_dir.string();
  j["dataset_pairs"] = r.dataset_pairs;
  j["skipped"] = r.skipped;
  j["judged_now"] = r.judged_now;
  j["total_records"] = r.total_records;
  j["complete"] = r.complete;
  j["provider_failures"] = r.provider_failures;
  j["summary"] = r.summary ? jb::to_json(*r.summary) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

std::string report(const fs::path& run_dir) { return jb::to_json(jb::report_run(run_dir)).dump(); }

py::tuple prf1(std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn) {
  jb::ConfusionCounts c;
  c.tp = tp;
  c.fp = fp;
  c.tn = tn;
  c.fn = fn;
  const auto s = jb::prf1(c);
  return py::make_tuple(s.precision, s.recall, s.f1);
}

std::optional<double> alpha(const jb::AnnotationMatrix& m, const std::string& metric) {
  if (metric == "nominal") return jb::krippendorff_alpha(m, jb::AlphaMetric::Nominal);
  if (metric == "ordinal") return jb::krippendorff_alpha(m, jb::AlphaMetric::Ordinal);
  throw jb::ConfigError("metric must be nominal or ordinal");
}

std::string cost(const std::string& model_id, std::int64_t in, std::int64_t out, const fs::path& rates) {
  const auto table = rates.empty() ? jb::CostTable::july_2025() : jb::CostTable::load(rates);
  return jb::cost_of(table, model_id, in, out).str(12);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "judgebench native core";

  auto base = py::register_exception<jb::Error>(m, "JudgeBenchError", PyExc_RuntimeError);
  py::register_exception<jb::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<jb::DatasetInvalid>(m, "DatasetInvalid", base.ptr());
  py::register_exception<jb::InsufficientData>(m, "InsufficientData", base.ptr());
  py::register_exception<jb::UnknownModel>(m, "UnknownModel", base.ptr());
  py::register_exception<jb::MalformedJson>(m, "MalformedJson", base.ptr());
  py::register_exception<jb::SchemaViolation>(m, "SchemaViolation", base.ptr());

  m.def("configure_logging", &jb::configure_logging, py::arg("quiet"));
  m.def("generate", &generate, py::arg("out"), py::arg("seed") = py::none(), py::arg("users") = py::none(),
        py::arg("config_json") = "", py::arg("travel_json") = "", py::arg("workers") = 1);
  m.def("validate", &validate, py::arg("dataset"), py::arg("travel_json") = "", py::arg("workers") = 1);
  m.def("judge_pair", &judge_pair, py::arg("pair_json"), py::arg("travel_json") = "");
  m.def("run", &run, py::arg("config_json"));
  m.def("report", &report, py::arg("run_dir"));
  m.def("prf1", &prf1, py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"));
  m.def("krippendorff_alpha", &alpha, py::arg("matrix"), py::arg("metric") = "nominal");
  m.def("cost_of", &cost, py::arg("model_id"), py::arg("input_tokens"), py::arg("output_tokens"),
        py::arg("rates") = fs::path());
}
