#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>

#include "textswarm/config.hpp"
#include "textswarm/errors.hpp"
#include "textswarm/language.hpp"
#include "textswarm/perception.hpp"
#include "textswarm/runner.hpp"

namespace py = pybind11;
namespace ts = textswarm;

namespace {

// JSON crosses the boundary as text; the Python side sees plain dicts and lists.
py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_python(const py::handle& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

ts::SimConfig make_config(const py::object& config, const std::vector<std::string>& overrides) {
  ts::SimConfig c = config.is_none() ? ts::SimConfig{} : ts::SimConfig::from_json(from_python(config));
  for (const auto& o : overrides) c.apply_override(o);
  c.validate();
  return c;
}

py::object hits_to_python(const std::vector<ts::RobotQueryResult>& results) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json hits = nlohmann::json::array();
    for (const auto& h : r.hits) {
      nlohmann::json samples = nlohmann::json::array();
      for (const auto& s : h.samples) samples.push_back({{"robot", s.robot_id}, {"tick", s.tick}, {"text", s.text}});
      hits.push_back({{"uid", ts::to_string(h.uid)}, {"score", h.score}, {"summary", h.summary}, {"samples", samples}});
    }
    out.push_back({{"robot", r.robot_id}, {"hits", hits}});
  }
  return to_python(out);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Text-based swarm re-identification simulator";

  auto contract_error = py::register_exception<ts::ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ts::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ts::EmptyDescription>(m, "EmptyDescription", PyExc_ValueError);
  py::register_exception<ts::EmptyCluster>(m, "EmptyCluster", PyExc_ValueError);
  py::register_exception<ts::ProviderError>(m, "ProviderError", PyExc_RuntimeError);
  (void)contract_error;

  py::class_<ts::RunArtifact>(m, "Artifact")
      .def_property_readonly("metrics", [](const ts::RunArtifact& a) { return to_python(a.metrics); })
      .def_property_readonly("config", [](const ts::RunArtifact& a) { return to_python(a.config.to_flat_json()); })
      .def_property_readonly("fingerprint", [](const ts::RunArtifact& a) { return a.config_fingerprint; })
      .def_property_readonly("events", [](const ts::RunArtifact& a) { return to_python(a.events); })
      .def_property_readonly("people",
                             [](const ts::RunArtifact& a) {
                               std::map<int, std::string> out;
                               for (const auto& [id, p] : a.people) out[id] = ts::canonical_description(p);
                               return out;
                             })
      .def("database", [](const ts::RunArtifact& a, int robot) {
        for (const auto& db : a.databases)
          if (db.owner() == robot) return to_python(db.to_json());
        throw ts::ContractError("no database for robot " + std::to_string(robot));
      }, py::arg("robot"))
      .def("files", [](const ts::RunArtifact& a) { return ts::render_artifact(a); },
           "File name to exact content of the artifact directory")
      .def("write", [](const ts::RunArtifact& a, const std::string& dir) { ts::write_artifact(a, dir); },
           py::arg("directory"))
      .def("recompute_metrics", [](const ts::RunArtifact& a) { return to_python(ts::recompute_metrics(a)); })
      .def("query",
           [](const ts::RunArtifact& a, const std::string& text, int robot, std::size_t k) {
             return hits_to_python(ts::query_databases(a.databases, robot, text, k));
           },
           py::arg("text"), py::arg("robot") = -1, py::arg("k") = 5);

  m.def("default_config", [] { return to_python(ts::SimConfig{}.to_flat_json()); });
  m.def("config_keys", &ts::config_keys);
  m.def("resolve_config",
        [](const py::object& config, const std::vector<std::string>& overrides) {
          return to_python(make_config(config, overrides).to_flat_json());
        },
        py::arg("config") = py::none(), py::arg("overrides") = std::vector<std::string>{});

  m.def("run",
        [](const py::object& config, const std::vector<std::string>& overrides) {
          const ts::SimConfig c = make_config(config, overrides);
          py::gil_scoped_release release;
          return ts::run_experiment(c);
        },
        py::arg("config") = py::none(), py::arg("overrides") = std::vector<std::string>{},
        "Run one simulation from a (nested or flat) config dict plus key=value overrides");
  m.def("read_artifact", [](const std::string& dir) { return ts::read_artifact(dir); }, py::arg("directory"));

  m.def("sweep",
        [](const py::object& config, const std::string& axis, const py::list& values,
           const std::vector<std::uint64_t>& seeds, int jobs) {
          const ts::SimConfig c = make_config(config, {});
          std::vector<nlohmann::json> vs;
          for (const auto& v : values) vs.push_back(from_python(v));
          ts::SweepTable table;
          {
            py::gil_scoped_release release;
            table = ts::sweep(c, axis, vs, seeds, jobs);
          }
          nlohmann::json rows = nlohmann::json::array();
          for (const auto& row : table.rows) {
            nlohmann::json summary;
            for (const auto& [name, s] : row.summary) summary[name] = {{"mean", s.mean}, {"std", s.stddev}};
            rows.push_back({{"value", row.value}, {"runs", row.runs}, {"summary", summary}});
          }
          return py::make_tuple(to_python(rows), ts::sweep_csv(table));
        },
        py::arg("config"), py::arg("axis"), py::arg("values"), py::arg("seeds"), py::arg("jobs") = 0,
        "Returns (rows, csv)");

  m.def("tokenize", &ts::tokenize, py::arg("text"));
  m.def("embed",
        [](const std::string& text, std::size_t dim) {
          const auto e = ts::embed(ts::tokenize(text), dim);
          return std::vector<double>(e.values().begin(), e.values().end());
        },
        py::arg("text"), py::arg("dim") = ts::kDefaultEmbeddingDim);
  m.def("similarity",
        [](const std::string& a, const std::string& b) {
          return ts::cosine(ts::embed(ts::tokenize(a)), ts::embed(ts::tokenize(b)));
        },
        py::arg("a"), py::arg("b"));
  m.def("summarize",
        [](const std::vector<std::string>& texts) {
          std::vector<ts::DescriptionRecord> members;
          for (std::size_t i = 0; i < texts.size(); ++i)
            members.push_back(ts::make_record(texts[i], 0, static_cast<int>(i), 0, ts::SealedPersonId(-1)));
          return ts::summarize(members);
        },
        py::arg("texts"));
  m.def("describe",
        [](const py::dict& attributes, const std::tuple<double, double, double>& noise, std::uint64_t seed) {
          const auto a = from_python(attributes).get<ts::PersonAttributes>();
          ts::Rng rng(seed);
          return ts::describe(a, {std::get<0>(noise), std::get<1>(noise), std::get<2>(noise)}, rng);
        },
        py::arg("attributes"), py::arg("noise") = std::make_tuple(0.0, 0.0, 0.0), py::arg("seed") = 0);
}
