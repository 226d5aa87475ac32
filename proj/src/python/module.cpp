// Python bindings. Documents cross the boundary as JSON text; the package
// wrapper turns them into dicts.

#include "supportgraph/error.hpp"
#include "supportgraph/graph_eval.hpp"
#include "supportgraph/io.hpp"
#include "supportgraph/pipeline.hpp"
#include "supportgraph/scene_graph.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using nlohmann::json;

namespace {

std::string infer_json(const std::string& scene, const std::string& priors, const std::optional<std::string>& config,
                       const std::optional<std::string>& model) {
  const auto s = sg::load_scene(scene);
  const auto p = sg::load_priors(priors);
  const sg::EngineConfig cfg = config ? sg::load_config(*config) : sg::EngineConfig{};
  std::optional<sg::LinearClassifier> clf;
  if (model) clf = sg::load_classifier(*model);
  else if (!cfg.support_model.empty()) clf = sg::load_classifier(cfg.support_model);
  py::gil_scoped_release release;
  const auto r = sg::run_inference(s, p, cfg, clf ? &*clf : nullptr);
  return sg::solution_to_json(r, p, cfg).dump();
}

std::string graph_json(const std::string& solution, double proximity) {
  return sg::graph_to_json(sg::graph_from_solution(json::parse(solution), proximity)).dump();
}

std::string compare_json(const std::string& hyp, const std::string& gt) {
  const auto r = sg::compare_graphs(sg::graph_from_json(json::parse(hyp)), sg::graph_from_json(json::parse(gt)));
  return json{{"cheeger_distance", r.cheeger_distance},
              {"spectral_distance", r.spectral_distance},
              {"naive_distance", r.naive_distance},
              {"hypothesis_disconnected", r.hypothesis_disconnected},
              {"ground_truth_disconnected", r.ground_truth_disconnected},
              {"degenerate_lambda2", r.degenerate_lambda2}}
      .dump();
}

std::vector<std::string> validate_json(const std::string& graph) {
  return sg::validate_graph(sg::graph_from_json(json::parse(graph)));
}

py::dict bounds(const Eigen::MatrixXd& adjacency) {
  const auto b = sg::cheeger_bounds(sg::from_adjacency(adjacency));
  py::dict d;
  d["lower"] = b.lower;
  d["upper"] = b.upper;
  d["lambda2"] = b.lambda2;
  d["disconnected"] = b.disconnected;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "support inference and scene-graph comparison";

  py::register_exception<sg::InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<sg::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<sg::SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<sg::IoError>(m, "IoError", PyExc_OSError);

  m.def("infer_json", &infer_json, py::arg("scene"), py::arg("priors"), py::arg("config") = py::none(),
        py::arg("model") = py::none(), "Run inference on a scene file; returns the solution document as JSON text");
  m.def("graph_json", &graph_json, py::arg("solution"), py::arg("proximity") = 0.5);
  m.def("compare_json", &compare_json, py::arg("hypothesis"), py::arg("ground_truth"));
  m.def("validate_json", &validate_json, py::arg("graph"), "Violated invariants; empty when valid");
  m.def("cheeger_bounds", &bounds, py::arg("adjacency"));
  m.def("cheeger_constant", [](const Eigen::MatrixXd& a) { return sg::cheeger_constant_bruteforce(sg::from_adjacency(a)); },
        py::arg("adjacency"), "Brute force over all vertex subsets; small graphs only");
  m.def("naive_distance", &sg::naive_distance, py::arg("hypothesis"), py::arg("ground_truth"));
}
