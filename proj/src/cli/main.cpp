// sgraph: command-line front end.
//
// Exit codes: 0 ok, 2 bad input, 3 bad config/priors, 4 solver failure.

#include "supportgraph/error.hpp"
#include "supportgraph/graph_eval.hpp"
#include "supportgraph/io.hpp"
#include "supportgraph/lp.hpp"
#include "supportgraph/pipeline.hpp"
#include "supportgraph/server.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInput = 2;
constexpr int kConfig = 3;
constexpr int kSolver = 4;

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") std::cout << text;
  else sg::write_text(out, text);
}

sg::EngineConfig config_from(const std::string& path) {
  return path.empty() ? sg::EngineConfig{} : sg::load_config(path);
}

sg::PriorTables priors_from(const std::string& path) {
  try {
    return sg::load_priors(path);
  } catch (const sg::InputError& e) {
    throw sg::ConfigError("priors " + path + ": " + e.what());
  } catch (const sg::IoError& e) {
    throw sg::ConfigError(e.what());
  }
}

std::optional<sg::LinearClassifier> model_from(const std::string& flag, const sg::EngineConfig& cfg) {
  const std::string path = flag.empty() ? cfg.support_model : flag;
  if (path.empty()) return std::nullopt;
  try {
    return sg::load_classifier(path);
  } catch (const sg::InputError& e) {
    throw sg::ConfigError("support model " + path + ": " + e.what());
  } catch (const sg::IoError& e) {
    throw sg::ConfigError(e.what());
  }
}

struct Common {
  std::string config;
  std::string priors;
  std::string model;
};

int cmd_align(const std::string& scene_path, const Common& c, const std::string& out) {
  const auto cfg = config_from(c.config);
  const auto scene = sg::load_scene(scene_path);
  const auto a = sg::align_scene(scene, cfg);
  json doc = sg::alignment_to_json(a, cfg);
  doc["scene_id"] = scene.scene_id;
  emit(doc.dump(2) + "\n", out);
  for (const auto& w : a.warnings) std::cerr << "warning: " << w << "\n";
  return kOk;
}

int cmd_infer(const std::string& scene_path, const Common& c, bool oracle, const std::string& dump_lp,
              const std::string& out, const std::string& graph_out) {
  const auto cfg = config_from(c.config);
  const auto priors = priors_from(c.priors);
  const auto model = model_from(c.model, cfg);
  const auto scene = sg::load_scene(scene_path);
  const sg::LinearClassifier* clf = model ? &*model : nullptr;

  if (!dump_lp.empty()) {
    const auto prepared = sg::prepare_inference(scene, priors, cfg, clf);
    sg::write_text(dump_lp, sg::to_lp_format(sg::build_ip(prepared.problem).lp));
  }
  const auto r = sg::run_inference(scene, priors, cfg, clf);
  json doc = sg::solution_to_json(r, priors, cfg);

  int code = kOk;
  if (oracle) {
    const auto ex = sg::exhaustive_minimize(r.problem);
    const double a = r.solution.energy.total, b = ex.energy.total;
    const bool match = std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
    doc["oracle"] = {{"objective", b}, {"match", match}};
    if (match) {
      std::cerr << "objective match: " << a << "\n";
    } else {
      std::cerr << "objective mismatch: solver " << a << " vs exhaustive " << b << "\n";
      code = kSolver;
    }
  }
  emit(doc.dump(2) + "\n", out);
  if (!graph_out.empty())
    sg::save_graph(sg::graph_from_inference(r, priors, cfg), graph_out, sg::GraphFormat::json);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  return code;
}

int cmd_graph(const std::string& input, const Common& c, const std::string& out, const std::string& dot) {
  const json doc = sg::read_json(input);
  sg::SceneGraph g;
  if (doc.is_object() && doc.value("schema", "") == sg::kSceneSchema) {
    const auto cfg = config_from(c.config);
    const auto priors = priors_from(c.priors);
    const auto model = model_from(c.model, cfg);
    const auto scene = sg::parse_scene(doc);
    const auto r = sg::run_inference(scene, priors, cfg, model ? &*model : nullptr);
    g = sg::graph_from_inference(r, priors, cfg);
  } else {
    const double proximity = doc.is_object() && doc.contains("config")
                                 ? sg::parse_config(doc["config"]).proximity
                                 : sg::EngineConfig{}.proximity;
    g = sg::graph_from_solution(doc, proximity);
  }
  const auto problems = sg::validate_graph(g);
  if (!problems.empty()) throw sg::InputError("graph", problems.front());
  if (out.empty() || out == "-") std::cout << sg::graph_to_json(g).dump(2) << "\n";
  else sg::save_graph(g, out, sg::GraphFormat::json);
  if (!dot.empty()) sg::save_graph(g, dot, sg::GraphFormat::dot);
  return kOk;
}

int cmd_eval(const std::vector<std::string>& hyp, const std::vector<std::string>& gt, const std::string& json_out) {
  if (hyp.size() != gt.size())
    throw sg::InputError("eval", "need as many hypothesis graphs as ground-truth graphs");
  std::vector<sg::SimilarityReport> reports;
  json pairs = json::array();
  std::printf("%-24s %-24s %9s %9s %9s\n", "hypothesis", "ground truth", "Cheeger", "Spectral", "Naive");
  for (std::size_t k = 0; k < hyp.size(); ++k) {
    const auto h = sg::load_graph(hyp[k]);
    const auto g = sg::load_graph(gt[k]);
    for (const auto* graph : {&h, &g}) {
      const auto problems = sg::validate_graph(*graph);
      if (!problems.empty())
        throw sg::InputError(graph == &h ? hyp[k] : gt[k], problems.front());
    }
    const auto r = sg::compare_graphs(h, g);
    reports.push_back(r);
    std::string flags;
    if (r.hypothesis_disconnected || r.ground_truth_disconnected) flags += " [disconnected]";
    if (r.degenerate_lambda2) flags += " [degenerate]";
    std::printf("%-24s %-24s %9.4f %9.4f %9.4f%s\n", fs::path(hyp[k]).filename().string().c_str(),
                fs::path(gt[k]).filename().string().c_str(), r.cheeger_distance, r.spectral_distance,
                r.naive_distance, flags.c_str());
    pairs.push_back({{"hypothesis", hyp[k]},
                     {"ground_truth", gt[k]},
                     {"cheeger_distance", r.cheeger_distance},
                     {"spectral_distance", r.spectral_distance},
                     {"naive_distance", r.naive_distance},
                     {"hypothesis_disconnected", r.hypothesis_disconnected},
                     {"ground_truth_disconnected", r.ground_truth_disconnected},
                     {"degenerate_lambda2", r.degenerate_lambda2}});
  }
  const auto b = sg::batch_report(reports);
  std::printf("\n%s", sg::format_report(b).c_str());
  if (!json_out.empty()) {
    const json doc = {{"schema", "supportgraph.eval/v1"},
                      {"pairs", pairs},
                      {"summary",
                       {{"count", b.pairs},
                        {"cheeger", {{"mean", b.cheeger_mean}, {"variance", b.cheeger_variance}}},
                        {"spectral", {{"mean", b.spectral_mean}, {"variance", b.spectral_variance}}},
                        {"naive", {{"mean", b.naive_mean}, {"variance", b.naive_variance}}},
                        {"disconnected", b.disconnected},
                        {"degenerate", b.degenerate}}}};
    sg::write_text(json_out, doc.dump(2) + "\n");
  }
  return kOk;
}

int cmd_serve(const std::string& scenes, const std::string& graphs, const Common& c, const std::string& host,
              int port) {
  sg::ServiceOptions opt;
  opt.scenes_dir = scenes;
  opt.graphs_dir = graphs;
  opt.config = config_from(c.config);
  opt.priors = priors_from(c.priors);
  opt.classifier = model_from(c.model, opt.config);
  sg::SceneService service(std::move(opt));
  std::cerr << "serving " << scenes << " on http://" << host << ":" << port << "\n";
  sg::run_server(service, host, port);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sgraph - support relations and scene graphs from RGBD scenes"};
  app.require_subcommand(1);
  Common common;
  std::string out;

  auto* align = app.add_subcommand("align", "Estimate the room-aligned coordinate frame of a scene");
  std::string align_scene;
  align->add_option("scene", align_scene, "Scene document")->required();
  align->add_option("--config", common.config, "Engine config");
  align->add_option("-o,--output", out, "Output file (default stdout)");

  auto* infer = app.add_subcommand("infer", "Infer support relations and object classes");
  std::string infer_scene, dump_lp, graph_out;
  bool oracle = false;
  infer->add_option("scene", infer_scene, "Scene document")->required();
  infer->add_option("--priors", common.priors, "Prior tables")->required();
  infer->add_option("--config", common.config, "Engine config");
  infer->add_option("--model", common.model, "Support classifier (overrides the config)");
  infer->add_flag("--oracle", oracle, "Cross-check the objective by exhaustive search (N <= 6)");
  infer->add_option("--dump-lp", dump_lp, "Write the integer program in LP format");
  infer->add_option("--graph", graph_out, "Also write the scene graph");
  infer->add_option("-o,--output", out, "Output file (default stdout)");

  auto* graph = app.add_subcommand("graph", "Build a scene graph from a solution or a scene");
  std::string graph_in, dot;
  graph->add_option("input", graph_in, "Solution document, or scene document (needs --priors)")->required();
  graph->add_option("--priors", common.priors, "Prior tables (scene input)");
  graph->add_option("--config", common.config, "Engine config (scene input)");
  graph->add_option("--model", common.model, "Support classifier (scene input)");
  graph->add_option("-o,--output", out, "Graph JSON (default stdout)");
  graph->add_option("--dot", dot, "Also write Graphviz DOT");

  auto* eval = app.add_subcommand("eval", "Compare hypothesis graphs with ground truth");
  std::vector<std::string> hyp, gt;
  std::string eval_json;
  eval->add_option("--hyp", hyp, "Hypothesis graph(s)")->required();
  eval->add_option("--gt", gt, "Ground-truth graph(s), paired in order")->required();
  eval->add_option("--json", eval_json, "Write the machine-readable report");

  auto* serve = app.add_subcommand("serve", "Serve scenes and ground-truth graphs over HTTP");
  std::string scenes_dir, graphs_dir, host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--scenes", scenes_dir, "Directory of scene documents")->required();
  serve->add_option("--graphs", graphs_dir, "Directory for ground-truth graphs")->required();
  serve->add_option("--priors", common.priors, "Prior tables")->required();
  serve->add_option("--config", common.config, "Engine config");
  serve->add_option("--model", common.model, "Support classifier");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*align) return cmd_align(align_scene, common, out);
    if (*infer) return cmd_infer(infer_scene, common, oracle, dump_lp, out, graph_out);
    if (*graph) return cmd_graph(graph_in, common, out, dot);
    if (*eval) return cmd_eval(hyp, gt, eval_json);
    if (*serve) return cmd_serve(scenes_dir, graphs_dir, common, host, port);
  } catch (const sg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const sg::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  } catch (const sg::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const sg::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
