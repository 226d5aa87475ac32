#include "supportgraph/pipeline.hpp"

#include "supportgraph/detection.hpp"
#include "supportgraph/error.hpp"
#include "supportgraph/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace sg {

using nlohmann::json;

namespace {

// Reads `obj[key]` into `out` when present; type errors become ConfigError.
template <typename T>
void read(const json& obj, const char* section, const char* key, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(section) + "." + key + ": wrong type");
  }
}

const json& section(const json& doc, const char* name, std::initializer_list<const char*> keys) {
  static const json empty = json::object();
  const auto it = doc.find(name);
  if (it == doc.end()) return empty;
  if (!it->is_object()) throw ConfigError(std::string(name) + ": expected an object");
  for (const auto& [k, v] : it->items()) {
    (void)v;
    if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) == keys.end())
      throw ConfigError(std::string(name) + "." + k + ": unknown key");
  }
  return *it;
}

json extents_json(const Extents& e) {
  return {{"x_min", e.x_min}, {"x_max", e.x_max}, {"y_min", e.y_min},
          {"y_max", e.y_max}, {"z_min", e.z_min}, {"z_max", e.z_max}};
}

Extents extents_from(const json& j, const std::string& path) {
  Extents e;
  try {
    e.x_min = j.at("x_min").get<double>();
    e.x_max = j.at("x_max").get<double>();
    e.y_min = j.at("y_min").get<double>();
    e.y_max = j.at("y_max").get<double>();
    e.z_min = j.at("z_min").get<double>();
    e.z_max = j.at("z_max").get<double>();
  } catch (const json::exception&) {
    throw InputError(path, "expected x_min..z_max");
  }
  return e;
}

std::vector<std::string> attributes_of(const SceneBundle& scene, const ObjectRegion& r) {
  if (scene.rgb.empty()) return {};
  return {color_attribute(r.pixels, scene.rgb)};
}

}  // namespace

void EngineConfig::validate() const {
  if (!(nms_weight >= 0.0)) throw ConfigError("nms.weight must be >= 0");
  if (!(nms_iou > 0.0 && nms_iou < 1.0)) throw ConfigError("nms.iou_threshold must lie in (0, 1)");
  if (!(segmentation_ratio > 0.0 && segmentation_ratio <= 1.0))
    throw ConfigError("segmentation.ratio must lie in (0, 1]");
  if (!(alignment.sigma > 0.0)) throw ConfigError("alignment.sigma must be > 0");
  if (alignment.normal_weight < 0.0 || alignment.line_weight < 0.0)
    throw ConfigError("alignment weights must be >= 0");
  if (!(alignment.sweep_step_degrees > 0.0 && alignment.sweep_step_degrees <= 90.0))
    throw ConfigError("alignment.sweep_step_degrees must lie in (0, 90]");
  if (!(alignment.near_y_degrees > 0.0 && alignment.near_y_degrees < 90.0))
    throw ConfigError("alignment.near_y_degrees must lie in (0, 90)");
  if (!(alignment.orientation_cone_degrees > 0.0 && alignment.orientation_cone_degrees <= 45.0))
    throw ConfigError("alignment.orientation_cone_degrees must lie in (0, 45]");
  energy.validate();
  if (features.histogram_bins < 1) throw ConfigError("features.histogram_bins must be >= 1");
  if (max_nodes == 0) throw ConfigError("solver.max_nodes must be > 0");
  if (!(proximity >= 0.0)) throw ConfigError("graph.proximity must be >= 0");
}

EngineConfig parse_config(const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) throw ConfigError("config: expected an object");
  static const std::set<std::string> top{"schema",   "nms",    "segmentation", "alignment",    "energy",
                                         "features", "solver", "graph",        "support_model"};
  for (const auto& [k, v] : doc.items()) {
    (void)v;
    if (!top.count(k)) throw ConfigError("config: unknown key '" + k + "'");
  }
  if (doc.contains("schema") && doc["schema"] != std::string(kConfigSchema))
    throw ConfigError("config: unsupported schema");

  EngineConfig c;
  const auto& nms = section(doc, "nms", {"weight", "iou_threshold"});
  read(nms, "nms", "weight", c.nms_weight);
  read(nms, "nms", "iou_threshold", c.nms_iou);
  read(section(doc, "segmentation", {"ratio"}), "segmentation", "ratio", c.segmentation_ratio);
  const auto& al = section(doc, "alignment", {"normal_weight", "line_weight", "sigma", "near_y_degrees",
                                              "orientation_cone_degrees", "sweep_step_degrees"});
  read(al, "alignment", "normal_weight", c.alignment.normal_weight);
  read(al, "alignment", "line_weight", c.alignment.line_weight);
  read(al, "alignment", "sigma", c.alignment.sigma);
  read(al, "alignment", "near_y_degrees", c.alignment.near_y_degrees);
  read(al, "alignment", "orientation_cone_degrees", c.alignment.orientation_cone_degrees);
  read(al, "alignment", "sweep_step_degrees", c.alignment.sweep_step_degrees);
  const auto& en = section(doc, "energy", {"alpha_class", "alpha_distance", "alpha_support", "k_hidden"});
  read(en, "energy", "alpha_class", c.energy.alpha_class);
  read(en, "energy", "alpha_distance", c.energy.alpha_distance);
  read(en, "energy", "alpha_support", c.energy.alpha_support);
  read(en, "energy", "k_hidden", c.energy.k_hidden);
  read(section(doc, "features", {"histogram_bins"}), "features", "histogram_bins", c.features.histogram_bins);
  read(section(doc, "solver", {"max_nodes"}), "solver", "max_nodes", c.max_nodes);
  read(section(doc, "graph", {"proximity"}), "graph", "proximity", c.proximity);
  if (doc.contains("support_model")) {
    if (!doc["support_model"].is_string()) throw ConfigError("support_model: expected a path");
    std::filesystem::path p = doc["support_model"].get<std::string>();
    if (p.is_relative() && !base.empty()) p = base / p;
    c.support_model = p.string();
  }
  try {
    c.validate();
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

EngineConfig load_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = read_json(path);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(doc, path.parent_path());
}

json config_to_json(const EngineConfig& c) {
  json j = {
      {"schema", kConfigSchema},
      {"nms", {{"weight", c.nms_weight}, {"iou_threshold", c.nms_iou}}},
      {"segmentation", {{"ratio", c.segmentation_ratio}}},
      {"alignment",
       {{"normal_weight", c.alignment.normal_weight},
        {"line_weight", c.alignment.line_weight},
        {"sigma", c.alignment.sigma},
        {"near_y_degrees", c.alignment.near_y_degrees},
        {"orientation_cone_degrees", c.alignment.orientation_cone_degrees},
        {"sweep_step_degrees", c.alignment.sweep_step_degrees}}},
      {"energy",
       {{"alpha_class", c.energy.alpha_class},
        {"alpha_distance", c.energy.alpha_distance},
        {"alpha_support", c.energy.alpha_support},
        {"k_hidden", c.energy.k_hidden}}},
      {"features", {{"histogram_bins", c.features.histogram_bins}}},
      {"solver", {{"max_nodes", c.max_nodes}}},
      {"graph", {{"proximity", c.proximity}}},
  };
  if (!c.support_model.empty()) j["support_model"] = c.support_model;
  return j;
}

namespace {

// Re-throws with the pipeline stage attached; the exception class is kept so
// callers can still map it to an exit code.
[[noreturn]] void rethrow_in(const char* stage) {
  const std::string tag = std::string(" (stage: ") + stage + ")";
  try {
    throw;
  } catch (const InputError& e) {
    throw InputError(e.path(), e.message() + tag);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what() + tag);
  } catch (const SolverError& e) {
    throw SolverError(e.what() + tag);
  } catch (const IoError& e) {
    throw IoError(e.what() + tag);
  }
}

ObjectSelection select_objects(const SceneBundle& scene, const EngineConfig& cfg, const char*& stage) {
  ObjectSelection sel;
  stage = "nms";
  std::vector<Detection> survivors;
  for (const auto& wd : weighted_nms(scene.detections, cfg.nms_weight, cfg.nms_iou))
    survivors.push_back(wd.detection);
  stage = "segmentation";
  auto seg = segment_objects(survivors, scene.superpixels, scene.width, scene.height, cfg.segmentation_ratio);
  sel.warnings = seg.warnings;
  for (const auto& d : survivors)
    if (const auto it = seg.pixels.find(d.id); it != seg.pixels.end() && !it->second.empty()) {
      sel.kept.push_back(d);
      sel.pixels[d.id] = it->second;
    }
  return sel;
}

InferenceResult prepare_impl(const SceneBundle& scene, const PriorTables& priors, const EngineConfig& cfg,
                             const LinearClassifier* classifier, const char*& stage) {
  stage = "config";
  cfg.validate();
  if (scene.num_classes != priors.classes.size())
    throw ConfigError("priors: vocabulary has " + std::to_string(priors.classes.size()) +
                      " classes but the scene scores " + std::to_string(scene.num_classes));
  if (scene.scene_scores.size() != priors.scenes.size())
    throw ConfigError("priors: " + std::to_string(priors.scenes.size()) + " scene types but the scene has " +
                      std::to_string(scene.scene_scores.size()) + " scene scores");

  InferenceResult r;
  r.scene_id = scene.scene_id;
  r.scene = scene_posterior(scene.scene_scores, priors.scenes);

  // proposals -> object regions
  stage = "nms";
  ObjectSelection sel = select_objects(scene, cfg, stage);
  r.kept = sel.kept;
  r.warnings = sel.warnings;
  const auto& pixels = sel.pixels;

  stage = "alignment";
  const PixelLabels labels = structure_labels(scene, sel);
  r.alignment = align_coordinates(scene, labels, cfg.alignment);
  r.warnings.insert(r.warnings.end(), r.alignment.warnings.begin(), r.alignment.warnings.end());

  stage = "regions";
  std::vector<int> ids;
  for (const auto& d : r.kept) {
    ids.push_back(d.id);
    r.regions.push_back(summarize_region(d.id, pixels.at(d.id), r.alignment.points, r.alignment.normals,
                                         scene.points, cfg.alignment.orientation_cone_degrees));
    r.attributes.push_back(attributes_of(scene, r.regions.back()));
  }
  const std::size_t n = r.kept.size();

  // pairwise support probabilities
  stage = "support";
  SupportTensor tensor;
  if (std::holds_alternative<std::monostate>(scene.support)) {
    if (!classifier)
      throw ConfigError("scene '" + scene.scene_id +
                        "' carries no support data and no support_model is configured");
    double floor_height = std::numeric_limits<double>::infinity();
    for (const auto& q : r.alignment.points) floor_height = std::min(floor_height, q.y());
    if (!std::isfinite(floor_height)) floor_height = 0.0;
    std::map<PairKey, std::vector<double>> features;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto f = support_features(r.regions[i], &r.regions[j], floor_height, scene.width, cfg.features);
        features[{ids[i], ids[j]}] = std::vector<double>(f.begin(), f.end());
      }
      const auto f = support_features(r.regions[i], nullptr, floor_height, scene.width, cfg.features);
      features[{ids[i], kHiddenId}] = std::vector<double>(f.begin(), f.end());
    }
    tensor = support_probabilities(ids, features, *classifier);
  } else {
    tensor = support_probabilities(ids, scene.support);
  }

  stage = "energy";
  SupportProblem& p = r.problem;
  p.n = n;
  p.k = priors.classes.size();
  p.support = std::move(tensor);
  p.class_prob.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p.k));
  for (std::size_t i = 0; i < n; ++i) {
    const auto probs = class_probabilities(r.kept[i]);
    for (std::size_t c = 0; c < p.k; ++c) p.class_prob(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = probs[c];
  }
  p.class_given_scene = priors.class_given_scene.row(static_cast<Eigen::Index>(r.scene.index)).transpose();
  p.scene_probability = r.scene.probability;
  p.support_prior = priors.support_prior;
  p.horizontal_distance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    p.bottom.push_back(r.regions[i].bottom());
    p.top.push_back(r.regions[i].top());
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        p.horizontal_distance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            min_horizontal_distance(r.regions[i], r.regions[j]);
  }
  p.weights = cfg.energy;
  p.validate();
  return r;
}

}  // namespace

ObjectSelection select_objects(const SceneBundle& scene, const EngineConfig& cfg) {
  const char* stage = "nms";
  try {
    return select_objects(scene, cfg, stage);
  } catch (...) {
    rethrow_in(stage);
  }
}

PixelLabels structure_labels(const SceneBundle& scene, const ObjectSelection& sel) {
  // ground and wall regions with their class probability
  PixelLabels labels;
  labels.structure_prob.assign(scene.pixel_count(), 0.0);
  labels.ground.assign(scene.pixel_count(), 0);
  for (const auto& d : sel.kept) {
    const std::size_t c = d.top_class();
    if (c != kGroundClass && c != kWallClass) continue;
    const double prob = class_probabilities(d)[c];
    for (std::size_t p : sel.pixels.at(d.id)) {
      labels.structure_prob[p] = prob;
      if (c == kGroundClass) labels.ground[p] = 1;
    }
  }
  return labels;
}

Alignment align_scene(const SceneBundle& scene, const EngineConfig& cfg) {
  cfg.validate();
  const auto sel = select_objects(scene, cfg);
  try {
    return align_coordinates(scene, structure_labels(scene, sel), cfg.alignment);
  } catch (...) {
    rethrow_in("alignment");
  }
}

InferenceResult prepare_inference(const SceneBundle& scene, const PriorTables& priors, const EngineConfig& cfg,
                                  const LinearClassifier* classifier) {
  const char* stage = "config";
  try {
    return prepare_impl(scene, priors, cfg, classifier, stage);
  } catch (...) {
    rethrow_in(stage);
  }
}

InferenceResult run_inference(const SceneBundle& scene, const PriorTables& priors, const EngineConfig& cfg,
                              const LinearClassifier* classifier) {
  InferenceResult r = prepare_inference(scene, priors, cfg, classifier);
  SolverOptions opt;
  opt.max_nodes = cfg.max_nodes;
  try {
    r.solution = solve_support(r.problem, opt);
  } catch (...) {
    rethrow_in("solver");
  }
  r.solution.detection_ids.clear();
  for (const auto& d : r.kept) r.solution.detection_ids.push_back(d.id);
  r.warnings.insert(r.warnings.end(), r.solution.warnings.begin(), r.solution.warnings.end());
  return r;
}

json alignment_to_json(const Alignment& a, const EngineConfig& cfg) {
  json axes = json::array();
  for (int c = 0; c < 3; ++c) axes.push_back({a.axes(0, c), a.axes(1, c), a.axes(2, c)});
  return {{"schema", kAlignmentSchema}, {"axes", {{"x", axes[0]}, {"y", axes[1]}, {"z", axes[2]}}},
          {"score", a.score},           {"candidates", a.candidates},
          {"chosen", a.chosen},         {"fallback", a.fallback},
          {"warnings", a.warnings},     {"config", config_to_json(cfg)}};
}

json solution_to_json(const InferenceResult& r, const PriorTables& priors, const EngineConfig& cfg) {
  json objects = json::array();
  const auto& s = r.solution;
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const auto& a = s.objects[i];
    json sup;
    if (a.supporter.is_object()) sup = r.kept[a.supporter.object].id;
    else if (a.supporter.is_hidden()) sup = kHiddenName;
    else sup = "self";
    const auto& d = r.kept[i];
    objects.push_back({{"detection_id", d.id},
                       {"class", priors.classes[a.class_index]},
                       {"class_index", a.class_index},
                       {"supporter", sup},
                       {"type", to_string(a.type)},
                       {"bbox", {d.bbox.u0, d.bbox.v0, d.bbox.u1, d.bbox.v1}},
                       {"extents", extents_json(r.regions[i].extents)},
                       {"attributes", r.attributes[i]},
                       {"pixels", r.regions[i].size()}});
  }
  const auto& e = s.energy;
  return {{"schema", kSolutionSchema},
          {"scene_id", r.scene_id},
          {"scene_type", r.scene.name},
          {"scene_probability", r.scene.probability},
          {"objects", objects},
          {"energy",
           {{"support", e.support},
            {"classification", e.classification},
            {"class_constraint", e.class_constraint},
            {"distance", e.distance},
            {"support_constraint", e.support_constraint},
            {"total", e.total},
            {"saturated_terms", e.saturated_terms}}},
          {"lower_bound", s.lower_bound},
          {"nodes", s.nodes},
          {"alignment", alignment_to_json(r.alignment, cfg)},
          {"warnings", r.warnings},
          {"config", config_to_json(cfg)}};
}

namespace {

SceneGraph graph_with_positions(const std::string& scene_type, const std::vector<GraphObject>& objects,
                                const Assignment& assignment, double proximity) {
  SceneGraph g = build_graph(scene_type, objects, assignment);
  std::map<int, Extents> extents;
  for (std::size_t i = 0; i < objects.size(); ++i) extents[object_vertex(i)] = objects[i].extents;
  return add_position_edges(std::move(g), extents, proximity);
}

}  // namespace

SceneGraph graph_from_inference(const InferenceResult& r, const PriorTables& priors, const EngineConfig& cfg) {
  std::vector<GraphObject> objects;
  for (std::size_t i = 0; i < r.solution.objects.size(); ++i) {
    GraphObject o;
    o.detection_id = r.kept[i].id;
    o.class_index = r.solution.objects[i].class_index;
    o.label = priors.classes[o.class_index];
    o.bbox = r.kept[i].bbox;
    o.extents = r.regions[i].extents;
    o.attributes = r.attributes[i];
    objects.push_back(std::move(o));
  }
  return graph_with_positions(r.scene.name, objects, r.solution.objects, cfg.proximity);
}

SceneGraph graph_from_solution(const json& doc, double proximity) {
  if (!doc.is_object() || doc.value("schema", "") != kSolutionSchema)
    throw InputError("schema", "expected a " + std::string(kSolutionSchema) + " document");
  const auto& objs = doc.at("objects");
  if (!objs.is_array()) throw InputError("objects", "expected an array");
  std::vector<GraphObject> objects;
  Assignment assignment;
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string path = "objects[" + std::to_string(i) + "]";
    const auto& o = objs[i];
    try {
      GraphObject g;
      g.detection_id = o.at("detection_id").get<int>();
      g.class_index = o.at("class_index").get<std::size_t>();
      g.label = o.at("class").get<std::string>();
      const auto b = o.at("bbox").get<std::vector<double>>();
      if (b.size() != 4) throw InputError(path + ".bbox", "expected 4 values");
      g.bbox = {b[0], b[1], b[2], b[3]};
      g.extents = extents_from(o.at("extents"), path + ".extents");
      if (o.contains("attributes")) g.attributes = o["attributes"].get<std::vector<std::string>>();
      if (!index.emplace(g.detection_id, i).second) throw InputError(path, "duplicate detection id");
      objects.push_back(std::move(g));
    } catch (const json::exception& e) {
      throw InputError(path, e.what());
    }
  }
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string path = "objects[" + std::to_string(i) + "]";
    ObjectAssignment a;
    a.class_index = objects[i].class_index;
    const auto st = support_type_from(objs[i].value("type", ""));
    if (!st) throw InputError(path + ".type", "expected below or behind");
    a.type = *st;
    const auto& sup = objs[i].at("supporter");
    if (sup.is_number_integer()) {
      const auto it = index.find(sup.get<int>());
      if (it == index.end()) throw InputError(path + ".supporter", "unknown detection id");
      a.supporter = SupporterRef::visible(it->second);
    } else if (sup == kHiddenName) {
      a.supporter = SupporterRef::hidden();
    } else if (sup == "self") {
      a.supporter = SupporterRef::ground_self();
    } else {
      throw InputError(path + ".supporter", "expected a detection id, \"hidden\" or \"self\"");
    }
    assignment.push_back(a);
  }
  return graph_with_positions(doc.value("scene_type", ""), objects, assignment, proximity);
}

}  // namespace sg
