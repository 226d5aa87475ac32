#pragma once

// End-to-end inference: proposals -> regions -> alignment -> support problem ->
// solution -> scene graph. Shared by the CLI, the HTTP service and the bindings.

#include "supportgraph/energy.hpp"
#include "supportgraph/features.hpp"
#include "supportgraph/geometry.hpp"
#include "supportgraph/scene_graph.hpp"
#include "supportgraph/scoring.hpp"
#include "supportgraph/solver.hpp"
#include "supportgraph/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sg {

inline constexpr std::string_view kConfigSchema = "supportgraph.config/v1";
inline constexpr std::string_view kSolutionSchema = "supportgraph.solution/v1";
inline constexpr std::string_view kAlignmentSchema = "supportgraph.alignment/v1";

struct EngineConfig {
  double nms_weight = 1.0;  // w in sw = sb + w * max sc
  double nms_iou = 0.5;
  double segmentation_ratio = 0.8;
  AlignmentConfig alignment;
  EnergyWeights energy;
  FeatureConfig features;
  std::size_t max_nodes = 200000;
  double proximity = 0.5;  // minimum gap for position edges
  /// Support classifier used when a scene carries neither probabilities nor
  /// features. Relative paths resolve against the config file.
  std::string support_model;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
EngineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base = {});
EngineConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const EngineConfig& cfg);

/// NMS survivors that still own pixels after segmentation, in NMS order.
struct ObjectSelection {
  std::vector<Detection> kept;
  std::map<int, std::vector<std::size_t>> pixels;
  std::vector<std::string> warnings;
};

ObjectSelection select_objects(const SceneBundle& scene, const EngineConfig& cfg);
/// Alignment cues from objects whose top class is ground or wall.
PixelLabels structure_labels(const SceneBundle& scene, const ObjectSelection& selection);
Alignment align_scene(const SceneBundle& scene, const EngineConfig& cfg);

struct InferenceResult {
  std::string scene_id;
  ScenePosterior scene;
  std::vector<Detection> kept;  // NMS survivors with pixels, object order
  std::vector<ObjectRegion> regions;
  std::vector<std::vector<std::string>> attributes;  // colour labels per object
  Alignment alignment;
  SupportProblem problem;
  SupportSolution solution;
  std::vector<std::string> warnings;
};

/// `classifier` is only consulted when the scene has no support data.
InferenceResult run_inference(const SceneBundle& scene, const PriorTables& priors, const EngineConfig& cfg,
                              const LinearClassifier* classifier = nullptr);

/// The problem the solver sees, without solving it.
InferenceResult prepare_inference(const SceneBundle& scene, const PriorTables& priors, const EngineConfig& cfg,
                                  const LinearClassifier* classifier = nullptr);

nlohmann::json solution_to_json(const InferenceResult& r, const PriorTables& priors, const EngineConfig& cfg);
nlohmann::json alignment_to_json(const Alignment& a, const EngineConfig& cfg);

/// Graph from a solution document (as written by solution_to_json).
SceneGraph graph_from_solution(const nlohmann::json& solution, double proximity = 0.5);
SceneGraph graph_from_inference(const InferenceResult& r, const PriorTables& priors, const EngineConfig& cfg);

}  // namespace sg
