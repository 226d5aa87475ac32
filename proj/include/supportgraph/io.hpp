#pragma once

// On-disk formats: scenes, prior tables, classifier models and scene graphs.
// Every document carries a "schema" string; see docs/formats.md.

#include "supportgraph/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace sg {

inline constexpr std::string_view kSceneSchema = "supportgraph.scene/v1";
inline constexpr std::string_view kPriorsSchema = "supportgraph.priors/v1";
inline constexpr std::string_view kGraphSchema = "supportgraph.graph/v1";
inline constexpr std::string_view kClassifierSchema = "supportgraph.linear-classifier/v1";

/// Number of entries in a support feature vector.
inline constexpr std::size_t kSupportFeatureDim = 20;

nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Parses and validates a scene. Throws InputError naming the failing field;
/// a bundle is only returned once every invariant holds.
SceneBundle parse_scene(const nlohmann::json& doc);
SceneBundle load_scene(const std::filesystem::path& path);
/// Inverse of parse_scene (superpixels are written run-length encoded).
nlohmann::json scene_to_json(const SceneBundle& scene);

PriorTables parse_priors(const nlohmann::json& doc);
PriorTables load_priors(const std::filesystem::path& path);
nlohmann::json priors_to_json(const PriorTables& priors);

LinearClassifier parse_classifier(const nlohmann::json& doc, const std::string& path = "");
LinearClassifier load_classifier(const std::filesystem::path& path);
nlohmann::json classifier_to_json(const LinearClassifier& clf);

enum class GraphFormat { json, dot };

nlohmann::json graph_to_json(const SceneGraph& graph);
/// Parses a graph document. Structural invariants are not checked here;
/// call validate_graph on the result.
SceneGraph graph_from_json(const nlohmann::json& doc);
std::string graph_to_dot(const SceneGraph& graph);

void save_graph(const SceneGraph& graph, const std::filesystem::path& path, GraphFormat format);
SceneGraph load_graph(const std::filesystem::path& path);

}  // namespace sg
