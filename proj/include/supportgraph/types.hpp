#pragma once

// Domain types shared by every stage of the engine. All of them are plain
// value types; once built they are never mutated in place by the library.

#include <Eigen/Core>

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sg {

// Reserved vocabulary slots. Prior tables are rejected unless they follow this.
inline constexpr std::size_t kGroundClass = 0;
inline constexpr std::size_t kWallClass = 1;
inline constexpr std::size_t kCeilingClass = 2;

inline constexpr std::string_view kGroundName = "ground";
inline constexpr std::string_view kWallName = "wall";
inline constexpr std::string_view kCeilingName = "ceiling";
inline constexpr std::string_view kHiddenName = "hidden";

/// Axis-aligned image rectangle in pixel units. A pixel (u, v) lies inside when
/// its centre (u + 0.5, v + 0.5) does.
struct BoundingBox {
  double u0 = 0.0;
  double v0 = 0.0;
  double u1 = 0.0;
  double v1 = 0.0;

  double width() const { return u1 - u0; }
  double height() const { return v1 - v0; }
  double area() const { return width() * height(); }
  bool contains_pixel(int u, int v) const {
    const double cu = u + 0.5;
    const double cv = v + 0.5;
    return cu >= u0 && cu <= u1 && cv >= v0 && cv <= v1;
  }

  bool operator==(const BoundingBox&) const = default;
};

double intersection_area(const BoundingBox& a, const BoundingBox& b);
double iou(const BoundingBox& a, const BoundingBox& b);

struct Detection {
  int id = 0;
  BoundingBox bbox;
  double box_score = 0.0;
  std::vector<double> class_scores;

  /// Highest-scoring class; lowest index wins ties.
  std::size_t top_class() const;
  double max_class_score() const;

  bool operator==(const Detection&) const = default;
};

struct Extents {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;

  bool operator==(const Extents&) const = default;
};

enum class PixelOrientation : std::uint8_t { other, horizontal, vertical };

/// Pixels of one segmented object together with their room-aligned geometry.
/// `points`, `camera_depth` and `orientation` run parallel to `pixels`.
struct ObjectRegion {
  int detection_id = -1;
  std::vector<std::size_t> pixels;
  std::vector<Eigen::Vector3d> points;
  std::vector<double> camera_depth;
  std::vector<PixelOrientation> orientation;
  Extents extents;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::size_t horizontal_count = 0;
  std::size_t vertical_count = 0;

  double bottom() const { return extents.y_min; }
  double top() const { return extents.y_max; }
  std::size_t size() const { return pixels.size(); }
};

struct LineSegment {
  Eigen::Vector3d direction = Eigen::Vector3d::UnitY();
  /// Explicit near-vertical flag from the line extractor; derived from the
  /// alignment threshold when absent.
  std::optional<bool> near_y;
};

using Rgb = std::array<std::uint8_t, 3>;

/// Supporter id used for the hidden placeholder in pairwise support tables.
inline constexpr int kHiddenId = -1;

/// Support classifier outcome for "j supports i".
enum class SupportLabel : std::size_t { below = 0, behind = 1, none = 2 };
using SupportDistribution = std::array<double, 3>;

struct PairKey {
  int supported = 0;
  int supporter = 0;
  auto operator<=>(const PairKey&) const = default;
};

/// Multinomial logistic model: rows of `weights` are classes.
struct LinearClassifier {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;

  std::size_t num_classes() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t num_features() const { return static_cast<std::size_t>(weights.cols()); }
};

struct PrecomputedSupport {
  std::map<PairKey, SupportDistribution> table;
};

struct SupportFeatureTable {
  std::map<PairKey, std::vector<double>> table;
  LinearClassifier classifier;
};

/// Either nothing (features are computed from geometry), a precomputed
/// probability table, or precomputed feature vectors plus the classifier.
using SupportInput = std::variant<std::monostate, PrecomputedSupport, SupportFeatureTable>;

struct SceneBundle {
  std::string scene_id;
  int width = 0;
  int height = 0;
  std::size_t num_classes = 0;
  std::vector<Detection> detections;
  std::vector<int> superpixels;
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;
  std::vector<Rgb> rgb;
  std::vector<LineSegment> lines;
  std::vector<double> scene_scores;
  SupportInput support;

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  int superpixel_count() const;
};

struct PriorTables {
  std::vector<std::string> classes;
  std::vector<std::string> scenes;
  /// scenes x classes: probability that the class is present in the scene type.
  Eigen::MatrixXd class_given_scene;
  /// classes x classes, indexed [supporter][supported].
  Eigen::MatrixXd support_prior;

  std::size_t class_index(std::string_view name) const;
  std::size_t scene_index(std::string_view name) const;
};

// ---------------------------------------------------------------------------
// Support inference result

enum class SupportType { below, behind };

struct SupporterRef {
  enum class Kind { object, hidden, ground_self };

  Kind kind = Kind::hidden;
  std::size_t object = 0;

  static SupporterRef visible(std::size_t index) { return {Kind::object, index}; }
  static SupporterRef hidden() { return {Kind::hidden, 0}; }
  static SupporterRef ground_self() { return {Kind::ground_self, 0}; }

  bool is_object() const { return kind == Kind::object; }
  bool is_hidden() const { return kind == Kind::hidden; }
  bool is_ground_self() const { return kind == Kind::ground_self; }
  bool operator==(const SupporterRef&) const = default;
};

struct ObjectAssignment {
  SupporterRef supporter;
  SupportType type = SupportType::below;
  std::size_t class_index = 0;

  bool operator==(const ObjectAssignment&) const = default;
};

using Assignment = std::vector<ObjectAssignment>;

/// Weighted energy contributions; `total` is their sum.
struct EnergyBreakdown {
  double support = 0.0;             // E_SP
  double classification = 0.0;      // E_C
  double class_constraint = 0.0;    // alpha_C * sum C_C
  double distance = 0.0;            // alpha_dist * sum C_dist
  double support_constraint = 0.0;  // alpha_SPC * sum C_SPC
  double total = 0.0;
  std::size_t saturated_terms = 0;
};

struct SupportSolution {
  std::vector<int> detection_ids;  // object index -> detection id
  Assignment objects;
  EnergyBreakdown energy;
  double lower_bound = 0.0;  // root LP relaxation objective
  std::size_t nodes = 0;     // branch-and-bound nodes solved
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Scene graph

enum class VertexKind { root, hidden, structure, object };
/// Kind of a tree edge. `layer` ties layer-one vertices to the root.
enum class EdgeKind { below, behind, layer };
enum class Relation { above, under, front, behind, left, right };

Relation mirror(Relation r);

struct Vertex {
  int id = 0;
  VertexKind kind = VertexKind::object;
  std::string label;
  std::optional<int> detection_id;
  std::optional<BoundingBox> bbox;
  double z_min = 0.0;
  double z_max = 0.0;
  std::vector<std::string> attributes;

  bool operator==(const Vertex&) const = default;
};

/// Directed from the supported vertex to its supporter.
struct SupportEdge {
  int from = 0;
  int to = 0;
  EdgeKind kind = EdgeKind::below;
  bool operator==(const SupportEdge&) const = default;
};

/// Physical defaults between structure vertices (walls on ground, ceiling on walls).
struct DefaultEdge {
  int from = 0;
  int to = 0;
  bool operator==(const DefaultEdge&) const = default;
};

struct PositionEdge {
  int from = 0;
  int to = 0;
  Relation relation = Relation::above;
  bool operator==(const PositionEdge&) const = default;
};

struct SceneGraph {
  std::string scene_type;
  std::vector<Vertex> vertices;
  std::vector<SupportEdge> support_edges;
  std::vector<DefaultEdge> default_edges;
  std::vector<PositionEdge> position_edges;

  const Vertex* find(int id) const;
  const Vertex& root() const;
  const Vertex& hidden() const;
  /// Parent in the support tree, if any.
  std::optional<int> parent_of(int id) const;

  bool operator==(const SceneGraph&) const = default;
};

/// Names every violated structural invariant; empty when the graph is valid.
std::vector<std::string> validate_graph(const SceneGraph& graph);

struct SimilarityReport {
  double cheeger_distance = 0.0;
  double spectral_distance = 0.0;
  double naive_distance = 0.0;
  bool hypothesis_disconnected = false;
  bool ground_truth_disconnected = false;
  bool degenerate_lambda2 = false;
};

std::string_view to_string(SupportType t);
std::string_view to_string(VertexKind k);
std::string_view to_string(EdgeKind k);
std::string_view to_string(Relation r);
std::optional<SupportType> support_type_from(std::string_view s);
std::optional<VertexKind> vertex_kind_from(std::string_view s);
std::optional<EdgeKind> edge_kind_from(std::string_view s);
std::optional<Relation> relation_from(std::string_view s);

}  // namespace sg
