#pragma once

// Layered scene graph built from a support solution.

#include "supportgraph/types.hpp"

#include <Eigen/Core>

#include <map>
#include <string>
#include <vector>

namespace sg {

inline constexpr int kRootVertex = 0;
inline constexpr int kHiddenVertex = 1;

/// Vertex id of the object at index `i` in detection order.
inline int object_vertex(std::size_t i) { return static_cast<int>(i) + 2; }

struct GraphObject {
  int detection_id = 0;
  std::size_t class_index = 0;
  std::string label;
  BoundingBox bbox;
  Extents extents;
  std::vector<std::string> attributes;
};

/// Structure classes and the hidden vertex hang off the root; everything else
/// is placed by breadth-first traversal of the support assignment. Objects the
/// traversal never reaches because their supporters form a cycle are moved to
/// the hidden vertex.
SceneGraph build_graph(const std::string& scene_type, const std::vector<GraphObject>& objects,
                       const Assignment& assignment);

/// Adds r / mirror(r) pairs between close object vertices. `extents` is keyed
/// by vertex id.
SceneGraph add_position_edges(SceneGraph graph, const std::map<int, Extents>& extents, double min_gap = 0.5);

/// True when the hidden vertex supports at least one vertex.
bool hidden_in_use(const SceneGraph& graph);

/// Matrix labels of a graph in vertex order (root label first), without
/// duplicates; the hidden vertex only when it is in use.
std::vector<std::string> matrix_labels(const SceneGraph& graph);

/// Rows: supported class, columns: supporting class. Layer edges also set the
/// mirrored root entry. Default edges are not counted. Throws InputError when
/// a label is missing from `labels`.
Eigen::MatrixXi graph_to_matrix(const SceneGraph& graph, const std::vector<std::string>& labels);

}  // namespace sg
