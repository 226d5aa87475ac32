#include "supportgraph/scene_graph.hpp"

#include "supportgraph/error.hpp"
#include "supportgraph/geometry.hpp"

#include <algorithm>
#include <deque>

namespace sg {

namespace {

bool is_structure(std::size_t cls) {
  return cls == kGroundClass || cls == kWallClass || cls == kCeilingClass;
}

EdgeKind edge_kind(SupportType t) { return t == SupportType::below ? EdgeKind::below : EdgeKind::behind; }

}  // namespace

SceneGraph build_graph(const std::string& scene_type, const std::vector<GraphObject>& objects,
                       const Assignment& assignment) {
  if (assignment.size() != objects.size())
    throw InputError("solution", "assignment size does not match the object list");
  const std::size_t n = objects.size();
  SceneGraph g;
  g.scene_type = scene_type;
  g.vertices.push_back({kRootVertex, VertexKind::root, scene_type, std::nullopt, std::nullopt, 0.0, 0.0, {}});
  g.vertices.push_back({kHiddenVertex, VertexKind::hidden, std::string(kHiddenName), std::nullopt,
                        std::nullopt, 0.0, 0.0, {}});
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = objects[i];
    Vertex v;
    v.id = object_vertex(i);
    v.kind = is_structure(o.class_index) ? VertexKind::structure : VertexKind::object;
    v.label = o.label;
    v.detection_id = o.detection_id;
    v.bbox = o.bbox;
    v.z_min = o.extents.z_min;
    v.z_max = o.extents.z_max;
    v.attributes = o.attributes;
    g.vertices.push_back(std::move(v));
  }

  // children[v] = objects whose assigned supporter is v
  std::map<int, std::vector<std::size_t>> children;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_structure(objects[i].class_index)) {
      children[kRootVertex].push_back(i);
      continue;
    }
    const auto& s = assignment[i].supporter;
    const int parent = s.is_object() ? object_vertex(s.object) : kHiddenVertex;
    children[parent].push_back(i);
  }

  std::vector<char> placed(n, 0);
  std::deque<int> queue{kRootVertex};
  bool hidden_queued = false;
  auto drain = [&] {
    while (!queue.empty()) {
      const int parent = queue.front();
      queue.pop_front();
      if (parent == kRootVertex && !hidden_queued) {
        g.support_edges.push_back({kHiddenVertex, kRootVertex, EdgeKind::layer});
        queue.push_back(kHiddenVertex);
        hidden_queued = true;
      }
      for (std::size_t i : children[parent]) {
        if (placed[i]) continue;
        placed[i] = 1;
        const EdgeKind kind = parent == kRootVertex ? EdgeKind::layer : edge_kind(assignment[i].type);
        g.support_edges.push_back({object_vertex(i), parent, kind});
        queue.push_back(object_vertex(i));
      }
    }
  };
  drain();

  // Whatever is left hangs from a support cycle: cycle members go to hidden.
  for (;;) {
    std::vector<std::size_t> on_cycle;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      std::size_t cur = i;
      for (std::size_t step = 0; step <= n; ++step) {
        const auto& s = assignment[cur].supporter;
        if (!s.is_object() || placed[s.object]) break;
        cur = s.object;
        if (cur == i) {
          on_cycle.push_back(i);
          break;
        }
      }
    }
    if (on_cycle.empty()) {
      // defensive: anything still unplaced also goes to hidden
      for (std::size_t i = 0; i < n; ++i)
        if (!placed[i]) on_cycle.push_back(i);
      if (on_cycle.empty()) break;
    }
    for (std::size_t i : on_cycle) {
      placed[i] = 1;
      g.support_edges.push_back({object_vertex(i), kHiddenVertex, edge_kind(assignment[i].type)});
      queue.push_back(object_vertex(i));
    }
    drain();
  }

  // physical defaults: walls rest on the ground, the ceiling on the walls
  int first_ground = -1, first_wall = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (objects[i].class_index == kGroundClass && first_ground < 0) first_ground = object_vertex(i);
    if (objects[i].class_index == kWallClass && first_wall < 0) first_wall = object_vertex(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (objects[i].class_index == kWallClass && first_ground >= 0)
      g.default_edges.push_back({object_vertex(i), first_ground});
    if (objects[i].class_index == kCeilingClass && first_wall >= 0)
      g.default_edges.push_back({object_vertex(i), first_wall});
  }
  return g;
}

SceneGraph add_position_edges(SceneGraph graph, const std::map<int, Extents>& extents, double min_gap) {
  std::vector<int> ids;
  for (const auto& v : graph.vertices)
    if (v.kind == VertexKind::object && extents.count(v.id)) ids.push_back(v.id);
  std::sort(ids.begin(), ids.end());
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      const Extents& ea = extents.at(ids[a]);
      const Extents& eb = extents.at(ids[b]);
      if (!is_close(ea, eb, min_gap)) continue;
      const auto r = relative_position(ea, eb);
      if (!r) continue;
      graph.position_edges.push_back({ids[a], ids[b], *r});
      graph.position_edges.push_back({ids[b], ids[a], mirror(*r)});
    }
  return graph;
}

bool hidden_in_use(const SceneGraph& graph) {
  for (const auto& e : graph.support_edges) {
    const Vertex* to = graph.find(e.to);
    if (to && to->kind == VertexKind::hidden) return true;
  }
  return false;
}

std::vector<std::string> matrix_labels(const SceneGraph& graph) {
  const bool hidden = hidden_in_use(graph);
  std::vector<std::string> out;
  for (const auto& v : graph.vertices) {
    if (v.kind == VertexKind::hidden && !hidden) continue;
    if (std::find(out.begin(), out.end(), v.label) == out.end()) out.push_back(v.label);
  }
  return out;
}

Eigen::MatrixXi graph_to_matrix(const SceneGraph& graph, const std::vector<std::string>& labels) {
  auto index = [&](const Vertex& v) {
    const auto it = std::find(labels.begin(), labels.end(), v.label);
    if (it == labels.end()) throw InputError("labels", "class '" + v.label + "' is not in the index");
    return static_cast<Eigen::Index>(it - labels.begin());
  };
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(n, n);
  const bool hidden = hidden_in_use(graph);
  for (const auto& e : graph.support_edges) {
    const Vertex* from = graph.find(e.from);
    const Vertex* to = graph.find(e.to);
    if (!from || !to) throw InputError("support_edges", "edge references a missing vertex");
    if (from->kind == VertexKind::hidden && !hidden) continue;
    m(index(*from), index(*to)) = 1;
    if (e.kind == EdgeKind::layer) m(index(*to), index(*from)) = 1;
  }
  return m;
}

}  // namespace sg
