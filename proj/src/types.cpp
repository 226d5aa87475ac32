#include "supportgraph/types.hpp"

#include "supportgraph/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

namespace sg {

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.u1, b.u1) - std::max(a.u0, b.u0);
  const double h = std::min(a.v1, b.v1) - std::max(a.v0, b.v0);
  return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::size_t Detection::top_class() const {
  if (class_scores.empty()) return 0;
  return static_cast<std::size_t>(
      std::max_element(class_scores.begin(), class_scores.end()) - class_scores.begin());
}

double Detection::max_class_score() const {
  return class_scores.empty() ? 0.0 : class_scores[top_class()];
}

int SceneBundle::superpixel_count() const {
  if (superpixels.empty()) return 0;
  return *std::max_element(superpixels.begin(), superpixels.end()) + 1;
}

std::size_t PriorTables::class_index(std::string_view name) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == name) return i;
  throw ConfigError("unknown class '" + std::string(name) + "'");
}

std::size_t PriorTables::scene_index(std::string_view name) const {
  for (std::size_t i = 0; i < scenes.size(); ++i)
    if (scenes[i] == name) return i;
  throw ConfigError("unknown scene type '" + std::string(name) + "'");
}

Relation mirror(Relation r) {
  switch (r) {
    case Relation::above: return Relation::under;
    case Relation::under: return Relation::above;
    case Relation::front: return Relation::behind;
    case Relation::behind: return Relation::front;
    case Relation::left: return Relation::right;
    case Relation::right: return Relation::left;
  }
  return r;
}

const Vertex* SceneGraph::find(int id) const {
  for (const auto& v : vertices)
    if (v.id == id) return &v;
  return nullptr;
}

const Vertex& SceneGraph::root() const {
  for (const auto& v : vertices)
    if (v.kind == VertexKind::root) return v;
  throw InputError("vertices", "graph has no root vertex");
}

const Vertex& SceneGraph::hidden() const {
  for (const auto& v : vertices)
    if (v.kind == VertexKind::hidden) return v;
  throw InputError("vertices", "graph has no hidden vertex");
}

std::optional<int> SceneGraph::parent_of(int id) const {
  for (const auto& e : support_edges)
    if (e.from == id) return e.to;
  return std::nullopt;
}

std::vector<std::string> validate_graph(const SceneGraph& g) {
  std::vector<std::string> errors;
  auto fail = [&](const std::string& invariant, const std::string& detail) {
    errors.push_back(invariant + ": " + detail);
  };

  std::unordered_map<int, const Vertex*> by_id;
  int roots = 0;
  int hiddens = 0;
  for (const auto& v : g.vertices) {
    if (!by_id.emplace(v.id, &v).second)
      fail("unique-vertex-ids", "vertex id " + std::to_string(v.id) + " appears twice");
    roots += v.kind == VertexKind::root;
    hiddens += v.kind == VertexKind::hidden;
  }
  if (roots != 1) fail("single-root", "graph has " + std::to_string(roots) + " root vertices");
  if (hiddens != 1)
    fail("single-hidden", "graph has " + std::to_string(hiddens) + " hidden vertices");
  if (!errors.empty()) return errors;

  auto kind_of = [&](int id) { return by_id.at(id)->kind; };
  auto exists = [&](int id) { return by_id.count(id) != 0; };

  std::unordered_map<int, std::vector<const SupportEdge*>> parents;
  for (const auto& e : g.support_edges) {
    if (!exists(e.from) || !exists(e.to)) {
      fail("edge-endpoints", "support edge " + std::to_string(e.from) + "->" +
                                 std::to_string(e.to) + " references a missing vertex");
      continue;
    }
    parents[e.from].push_back(&e);
    const bool to_root = kind_of(e.to) == VertexKind::root;
    const VertexKind from_kind = kind_of(e.from);
    if (to_root != (e.kind == EdgeKind::layer))
      fail("layer-edges", "edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                              " must be a layer edge iff it targets the root");
    if (to_root && from_kind == VertexKind::object)
      fail("layer-membership", "object vertex " + std::to_string(e.from) + " attached to root");
    if (!to_root && (from_kind == VertexKind::structure || from_kind == VertexKind::hidden))
      fail("layer-membership",
           "layer-one vertex " + std::to_string(e.from) + " must attach to the root");
  }
  if (!errors.empty()) return errors;

  for (const auto& v : g.vertices) {
    const auto it = parents.find(v.id);
    const std::size_t n = it == parents.end() ? 0 : it->second.size();
    if (v.kind == VertexKind::root) {
      if (n != 0) fail("root-has-no-parent", "root vertex has a support edge");
    } else if (n != 1) {
      fail("single-parent",
           "vertex " + std::to_string(v.id) + " has " + std::to_string(n) + " support edges");
    }
  }
  if (!errors.empty()) return errors;

  // Every chain of parents must terminate at the root.
  const int root_id = g.root().id;
  for (const auto& v : g.vertices) {
    int cur = v.id;
    std::set<int> seen;
    while (cur != root_id) {
      if (!seen.insert(cur).second) {
        fail("acyclic-support", "support cycle through vertex " + std::to_string(v.id));
        break;
      }
      cur = parents.at(cur).front()->to;
    }
  }

  for (const auto& e : g.default_edges) {
    if (!exists(e.from) || !exists(e.to) || kind_of(e.from) != VertexKind::structure ||
        kind_of(e.to) != VertexKind::structure)
      fail("default-edges", "default edge " + std::to_string(e.from) + "->" +
                                std::to_string(e.to) + " must join two structure vertices");
  }

  std::map<std::pair<int, int>, Relation> rel;
  for (const auto& e : g.position_edges) {
    if (!exists(e.from) || !exists(e.to)) {
      fail("edge-endpoints", "position edge references a missing vertex");
      continue;
    }
    const auto kf = kind_of(e.from);
    const auto kt = kind_of(e.to);
    if (kf == VertexKind::root || kf == VertexKind::hidden || kt == VertexKind::root ||
        kt == VertexKind::hidden || e.from == e.to) {
      fail("position-endpoints", "position edge " + std::to_string(e.from) + "->" +
                                     std::to_string(e.to) + " touches root/hidden or itself");
      continue;
    }
    if (!rel.emplace(std::pair{e.from, e.to}, e.relation).second)
      fail("single-relation", "more than one relation for ordered pair " +
                                  std::to_string(e.from) + "->" + std::to_string(e.to));
  }
  for (const auto& [key, r] : rel) {
    const auto it = rel.find({key.second, key.first});
    if (it == rel.end() || it->second != mirror(r))
      fail("position-antisymmetry", "edge " + std::to_string(key.first) + "->" +
                                        std::to_string(key.second) + " lacks its mirror");
  }
  return errors;
}

std::string_view to_string(SupportType t) {
  return t == SupportType::below ? "below" : "behind";
}

std::string_view to_string(VertexKind k) {
  switch (k) {
    case VertexKind::root: return "root";
    case VertexKind::hidden: return "hidden";
    case VertexKind::structure: return "structure";
    case VertexKind::object: return "object";
  }
  return "object";
}

std::string_view to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::below: return "below";
    case EdgeKind::behind: return "behind";
    case EdgeKind::layer: return "layer";
  }
  return "below";
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::above: return "above";
    case Relation::under: return "under";
    case Relation::front: return "front";
    case Relation::behind: return "behind";
    case Relation::left: return "left";
    case Relation::right: return "right";
  }
  return "above";
}

std::optional<SupportType> support_type_from(std::string_view s) {
  if (s == "below") return SupportType::below;
  if (s == "behind") return SupportType::behind;
  return std::nullopt;
}

std::optional<VertexKind> vertex_kind_from(std::string_view s) {
  for (auto k : {VertexKind::root, VertexKind::hidden, VertexKind::structure, VertexKind::object})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::optional<EdgeKind> edge_kind_from(std::string_view s) {
  for (auto k : {EdgeKind::below, EdgeKind::behind, EdgeKind::layer})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::optional<Relation> relation_from(std::string_view s) {
  for (auto r : {Relation::above, Relation::under, Relation::front, Relation::behind,
                 Relation::left, Relation::right})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

}  // namespace sg
