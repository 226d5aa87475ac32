#pragma once

// Random valid scene graphs built through the library's own constructor, plus
// random attributes/labels/boxes to stress serialisation.

#include "supportgraph/scene_graph.hpp"

#include <random>
#include <string>

namespace sgtest {

inline sg::SceneGraph random_graph(std::mt19937_64& rng, std::size_t max_objects = 9) {
  static const char* names[] = {"chair", "table", "cup", "book", "lamp \"desk\"", "tv/monitor", "päper"};
  static const char* scenes[] = {"office", "kitchen", "living room"};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = rng() % (max_objects + 1);
  std::vector<sg::GraphObject> objects;
  sg::Assignment a;
  for (std::size_t i = 0; i < n; ++i) {
    sg::GraphObject o;
    o.detection_id = static_cast<int>(i * 2 + 1);
    o.class_index = i == 0 ? sg::kGroundClass : (rng() % 5 == 0 ? sg::kWallClass : 3 + rng() % 7);
    o.label = o.class_index == sg::kGroundClass ? "ground"
              : o.class_index == sg::kWallClass ? "wall"
                                                : names[rng() % 7];
    const double u0 = 600 * u(rng), v0 = 400 * u(rng);
    o.bbox = {u0, v0, u0 + 1 + 40 * u(rng), v0 + 1 + 40 * u(rng)};
    o.extents = {u(rng), 1 + u(rng), u(rng), 1 + u(rng), 1 + u(rng), 3 + u(rng)};
    if (rng() % 2) o.attributes.push_back(rng() % 2 ? "red" : "wooden");
    objects.push_back(o);
    sg::ObjectAssignment oa;
    oa.class_index = o.class_index;
    oa.type = rng() % 2 ? sg::SupportType::below : sg::SupportType::behind;
    if (o.class_index == sg::kGroundClass) {
      oa.supporter = sg::SupporterRef::ground_self();
    } else if (rng() % 6 == 0) {
      oa.supporter = sg::SupporterRef::hidden();
    } else {
      std::size_t s = rng() % n;
      if (s == i) s = 0;
      oa.supporter = sg::SupporterRef::visible(s);
    }
    a.push_back(oa);
  }
  std::map<int, sg::Extents> ext;
  for (std::size_t i = 0; i < n; ++i) ext[sg::object_vertex(i)] = objects[i].extents;
  return sg::add_position_edges(sg::build_graph(scenes[rng() % 3], objects, a), ext, 0.5);
}

}  // namespace sgtest
