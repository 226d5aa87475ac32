#include "supportgraph/detection.hpp"

#include "supportgraph/error.hpp"

#include <algorithm>
#include <numeric>

namespace sg {

std::vector<WeightedDetection> weighted_nms(const std::vector<Detection>& proposals, double w,
                                            double iou_threshold) {
  if (w < 0.0) throw ConfigError("nms: weight must be non-negative");
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
    throw ConfigError("nms: iou threshold must lie in (0,1)");

  std::vector<WeightedDetection> ranked;
  ranked.reserve(proposals.size());
  for (const auto& d : proposals) ranked.push_back({d, d.box_score + w * d.max_class_score()});
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.weighted_score != b.weighted_score) return a.weighted_score > b.weighted_score;
    return a.detection.id < b.detection.id;
  });

  std::vector<WeightedDetection> kept;
  for (const auto& cand : ranked) {
    const std::size_t cls = cand.detection.top_class();
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const auto& k) {
      return k.detection.top_class() == cls && iou(k.detection.bbox, cand.detection.bbox) > iou_threshold;
    });
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

Segmentation segment_objects(const std::vector<Detection>& boxes, const std::vector<int>& superpixels,
                             int width, int height, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("segmentation: ratio must lie in (0,1]");
  const std::size_t n_pix = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (superpixels.size() != n_pix) throw InputError("superpixels", "size does not match the image");

  int n_sp = 0;
  for (int l : superpixels) n_sp = std::max(n_sp, l + 1);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_sp));
  for (std::size_t p = 0; p < n_pix; ++p) members[static_cast<std::size_t>(superpixels[p])].push_back(p);

  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (boxes[a].bbox.area() != boxes[b].bbox.area()) return boxes[a].bbox.area() < boxes[b].bbox.area();
    return boxes[a].id < boxes[b].id;
  });

  Segmentation out;
  out.superpixel_owner.assign(static_cast<std::size_t>(n_sp), -1);
  for (const auto& b : boxes) out.pixels[b.id];

  for (std::size_t bi : order) {
    const Detection& det = boxes[bi];
    for (int s = 0; s < n_sp; ++s) {
      auto& owner = out.superpixel_owner[static_cast<std::size_t>(s)];
      const auto& px = members[static_cast<std::size_t>(s)];
      if (owner != -1 || px.empty()) continue;
      std::size_t inside = 0;
      for (std::size_t p : px) {
        const int u = static_cast<int>(p % static_cast<std::size_t>(width));
        const int v = static_cast<int>(p / static_cast<std::size_t>(width));
        inside += det.bbox.contains_pixel(u, v);
      }
      if (static_cast<double>(inside) > ratio * static_cast<double>(px.size())) {
        owner = det.id;
        auto& dst = out.pixels[det.id];
        dst.insert(dst.end(), px.begin(), px.end());
      }
    }
  }
  for (auto it = out.pixels.begin(); it != out.pixels.end();) {
    if (it->second.empty()) {
      out.warnings.push_back("segmentation: detection " + std::to_string(it->first) +
                             " received no superpixels and is dropped");
      it = out.pixels.erase(it);
    } else {
      std::sort(it->second.begin(), it->second.end());
      ++it;
    }
  }
  return out;
}

}  // namespace sg
