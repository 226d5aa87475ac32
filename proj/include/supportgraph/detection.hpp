#pragma once

// Proposal selection (weighted NMS) and superpixel-based object segmentation.

#include "supportgraph/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace sg {

struct WeightedDetection {
  Detection detection;
  double weighted_score = 0.0;  // sw = sb + w * max_c sc
};

/// Greedy NMS per top class using the weighted score; overlap is IoU > threshold.
/// Survivors are returned by descending sw, ties by lower id.
std::vector<WeightedDetection> weighted_nms(const std::vector<Detection>& proposals, double w,
                                            double iou_threshold);

struct Segmentation {
  std::map<int, std::vector<std::size_t>> pixels;  // detection id -> pixel indices
  std::vector<int> superpixel_owner;               // superpixel -> detection id, -1 = background
  std::vector<std::string> warnings;
};

/// Boxes are visited by ascending area (ties: lower id). A superpixel joins the
/// first box holding strictly more than `ratio` of its pixels.
Segmentation segment_objects(const std::vector<Detection>& boxes, const std::vector<int>& superpixels,
                             int width, int height, double ratio = 0.8);

}  // namespace sg
