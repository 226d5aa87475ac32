#pragma once

// Random box/superpixel layouts for segmentation properties.

#include "supportgraph/types.hpp"

#include <random>
#include <vector>

namespace sgtest {

struct Layout {
  std::vector<sg::Detection> boxes;
  std::vector<int> superpixels;
};

// Superpixels are irregular tiles: a coarse grid with each cell split once at
// a random column. Boxes have distinct areas half of the time and equal areas
// otherwise, so the id tie-break is exercised too.
inline Layout random_layout(std::mt19937_64& rng, int w, int h, int n_boxes) {
  Layout l;
  const int cell = 5;
  const int cols = (w + cell - 1) / cell;
  std::vector<int> split(static_cast<std::size_t>(cols * ((h + cell - 1) / cell)));
  for (auto& s : split) s = static_cast<int>(rng() % cell);
  l.superpixels.resize(static_cast<std::size_t>(w * h));
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const int c = (v / cell) * cols + u / cell;
      const int half = (u % cell) < split[static_cast<std::size_t>(c)] ? 0 : 1;
      l.superpixels[static_cast<std::size_t>(v * w + u)] = 2 * c + half;
    }
  // relabel contiguously from 0
  std::vector<int> map(static_cast<std::size_t>(2 * split.size()), -1);
  int next = 0;
  for (auto& s : l.superpixels) {
    auto& m = map[static_cast<std::size_t>(s)];
    if (m < 0) m = next++;
    s = m;
  }
  const bool equal_sizes = rng() % 2;
  for (int b = 0; b < n_boxes; ++b) {
    const int bw = equal_sizes ? 12 : 4 + static_cast<int>(rng() % static_cast<unsigned>(w - 4));
    const int bh = equal_sizes ? 10 : 4 + static_cast<int>(rng() % static_cast<unsigned>(h - 4));
    const int u0 = static_cast<int>(rng() % static_cast<unsigned>(w - bw + 1));
    const int v0 = static_cast<int>(rng() % static_cast<unsigned>(h - bh + 1));
    sg::Detection d;
    d.id = 100 + b * 3;
    d.bbox = {static_cast<double>(u0), static_cast<double>(v0), static_cast<double>(u0 + bw),
              static_cast<double>(v0 + bh)};
    d.box_score = 0.5;
    d.class_scores = {1.0};
    l.boxes.push_back(d);
  }
  return l;
}

}  // namespace sgtest
