#include "supportgraph/detection.hpp"
#include "supportgraph/error.hpp"

#include "../support/layouts.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace sg;

namespace {

Detection det(int id, BoundingBox b, double box_score, std::vector<double> cls) {
  return {id, b, box_score, std::move(cls)};
}

}  // namespace

TEST_CASE("weighted nms keeps the best box per class") {
  std::vector<Detection> in{
      det(0, {0, 0, 10, 10}, 0.9, {0.1, 0.9}),
      det(1, {1, 1, 11, 11}, 0.95, {0.5, 0.5}),  // top class 0: different class, survives
      det(2, {0, 1, 10, 11}, 0.5, {0.2, 0.8}),   // overlaps 0, same class, weaker
      det(3, {50, 50, 60, 60}, 0.4, {0.3, 0.7}),
  };
  const auto out = weighted_nms(in, 1.0, 0.5);
  std::vector<int> ids;
  for (const auto& w : out) ids.push_back(w.detection.id);
  CHECK(ids == std::vector<int>{0, 1, 3});
  CHECK(out[0].weighted_score == doctest::Approx(1.8));
  CHECK(out[1].weighted_score == doctest::Approx(1.45));
}

TEST_CASE("nms weight changes the ranking") {
  std::vector<Detection> in{det(0, {0, 0, 10, 10}, 0.9, {0.6, 0.4}), det(1, {0, 0, 10, 9}, 0.5, {1.0, 0.0})};
  CHECK(weighted_nms(in, 0.0, 0.5).front().detection.id == 0);
  CHECK(weighted_nms(in, 2.0, 0.5).front().detection.id == 1);
  CHECK(weighted_nms(in, 2.0, 0.5).size() == 1);
}

TEST_CASE("segmentation threshold is strict") {
  // one 1000-pixel superpixel in a 1000 x 1 image
  const std::vector<int> sp(1000, 0);
  auto run = [&](double u1) {
    return segment_objects({det(7, {0, 0, u1, 1}, 1, {1})}, sp, 1000, 1, 0.8);
  };
  CHECK(run(799).pixels.count(7) == 0);  // 79.9 %
  CHECK(run(800).pixels.count(7) == 0);  // exactly 80 %
  CHECK(run(801).pixels.at(7).size() == 1000);  // 80.1 %
  CHECK_FALSE(run(799).warnings.empty());
}

TEST_CASE("smaller boxes claim first") {
  // 4 x 1 image, two superpixels; the small box wins superpixel 0
  const std::vector<int> sp{0, 0, 1, 1};
  const auto s = segment_objects({det(1, {0, 0, 4, 1}, 1, {1}), det(2, {0, 0, 2, 1}, 1, {1})}, sp, 4, 1, 0.8);
  CHECK(s.superpixel_owner == std::vector<int>{2, 1});
  CHECK(s.pixels.at(2) == std::vector<std::size_t>{0, 1});
  CHECK(s.pixels.at(1) == std::vector<std::size_t>{2, 3});
}

TEST_CASE("segmentation is a partition and ignores input order") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto layout = sgtest::random_layout(rng, 40, 30, 6);
    const auto a = segment_objects(layout.boxes, layout.superpixels, 40, 30, 0.8);
    auto shuffled = layout.boxes;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto b = segment_objects(shuffled, layout.superpixels, 40, 30, 0.8);
    CHECK(a.pixels == b.pixels);
    CHECK(a.superpixel_owner == b.superpixel_owner);
    std::vector<int> seen(40 * 30, 0);
    for (const auto& [id, px] : a.pixels)
      for (auto p : px) ++seen[p];
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c <= 1; }));
  }
}

TEST_CASE("segmentation input checks") {
  CHECK_THROWS_AS(segment_objects({}, {0, 0}, 3, 1, 0.8), InputError);
  CHECK_THROWS_AS(segment_objects({}, {0}, 1, 1, 0.0), ConfigError);
}
