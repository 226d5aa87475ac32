#include "supportgraph/features.hpp"
#include "supportgraph/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace sg;

namespace {

// A flat square patch of `side` x `side` points at height y, pixels starting
// at `first` in a 100-wide image.
ObjectRegion patch(int id, double x0, double z0, double y, double size, std::size_t first, int side = 5,
                   bool horizontal = true) {
  std::vector<Eigen::Vector3d> pts, nrm;
  std::vector<std::size_t> px;
  for (int a = 0; a < side; ++a)
    for (int b = 0; b < side; ++b) {
      px.push_back(first + static_cast<std::size_t>(a * 100 + b));
      pts.emplace_back(x0 + size * a / (side - 1), y, z0 + size * b / (side - 1));
      nrm.push_back(horizontal ? Eigen::Vector3d::UnitY() : Eigen::Vector3d::UnitX());
    }
  // summarize_region indexes by pixel id; spread into full rasters
  std::vector<Eigen::Vector3d> ap(first + 100 * side + side), an(ap.size(), Eigen::Vector3d::UnitZ());
  for (std::size_t k = 0; k < px.size(); ++k) {
    ap[px[k]] = pts[k];
    an[px[k]] = nrm[k];
  }
  return summarize_region(id, px, ap, an, {});
}

// Brute-force hull check: a point is a hull vertex iff it is not inside the
// triangle of any three other points (general position assumed).
bool in_triangle(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                 const Eigen::Vector2d& c) {
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return (u - o).x() * (v - o).y() - (u - o).y() * (v - o).x();
  };
  const double d1 = cross(a, b, p), d2 = cross(b, c, p), d3 = cross(c, a, p);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

}  // namespace

TEST_CASE("two stacked patches: vertical gap 1 m, no horizontal gap") {
  const auto top = patch(1, 0, 0, 1.0, 0.4, 0);
  const auto base = patch(2, 0, 0, 0.0, 0.4, 10);
  const auto f = support_features(top, &base, 0.0, 100);
  CHECK(f[feature::kVerticalGap] == doctest::Approx(1.0));
  CHECK(f[feature::kHorizontalGap] == doctest::Approx(0.0));
  CHECK(f[feature::kCentroidDistance] == doctest::Approx(1.0));
  CHECK(f[feature::kSupportedHeight] == doctest::Approx(1.0));
  CHECK(f[feature::kSupporterHeight] == doctest::Approx(0.0));
  CHECK(f[feature::kHullContainment] == doctest::Approx(1.0));
  CHECK(f[feature::kHorizontalHullContainment] == doctest::Approx(1.0));
  CHECK(f[feature::kSupporterHorizontal + 1] == doctest::Approx(1.0));
  CHECK(f[feature::kFootprintChi2] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(f[feature::kPixelRatio] == doctest::Approx(1.0));
  CHECK(f[feature::kHidden] == 0.0);
}

TEST_CASE("features are not symmetric in their arguments") {
  const auto small = patch(1, 0.1, 0.1, 0.8, 0.1, 0, 3);
  const auto big = patch(2, 0, 0, 0.7, 0.5, 20, 6, false);
  const auto ab = support_features(small, &big, 0.0, 100);
  const auto ba = support_features(big, &small, 0.0, 100);
  CHECK(ab != ba);
  CHECK(ab[feature::kSupportedHeight] != ba[feature::kSupportedHeight]);
  CHECK(ab[feature::kPixelRatio] == doctest::Approx(9.0 / 36.0));
  CHECK(ba[feature::kPixelRatio] == doctest::Approx(36.0 / 9.0));
}

TEST_CASE("hidden supporter uses sentinel distances") {
  const auto a = patch(1, 0, 0, 0.5, 0.2, 0);
  const auto f = support_features(a, nullptr, 0.0, 100);
  CHECK(f[feature::kVerticalGap] == kHiddenDistance);
  CHECK(f[feature::kHorizontalGap] == kHiddenDistance);
  CHECK(f[feature::kHidden] == 1.0);
}

TEST_CASE("horizontal distance and vertical gap") {
  const auto a = patch(1, 0, 0, 0.0, 1.0, 0);
  const auto b = patch(2, 3, 4, 0.2, 1.0, 10);
  // nearest corners (1, 1) and (3, 4)
  CHECK(min_horizontal_distance(a, b) == doctest::Approx(std::hypot(2.0, 3.0)));
  CHECK(vertical_gap(a, b) == doctest::Approx(0.2));
  CHECK(vertical_gap(b, a) == doctest::Approx(0.2));
}

TEST_CASE("convex hull agrees with a brute-force vertex test") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Eigen::Vector2d> pts;
    const int n = 4 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng));
    const auto hull = convex_hull(pts);
    std::vector<Eigen::Vector2d> expect;
    for (int i = 0; i < n; ++i) {
      bool inside = false;
      for (int a = 0; a < n && !inside; ++a)
        for (int b = a + 1; b < n && !inside; ++b)
          for (int c = b + 1; c < n && !inside; ++c)
            if (a != i && b != i && c != i && in_triangle(pts[i], pts[a], pts[b], pts[c])) inside = true;
      if (!inside) expect.push_back(pts[i]);
    }
    CHECK(hull.size() == expect.size());
    for (const auto& p : expect)
      CHECK(std::any_of(hull.begin(), hull.end(), [&](const Eigen::Vector2d& h) { return (h - p).norm() < 1e-15; }));
    for (const auto& p : pts) CHECK(hull_contains(hull, p));
    CHECK_FALSE(hull_contains(hull, Eigen::Vector2d(5, 5)));
  }
}

TEST_CASE("degenerate hulls") {
  CHECK(convex_hull({}).empty());
  const auto one = convex_hull({{1, 1}, {1, 1}});
  CHECK(one.size() == 1);
  CHECK(hull_contains(one, {1, 1}));
  const auto seg = convex_hull({{0, 0}, {1, 1}, {2, 2}});
  CHECK(seg.size() == 2);
  CHECK(hull_contains(seg, {0.5, 0.5}));
  CHECK_FALSE(hull_contains(seg, {0.5, 0.6}));
}

TEST_CASE("pixel adjacency") {
  const auto a = patch(1, 0, 0, 0, 1, 0, 3);
  const auto b = patch(2, 0, 0, 0, 1, 3, 3);   // starts right next to a
  const auto c = patch(3, 0, 0, 0, 1, 50, 3);  // far away
  CHECK(regions_adjacent(a, b, 100));
  CHECK_FALSE(regions_adjacent(a, c, 100));
}
