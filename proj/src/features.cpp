#include "supportgraph/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace sg {

namespace {

Eigen::Vector2d floor_xy(const Eigen::Vector3d& p) { return {p.x(), p.z()}; }

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

constexpr double kEps = 1e-12;

double containment(const ObjectRegion& inner, const std::vector<Eigen::Vector2d>& hull) {
  if (hull.empty()) return 0.0;
  std::size_t in = 0;
  for (const auto& p : inner.points) in += hull_contains(hull, floor_xy(p));
  return static_cast<double>(in) / static_cast<double>(inner.points.size());
}

double fraction(std::size_t k, std::size_t n) { return n == 0 ? 0.0 : static_cast<double>(k) / n; }

}  // namespace

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Eigen::Vector2d> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  if (h.size() < 2) h = {pts.front(), pts.back()};  // all collinear
  return h;
}

bool hull_contains(const std::vector<Eigen::Vector2d>& hull, const Eigen::Vector2d& p) {
  if (hull.empty()) return false;
  if (hull.size() == 1) return (hull[0] - p).norm() <= kEps;
  if (hull.size() == 2) {
    const Eigen::Vector2d d = hull[1] - hull[0];
    const double len2 = d.squaredNorm();
    const double t = std::clamp((p - hull[0]).dot(d) / len2, 0.0, 1.0);
    return (hull[0] + t * d - p).norm() <= kEps * std::max(1.0, std::sqrt(len2));
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, p) < -kEps * std::max(1.0, (b - a).norm())) return false;
  }
  return true;
}

double min_horizontal_distance(const ObjectRegion& a, const ObjectRegion& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a.points) {
    const Eigen::Vector2d pa = floor_xy(p);
    for (const auto& q : b.points) {
      const double d = (pa - floor_xy(q)).squaredNorm();
      if (d < best) best = d;
    }
  }
  return std::sqrt(best);
}

double vertical_gap(const ObjectRegion& a, const ObjectRegion& b) {
  return std::max(0.0, std::max(a.bottom(), b.bottom()) - std::min(a.top(), b.top()));
}

double footprint_chi2(const ObjectRegion& a, const ObjectRegion& b, int bins) {
  double x0 = std::min(a.extents.x_min, b.extents.x_min);
  double x1 = std::max(a.extents.x_max, b.extents.x_max);
  double z0 = std::min(a.extents.z_min, b.extents.z_min);
  double z1 = std::max(a.extents.z_max, b.extents.z_max);
  const double wx = std::max(x1 - x0, 1e-12);
  const double wz = std::max(z1 - z0, 1e-12);
  auto hist = [&](const ObjectRegion& r) {
    std::vector<double> h(static_cast<std::size_t>(bins * bins), 0.0);
    for (const auto& p : r.points) {
      const int ix = std::clamp(static_cast<int>((p.x() - x0) / wx * bins), 0, bins - 1);
      const int iz = std::clamp(static_cast<int>((p.z() - z0) / wz * bins), 0, bins - 1);
      h[static_cast<std::size_t>(iz * bins + ix)] += 1.0;
    }
    for (double& v : h) v /= static_cast<double>(r.points.size());
    return h;
  };
  const auto ha = hist(a);
  const auto hb = hist(b);
  double chi = 0.0;
  for (std::size_t i = 0; i < ha.size(); ++i) {
    const double d = ha[i] - hb[i];
    chi += d * d / (ha[i] + hb[i] + 1e-9);
  }
  return 0.5 * chi;
}

bool regions_adjacent(const ObjectRegion& a, const ObjectRegion& b, int image_width) {
  const std::unordered_set<std::size_t> other(b.pixels.begin(), b.pixels.end());
  const long long w = image_width;
  for (std::size_t p : a.pixels) {
    const long long u = static_cast<long long>(p) % w;
    const long long v = static_cast<long long>(p) / w;
    for (long long dv = -1; dv <= 1; ++dv)
      for (long long du = -1; du <= 1; ++du) {
        const long long uu = u + du;
        const long long vv = v + dv;
        if (uu < 0 || uu >= w || vv < 0) continue;
        if (other.count(static_cast<std::size_t>(vv * w + uu))) return true;
      }
  }
  return false;
}

SupportFeatures support_features(const ObjectRegion& supported, const ObjectRegion* supporter,
                                 double floor_height, int image_width, const FeatureConfig& cfg) {
  using namespace feature;
  SupportFeatures f{};
  const ObjectRegion& a = supported;
  f[kSupportedHeight] = a.bottom() - floor_height;
  f[kSupportedHorizontal] = static_cast<double>(a.horizontal_count);
  f[kSupportedHorizontal + 1] = fraction(a.horizontal_count, a.size());
  f[kSupportedVertical] = static_cast<double>(a.vertical_count);
  f[kSupportedVertical + 1] = fraction(a.vertical_count, a.size());

  if (supporter == nullptr) {
    f[kVerticalGap] = kHiddenDistance;
    f[kHorizontalGap] = kHiddenDistance;
    f[kCentroidDistance] = kHiddenDistance;
    f[kSupporterHeight] = kHiddenDistance;
    f[kHidden] = 1.0;
    return f;
  }
  const ObjectRegion& b = *supporter;
  f[kVerticalGap] = vertical_gap(a, b);
  f[kHorizontalGap] = min_horizontal_distance(a, b);
  f[kCentroidDistance] = (a.centroid - b.centroid).norm();
  f[kSupporterHeight] = b.bottom() - floor_height;

  double mean_depth = 0.0;
  for (double d : a.camera_depth) mean_depth += d;
  mean_depth /= static_cast<double>(std::max<std::size_t>(a.camera_depth.size(), 1));
  std::size_t farther = 0;
  for (double d : b.camera_depth) farther += d > mean_depth;
  f[kFartherFraction] = fraction(farther, b.camera_depth.size());

  std::vector<Eigen::Vector2d> all, horiz;
  for (std::size_t k = 0; k < b.points.size(); ++k) {
    all.push_back(floor_xy(b.points[k]));
    if (k < b.orientation.size() && b.orientation[k] == PixelOrientation::horizontal)
      horiz.push_back(floor_xy(b.points[k]));
  }
  f[kHullContainment] = containment(a, convex_hull(std::move(all)));
  f[kHorizontalHullContainment] = containment(a, convex_hull(std::move(horiz)));

  f[kSupporterHorizontal] = static_cast<double>(b.horizontal_count);
  f[kSupporterHorizontal + 1] = fraction(b.horizontal_count, b.size());
  f[kSupporterVertical] = static_cast<double>(b.vertical_count);
  f[kSupporterVertical + 1] = fraction(b.vertical_count, b.size());
  f[kFootprintChi2] = footprint_chi2(a, b, cfg.histogram_bins);
  f[kPixelRatio] = fraction(a.size(), b.size());
  f[kNeighbours] = regions_adjacent(a, b, image_width) ? 1.0 : 0.0;
  f[kHidden] = 0.0;
  return f;
}

}  // namespace sg
