#include "supportgraph/geometry.hpp"

#include "supportgraph/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sg {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

bool overlaps(double a0, double a1, double b0, double b1) {
  return std::max(a0, b0) <= std::min(a1, b1);
}

bool near_y(const LineSegment& l, const AlignmentConfig& cfg) {
  if (l.near_y) return *l.near_y;
  const double c = std::abs(l.direction.normalized().y());
  return c > std::cos(cfg.near_y_degrees * kDeg);
}

}  // namespace

double score_candidate(const Triad& triad, const std::vector<Eigen::Vector3d>& normals,
                       const std::vector<double>& structure_prob,
                       const std::vector<LineSegment>& lines, const AlignmentConfig& cfg) {
  if (normals.empty()) throw InputError("normals", "score undefined without normals");
  if (!structure_prob.empty() && structure_prob.size() != normals.size())
    throw InputError("structure_prob", "size does not match normals");
  const double inv_s2 = 1.0 / (cfg.sigma * cfg.sigma);
  double total = 0.0;
  for (int j = 0; j < 3; ++j) {
    const Eigen::Vector3d v = triad.col(j);
    double sn = 0.0;
    for (std::size_t i = 0; i < normals.size(); ++i) {
      const double d = normals[i].dot(v);
      const double bonus = structure_prob.empty() ? 0.0 : structure_prob[i];
      sn += std::exp(-d * d * inv_s2 + bonus);
    }
    total += cfg.normal_weight * sn / static_cast<double>(normals.size());
    if (!lines.empty()) {
      double sl = 0.0;
      for (const auto& l : lines) {
        const double d = l.direction.dot(v);
        sl += std::exp(-d * d * inv_s2);
      }
      total += cfg.line_weight * sl / static_cast<double>(lines.size());
    }
  }
  return total;
}

std::vector<Triad> alignment_candidates(const std::vector<LineSegment>& lines,
                                        const AlignmentConfig& cfg) {
  std::vector<Eigen::Vector3d> ups;
  for (const auto& l : lines) {
    if (!near_y(l, cfg)) continue;
    Eigen::Vector3d d = l.direction.normalized();
    if (d.y() < 0) d = -d;
    const bool dup = std::any_of(ups.begin(), ups.end(),
                                 [&](const Eigen::Vector3d& u) { return u.dot(d) > 1.0 - 1e-12; });
    if (!dup) ups.push_back(d);
  }
  std::vector<Triad> out;
  const int steps = std::max(1, static_cast<int>(std::lround(90.0 / cfg.sweep_step_degrees)));
  for (const auto& d : ups) {
    // reference in-plane axis: camera X projected onto the plane normal to d
    Eigen::Vector3d r = Eigen::Vector3d::UnitX() - d.x() * d;
    if (r.norm() < 1e-6) r = Eigen::Vector3d::UnitZ() - d.z() * d;
    r.normalize();
    const Eigen::Vector3d q = d.cross(r);
    for (int s = 0; s < steps; ++s) {
      const double t = s * cfg.sweep_step_degrees * kDeg;
      const Eigen::Vector3d x = (std::cos(t) * r + std::sin(t) * q).normalized();
      const Eigen::Vector3d z = x.cross(d).normalized();
      Triad m;
      m.col(0) = x;
      m.col(1) = d;
      m.col(2) = z;
      out.push_back(m);
    }
  }
  return out;
}

Eigen::Matrix3d orient_triad(const Triad& triad, const std::vector<Eigen::Vector3d>& points,
                             const std::vector<char>& ground) {
  int iy = 0;
  for (int j = 1; j < 3; ++j)
    if (std::abs(triad(1, j)) > std::abs(triad(1, iy))) iy = j;
  Eigen::Vector3d vy = triad.col(iy);
  if (vy.y() < 0) vy = -vy;

  if (!ground.empty() && ground.size() == points.size()) {
    double g = 0.0, o = 0.0;
    std::size_t ng = 0, no = 0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const double h = points[p].dot(vy);
      if (ground[p]) {
        g += h;
        ++ng;
      } else {
        o += h;
        ++no;
      }
    }
    if (ng > 0 && no > 0 && g / ng > o / no) vy = -vy;
  }

  const int a = (iy + 1) % 3;
  const int b = (iy + 2) % 3;
  Eigen::Vector3d vz =
      std::abs(triad(2, a)) >= std::abs(triad(2, b)) ? triad.col(a) : triad.col(b);
  if (vz.z() < 0) vz = -vz;
  const Eigen::Vector3d vx = vy.cross(vz).normalized();
  Eigen::Matrix3d axes;
  axes.col(0) = vx;
  axes.col(1) = vy;
  axes.col(2) = vz;
  return axes;
}

Alignment align_coordinates(const SceneBundle& scene, const PixelLabels& labels,
                            const AlignmentConfig& cfg) {
  if (!(cfg.sigma > 0.0) || cfg.normal_weight < 0.0 || cfg.line_weight < 0.0)
    throw ConfigError("alignment: need sigma > 0 and non-negative weights");
  Alignment out;
  const auto cands = alignment_candidates(scene.lines, cfg);
  out.candidates = cands.size();
  if (cands.empty()) {
    out.fallback = true;
    out.warnings.push_back("alignment: no near-vertical lines; using camera axes");
  } else {
    double best = -1.0;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const double s = score_candidate(cands[c], scene.normals, labels.structure_prob, scene.lines, cfg);
      if (s > best) {  // strict: lowest index wins ties
        best = s;
        out.chosen = c;
      }
    }
    out.score = best;
    out.axes = orient_triad(cands[out.chosen], scene.points, labels.ground);
  }
  if (out.fallback && !scene.normals.empty())
    out.score = score_candidate(out.axes, scene.normals, labels.structure_prob, scene.lines, cfg);

  const Eigen::Matrix3d rt = out.axes.transpose();
  out.points.reserve(scene.points.size());
  for (const auto& p : scene.points) out.points.push_back(rt * p);
  out.normals.reserve(scene.normals.size());
  for (const auto& n : scene.normals) out.normals.push_back(rt * n);
  return out;
}

ObjectRegion summarize_region(int detection_id, const std::vector<std::size_t>& pixels,
                              const std::vector<Eigen::Vector3d>& aligned_points,
                              const std::vector<Eigen::Vector3d>& aligned_normals,
                              const std::vector<Eigen::Vector3d>& camera_points,
                              double cone_degrees) {
  if (pixels.empty())
    throw InputError("regions", "detection " + std::to_string(detection_id) + " has no pixels");
  ObjectRegion r;
  r.detection_id = detection_id;
  r.pixels = pixels;
  const double c_h = std::cos(cone_degrees * kDeg);
  const double c_v = std::sin(cone_degrees * kDeg);
  Extents& e = r.extents;
  e.x_min = e.y_min = e.z_min = std::numeric_limits<double>::infinity();
  e.x_max = e.y_max = e.z_max = -std::numeric_limits<double>::infinity();
  for (std::size_t p : pixels) {
    if (p >= aligned_points.size()) throw InputError("regions", "pixel index out of range");
    const Eigen::Vector3d& q = aligned_points[p];
    r.points.push_back(q);
    r.camera_depth.push_back(camera_points.empty() ? q.z() : camera_points[p].z());
    e.x_min = std::min(e.x_min, q.x());
    e.x_max = std::max(e.x_max, q.x());
    e.y_min = std::min(e.y_min, q.y());
    e.y_max = std::max(e.y_max, q.y());
    e.z_min = std::min(e.z_min, q.z());
    e.z_max = std::max(e.z_max, q.z());
    r.centroid += q;
    PixelOrientation o = PixelOrientation::other;
    if (p < aligned_normals.size()) {
      const double ny = std::abs(aligned_normals[p].normalized().y());
      if (ny > c_h)
        o = PixelOrientation::horizontal;
      else if (ny < c_v)
        o = PixelOrientation::vertical;
    }
    r.orientation.push_back(o);
    r.horizontal_count += o == PixelOrientation::horizontal;
    r.vertical_count += o == PixelOrientation::vertical;
  }
  r.centroid /= static_cast<double>(pixels.size());
  return r;
}

namespace {

// Rule table, evaluated for "i relative to j".
bool rule_above(const Extents& i, const Extents& j) {
  return i.y_min > j.y_max && j.z_min < i.z_min && i.z_min < j.z_max &&
         overlaps(i.x_min, i.x_max, j.x_min, j.x_max) && overlaps(i.z_min, i.z_max, j.z_min, j.z_max);
}
bool rule_behind1(const Extents& i, const Extents& j) {
  return i.z_min >= j.z_max && overlaps(i.x_min, i.x_max, j.x_min, j.x_max);
}
bool rule_behind2(const Extents& i, const Extents& j) {
  return 0.5 * (i.z_min + i.z_max) > j.z_max && overlaps(i.x_min, i.x_max, j.x_min, j.x_max);
}
bool rule_right(const Extents& i, const Extents& j) {
  const double zc = 0.5 * (i.z_min + i.z_max);
  return j.z_min < zc && zc < j.z_max && 0.5 * (i.x_min + i.x_max) > j.x_max;
}

}  // namespace

std::optional<Relation> relative_position(const Extents& i, const Extents& j) {
  using Rule = bool (*)(const Extents&, const Extents&);
  static constexpr std::pair<Rule, Relation> levels[] = {
      {rule_above, Relation::above},
      {rule_behind1, Relation::behind},
      {rule_behind2, Relation::behind},
      {rule_right, Relation::right},
  };
  // A level that fires both ways says nothing; fall through to the next one.
  for (const auto& [rule, rel] : levels) {
    const bool fwd = rule(i, j);
    const bool bwd = rule(j, i);
    if (fwd && !bwd) return rel;
    if (bwd && !fwd) return mirror(rel);
  }
  return std::nullopt;
}

double box_gap(const Extents& a, const Extents& b) {
  const double gx = std::max({0.0, a.x_min - b.x_max, b.x_min - a.x_max});
  const double gy = std::max({0.0, a.y_min - b.y_max, b.y_min - a.y_max});
  const double gz = std::max({0.0, a.z_min - b.z_max, b.z_min - a.z_max});
  return std::sqrt(gx * gx + gy * gy + gz * gz);
}

double box_diagonal(const Extents& e) {
  return Eigen::Vector3d(e.x_max - e.x_min, e.y_max - e.y_min, e.z_max - e.z_min).norm();
}

bool is_close(const Extents& a, const Extents& b, double min_gap) {
  const double limit = std::max(min_gap, 0.5 * std::min(box_diagonal(a), box_diagonal(b)));
  return box_gap(a, b) < limit;
}

}  // namespace sg
