#pragma once

// Room-coordinate alignment, per-object 3D summaries and relative positions.

#include "supportgraph/types.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace sg {

struct AlignmentConfig {
  double normal_weight = 1.0;  // w_N
  double line_weight = 1.0;    // w_L
  double sigma = 0.25;
  double near_y_degrees = 15.0;
  /// Cone used to classify pixel normals as horizontal / vertical.
  double orientation_cone_degrees = 30.0;
  double sweep_step_degrees = 1.0;
};

/// Per-pixel cues from detected structure. `structure_prob[p]` is the predicted
/// probability of the ground/wall region that contains p (0 elsewhere);
/// `ground[p]` marks pixels of ground regions. Either vector may be empty.
struct PixelLabels {
  std::vector<double> structure_prob;
  std::vector<char> ground;
};

/// Columns are the three principal directions.
using Triad = Eigen::Matrix3d;

/// S = sum_j (SN_j + SL_j). `structure_prob` runs parallel to `normals` and may
/// be empty. Throws InputError when `normals` is empty.
double score_candidate(const Triad& triad, const std::vector<Eigen::Vector3d>& normals,
                       const std::vector<double>& structure_prob,
                       const std::vector<LineSegment>& lines, const AlignmentConfig& cfg);

/// Candidate triads: every near-Y line, swept in-plane.
std::vector<Triad> alignment_candidates(const std::vector<LineSegment>& lines,
                                        const AlignmentConfig& cfg);

struct Alignment {
  /// Columns v_x, v_y, v_z (right-handed); aligned = axes^T * camera.
  Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();
  double score = 0.0;
  std::size_t candidates = 0;
  std::size_t chosen = 0;
  bool fallback = false;
  std::vector<std::string> warnings;
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;
};

Alignment align_coordinates(const SceneBundle& scene, const PixelLabels& labels,
                            const AlignmentConfig& cfg);

/// Re-labels a maximal triad as (v_x, v_y, v_z): v_y closest to camera Y,
/// v_z towards camera +Z, flipped so that ground pixels end up lowest.
Eigen::Matrix3d orient_triad(const Triad& triad, const std::vector<Eigen::Vector3d>& points,
                             const std::vector<char>& ground);

/// `camera_points` (may be empty) provide the viewer depth used by G4.
ObjectRegion summarize_region(int detection_id, const std::vector<std::size_t>& pixels,
                              const std::vector<Eigen::Vector3d>& aligned_points,
                              const std::vector<Eigen::Vector3d>& aligned_normals,
                              const std::vector<Eigen::Vector3d>& camera_points,
                              double cone_degrees = 30.0);

/// Position of `i` relative to `j`, or nothing when no rule fires.
std::optional<Relation> relative_position(const Extents& i, const Extents& j);

/// Euclidean gap between two axis-aligned boxes (0 when they touch/overlap).
double box_gap(const Extents& a, const Extents& b);
double box_diagonal(const Extents& e);
bool is_close(const Extents& a, const Extents& b, double min_gap = 0.5);

}  // namespace sg
