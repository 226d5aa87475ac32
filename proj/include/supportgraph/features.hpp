#pragma once

// Pairwise support features (20 dims: geometry 8, shape 9, region 3).

#include "supportgraph/types.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace sg {

using SupportFeatures = std::array<double, 20>;

namespace feature {
// Offsets into SupportFeatures.
inline constexpr std::size_t kVerticalGap = 0;
inline constexpr std::size_t kHorizontalGap = 1;
inline constexpr std::size_t kCentroidDistance = 2;
inline constexpr std::size_t kSupportedHeight = 3;
inline constexpr std::size_t kSupporterHeight = 4;
inline constexpr std::size_t kFartherFraction = 5;
inline constexpr std::size_t kHullContainment = 6;
inline constexpr std::size_t kHorizontalHullContainment = 7;
inline constexpr std::size_t kSupporterHorizontal = 8;   // count, fraction
inline constexpr std::size_t kSupportedHorizontal = 10;  // count, fraction
inline constexpr std::size_t kSupporterVertical = 12;    // count, fraction
inline constexpr std::size_t kSupportedVertical = 14;    // count, fraction
inline constexpr std::size_t kFootprintChi2 = 16;
inline constexpr std::size_t kPixelRatio = 17;
inline constexpr std::size_t kNeighbours = 18;
inline constexpr std::size_t kHidden = 19;
}  // namespace feature

/// Distance stand-in used when the supporter is the hidden placeholder.
inline constexpr double kHiddenDistance = 10.0;

struct FeatureConfig {
  int histogram_bins = 16;
};

/// `supporter == nullptr` means the hidden placeholder. `floor_height` is the
/// global minimum aligned y; `image_width` is needed for pixel adjacency.
SupportFeatures support_features(const ObjectRegion& supported, const ObjectRegion* supporter,
                                 double floor_height, int image_width, const FeatureConfig& cfg = {});

/// Minimum distance between the floor-plane (x, z) projections of two point sets.
double min_horizontal_distance(const ObjectRegion& a, const ObjectRegion& b);

/// Gap between the [y_min, y_max] intervals (0 when they overlap).
double vertical_gap(const ObjectRegion& a, const ObjectRegion& b);

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts);

/// Boundary-inclusive test; hulls with 1 or 2 vertices act as a point / segment.
bool hull_contains(const std::vector<Eigen::Vector2d>& hull, const Eigen::Vector2d& p);

/// Chi-squared distance between the normalised floor-plane occupancy histograms.
double footprint_chi2(const ObjectRegion& a, const ObjectRegion& b, int bins = 16);

bool regions_adjacent(const ObjectRegion& a, const ObjectRegion& b, int image_width);

}  // namespace sg
