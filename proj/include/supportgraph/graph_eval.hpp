#pragma once

// Hypothesis vs ground-truth scene graph comparison.

#include "supportgraph/types.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace sg {

struct UndirectedGraph {
  std::vector<std::string> labels;
  Eigen::MatrixXd adjacency;  // symmetric 0/1, zero diagonal

  std::size_t size() const { return labels.size(); }
  Eigen::VectorXd degrees() const { return adjacency.rowwise().sum(); }
};

/// Canonical per-vertex labels: "<root>", "<hidden>", or class + "#" + ordinal,
/// ordinals assigned by bounding-box centre (u, then v, then id).
std::vector<std::string> canonical_labels(const SceneGraph& graph);

/// Undirected support structure: e'_ij = e_ij OR e_ji. Default edges are left
/// out; the hidden vertex is dropped unless it supports something.
UndirectedGraph relax_undirected(const SceneGraph& graph);

UndirectedGraph from_adjacency(const Eigen::MatrixXd& adjacency);

/// Connected components, each sorted; components ordered by smallest member.
std::vector<std::vector<std::size_t>> components(const UndirectedGraph& g);
UndirectedGraph induced(const UndirectedGraph& g, const std::vector<std::size_t>& vertices);
/// Largest component; ties go to the one with the smallest vertex.
std::vector<std::size_t> largest_component(const UndirectedGraph& g);

struct RandomWalkSpectrum {
  double lambda2 = 0.0;
  double lambda3 = 0.0;     // NaN for 2-vertex graphs
  Eigen::VectorXd u2;       // unit length, first largest-magnitude entry positive
  Eigen::VectorXd values;   // all eigenvalues of D^-1 A, descending
};

/// Second largest eigenvalue of D^-1 A via the similar matrix D^-1/2 A D^-1/2.
/// Throws InputError for fewer than two vertices or an isolated vertex.
RandomWalkSpectrum lambda2_randomwalk(const UndirectedGraph& g);

struct CheegerBounds {
  double lower = 0.0;  // (1 - lambda2) / 2
  double upper = 0.0;  // sqrt(2 - 2 lambda2)
  double lambda2 = 0.0;
  bool disconnected = false;
};

/// Evaluated on the largest component when `g` is disconnected.
CheegerBounds cheeger_bounds(const UndirectedGraph& g);

/// Exact h_G over all non-empty proper subsets (small graphs only).
double cheeger_constant_bruteforce(const UndirectedGraph& g);

double cheeger_distance(const UndirectedGraph& hyp, const UndirectedGraph& gt);

/// ||u u^T - w w^T||_F / sqrt(|V(gt)|) over the union of labels.
double spectral_distance(const UndirectedGraph& hyp, const UndirectedGraph& gt);

/// |A xor B| / |A or B|; 0 when both are empty.
double naive_distance(const Eigen::MatrixXi& hyp, const Eigen::MatrixXi& gt);

SimilarityReport compare_graphs(const SceneGraph& hyp, const SceneGraph& gt);

struct BatchReport {
  std::size_t pairs = 0;
  double cheeger_mean = 0.0, cheeger_variance = 0.0;
  double spectral_mean = 0.0, spectral_variance = 0.0;
  double naive_mean = 0.0, naive_variance = 0.0;
  std::size_t disconnected = 0;
  std::size_t degenerate = 0;
};

/// Means and population variances. Throws InputError on an empty list.
BatchReport batch_report(const std::vector<SimilarityReport>& reports);

/// Plain-text table: one row per measure, columns Mean / Variance.
std::string format_report(const BatchReport& report);

}  // namespace sg
