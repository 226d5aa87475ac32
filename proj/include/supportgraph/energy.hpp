#pragma once

// Support/class energy. Every solver result is checked against total_energy.

#include "supportgraph/scoring.hpp"
#include "supportgraph/types.hpp"

#include <Eigen/Core>

#include <vector>

namespace sg {

/// Stand-in for an infinite cost; kept finite so LP coefficients stay finite.
inline constexpr double kSaturated = 1e12;

struct EnergyWeights {
  double alpha_class = 1.0;     // alpha_C
  double alpha_distance = 1.0;  // alpha_dist
  double alpha_support = 1.0;   // alpha_SPC
  double k_hidden = 5.0;

  void validate() const;
};

/// Everything the energy needs, reduced to numbers. Built by the pipeline or
/// directly by tests.
struct SupportProblem {
  std::size_t n = 0;            // objects
  std::size_t k = 0;            // classes
  SupportTensor support;        // p[i][j], column n = hidden
  Eigen::MatrixXd class_prob;   // n x k, detector class probabilities P_{C_i}
  Eigen::VectorXd class_given_scene;  // k, P(c | SC*)
  double scene_probability = 1.0;     // D_SC for SC*
  Eigen::MatrixXd support_prior;      // k x k, [supporter][supported]
  std::vector<double> bottom;         // H^b
  std::vector<double> top;            // H^t
  Eigen::MatrixXd horizontal_distance;  // n x n, minimum floor-plane distance
  EnergyWeights weights;

  /// Throws InputError when dimensions disagree.
  void validate() const;
};

/// -log x, saturating at kSaturated (for x <= 0 or tiny x).
double neg_log(double x);

// Unweighted per-object terms. Saturated values are exactly kSaturated.
double e_support(const SupportProblem& p, std::size_t i, const ObjectAssignment& a);
double e_class(const SupportProblem& p, std::size_t i, std::size_t cls);
double c_class(const SupportProblem& p, std::size_t i, const Assignment& a);
double c_dist(const SupportProblem& p, std::size_t i, const ObjectAssignment& a);
double c_support(const SupportProblem& p, std::size_t i, const ObjectAssignment& a);

/// True when object i is strictly the lowest (H^b_j > H^b_i for all j != i).
bool strictly_lowest(const SupportProblem& p, std::size_t i);

EnergyBreakdown total_energy(const SupportProblem& p, const Assignment& a);

/// A supporter/type/class combination the model allows: ground-self iff
/// ground class, no self support.
bool admissible(const SupportProblem& p, std::size_t i, const ObjectAssignment& a);

}  // namespace sg
