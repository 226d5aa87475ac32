#pragma once

// Random support problems shared by the unit and acceptance tests.

#include "supportgraph/energy.hpp"

#include <algorithm>
#include <random>

namespace sgtest {

// Class scores are sparse: each object has 1..3 plausible classes, the rest 0.
inline sg::SupportProblem random_problem(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  sg::SupportProblem p;
  p.n = n;
  p.k = k;
  p.support = sg::SupportTensor(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= n; ++j) {
      if (j == i) continue;
      double a = u(rng) + 1e-3, b = u(rng) + 1e-3, c = u(rng) + 1e-3;
      const double s = a + b + c;
      p.support.at(i, j) = {a / s, b / s, c / s};
    }
  p.class_prob = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = 1 + rng() % std::min<std::size_t>(3, k);
    double total = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      const auto c = static_cast<Eigen::Index>(rng() % k);
      const double v = u(rng) + 0.05;
      p.class_prob(static_cast<Eigen::Index>(i), c) += v;
      total += v;
    }
    p.class_prob.row(static_cast<Eigen::Index>(i)) /= total;
  }
  p.class_given_scene = Eigen::VectorXd(static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < k; ++c) p.class_given_scene[static_cast<Eigen::Index>(c)] = 0.05 + 0.95 * u(rng);
  p.scene_probability = 0.3 + 0.7 * u(rng);
  p.support_prior = Eigen::MatrixXd(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      p.support_prior(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = u(rng) < 0.15 ? 0.0 : u(rng);
  p.horizontal_distance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double b = 2.0 * u(rng);
    p.bottom.push_back(b);
    p.top.push_back(b + 0.05 + u(rng));
    for (std::size_t j = 0; j < i; ++j) {
      const double d = 1.5 * u(rng);
      p.horizontal_distance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      p.horizontal_distance(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
    }
  }
  return p;
}

}  // namespace sgtest
