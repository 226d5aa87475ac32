#include "supportgraph/error.hpp"
#include "supportgraph/scoring.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sg;

TEST_CASE("softmax matches a scalar evaluation") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    LinearClassifier clf;
    clf.weights = Eigen::MatrixXd(3, 5);
    clf.bias = Eigen::VectorXd(3);
    for (int r = 0; r < 3; ++r) {
      clf.bias[r] = g(rng);
      for (int c = 0; c < 5; ++c) clf.weights(r, c) = g(rng);
    }
    std::vector<double> x(5);
    for (auto& v : x) v = 10.0 * g(rng);
    double z[3], sum = 0.0;
    for (int r = 0; r < 3; ++r) {
      z[r] = clf.bias[r];
      for (int c = 0; c < 5; ++c) z[r] += clf.weights(r, c) * x[static_cast<std::size_t>(c)];
    }
    const double m = std::max({z[0], z[1], z[2]});
    for (double& v : z) sum += std::exp(v - m);
    const auto p = softmax_predict(clf, x);
    for (int r = 0; r < 3; ++r) CHECK(p[static_cast<std::size_t>(r)] == doctest::Approx(std::exp(z[r] - m) / sum));
  }
}

TEST_CASE("softmax rejects a wrong feature count") {
  LinearClassifier clf{Eigen::MatrixXd::Zero(3, 4), Eigen::VectorXd::Zero(3)};
  CHECK_THROWS_AS(softmax_predict(clf, {1.0, 2.0}), InputError);
}

TEST_CASE("support tensor from a precomputed table keeps asymmetry") {
  PrecomputedSupport pre;
  pre.table[{5, 9}] = {0.7, 0.1, 0.2};
  pre.table[{9, 5}] = {0.1, 0.1, 0.8};
  pre.table[{5, kHiddenId}] = {0.2, 0.2, 0.6};
  pre.table[{9, kHiddenId}] = {0.3, 0.3, 0.4};
  const auto t = support_probabilities({5, 9}, SupportInput{pre});
  CHECK(t.at(0, 1)[0] == 0.7);
  CHECK(t.at(1, 0)[0] == 0.1);
  CHECK(t.at(0, t.hidden())[2] == 0.6);

  pre.table.erase({9, 5});
  CHECK_THROWS_AS(support_probabilities({5, 9}, SupportInput{pre}), InputError);
}

TEST_CASE("scene posterior: argmax with earliest tie") {
  const auto p = scene_posterior({1.0, 3.0, 3.0}, {"a", "b", "c"});
  CHECK(p.name == "b");
  CHECK(p.probability == doctest::Approx(3.0 / 7.0));
  CHECK_THROWS_AS(scene_posterior({1.0}, {"a", "b"}), InputError);
  CHECK_THROWS_AS(scene_posterior({0.0, 0.0}, {"a", "b"}), InputError);
}

TEST_CASE("class probabilities normalise the scores") {
  Detection d;
  d.class_scores = {2.0, 0.0, 6.0};
  const auto p = class_probabilities(d);
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(p[2] == doctest::Approx(0.75));
  CHECK(d.top_class() == 2);
}

TEST_CASE("colour attribute is the nearest prototype to the mean") {
  std::vector<Rgb> img{{250, 10, 10}, {200, 0, 30}, {10, 10, 240}};
  CHECK(color_attribute({0, 1}, img) == "red");
  CHECK(color_attribute({2}, img) == "blue");
  // mean of red and blue is purple-ish: brute-force nearest prototype
  const double m[3] = {(250 + 200 + 10) / 3.0, (10 + 0 + 10) / 3.0, (10 + 30 + 240) / 3.0};
  std::string best;
  double bd = 1e300;
  for (const auto& p : color_palette()) {
    double d = 0;
    for (int c = 0; c < 3; ++c) d += (m[c] - p.rgb[static_cast<std::size_t>(c)]) * (m[c] - p.rgb[static_cast<std::size_t>(c)]);
    if (d < bd) {
      bd = d;
      best = std::string(p.name);
    }
  }
  CHECK(color_attribute({0, 1, 2}, img) == best);
  CHECK_THROWS_AS(color_attribute({}, img), InputError);
}
