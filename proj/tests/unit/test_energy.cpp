#include "supportgraph/energy.hpp"
#include "supportgraph/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace sg;

namespace {

constexpr std::size_t kCup = 3;

// ground patch and a cup standing on it
SupportProblem two_objects() {
  SupportProblem p;
  p.n = 2;
  p.k = 4;
  p.support = SupportTensor(2);
  p.support.at(1, 0) = {0.6, 0.1, 0.3};
  p.support.at(1, 2) = {0.05, 0.05, 0.9};
  p.support.at(0, 1) = {0.02, 0.02, 0.96};
  p.support.at(0, 2) = {0.1, 0.1, 0.8};
  p.class_prob = Eigen::MatrixXd::Zero(2, 4);
  p.class_prob(0, kGroundClass) = 0.8;
  p.class_prob(0, kCup) = 0.2;
  p.class_prob(1, kCup) = 1.0;
  p.class_given_scene = Eigen::Vector4d(0.9, 0.9, 0.5, 0.4);
  p.scene_probability = 0.5;
  p.support_prior = Eigen::MatrixXd::Constant(4, 4, 0.1);
  p.support_prior(kGroundClass, kCup) = 0.3;
  p.bottom = {0.0, 0.7};
  p.top = {0.05, 0.8};
  p.horizontal_distance = Eigen::MatrixXd::Zero(2, 2);
  p.horizontal_distance(0, 1) = p.horizontal_distance(1, 0) = 0.25;
  return p;
}

ObjectAssignment on(std::size_t s, SupportType t, std::size_t cls) {
  return {SupporterRef::visible(s), t, cls};
}

}  // namespace

TEST_CASE("hand-computed energy of the cup on the ground") {
  const auto p = two_objects();
  const Assignment a{{SupporterRef::ground_self(), SupportType::below, kGroundClass},
                     on(0, SupportType::below, kCup)};
  const double e_sp = -std::log(0.6);
  const double e_c = -std::log(0.8 * 0.9 * 0.5) - std::log(1.0 * 0.4 * 0.5);
  const double c_c = -std::log(0.8) - std::log(0.3);
  const double c_d = (0.7 - 0.05) * (0.7 - 0.05);
  const auto e = total_energy(p, a);
  CHECK(e.support == doctest::Approx(e_sp));
  CHECK(e.classification == doctest::Approx(e_c));
  CHECK(e.class_constraint == doctest::Approx(c_c));
  CHECK(e.distance == doctest::Approx(c_d));
  CHECK(e.support_constraint == 0.0);
  CHECK(e.total == doctest::Approx(e_sp + e_c + c_c + c_d));
  CHECK(e.saturated_terms == 0);
}

TEST_CASE("weights scale the constraint terms") {
  auto p = two_objects();
  p.weights.alpha_class = 2.0;
  p.weights.alpha_distance = 3.0;
  p.weights.alpha_support = 0.5;
  const Assignment a{{SupporterRef::ground_self(), SupportType::below, kGroundClass},
                     {SupporterRef::hidden(), SupportType::behind, kCup}};
  const auto e = total_energy(p, a);
  CHECK(e.support == doctest::Approx(-std::log(0.05)));
  CHECK(e.class_constraint == doctest::Approx(2.0 * -std::log(0.8)));
  CHECK(e.distance == 0.0);
  CHECK(e.support_constraint == doctest::Approx(0.5 * 5.0));
}

TEST_CASE("behind support pays the horizontal distance") {
  const auto p = two_objects();
  CHECK(c_dist(p, 1, on(0, SupportType::behind, kCup)) == doctest::Approx(0.25));
}

TEST_CASE("hard constraints saturate") {
  auto p = two_objects();
  // ground that is not strictly lowest
  p.bottom = {0.7, 0.7};
  const Assignment a{{SupporterRef::ground_self(), SupportType::below, kGroundClass},
                     on(0, SupportType::below, kCup)};
  CHECK(c_class(p, 0, a) == kSaturated);
  CHECK(total_energy(p, a).saturated_terms >= 1);

  // supporter entirely above the supported object
  auto q = two_objects();
  q.bottom = {2.0, 0.7};
  q.top = {2.5, 0.8};
  const Assignment b{{SupporterRef::hidden(), SupportType::below, kCup}, on(0, SupportType::below, kCup)};
  CHECK(c_class(q, 1, b) == kSaturated);

  // ground-self for a non-ground class
  CHECK(c_support(p, 1, {SupporterRef::ground_self(), SupportType::below, kCup}) == kSaturated);
  // ground with something lower must not be supported at all
  auto r = two_objects();
  r.bottom = {0.5, 0.1};
  CHECK(c_support(r, 0, {SupporterRef::ground_self(), SupportType::below, kGroundClass}) == kSaturated);
  // zero prior
  CHECK(e_class(p, 1, kGroundClass) == kSaturated);
}

TEST_CASE("saturated terms are not scaled by the weights") {
  auto p = two_objects();
  p.weights.alpha_support = 3.0;
  const Assignment a{{SupporterRef::ground_self(), SupportType::below, kGroundClass},
                     {SupporterRef::ground_self(), SupportType::below, kCup}};
  const auto e = total_energy(p, a);
  CHECK(e.support_constraint >= kSaturated);
  CHECK(e.support_constraint < 2.0 * kSaturated);
}

TEST_CASE("admissibility") {
  const auto p = two_objects();
  CHECK(admissible(p, 0, {SupporterRef::ground_self(), SupportType::below, kGroundClass}));
  CHECK_FALSE(admissible(p, 0, {SupporterRef::ground_self(), SupportType::below, kCup}));
  CHECK_FALSE(admissible(p, 0, {SupporterRef::hidden(), SupportType::below, kGroundClass}));
  CHECK_FALSE(admissible(p, 1, on(1, SupportType::below, kCup)));
  CHECK_FALSE(admissible(p, 1, on(0, SupportType::below, 9)));
}

TEST_CASE("neg_log saturates") {
  CHECK(neg_log(1.0) == 0.0);
  CHECK(neg_log(0.0) == kSaturated);
  CHECK(neg_log(-1.0) == kSaturated);
  CHECK(neg_log(std::exp(-3.0)) == doctest::Approx(3.0));
}

TEST_CASE("problem validation") {
  auto p = two_objects();
  p.bottom.pop_back();
  CHECK_THROWS_AS(p.validate(), InputError);
  auto q = two_objects();
  q.weights.k_hidden = -1.0;
  CHECK_THROWS_AS(q.validate(), ConfigError);
}
