#include "supportgraph/error.hpp"
#include "supportgraph/solver.hpp"

#include "../support/random_problem.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sg;

namespace {

bool same_objective(const EnergyBreakdown& a, const EnergyBreakdown& b) {
  if (a.saturated_terms != b.saturated_terms) return false;
  return std::abs(a.total - b.total) <= 1e-9 * std::max(1.0, std::abs(b.total));
}

}  // namespace

TEST_CASE("branch and bound matches exhaustive search on small problems") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 3;
    const std::size_t k = 3 + rng() % 3;
    const auto p = sgtest::random_problem(rng, n, k);
    const auto ip = solve_support(p);
    const auto ex = exhaustive_minimize(p);
    CHECK(same_objective(ip.energy, ex.energy));
    // the reported energy is the energy of the returned assignment
    CHECK(total_energy(p, ip.objects).total == doctest::Approx(ip.energy.total));
    CHECK(ip.lower_bound <= ip.energy.total + 1e-6 * std::max(1.0, ip.energy.total));
    for (std::size_t i = 0; i < n; ++i) CHECK(admissible(p, i, ip.objects[i]));
  }
}

TEST_CASE("encode and decode are inverse") {
  std::mt19937_64 rng(22);
  const auto p = sgtest::random_problem(rng, 3, 4);
  const auto model = build_ip(p, true);
  const auto ex = exhaustive_minimize(p);
  const auto x = model.encode(ex.objects);
  CHECK(model.decode(x) == ex.objects);
  CHECK(lp_residual(model.lp, x) < 1e-9);
  for (std::size_t col = 0; col < model.columns(); ++col) {
    const auto a = model.decode_column(col);
    if (col == model.ground_column()) {
      CHECK(a.supporter.is_ground_self());
    } else if (col == model.hidden_column(SupportType::below) || col == model.hidden_column(SupportType::behind)) {
      CHECK(a.supporter.is_hidden());
    } else {
      CHECK(a.supporter.is_object());
    }
  }
}

TEST_CASE("encoded assignments cost their energy in the soft model") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = sgtest::random_problem(rng, 3, 4);
    const auto model = build_ip(p, true);
    const auto ex = exhaustive_minimize(p);
    const auto x = model.encode(ex.objects);
    double finite = 0.0, saturated = 0.0;
    for (std::size_t v = 0; v < x.size(); ++v) {
      finite += model.lp.cost[v] * x[v];
      saturated += model.saturation[v] * x[v];
    }
    const auto e = total_energy(p, ex.objects);
    CHECK(saturated == doctest::Approx(static_cast<double>(e.saturated_terms)));
    if (e.saturated_terms == 0) CHECK(finite == doctest::Approx(e.total));
  }
}

TEST_CASE("no finite assignment: fewest saturated terms, then least energy") {
  SupportProblem p;
  p.n = 2;
  p.k = 4;
  p.support = SupportTensor(2);
  for (std::size_t i = 0; i < 2; ++i) p.support.at(i, 2) = {0.0, 0.0, 1.0};  // hidden impossible
  p.support.at(0, 1) = {0.5, 0.2, 0.3};
  p.support.at(1, 0) = {0.4, 0.3, 0.3};
  p.class_prob = Eigen::MatrixXd::Zero(2, 4);
  p.class_prob(0, 3) = 1.0;
  p.class_prob(1, 3) = 1.0;
  p.class_given_scene = Eigen::Vector4d::Constant(0.5);
  p.support_prior = Eigen::MatrixXd::Zero(4, 4);  // nothing may support anything
  p.bottom = {0.0, 0.5};
  p.top = {1.0, 1.5};
  p.horizontal_distance = Eigen::MatrixXd::Zero(2, 2);
  const auto s = solve_support(p);
  const auto ex = exhaustive_minimize(p);
  CHECK(ex.energy.saturated_terms > 0);
  CHECK(same_objective(s.energy, ex.energy));
  bool warned = false;
  for (const auto& w : s.warnings) warned |= w.find("no finite-energy") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("exhaustive search refuses large problems") {
  std::mt19937_64 rng(24);
  const auto p = sgtest::random_problem(rng, 7, 3);
  CHECK_THROWS_AS(exhaustive_minimize(p), SolverError);
}

TEST_CASE("empty problem") {
  SupportProblem p;
  p.k = 3;
  p.class_prob = Eigen::MatrixXd::Zero(0, 3);
  p.class_given_scene = Eigen::Vector3d::Constant(1.0);
  p.support_prior = Eigen::MatrixXd::Zero(3, 3);
  p.horizontal_distance = Eigen::MatrixXd::Zero(0, 0);
  const auto s = solve_support(p);
  CHECK(s.objects.empty());
  CHECK(s.energy.total == 0.0);
}
