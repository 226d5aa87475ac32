#include "supportgraph/lp.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <functional>
#include <random>

using namespace sg;

namespace {

// Brute-force LP optimum over box-bounded variables: every basic solution is
// the intersection of n active constraints (rows or bounds). Returns +inf when
// no vertex is feasible.
double vertex_oracle(const LinearProgram& lp) {
  const std::size_t n = lp.num_variables();
  struct Hyper {
    Eigen::VectorXd a;
    double b;
  };
  std::vector<Hyper> planes;
  for (const auto& r : lp.rows) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (auto [j, c] : r.terms) a[static_cast<Eigen::Index>(j)] += c;
    planes.push_back({a, r.rhs});
  }
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j));
    planes.push_back({e, lp.lower[j]});
    if (lp.upper[j] < kInf) planes.push_back({e, lp.upper[j]});
  }
  double best = kInf;
  const std::size_t m = planes.size();
  std::vector<std::size_t> pick(n);
  // enumerate n-subsets of planes
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == n) {
      Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      Eigen::VectorXd b(static_cast<Eigen::Index>(n));
      for (std::size_t r = 0; r < n; ++r) {
        A.row(static_cast<Eigen::Index>(r)) = planes[pick[r]].a.transpose();
        b[static_cast<Eigen::Index>(r)] = planes[pick[r]].b;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (lu.rank() < static_cast<Eigen::Index>(n)) return;
      const Eigen::VectorXd x = lu.solve(b);
      std::vector<double> xv(x.data(), x.data() + x.size());
      if (lp_residual(lp, xv) > 1e-9) return;
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += lp.cost[j] * xv[j];
      best = std::min(best, obj);
      return;
    }
    for (std::size_t i = start; i < m; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

LinearProgram random_lp(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LinearProgram lp;
  for (std::size_t j = 0; j < n; ++j) lp.add_variable(u(rng), 0.0, 1.0 + 2.0 * std::abs(u(rng)));
  for (std::size_t r = 0; r < m; ++r) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t j = 0; j < n; ++j)
      if (rng() % 3) terms.emplace_back(j, u(rng));
    if (terms.empty()) terms.emplace_back(0, 1.0);
    const auto sense = static_cast<RowSense>(rng() % 3);
    lp.add_row(terms, sense, u(rng), "r" + std::to_string(r));
  }
  return lp;
}

}  // namespace

TEST_CASE("simplex matches vertex enumeration on random boxed LPs") {
  std::mt19937_64 rng(7);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 3;
    const std::size_t m = 1 + rng() % 3;
    const auto lp = random_lp(rng, n, m);
    const double oracle = vertex_oracle(lp);
    for (bool bland : {false, true}) {
      LPOptions opt;
      opt.bland_only = bland;
      const auto sol = solve_lp(lp, opt);
      if (oracle == kInf) {
        CHECK(sol.status == LPStatus::infeasible);
      } else {
        REQUIRE(sol.status == LPStatus::optimal);
        CHECK(sol.objective == doctest::Approx(oracle).epsilon(1e-7));
        CHECK(lp_residual(lp, sol.x) < 1e-7);
      }
    }
    (oracle == kInf ? infeasible : optimal)++;
  }
  // both branches exercised
  CHECK(optimal > 50);
  CHECK(infeasible > 5);
}

TEST_CASE("small hand LP") {
  // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, x,y >= 0  -> x = 1.6, y = 1.2
  LinearProgram lp;
  lp.add_variable(-1.0);
  lp.add_variable(-1.0);
  lp.add_row({{0, 1.0}, {1, 2.0}}, RowSense::le, 4.0);
  lp.add_row({{0, 3.0}, {1, 1.0}}, RowSense::le, 6.0);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LPStatus::optimal);
  CHECK(sol.x[0] == doctest::Approx(1.6));
  CHECK(sol.x[1] == doctest::Approx(1.2));
  CHECK(sol.objective == doctest::Approx(-2.8));
}

TEST_CASE("unbounded and infeasible are reported") {
  LinearProgram up;
  up.add_variable(-1.0);
  CHECK(solve_lp(up).status == LPStatus::unbounded);

  LinearProgram inf;
  inf.add_variable(0.0, 0.0, 1.0);
  inf.add_row({{0, 1.0}}, RowSense::ge, 2.0);
  CHECK(solve_lp(inf).status == LPStatus::infeasible);
}

TEST_CASE("degenerate LP terminates under both pricing rules") {
  // classic cycling example (Beale)
  LinearProgram lp;
  lp.add_variable(-0.75);
  lp.add_variable(150.0);
  lp.add_variable(-0.02);
  lp.add_variable(6.0);
  lp.add_row({{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}}, RowSense::le, 0.0);
  lp.add_row({{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}}, RowSense::le, 0.0);
  lp.add_row({{2, 1.0}}, RowSense::le, 1.0);
  for (bool bland : {false, true}) {
    LPOptions opt;
    opt.bland_only = bland;
    opt.degenerate_switch = 2;
    const auto sol = solve_lp(lp, opt);
    REQUIRE(sol.status == LPStatus::optimal);
    CHECK(sol.objective == doctest::Approx(-0.05));
  }
}

TEST_CASE("LP text export names rows and bounds") {
  LinearProgram lp;
  lp.add_variable(1.0, 0.0, 1.0, "x");
  lp.add_variable(2.0, 0.0, kInf, "y");
  lp.add_row({{0, 1.0}, {1, 1.0}}, RowSense::ge, 1.0, "cover");
  const std::string text = to_lp_format(lp);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("cover") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
