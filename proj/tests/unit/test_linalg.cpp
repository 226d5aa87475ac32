#include "supportgraph/linalg.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

TEST_CASE("jacobi agrees with Eigen's self-adjoint solver") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 9);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    const auto mine = sg::jacobi_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
    const Eigen::VectorXd expect = ref.eigenvalues().reverse();
    for (int k = 0; k < n; ++k) {
      CHECK(mine.values[k] == doctest::Approx(expect[k]).epsilon(1e-10));
      const Eigen::VectorXd v = mine.vectors.col(k);
      CHECK(v.norm() == doctest::Approx(1.0));
      CHECK((a * v - mine.values[k] * v).norm() < 1e-9);
    }
    for (int k = 1; k < n; ++k) CHECK(mine.values[k - 1] >= mine.values[k]);
  }
}

TEST_CASE("diagonal input needs no sweeps and keeps index order on ties") {
  Eigen::MatrixXd d = Eigen::Vector3d(2.0, 5.0, 2.0).asDiagonal();
  const auto e = sg::jacobi_eigen(d);
  CHECK(e.sweeps == 0);
  CHECK(e.values[0] == 5.0);
  CHECK(e.vectors(1, 0) == doctest::Approx(1.0));
  CHECK(e.vectors(0, 1) == doctest::Approx(1.0));
  CHECK(e.vectors(2, 2) == doctest::Approx(1.0));
}
