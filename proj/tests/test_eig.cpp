#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "dsgd/eig.hpp"
#include "dsgd/rng.hpp"

using namespace dsgd;

namespace {

std::vector<double> random_symmetric(int n, RngStream& rng) {
  std::vector<double> a(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = rng.normal();
      a[std::size_t(i) * n + j] = v;
      a[std::size_t(j) * n + i] = v;
    }
  return a;
}

}  // namespace

TEST_CASE("diagonal matrix") {
  std::vector<double> a{3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0};
  SymEig e = sym_eig(a, 3);
  CHECK(e.values[0] == doctest::Approx(1.0));
  CHECK(e.values[1] == doctest::Approx(2.0));
  CHECK(e.values[2] == doctest::Approx(3.0));
}

TEST_CASE("agrees with Eigen on random symmetric matrices") {
  RngStream rng(11);
  for (int n : {1, 2, 3, 8, 33, 64}) {
    auto a = random_symmetric(n, rng);
    SymEig mine = sym_eig(a, n);

    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = a[std::size_t(i) * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    for (int k = 0; k < n; ++k)
      CHECK(mine.values[k] ==
            doctest::Approx(solver.eigenvalues()[k]).epsilon(1e-10));

    // residual ||A v - lambda v|| per eigenpair
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) v[i] = mine.vec(i, k);
      double resid = (m * v - mine.values[k] * v).norm();
      CHECK(resid < 1e-9 * std::max(1.0, std::fabs(mine.values[k])));
      CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("rejects asymmetric input") {
  std::vector<double> a{1.0, 2.0, 0.0, 1.0};
  CHECK_THROWS_AS(sym_eig(a, 2), std::invalid_argument);
}
