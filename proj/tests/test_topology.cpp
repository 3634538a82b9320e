#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "dsgd/rng.hpp"
#include "dsgd/topology.hpp"

using namespace dsgd;

namespace {

Eigen::MatrixXd to_eigen(const MixingMatrix& p) {
  Eigen::MatrixXd m(p.size(), p.size());
  for (int i = 0; i < p.size(); ++i)
    for (int j = 0; j < p.size(); ++j) m(i, j) = p.at(i, j);
  return m;
}

double lambda2_oracle(const MixingMatrix& p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(p));
  return solver.eigenvalues()(p.size() - 2);
}

// (m, k) pair with m*k even
std::pair<int, int> random_regular_params(RngStream& rng, int max_m) {
  for (;;) {
    int m = 2 + int(rng.uniform_index(max_m - 1));
    int k = 1 + int(rng.uniform_index(m - 1));
    if ((std::int64_t(m) * k) % 2 == 0) return {m, k};
  }
}

}  // namespace

TEST_CASE("k-regular circulant constructions") {
  Graph c4 = k_regular_graph(4, 2);
  CHECK(c4.edges == std::vector<std::pair<int, int>>{
                        {0, 1}, {0, 3}, {1, 2}, {2, 3}});
  CHECK(c4.connected);

  Graph single = k_regular_graph(1, 0);
  CHECK(single.edges.empty());
  CHECK(single.connected);

  Graph c8 = k_regular_graph(8, 2);
  CHECK(c8.edges.size() == 8);
  CHECK(c8.connected);
  int k = -1;
  CHECK(c8.is_regular(&k));
  CHECK(k == 2);

  // odd degree uses the antipodal spoke
  Graph g53 = k_regular_graph(6, 3);
  CHECK(g53.is_regular(&k));
  CHECK(k == 3);

  CHECK_THROWS_AS(k_regular_graph(5, 3), std::invalid_argument);  // m*k odd
  CHECK_THROWS_AS(k_regular_graph(4, 4), std::invalid_argument);  // k >= m
}

TEST_CASE("complete graphs") {
  CHECK(complete_graph(3).edges.size() == 3);
  CHECK(complete_graph(1).edges.empty());
  CHECK(complete_graph(4).edges.size() == 6);
}

TEST_CASE("max-degree weights on the 4-cycle") {
  MixingMatrix p = max_degree_weights(k_regular_graph(4, 2));
  for (int i = 0; i < 4; ++i) {
    CHECK(p.at(i, i) == doctest::Approx(1.0 / 3.0));
    CHECK(p.at(i, (i + 1) % 4) == doctest::Approx(1.0 / 3.0));
    CHECK(p.at(i, (i + 2) % 4) == 0.0);
  }
}

TEST_CASE("max-degree weights on a single node and a star") {
  MixingMatrix one = max_degree_weights(complete_graph(1));
  CHECK(one.at(0, 0) == 1.0);
  CHECK(one.is_identity());

  // star on 4 nodes, center 0: Delta = 3
  Graph star = make_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  MixingMatrix p = max_degree_weights(star);
  CHECK(p.at(0, 0) == doctest::Approx(0.25));
  CHECK(p.at(0, 1) == doctest::Approx(0.25));
  CHECK(p.at(1, 1) == doctest::Approx(0.75));
  CHECK(p.at(1, 2) == 0.0);
  for (int i = 0; i < 4; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < 4; ++j) {
      row += p.at(i, j);
      col += p.at(j, i);
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(col == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("uniform closed-neighborhood weights") {
  MixingMatrix k4 = uniform_neighbor_weights(complete_graph(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(k4.at(i, j) == doctest::Approx(0.25));

  MixingMatrix c4 = uniform_neighbor_weights(k_regular_graph(4, 2));
  for (int i = 0; i < 4; ++i) {
    CHECK(c4.at(i, i) == doctest::Approx(1.0 / 3.0));
    CHECK(c4.at(i, (i + 1) % 4) == doctest::Approx(1.0 / 3.0));
  }

  MixingMatrix one = uniform_neighbor_weights(complete_graph(1));
  CHECK(one.at(0, 0) == 1.0);

  Graph star = make_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  CHECK_THROWS_AS(uniform_neighbor_weights(star), std::invalid_argument);
}

TEST_CASE("lambda2 on known spectra") {
  // complete graph uniform weights: rank-one projector, lambda2 = 0
  CHECK(lambda2(uniform_neighbor_weights(complete_graph(8))) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // identity matrix: all eigenvalues 1
  std::vector<double> eye(9, 0.0);
  for (int i = 0; i < 3; ++i) eye[i * 3 + i] = 1.0;
  CHECK(lambda2(MixingMatrix::checked(3, eye)) == doctest::Approx(1.0));

  // 4-cycle max-degree: circulant eigenvalues (1 + 2cos(2 pi l / 4)) / 3
  MixingMatrix c4 = max_degree_weights(k_regular_graph(4, 2));
  CHECK(lambda2(c4) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(lambda2_oracle(c4) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // m = 1 convention
  CHECK(lambda2(max_degree_weights(complete_graph(1))) == 0.0);
}

TEST_CASE("constructed matrices satisfy every invariant") {
  RngStream rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto [m, k] = random_regular_params(rng, 64);
    Graph g = k_regular_graph(m, k);
    MixingMatrix p = max_degree_weights(g);
    CHECK_NOTHROW(p.validate(1e-12));
    CHECK_NOTHROW(check_graph_conformant(p, g));
    if (g.connected) CHECK(lambda2(p) < 1.0);

    MixingMatrix u = uniform_neighbor_weights(g);
    CHECK_NOTHROW(u.validate(1e-12));
    CHECK_NOTHROW(check_graph_conformant(u, g));
  }
}

TEST_CASE("lambda2 matches the dense oracle on random regular graphs") {
  RngStream rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    auto [m, k] = random_regular_params(rng, 64);
    MixingMatrix p = max_degree_weights(k_regular_graph(m, k));
    CHECK(lambda2(p) == doctest::Approx(lambda2_oracle(p)).epsilon(1e-9));
  }
}

TEST_CASE("deflated power iteration agrees with the dense path") {
  RngStream rng(13);
  for (int trial = 0; trial < 15; ++trial) {
    auto [m, k] = random_regular_params(rng, 48);
    MixingMatrix p = max_degree_weights(k_regular_graph(m, k));
    double dense = lambda2(p);                 // dense path (m <= 512)
    double power = lambda2(p, /*dense_threshold=*/1);
    CHECK(power == doctest::Approx(dense).epsilon(1e-9));
  }
}

TEST_CASE("lambda2 rejects asymmetric matrices") {
  std::vector<double> w{0.5, 0.5, 0.0, 0.2, 0.5, 0.3, 0.3, 0.0, 0.7};
  MixingMatrix p = MixingMatrix::unchecked(3, w);
  CHECK_THROWS_AS(lambda2(p), std::invalid_argument);
}

TEST_CASE("checked construction rejects invariant violations") {
  CHECK_THROWS_AS(MixingMatrix::checked(2, {0.9, 0.2, 0.2, 0.8}),
                  std::invalid_argument);  // row sums
  CHECK_THROWS_AS(MixingMatrix::checked(2, {1.5, -0.5, -0.5, 1.5}),
                  std::invalid_argument);  // negativity
  CHECK_THROWS_AS(MixingMatrix::checked(2, {0.7, 0.3, 0.2, 0.8}),
                  std::invalid_argument);  // symmetry/column sums
}
