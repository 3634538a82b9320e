#pragma once

// Graphs and doubly stochastic mixing matrices.  All constructions here are
// symmetric; lambda2 is the signed second-largest eigenvalue (not modulus).

#include <cstdint>
#include <utility>
#include <vector>

namespace dsgd {

struct Graph {
  int m = 0;
  std::vector<std::pair<int, int>> edges;     // i < j, sorted, unique
  std::vector<std::vector<int>> neighbors;    // sorted adjacency
  bool connected = false;

  int degree(int i) const { return int(neighbors[i].size()); }
  // true iff every node has the same degree; writes it to k if given
  bool is_regular(int* k = nullptr) const;
};

Graph make_graph(int m, std::vector<std::pair<int, int>> edges);

// Circulant k-regular graph: node i adjacent to i +- 1 .. i +- floor(k/2)
// mod m, plus i + m/2 when k is odd.  Deterministic; the seed is reserved
// for a future randomized variant.  Requires m >= 1, 0 <= k < m, m*k even.
Graph k_regular_graph(int m, int k, std::uint64_t seed = 0);

Graph complete_graph(int m);

class MixingMatrix {
 public:
  // validates: nonnegativity, row/column sums 1 +- 1e-12, symmetry
  static MixingMatrix checked(int m, std::vector<double> weights);
  // no validation; for diagnostics and negative controls only
  static MixingMatrix unchecked(int m, std::vector<double> weights);

  int size() const { return m_; }
  double at(int i, int j) const { return w_[std::size_t(i) * m_ + j]; }
  const std::vector<double>& dense() const { return w_; }
  // columns with nonzero weight in row i (sorted; includes the diagonal
  // when P_ii > 0) -- the engine's sparse mixing path
  const std::vector<int>& row_support(int i) const { return support_[i]; }
  bool is_identity() const { return identity_; }

  void validate(double tol = 1e-12) const;

 private:
  MixingMatrix(int m, std::vector<double> w);
  int m_ = 0;
  std::vector<double> w_;
  std::vector<std::vector<int>> support_;
  bool identity_ = false;
};

// weights[i][j] = 1/(max_degree+1) on edges, diagonal fills the row to 1
MixingMatrix max_degree_weights(const Graph& g);

// closed-neighborhood uniform weights 1/(k+1) on a k-regular graph
MixingMatrix uniform_neighbor_weights(const Graph& g);

// P_ij > 0 with i != j only on edges of g; throws otherwise.
void check_graph_conformant(const MixingMatrix& p, const Graph& g);

// Signed second-largest eigenvalue.  Dense symmetric eigendecomposition up
// to dense_threshold, deflated power iteration (all-ones direction removed,
// spectrum shifted to [0,1]) above it.  m == 1 returns 0.
double lambda2(const MixingMatrix& p, int dense_threshold = 512);
double lambda2_dense(const std::vector<double>& p, int m);

}  // namespace dsgd
