#include "dsgd/topology.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>

#include "dsgd/eig.hpp"
#include "dsgd/kernels.hpp"
#include "dsgd/rng.hpp"

namespace dsgd {

bool Graph::is_regular(int* k) const {
  if (m == 0) return false;
  int deg = degree(0);
  for (int i = 1; i < m; ++i)
    if (degree(i) != deg) return false;
  if (k) *k = deg;
  return true;
}

namespace {

bool compute_connected(const Graph& g) {
  if (g.m <= 1) return true;
  std::vector<char> seen(g.m, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : g.neighbors[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        q.push(w);
      }
  }
  return count == g.m;
}

}  // namespace

Graph make_graph(int m, std::vector<std::pair<int, int>> edges) {
  if (m < 1) throw std::invalid_argument("make_graph: m >= 1");
  std::set<std::pair<int, int>> unique;
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("make_graph: self-loop");
    if (a < 0 || b < 0 || a >= m || b >= m)
      throw std::invalid_argument("make_graph: endpoint out of range");
    unique.emplace(std::min(a, b), std::max(a, b));
  }
  Graph g;
  g.m = m;
  g.edges.assign(unique.begin(), unique.end());
  g.neighbors.resize(m);
  for (auto [a, b] : g.edges) {
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  }
  for (auto& adj : g.neighbors) std::sort(adj.begin(), adj.end());
  g.connected = compute_connected(g);
  return g;
}

Graph k_regular_graph(int m, int k, std::uint64_t /*seed*/) {
  if (m < 1) throw std::invalid_argument("k_regular_graph: m >= 1");
  if (k < 0 || k >= m)
    throw std::invalid_argument("k_regular_graph: need 0 <= k < m");
  if ((std::int64_t(m) * k) % 2 != 0)
    throw std::invalid_argument("k_regular_graph: m*k must be even");

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i) {
    for (int off = 1; off <= k / 2; ++off)
      edges.emplace_back(i, (i + off) % m);
    if (k % 2 == 1) edges.emplace_back(i, (i + m / 2) % m);
  }
  Graph g = make_graph(m, std::move(edges));
  int deg = 0;
  if (!g.is_regular(&deg) || deg != k)
    throw std::logic_error("k_regular_graph: construction is not " +
                           std::to_string(k) + "-regular");
  return g;
}

Graph complete_graph(int m) {
  if (m < 1) throw std::invalid_argument("complete_graph: m >= 1");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) edges.emplace_back(i, j);
  return make_graph(m, std::move(edges));
}

MixingMatrix::MixingMatrix(int m, std::vector<double> w)
    : m_(m), w_(std::move(w)) {
  support_.resize(m_);
  identity_ = true;
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) {
      double v = at(i, j);
      if (v != 0.0) support_[i].push_back(j);
      if ((i == j && v != 1.0) || (i != j && v != 0.0)) identity_ = false;
    }
  }
}

MixingMatrix MixingMatrix::checked(int m, std::vector<double> weights) {
  MixingMatrix p = unchecked(m, std::move(weights));
  p.validate();
  return p;
}

MixingMatrix MixingMatrix::unchecked(int m, std::vector<double> weights) {
  if (m < 1) throw std::invalid_argument("MixingMatrix: m >= 1");
  if (weights.size() != std::size_t(m) * m)
    throw std::invalid_argument("MixingMatrix: weights must be m*m");
  return MixingMatrix(m, std::move(weights));
}

void MixingMatrix::validate(double tol) const {
  for (int i = 0; i < m_; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < m_; ++j) {
      double v = at(i, j);
      if (v < 0.0)
        throw std::invalid_argument("MixingMatrix: negative entry");
      if (std::fabs(v - at(j, i)) > tol)
        throw std::invalid_argument("MixingMatrix: not symmetric");
      row += v;
      col += at(j, i);
    }
    if (std::fabs(row - 1.0) > tol)
      throw std::invalid_argument("MixingMatrix: row sum off by " +
                                  std::to_string(row - 1.0));
    if (std::fabs(col - 1.0) > tol)
      throw std::invalid_argument("MixingMatrix: column sum off by " +
                                  std::to_string(col - 1.0));
  }
}

MixingMatrix max_degree_weights(const Graph& g) {
  int max_deg = 0;
  for (int i = 0; i < g.m; ++i) max_deg = std::max(max_deg, g.degree(i));
  double w = 1.0 / double(max_deg + 1);
  std::vector<double> p(std::size_t(g.m) * g.m, 0.0);
  for (int i = 0; i < g.m; ++i) {
    for (int j : g.neighbors[i]) p[std::size_t(i) * g.m + j] = w;
    p[std::size_t(i) * g.m + i] = 1.0 - g.degree(i) * w;
  }
  return MixingMatrix::checked(g.m, std::move(p));
}

MixingMatrix uniform_neighbor_weights(const Graph& g) {
  int k = 0;
  if (!g.is_regular(&k))
    throw std::invalid_argument("uniform_neighbor_weights: graph not regular");
  double w = 1.0 / double(k + 1);
  std::vector<double> p(std::size_t(g.m) * g.m, 0.0);
  for (int i = 0; i < g.m; ++i) {
    for (int j : g.neighbors[i]) p[std::size_t(i) * g.m + j] = w;
    p[std::size_t(i) * g.m + i] = w;
  }
  return MixingMatrix::checked(g.m, std::move(p));
}

void check_graph_conformant(const MixingMatrix& p, const Graph& g) {
  if (p.size() != g.m)
    throw std::invalid_argument("conformance: size mismatch");
  std::set<std::pair<int, int>> edge_set(g.edges.begin(), g.edges.end());
  for (int i = 0; i < p.size(); ++i)
    for (int j = 0; j < p.size(); ++j)
      if (i != j && p.at(i, j) > 0.0 &&
          !edge_set.count({std::min(i, j), std::max(i, j)}))
        throw std::invalid_argument("conformance: weight off the graph at (" +
                                    std::to_string(i) + "," +
                                    std::to_string(j) + ")");
}

double lambda2_dense(const std::vector<double>& p, int m) {
  if (m == 1) return 0.0;
  SymEig eig = sym_eig(p, m, 1e-12);
  return eig.values[m - 2];
}

namespace {

// Deflated power iteration on (P + I)/2 - (1/m) 1 1^T, whose spectrum is
// {(lambda_i + 1)/2 for i >= 2} together with 0; all entries of [0, 1) and
// the order of the lambda_i is preserved by the shift.
double lambda2_power(const MixingMatrix& p) {
  const int m = p.size();
  RngStream rng(0xd5bd5bULL, m);
  std::vector<double> v(m), u(m);
  for (auto& e : v) e = rng.normal();

  auto remove_mean = [&](std::vector<double>& z) {
    double mean = 0.0;
    for (double e : z) mean += e;
    mean /= m;
    for (auto& e : z) e -= mean;
  };

  remove_mean(v);
  double nsq = kern::nrm2sq(v.data(), m);
  if (nsq == 0.0) {
    v[0] = 1.0;
    remove_mean(v);
    nsq = kern::nrm2sq(v.data(), m);
  }
  kern::scal(1.0 / std::sqrt(nsq), v.data(), m);

  double sigma = 0.0, sigma_prev = -1.0;
  const int max_iter = 20000;
  for (int it = 0; it < max_iter; ++it) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j : p.row_support(i)) s += p.at(i, j) * v[j];
      u[i] = 0.5 * (s + v[i]);
    }
    remove_mean(u);
    sigma = kern::dot(v.data(), u.data(), m);
    double un = kern::nrm2sq(u.data(), m);
    if (un == 0.0) return -1.0;  // remaining spectrum collapsed: lambda2 = -1
    kern::scale_copy(1.0 / std::sqrt(un), u.data(), v.data(), m);
    if (it > 1 && std::fabs(sigma - sigma_prev) <=
                      1e-14 * std::max(1.0, std::fabs(sigma)))
      break;
    sigma_prev = sigma;
  }
  return 2.0 * sigma - 1.0;
}

}  // namespace

double lambda2(const MixingMatrix& p, int dense_threshold) {
  p.validate();  // rejects asymmetric input
  if (p.size() == 1) return 0.0;
  if (p.size() <= dense_threshold) return lambda2_dense(p.dense(), p.size());
  return lambda2_power(p);
}

}  // namespace dsgd
