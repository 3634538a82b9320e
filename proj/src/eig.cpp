#include "dsgd/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dsgd {

SymEig sym_eig(const double* a, int n, double sym_tol) {
  if (n <= 0) throw std::invalid_argument("sym_eig: n must be positive");
  const std::size_t nn = std::size_t(n);

  double scale = 0.0;
  for (std::size_t i = 0; i < nn * nn; ++i) scale = std::max(scale, std::fabs(a[i]));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(a[i * nn + j] - a[j * nn + i]) > sym_tol * std::max(1.0, scale))
        throw std::invalid_argument("sym_eig: matrix is not symmetric");

  std::vector<double> b(a, a + nn * nn);
  // symmetrize exactly so rotations stay consistent
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.5 * (b[i * nn + j] + b[j * nn + i]);
      b[i * nn + j] = v;
      b[j * nn + i] = v;
    }

  std::vector<double> v(nn * nn, 0.0);
  for (int i = 0; i < n; ++i) v[i * nn + i] = 1.0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += b[i * nn + j] * b[i * nn + j];
    return std::sqrt(2.0 * s);
  };

  const double stop = 1e-15 * std::max(1.0, scale) * n;
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps && off_norm() > stop; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = b[p * nn + q];
        if (std::fabs(apq) <= 1e-300) continue;
        double app = b[p * nn + p];
        double aqq = b[q * nn + q];
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;

        for (int k = 0; k < n; ++k) {
          double bkp = b[k * nn + p];
          double bkq = b[k * nn + q];
          b[k * nn + p] = c * bkp - s * bkq;
          b[k * nn + q] = s * bkp + c * bkq;
        }
        for (int k = 0; k < n; ++k) {
          double bpk = b[p * nn + k];
          double bqk = b[q * nn + k];
          b[p * nn + k] = c * bpk - s * bqk;
          b[q * nn + k] = s * bpk + c * bqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v[k * nn + p];
          double vkq = v[k * nn + q];
          v[k * nn + p] = c * vkp - s * vkq;
          v[k * nn + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  SymEig out;
  out.n = n;
  out.values.resize(nn);
  for (int i = 0; i < n; ++i) out.values[i] = b[i * nn + i];

  std::vector<int> order(nn);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return out.values[x] < out.values[y];
  });

  std::vector<double> sorted_vals(nn);
  std::vector<double> sorted_vecs(nn * nn);
  for (int k = 0; k < n; ++k) {
    sorted_vals[k] = out.values[order[k]];
    for (int r = 0; r < n; ++r) sorted_vecs[r * nn + k] = v[r * nn + order[k]];
  }
  out.values = std::move(sorted_vals);
  out.vectors = std::move(sorted_vecs);
  return out;
}

}  // namespace dsgd
