#pragma once

// Shared test oracles, kept independent of the library's own numerics:
// dense covariance spectra through Eigen, plus small dataset builders.

#include <Eigen/Dense>
#include <vector>

#include "dsgd/dataset.hpp"

namespace oracles {

inline Eigen::MatrixXd dense_covariance(const dsgd::Dataset& data) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(data.d, data.d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& x = data.x[i];
    for (std::size_t a = 0; a < x.nnz(); ++a)
      for (std::size_t b = 0; b < x.nnz(); ++b)
        sigma(x.idx[a], x.idx[b]) += x.val[a] * x.val[b];
  }
  return sigma / double(data.size());
}

inline double top_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  return solver.eigenvalues().maxCoeff();
}

inline double second_largest_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  return solver.eigenvalues()(m.rows() - 2);
}

inline dsgd::SparseVector sparse(std::uint32_t dim,
                                 std::vector<std::uint32_t> idx,
                                 std::vector<double> val) {
  dsgd::SparseVector v;
  v.dim = dim;
  v.idx = std::move(idx);
  v.val = std::move(val);
  return v;
}

inline dsgd::Dataset dataset(std::uint32_t d,
                             std::vector<dsgd::SparseVector> xs,
                             std::vector<double> ys) {
  dsgd::Dataset out;
  out.d = d;
  out.x = std::move(xs);
  out.y = std::move(ys);
  return out;
}

// {(1,0), (0,1), (1/sqrt2, 1/sqrt2)}: covariance [[1/2,1/6],[1/6,1/2]],
// top eigenvalue 2/3
inline dsgd::Dataset three_point_set() {
  const double r = 1.0 / std::sqrt(2.0);
  return dataset(2,
                 {sparse(2, {0}, {1.0}), sparse(2, {1}, {1.0}),
                  sparse(2, {0, 1}, {r, r})},
                 {1.0, -1.0, 1.0});
}

}  // namespace oracles
