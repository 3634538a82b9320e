#pragma once

// Spectral norm rho^2 = sigma_1((1/N) sum x x^T) of the sample covariance,
// estimated by power iteration applied through the data matrix: the d x d
// covariance is never materialized, each step costs O(nnz).

#include <cstdint>
#include <span>

#include "dsgd/dataset.hpp"

namespace dsgd {

struct CovarianceEstimate {
  double rho_sq = 0.0;
  int iterations_used = 0;
  double residual = 0.0;  // last relative change of the Rayleigh quotient
  bool converged = false;
};

// Deterministic given seed.  converged == false carries the best estimate
// and its residual; callers decide whether that is fatal.
CovarianceEstimate estimate_spectral_norm(const Dataset& data,
                                          double tol = 1e-6,
                                          int max_iter = 1000,
                                          std::uint64_t seed = 0);

// Same operator restricted to an index multiset (sampling with replacement).
CovarianceEstimate estimate_spectral_norm_subset(
    const Dataset& data, std::span<const std::uint32_t> indices, double tol,
    int max_iter, std::uint64_t seed);

struct SubmatrixCheck {
  double mean_ratio = 0.0;  // mean over trials of sigma_1(Q_K)/K
  double bound = 0.0;       // 5 * rho^2
  bool holds = false;
  bool precondition_met = false;  // K > 4/(3 rho^2) log d
  double rho_sq = 0.0;
  double precondition_threshold = 0.0;
};

// Draws `trials` i.i.d. K-subsets with replacement and compares the mean
// normalized top singular value of the submatrix second-moment against
// 5 rho^2.  Deterministic given seed.
SubmatrixCheck submatrix_lemma_check(const Dataset& data, std::size_t K,
                                     std::size_t trials, std::uint64_t seed);

}  // namespace dsgd
