#include "dsgd/spectral.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dsgd/kernels.hpp"
#include "dsgd/rng.hpp"

namespace dsgd {

namespace {

// y = (1/count) sum_{k in indices} (x_k . v) x_k
void apply_covariance(const Dataset& data,
                      std::span<const std::uint32_t> indices,
                      const std::vector<double>& v, std::vector<double>& y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::uint32_t k : indices) {
    const SparseVector& x = data.x[k];
    double s = kern::sdot(v.data(), x.idx.data(), x.val.data(), x.nnz());
    kern::saxpy(s, x.idx.data(), x.val.data(), y.data(), x.nnz());
  }
  kern::scal(1.0 / double(indices.size()), y.data(), y.size());
}

CovarianceEstimate power_iteration(const Dataset& data,
                                   std::span<const std::uint32_t> indices,
                                   double tol, int max_iter,
                                   std::uint64_t seed) {
  const std::uint32_t d = data.d;
  CovarianceEstimate out;
  if (d == 0) {
    out.converged = true;
    return out;
  }

  RngStream rng(seed, 0);
  std::vector<double> v(d);
  double nsq = 0.0;
  do {
    for (auto& e : v) e = rng.normal();
    nsq = kern::nrm2sq(v.data(), d);
  } while (nsq == 0.0);
  kern::scal(1.0 / std::sqrt(nsq), v.data(), d);

  std::vector<double> y(d);
  double lambda_prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    apply_covariance(data, indices, v, y);
    double lambda = kern::dot(v.data(), y.data(), d);  // Rayleigh, ||v|| = 1
    double ynorm_sq = kern::nrm2sq(y.data(), d);
    out.iterations_used = it;
    out.rho_sq = lambda;
    if (ynorm_sq == 0.0) {  // zero operator
      out.rho_sq = 0.0;
      out.residual = 0.0;
      out.converged = true;
      return out;
    }
    out.residual = std::fabs(lambda - lambda_prev) / std::max(lambda, 1e-300);
    if (it > 1 && out.residual < tol) {
      out.converged = true;
      return out;
    }
    lambda_prev = lambda;
    kern::scale_copy(1.0 / std::sqrt(ynorm_sq), y.data(), v.data(), d);
  }
  out.converged = false;
  return out;
}

}  // namespace

CovarianceEstimate estimate_spectral_norm(const Dataset& data, double tol,
                                          int max_iter, std::uint64_t seed) {
  if (data.size() == 0)
    throw std::invalid_argument("estimate_spectral_norm: empty dataset");
  if (!(tol > 0.0))
    throw std::invalid_argument("estimate_spectral_norm: tol must be > 0");
  std::vector<std::uint32_t> all(data.size());
  std::iota(all.begin(), all.end(), 0u);
  return power_iteration(data, all, tol, max_iter, seed);
}

CovarianceEstimate estimate_spectral_norm_subset(
    const Dataset& data, std::span<const std::uint32_t> indices, double tol,
    int max_iter, std::uint64_t seed) {
  if (indices.empty())
    throw std::invalid_argument("estimate_spectral_norm_subset: empty subset");
  if (!(tol > 0.0))
    throw std::invalid_argument("estimate_spectral_norm_subset: tol > 0");
  return power_iteration(data, indices, tol, max_iter, seed);
}

SubmatrixCheck submatrix_lemma_check(const Dataset& data, std::size_t K,
                                     std::size_t trials, std::uint64_t seed) {
  if (K == 0 || trials == 0)
    throw std::invalid_argument("submatrix_lemma_check: K and trials >= 1");

  SubmatrixCheck out;
  auto full = estimate_spectral_norm(data, 1e-8, 4000, derive_seed(seed, 0));
  out.rho_sq = full.rho_sq;
  out.bound = 5.0 * full.rho_sq;
  out.precondition_threshold =
      full.rho_sq > 0.0
          ? 4.0 / (3.0 * full.rho_sq) * std::log(double(data.d))
          : std::numeric_limits<double>::infinity();
  out.precondition_met = double(K) > out.precondition_threshold;

  if (K == data.size()) {
    // the full set, sampled without randomness: the ratio is rho^2 itself
    out.mean_ratio = full.rho_sq;
    out.holds = out.mean_ratio <= out.bound;
    return out;
  }

  RngStream draw(seed, 1);
  std::vector<std::uint32_t> subset(K);
  double acc = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& ix : subset)
      ix = static_cast<std::uint32_t>(draw.uniform_index(data.size()));
    auto est = estimate_spectral_norm_subset(data, subset, 1e-8, 4000,
                                             derive_seed(seed, 100 + t));
    acc += est.rho_sq;  // sigma_1(Q_K)/K == sigma_1((1/K) sum x x^T)
  }
  out.mean_ratio = acc / double(trials);
  out.holds = out.mean_ratio <= out.bound;
  return out;
}

}  // namespace dsgd
