#pragma once

// Infinite-data diagnostics for smooth losses: exact Hessians and
// gradient-noise covariances (d <= 200 so everything is dense and exact),
// the Lyapunov equation behind the asymptotic variance, and the resulting
// per-node bounds.

#include <cstdint>
#include <span>
#include <vector>

#include "dsgd/engine.hpp"
#include "dsgd/objective.hpp"
#include "dsgd/topology.hpp"

namespace dsgd {

inline constexpr int kAsymptoticMaxDim = 200;

// (1/N) sum x x^T + mu I; squared loss only (the hinge is not twice
// differentiable and is rejected).
std::vector<double> hessian_at(const Objective& obj,
                               std::span<const double> w);

struct NoiseCovariance {
  int d = 0;
  std::vector<double> c;  // row-major, symmetric PSD
};

// Covariance of the gradient noise under sampling with replacement:
// E[g g^T] - grad J grad J^T.  exact = full enumeration of the examples;
// otherwise Monte-Carlo with mc_draws.
NoiseCovariance noise_covariance_at(const Objective& obj,
                                    std::span<const double> w, bool exact,
                                    std::size_t mc_draws = 100000,
                                    std::uint64_t seed = 0);

struct LyapunovSolution {
  int d = 0;
  std::vector<double> h;
  double residual = 0.0;  // ||A H + H A - C||_F / ||C||_F
};

// Solves A H + H A = C through the eigendecomposition of A (A symmetric
// positive definite, C symmetric).
LyapunovSolution lyapunov_solve(const std::vector<double>& a,
                                const std::vector<double>& c, int n);

double matrix_trace(const std::vector<double>& a, int n);
double trace_inverse_spd(const std::vector<double>& a, int n);

// sum over the closed neighborhood of (P_ij)^2 * Tr(H) * G / mu
double asymptotic_node_bound(const MixingMatrix& p, int node, double trace_h,
                             double smoothness, double mu);

// (25 rho L^2 / k) * Tr(hessian^-1) * G / mu with rho = sqrt(rho_sq)
double theorem6_bound(int k, double rho_sq, double lipschitz,
                      const std::vector<double>& hessian_at_opt, int d,
                      double smoothness, double mu);

// Infinite-data emulation: every node resamples fresh points from the
// synthetic Gaussian task instead of a fixed shard; suboptimality is
// measured against the exact optimum of a held-out evaluation sample.
struct InfiniteEmulationConfig {
  int m = 1;
  std::int64_t T = 100000;
  double mu = 1e-2;
  std::uint32_t d = 50;
  std::size_t n_eval = 5000;
  std::uint64_t task_seed = 1;   // hyperplane + evaluation sample
  std::uint64_t sampling_seed = 2;
  int degree = -1;  // k-regular uniform weights; -1 = max(2, floor(m/4))
  int threads = 1;
};

struct InfiniteEmulationResult {
  double j_hat = 0.0;    // J(w_hat_0(T)) on the evaluation sample
  double j_star = 0.0;
  double gap = 0.0;
  double t_times_gap = 0.0;
  double lyapunov_residual = 0.0;
  double trace_h = 0.0;
  double bound_lemma = 0.0;     // per-node asymptotic bound
  double bound_theorem6 = 0.0;  // k-regular closed form
  int degree = 0;
};

InfiniteEmulationResult infinite_data_run(const InfiniteEmulationConfig& cfg);

}  // namespace dsgd
