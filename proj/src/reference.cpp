#include "dsgd/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dsgd/engine.hpp"
#include "dsgd/kernels.hpp"
#include "dsgd/spectral.hpp"

namespace dsgd {

namespace {

// Full-gradient descent with the strong-convexity step 1/(sigma1 + mu);
// contraction factor 1 - mu/(sigma1 + mu) per iteration.
ReferenceOptimum solve_squared(const Dataset& data, const LossSpec& loss,
                               double mu, const ReferenceOptions& opts) {
  Objective obj{loss, mu, &data, nullptr};
  auto cov = estimate_spectral_norm(data, 1e-8, 4000, opts.seed);
  const double step = 1.0 / (cov.rho_sq + mu);

  std::vector<double> w(data.d, 0.0);
  double grad_norm = 0.0;
  std::int64_t it = 0;
  for (; it < opts.max_iter; ++it) {
    std::vector<double> g = full_gradient(obj, w);
    grad_norm = std::sqrt(kern::nrm2sq(g.data(), g.size()));
    if (!std::isfinite(grad_norm))
      throw std::runtime_error("reference_optimum: diverged");
    if (grad_norm <= opts.grad_tol) break;
    kern::axpy(-step, g.data(), w.data(), w.size());
  }
  if (grad_norm > opts.grad_tol)
    throw std::runtime_error(
        "reference_optimum: gradient descent did not reach tolerance");

  ReferenceOptimum out;
  out.j_star = objective_value(obj, w);
  out.w = std::move(w);
  out.method = "full-gradient descent, step 1/(sigma1+mu), " +
               std::to_string(it) + " iterations";
  out.certified_gap = grad_norm * grad_norm / (2.0 * mu);
  out.floor = false;
  return out;
}

ReferenceOptimum solve_hinge_floor(const Dataset& data, const LossSpec& loss,
                                   double mu, const ReferenceOptions& opts) {
  Objective obj{loss, mu, &data, nullptr};
  Graph g = complete_graph(1);
  Schedule sched = Schedule::constant(max_degree_weights(g));

  ReferenceOptimum out;
  out.j_star = std::numeric_limits<double>::infinity();
  out.floor = true;
  for (int s = 0; s < opts.floor_seeds; ++s) {
    RunConfig cfg;
    cfg.m = 1;
    cfg.T = opts.floor_T;
    cfg.mu = mu;
    cfg.loss = loss;
    cfg.schedule = &sched;
    cfg.seeds = {derive_seed(opts.seed, 2 * s), derive_seed(opts.seed, 2 * s + 1),
                 1};
    cfg.eval_points = {cfg.T};
    cfg.record_net_err = false;
    Shards shards = split_uniform(data, 1, cfg.seeds.split);
    RunTrace trace = run(cfg, data, shards);
    if (trace.j_hat_final[0] < out.j_star) {
      out.j_star = trace.j_hat_final[0];
      out.w = trace.w_hat[0];
    }
  }
  out.method = "single-node Polyak floor, T = " +
               std::to_string(opts.floor_T) + ", best of " +
               std::to_string(opts.floor_seeds) + " seeds";
  out.certified_gap = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace

ReferenceOptimum reference_optimum(const Dataset& data, const LossSpec& loss,
                                   double mu, const ReferenceOptions& opts) {
  if (data.size() == 0)
    throw std::invalid_argument("reference_optimum: empty dataset");
  if (!(mu > 0.0)) throw std::invalid_argument("reference_optimum: mu > 0");
  if (loss.kind == LossKind::squared) return solve_squared(data, loss, mu, opts);
  return solve_hinge_floor(data, loss, mu, opts);
}

}  // namespace dsgd
