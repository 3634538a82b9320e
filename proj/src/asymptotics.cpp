#include "dsgd/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "dsgd/eig.hpp"
#include "dsgd/kernels.hpp"
#include "dsgd/reference.hpp"
#include "dsgd/rng.hpp"
#include "dsgd/spectral.hpp"

namespace dsgd {

namespace {

void require_smooth(const Objective& obj, std::size_t dim) {
  if (obj.loss.kind != LossKind::squared)
    throw std::invalid_argument(
        "asymptotics: the loss must be twice differentiable (squared); the "
        "hinge does not satisfy the smoothness hypothesis");
  if (dim > kAsymptoticMaxDim)
    throw std::invalid_argument(
        "asymptotics: dense diagnostics are restricted to d <= " +
        std::to_string(kAsymptoticMaxDim));
}

void accumulate_outer(std::vector<double>& acc, const std::vector<double>& g,
                      std::size_t d, double weight) {
  for (std::size_t r = 0; r < d; ++r) {
    if (g[r] == 0.0) continue;
    kern::axpy(weight * g[r], g.data(), acc.data() + r * d, d);
  }
}

}  // namespace

std::vector<double> hessian_at(const Objective& obj,
                               std::span<const double> w) {
  const Dataset& data = *obj.data;
  require_smooth(obj, data.d);
  if (w.size() != data.d)
    throw std::invalid_argument("hessian_at: dimension mismatch");
  const std::size_t d = data.d;
  std::vector<double> h(d * d, 0.0);
  const std::size_t n = obj.count();
  const double inv_n = 1.0 / double(n);
  for (std::size_t k = 0; k < n; ++k) {
    const SparseVector& x = data.x[obj.example(k)];
    for (std::size_t a = 0; a < x.nnz(); ++a)
      for (std::size_t b = 0; b < x.nnz(); ++b)
        h[std::size_t(x.idx[a]) * d + x.idx[b]] +=
            inv_n * x.val[a] * x.val[b];
  }
  for (std::size_t i = 0; i < d; ++i) h[i * d + i] += obj.mu;
  return h;
}

NoiseCovariance noise_covariance_at(const Objective& obj,
                                    std::span<const double> w, bool exact,
                                    std::size_t mc_draws,
                                    std::uint64_t seed) {
  const Dataset& data = *obj.data;
  require_smooth(obj, data.d);
  if (w.size() != data.d)
    throw std::invalid_argument("noise_covariance_at: dimension mismatch");
  const std::size_t d = data.d;
  const std::size_t n = obj.count();

  std::vector<double> second(d * d, 0.0);
  std::vector<double> mean(d, 0.0);
  std::vector<double> g(d);

  auto add_example = [&](std::uint32_t ix, double weight) {
    const SparseVector& x = data.x[ix];
    SubgradParts parts = stochastic_subgradient(obj, w, x, data.y[ix]);
    std::fill(g.begin(), g.end(), 0.0);
    kern::axpy(parts.reg_coef, w.data(), g.data(), d);
    kern::saxpy(parts.data_coef, x.idx.data(), x.val.data(), g.data(),
                x.nnz());
    accumulate_outer(second, g, d, weight);
    kern::axpy(weight, g.data(), mean.data(), d);
  };

  if (exact) {
    for (std::size_t k = 0; k < n; ++k) add_example(obj.example(k), 1.0 / n);
  } else {
    if (mc_draws == 0)
      throw std::invalid_argument("noise_covariance_at: mc_draws >= 1");
    RngStream rng(seed, 0);
    for (std::size_t k = 0; k < mc_draws; ++k)
      add_example(obj.example(rng.uniform_index(n)), 1.0 / double(mc_draws));
  }

  NoiseCovariance out;
  out.d = int(d);
  out.c = std::move(second);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t s = 0; s < d; ++s)
      out.c[r * d + s] -= mean[r] * mean[s];
  // exact symmetrization (accumulation order differs across the diagonal)
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t s = r + 1; s < d; ++s) {
      double v = 0.5 * (out.c[r * d + s] + out.c[s * d + r]);
      out.c[r * d + s] = v;
      out.c[s * d + r] = v;
    }
  return out;
}

LyapunovSolution lyapunov_solve(const std::vector<double>& a,
                                const std::vector<double>& c, int n) {
  if (int(a.size()) != n * n || int(c.size()) != n * n)
    throw std::invalid_argument("lyapunov_solve: size mismatch");
  SymEig eig = sym_eig(a, n);
  if (eig.values.front() <= 0.0)
    throw std::invalid_argument(
        "lyapunov_solve: A must be positive definite (min eigenvalue " +
        std::to_string(eig.values.front()) + ")");

  const std::size_t nn = std::size_t(n);
  // C~ = U^T C U
  std::vector<double> tmp(nn * nn, 0.0), ct(nn * nn, 0.0);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < nn; ++k)
        s += c[i * nn + k] * eig.vectors[k * nn + j];
      tmp[i * nn + j] = s;
    }
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < nn; ++k)
        s += eig.vectors[k * nn + i] * tmp[k * nn + j];
      ct[i * nn + j] = s / (eig.values[i] + eig.values[j]);
    }
  // H = U H~ U^T
  std::vector<double> h(nn * nn, 0.0);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < nn; ++k)
        s += eig.vectors[i * nn + k] * ct[k * nn + j];
      tmp[i * nn + j] = s;
    }
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < nn; ++k)
        s += tmp[i * nn + k] * eig.vectors[j * nn + k];
      h[i * nn + j] = s;
    }

  LyapunovSolution out;
  out.d = n;
  out.h = std::move(h);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j) {
      double ah = 0.0, ha = 0.0;
      for (std::size_t k = 0; k < nn; ++k) {
        ah += a[i * nn + k] * out.h[k * nn + j];
        ha += out.h[i * nn + k] * a[k * nn + j];
      }
      double r = ah + ha - c[i * nn + j];
      num += r * r;
      den += c[i * nn + j] * c[i * nn + j];
    }
  out.residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return out;
}

double matrix_trace(const std::vector<double>& a, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[std::size_t(i) * n + i];
  return s;
}

double trace_inverse_spd(const std::vector<double>& a, int n) {
  SymEig eig = sym_eig(a, n);
  if (eig.values.front() <= 0.0)
    throw std::invalid_argument("trace_inverse_spd: matrix is singular");
  double s = 0.0;
  for (double v : eig.values) s += 1.0 / v;
  return s;
}

double asymptotic_node_bound(const MixingMatrix& p, int node, double trace_h,
                             double smoothness, double mu) {
  if (node < 0 || node >= p.size())
    throw std::invalid_argument("asymptotic_node_bound: bad node");
  double s = 0.0;
  for (int j : p.row_support(node)) s += p.at(node, j) * p.at(node, j);
  return s * trace_h * smoothness / mu;
}

double theorem6_bound(int k, double rho_sq, double lipschitz,
                      const std::vector<double>& hessian_at_opt, int d,
                      double smoothness, double mu) {
  if (k < 1) throw std::invalid_argument("theorem6_bound: k >= 1");
  const double rho = std::sqrt(rho_sq);
  return 25.0 * rho * lipschitz * lipschitz / double(k) *
         trace_inverse_spd(hessian_at_opt, d) * smoothness / mu;
}

namespace {

// Fresh draws from the synthetic Gaussian task; matches the per-point
// recipe of synth_gaussian_classification (x ~ N(0, I/d), clipped to the
// unit ball, labeled by the task hyperplane).
class GaussianTaskSource final : public SampleSource {
 public:
  GaussianTaskSource(std::uint32_t d, std::vector<double> hyperplane)
      : d_(d), w_h_(std::move(hyperplane)) {
    scratch_.dim = d;
    scratch_.idx.resize(d);
    scratch_.val.resize(d);
    for (std::uint32_t i = 0; i < d; ++i) scratch_.idx[i] = i;
  }

  Sample draw(RngStream& rng) override {
    const double inv_sqrt_d = 1.0 / std::sqrt(double(d_));
    for (auto& v : scratch_.val) v = rng.normal() * inv_sqrt_d;
    double nsq = kern::nrm2sq(scratch_.val.data(), d_);
    if (nsq > 1.0 + 1e-12) {
      kern::scal(1.0 / std::sqrt(nsq), scratch_.val.data(), d_);
      nsq = 1.0;
    }
    double margin = kern::sdot(w_h_.data(), scratch_.idx.data(),
                               scratch_.val.data(), d_);
    return {&scratch_, margin >= 0.0 ? 1.0 : -1.0, std::sqrt(nsq)};
  }

 private:
  std::uint32_t d_;
  std::vector<double> w_h_;
  SparseVector scratch_;
};

int auto_degree(int m) {
  if (m <= 1) return 0;
  if (m == 2) return 1;
  int k = std::max(2, m / 4);
  if (k % 2 == 1 && m % 2 == 1) ++k;  // m*k must be even
  return std::min(k, m - 1);
}

}  // namespace

InfiniteEmulationResult infinite_data_run(const InfiniteEmulationConfig& cfg) {
  if (cfg.m < 1) throw std::invalid_argument("infinite_data_run: m >= 1");
  if (cfg.d > kAsymptoticMaxDim)
    throw std::invalid_argument("infinite_data_run: d <= 200");

  const int k = cfg.degree >= 0 ? cfg.degree : auto_degree(cfg.m);
  Graph g = k_regular_graph(cfg.m, k);
  MixingMatrix p = uniform_neighbor_weights(g);
  Schedule sched = Schedule::constant(p);

  // the evaluation sample shares the task hyperplane with the generators
  Dataset eval = synth_gaussian_classification(cfg.n_eval, cfg.d,
                                               cfg.task_seed);
  RngStream hyper(cfg.task_seed, 0);
  std::vector<double> w_h = random_unit_vector(cfg.d, hyper);

  LossSpec loss = LossSpec::squared();
  Objective eval_obj{loss, cfg.mu, &eval, nullptr};
  ReferenceOptimum opt = reference_optimum(eval, loss, cfg.mu);

  std::vector<std::unique_ptr<SampleSource>> sources;
  sources.reserve(cfg.m);
  for (int i = 0; i < cfg.m; ++i)
    sources.push_back(std::make_unique<GaussianTaskSource>(cfg.d, w_h));

  RunConfig rc;
  rc.m = cfg.m;
  rc.T = cfg.T;
  rc.mu = cfg.mu;
  rc.loss = loss;
  rc.schedule = &sched;
  rc.seeds = {1, cfg.sampling_seed, 1};
  rc.eval_points = {cfg.T};
  rc.record_net_err = false;
  rc.threads = cfg.threads;
  RunTrace trace = run_with_sources(rc, sources, &eval_obj);

  InfiniteEmulationResult out;
  out.degree = k;
  out.j_hat = trace.j_hat_final[0];
  out.j_star = opt.j_star;
  out.gap = out.j_hat - out.j_star;
  out.t_times_gap = double(cfg.T) * out.gap;

  std::vector<double> hess = hessian_at(eval_obj, opt.w);
  NoiseCovariance noise = noise_covariance_at(eval_obj, opt.w, true);
  LyapunovSolution lyap = lyapunov_solve(hess, noise.c, int(cfg.d));
  out.lyapunov_residual = lyap.residual;
  out.trace_h = matrix_trace(lyap.h, int(cfg.d));
  out.bound_lemma =
      asymptotic_node_bound(p, 0, out.trace_h, *loss.smoothness, cfg.mu);
  if (k >= 1) {
    auto rho = estimate_spectral_norm(eval, 1e-7, 2000, cfg.task_seed);
    out.bound_theorem6 = theorem6_bound(k, rho.rho_sq, trace.l_observed, hess,
                                        int(cfg.d), *loss.smoothness, cfg.mu);
  } else {
    out.bound_theorem6 = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace dsgd
