#include "dsgd/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "dsgd/kernels.hpp"

namespace dsgd {

namespace {

struct RowMatrix {
  int rows = 0;
  std::size_t cols = 0;
  std::vector<double> buf;

  RowMatrix(int r, std::size_t c) : rows(r), cols(c), buf(std::size_t(r) * c) {}
  double* row(int i) { return buf.data() + std::size_t(i) * cols; }
  const double* row(int i) const { return buf.data() + std::size_t(i) * cols; }
};

class ShardSource final : public SampleSource {
 public:
  ShardSource(const Dataset& data, std::vector<std::uint32_t> indices)
      : data_(data), indices_(std::move(indices)), norms_(indices_.size()) {
    for (std::size_t k = 0; k < indices_.size(); ++k)
      norms_[k] = data_.x[indices_[k]].norm();
  }
  Sample draw(RngStream& rng) override {
    std::size_t k = rng.uniform_index(indices_.size());
    std::uint32_t ix = indices_[k];
    return {&data_.x[ix], data_.y[ix], norms_[k]};
  }

 private:
  const Dataset& data_;
  std::vector<std::uint32_t> indices_;
  std::vector<double> norms_;
};

// Runs fn(i) for i in [0, n); node updates within a round only read the
// frozen previous-round state, so per-node results do not depend on the
// thread count.
template <typename F>
void parallel_over_nodes(int n, int threads, F&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    int lo = n * t / threads;
    int hi = n * (t + 1) / threads;
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<std::int64_t> make_trace_points(const RunConfig& cfg) {
  std::vector<std::int64_t> pts;
  if (!cfg.eval_points.empty()) {
    pts = cfg.eval_points;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.front() < 1 || pts.back() > cfg.T)
      throw std::invalid_argument("eval_points must lie in [1, T]");
    return pts;
  }
  std::int64_t stride = cfg.trace_stride;
  if (stride <= 0) stride = std::max<std::int64_t>(1, cfg.T / 100);
  for (std::int64_t t = 1; t <= cfg.T; t += stride) pts.push_back(t);
  if (pts.back() != cfg.T) pts.push_back(cfg.T);
  return pts;
}

RunTrace run_core(const RunConfig& cfg,
                  std::vector<std::unique_ptr<SampleSource>>& sources,
                  const Objective* eval_obj, int batch) {
  if (cfg.m < 1) throw std::invalid_argument("run: m >= 1");
  if (cfg.T < 1) throw std::invalid_argument("run: T >= 1");
  if (!(cfg.mu > 0.0)) throw std::invalid_argument("run: mu > 0");
  if (!cfg.schedule) throw std::invalid_argument("run: schedule required");
  if (int(sources.size()) != cfg.m)
    throw std::invalid_argument("run: one sample source per node");
  const MixingMatrix& p = cfg.schedule->matrix();
  if (p.size() != cfg.m)
    throw std::invalid_argument("run: mixing matrix size != m");
  const std::size_t d =
      eval_obj ? eval_obj->data->d
               : [&] {
                   RngStream probe(cfg.seeds.sampling, 0);
                   return std::size_t(sources[0]->draw(probe).x->dim);
                 }();

  const auto t_start = std::chrono::steady_clock::now();
  const double guard =
      cfg.divergence_factor * cfg.loss.lipschitz / cfg.mu;

  RowMatrix w(cfg.m, d), w_next(cfg.m, d), polyak(cfg.m, d);
  std::fill(w.buf.begin(), w.buf.end(), 0.0);       // w_i(1) = 0
  std::fill(polyak.buf.begin(), polyak.buf.end(), 0.0);

  std::vector<RngStream> node_rng;
  node_rng.reserve(cfg.m);
  for (int i = 0; i < cfg.m; ++i)
    node_rng.emplace_back(cfg.seeds.sampling, std::uint64_t(i));
  RngStream sched_rng(cfg.seeds.schedule, 0);

  RunTrace trace;
  trace.m = cfg.m;
  trace.T = cfg.T;

  const auto points = make_trace_points(cfg);
  std::size_t next_point = 0;

  std::vector<double> node_l_obs(cfg.m, 0.0);
  std::vector<double> node_max_norm(cfg.m, 0.0);
  std::vector<std::string> node_error(cfg.m);
  std::vector<double> scratch(d);
  RowMatrix grads(cfg.debug_retain ? cfg.m : 0, d);

  std::int64_t comm_count = 0;
  std::int64_t samples_total = 0;

  auto record_row = [&](std::int64_t t) {
    TraceRow row;
    row.t = t;
    row.comm_count = comm_count;
    row.samples_total = samples_total;
    // wbar(t)
    std::fill(scratch.begin(), scratch.end(), 0.0);
    for (int i = 0; i < cfg.m; ++i)
      kern::axpy(1.0 / cfg.m, w.row(i), scratch.data(), d);
    row.norm_wbar = std::sqrt(kern::nrm2sq(scratch.data(), d));
    if (cfg.record_net_err) {
      row.net_err.resize(cfg.m);
      std::vector<double> dev(d);
      for (int i = 0; i < cfg.m; ++i) {
        kern::scale_copy(1.0, scratch.data(), dev.data(), d);
        kern::axpy(-1.0, w.row(i), dev.data(), d);
        row.net_err[i] = std::sqrt(kern::nrm2sq(dev.data(), d));
        row.max_net_err = std::max(row.max_net_err, row.net_err[i]);
      }
    }
    for (int i = 0; i < cfg.m; ++i)
      row.max_node_norm = std::max(
          row.max_node_norm, std::sqrt(kern::nrm2sq(w.row(i), d)));
    if (eval_obj && cfg.eval_objective) {
      row.j_polyak.resize(cfg.m);
      std::vector<double> what(d);
      for (int i = 0; i < cfg.m; ++i) {
        kern::scale_copy(1.0 / double(t), polyak.row(i), what.data(), d);
        row.j_polyak[i] = objective_value(*eval_obj, what);
      }
      if (cfg.record_last_objective) {
        row.j_last.resize(cfg.m);
        for (int i = 0; i < cfg.m; ++i)
          row.j_last[i] =
              objective_value(*eval_obj, std::span(w.row(i), d));
      }
    }
    trace.rows.push_back(std::move(row));
  };

  auto record_wbar = [&] {
    std::vector<double> wbar(d, 0.0);
    for (int i = 0; i < cfg.m; ++i)
      kern::axpy(1.0 / cfg.m, w.row(i), wbar.data(), d);
    trace.dbg_wbar.push_back(std::move(wbar));
  };

  for (std::int64_t t = 1; t <= cfg.T; ++t) {
    for (int i = 0; i < cfg.m; ++i)
      kern::axpy(1.0, w.row(i), polyak.row(i), d);

    if (next_point < points.size() && points[next_point] == t) {
      record_row(t);
      ++next_point;
    }
    if (cfg.debug_retain) record_wbar();

    const bool communicate =
        cfg.schedule->communicates_at(t, sched_rng) && !p.is_identity();
    const double eta = 1.0 / (cfg.mu * double(t));

    parallel_over_nodes(cfg.m, cfg.threads, [&](int i) {
      double* v = w_next.row(i);
      if (communicate) {
        const auto& support = p.row_support(i);
        kern::scale_copy(p.at(i, support[0]), w.row(support[0]), v, d);
        for (std::size_t kk = 1; kk < support.size(); ++kk)
          kern::axpy(p.at(i, support[kk]), w.row(support[kk]), v, d);
      } else {
        kern::scale_copy(1.0, w.row(i), v, d);
      }

      double* g_dbg = cfg.debug_retain ? grads.row(i) : nullptr;
      if (g_dbg) std::fill(g_dbg, g_dbg + d, 0.0);

      for (int k = 0; k < batch; ++k) {
        auto s = sources[i]->draw(node_rng[i]);
        const SparseVector& x = *s.x;
        if (x.dim != d) {  // workers must not throw across thread boundaries
          node_error[i] = "node " + std::to_string(i) +
                          ": sample dimension mismatch at round " +
                          std::to_string(t);
          return;
        }
        double z = s.y * kern::sdot(w.row(i), x.idx.data(), x.val.data(),
                                    x.nnz());
        double coef = loss_dmargin(cfg.loss, z) * s.y;
        kern::saxpy(-eta * coef / batch, x.idx.data(), x.val.data(), v,
                    x.nnz());
        node_l_obs[i] = std::max(node_l_obs[i], std::fabs(coef) * s.x_norm);
        if (g_dbg)
          kern::saxpy(coef / batch, x.idx.data(), x.val.data(), g_dbg,
                      x.nnz());
      }
      kern::axpy(-eta * cfg.mu, w.row(i), v, d);
      if (g_dbg) kern::axpy(cfg.mu, w.row(i), g_dbg, d);

      double nrm = std::sqrt(kern::nrm2sq(v, d));
      node_max_norm[i] = std::max(node_max_norm[i], nrm);
      if (!std::isfinite(nrm) || nrm > guard)
        node_error[i] = "node " + std::to_string(i) + " diverged at round " +
                        std::to_string(t) + " (||w|| = " +
                        std::to_string(nrm) + ")";
    });

    for (int i = 0; i < cfg.m; ++i)
      if (!node_error[i].empty()) throw std::runtime_error(node_error[i]);

    if (cfg.debug_retain) {
      std::vector<double> gbar(d, 0.0);
      for (int i = 0; i < cfg.m; ++i)
        kern::axpy(1.0 / cfg.m, grads.row(i), gbar.data(), d);
      trace.dbg_mean_grad.push_back(std::move(gbar));
      trace.dbg_eta.push_back(eta);
    }

    if (communicate) ++comm_count;
    samples_total += std::int64_t(cfg.m) * batch;
    std::swap(w.buf, w_next.buf);
  }
  if (cfg.debug_retain) record_wbar();  // wbar(T+1)

  trace.comm_count = comm_count;
  trace.samples_total = samples_total;
  trace.w_hat.resize(cfg.m);
  for (int i = 0; i < cfg.m; ++i) {
    trace.w_hat[i].resize(d);
    kern::scale_copy(1.0 / double(cfg.T), polyak.row(i),
                     trace.w_hat[i].data(), d);
  }
  if (eval_obj && cfg.eval_objective) {
    trace.j_hat_final.resize(cfg.m);
    for (int i = 0; i < cfg.m; ++i)
      trace.j_hat_final[i] = objective_value(*eval_obj, trace.w_hat[i]);
  }
  for (int i = 0; i < cfg.m; ++i) {
    trace.l_observed = std::max(trace.l_observed, node_l_obs[i]);
    trace.max_iterate_norm = std::max(trace.max_iterate_norm,
                                      node_max_norm[i]);
  }
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    t_start)
          .count();
  return trace;
}

std::vector<std::unique_ptr<SampleSource>> shard_sources(
    const Dataset& data, const Shards& shards) {
  std::vector<std::unique_ptr<SampleSource>> out;
  out.reserve(shards.m);
  for (std::uint32_t i = 0; i < shards.m; ++i)
    out.push_back(std::make_unique<ShardSource>(data, shards.at(i)));
  return out;
}

}  // namespace

std::unique_ptr<SampleSource> make_shard_source(const Dataset& data,
                                                const Shards& shards,
                                                std::uint32_t node) {
  return std::make_unique<ShardSource>(data, shards.at(node));
}

RunTrace run(const RunConfig& cfg, const Dataset& data, const Shards& shards) {
  if (cfg.schedule &&
      cfg.schedule->kind() == Schedule::Kind::minibatch_periodic)
    throw std::invalid_argument(
        "run: mini-batch schedules go through run_minibatch");
  if (int(shards.m) != cfg.m)
    throw std::invalid_argument("run: shards do not match m");
  auto sources = shard_sources(data, shards);
  Objective obj{cfg.loss, cfg.mu, &data, nullptr};
  return run_core(cfg, sources, &obj, 1);
}

RunTrace run_minibatch(const RunConfig& cfg, const Dataset& data,
                       const Shards& shards) {
  if (!cfg.schedule ||
      cfg.schedule->kind() != Schedule::Kind::minibatch_periodic)
    throw std::invalid_argument(
        "run_minibatch: schedule must be minibatch_periodic");
  if (int(shards.m) != cfg.m)
    throw std::invalid_argument("run_minibatch: shards do not match m");
  auto sources = shard_sources(data, shards);
  Objective obj{cfg.loss, cfg.mu, &data, nullptr};
  return run_core(cfg, sources, &obj, cfg.schedule->batch());
}

RunTrace run_with_sources(const RunConfig& cfg,
                          std::vector<std::unique_ptr<SampleSource>>& sources,
                          const Objective* eval_obj) {
  int batch = 1;
  if (cfg.schedule &&
      cfg.schedule->kind() == Schedule::Kind::minibatch_periodic)
    batch = cfg.schedule->batch();
  return run_core(cfg, sources, eval_obj, batch);
}

double average_iterate_check(const RunTrace& trace) {
  if (trace.dbg_wbar.size() != std::size_t(trace.T) + 1 ||
      trace.dbg_mean_grad.size() != std::size_t(trace.T))
    throw std::invalid_argument(
        "average_iterate_check: run was not executed with debug_retain");
  const std::size_t d = trace.dbg_wbar[0].size();
  std::vector<double> pred(d);
  double worst = 0.0;
  for (std::int64_t t = 0; t < trace.T; ++t) {
    kern::scale_copy(1.0, trace.dbg_wbar[t].data(), pred.data(), d);
    kern::axpy(-trace.dbg_eta[t], trace.dbg_mean_grad[t].data(), pred.data(),
               d);
    kern::axpy(-1.0, trace.dbg_wbar[t + 1].data(), pred.data(), d);
    double dev = std::sqrt(kern::nrm2sq(pred.data(), d));
    double scale =
        1.0 + std::sqrt(kern::nrm2sq(trace.dbg_wbar[t].data(), d));
    worst = std::max(worst, dev / scale);
  }
  return worst;
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << "t,comm_count,samples_total,node,J_polyak,net_err,norm_wbar\n";
  char buf[128];
  for (const TraceRow& row : trace.rows) {
    for (int i = 0; i < trace.m; ++i) {
      double j = row.j_polyak.empty() ? std::nan("") : row.j_polyak[i];
      double ne = row.net_err.empty() ? std::nan("") : row.net_err[i];
      std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%d,%.17g,%.17g,%.17g\n",
                    static_cast<long long>(row.t),
                    static_cast<long long>(row.comm_count),
                    static_cast<long long>(row.samples_total), i, j, ne,
                    row.norm_wbar);
      out << buf;
    }
  }
}

}  // namespace dsgd
