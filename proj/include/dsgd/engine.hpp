#pragma once

// Round-synchronous simulator for consensus stochastic subgradient descent:
// per round each node mixes its iterate with its neighbors' (doubly
// stochastic weights), samples from its local shard, and takes a step with
// eta_t = 1/(mu t).  The mini-batch variant aggregates b subgradients at the
// current iterate per communication round.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "dsgd/dataset.hpp"
#include "dsgd/objective.hpp"
#include "dsgd/schedules.hpp"

namespace dsgd {

struct Seeds {
  std::uint64_t split = 1;
  std::uint64_t sampling = 2;
  std::uint64_t schedule = 3;
};

struct RunConfig {
  int m = 1;
  std::int64_t T = 1;
  double mu = 1.0;
  LossSpec loss = LossSpec::hinge();
  const Schedule* schedule = nullptr;
  Seeds seeds;

  // trace rows: explicit eval_points win over the stride; stride 0 picks
  // ~100 evenly spaced rows.  Row t describes the iterate entering round t,
  // i.e. w(t) and the Polyak average over rounds 1..t.
  std::vector<std::int64_t> eval_points;
  std::int64_t trace_stride = 0;
  bool eval_objective = true;        // J(w_hat_i(t)) at trace rows
  bool record_last_objective = false;  // J(w_i(t)) as well
  bool record_net_err = true;
  bool debug_retain = false;  // keep per-round averages for identity checks

  int threads = 1;
  double divergence_factor = 1e3;  // abort when ||w_i|| > factor * L / mu
};

struct TraceRow {
  std::int64_t t = 0;
  std::int64_t comm_count = 0;     // communications in rounds < t
  std::int64_t samples_total = 0;  // subgradient samples in rounds < t
  std::vector<double> j_polyak;    // per node; empty if not evaluated
  std::vector<double> j_last;
  std::vector<double> net_err;     // per node ||wbar(t) - w_i(t)||
  double max_net_err = 0.0;
  double max_node_norm = 0.0;
  double norm_wbar = 0.0;
};

struct RunTrace {
  int m = 0;
  std::int64_t T = 0;
  std::vector<TraceRow> rows;

  std::vector<std::vector<double>> w_hat;  // Polyak outputs, per node
  std::vector<double> j_hat_final;         // J(w_hat_i(T)) if evaluated

  std::int64_t comm_count = 0;
  std::int64_t samples_total = 0;
  double wall_seconds = 0.0;
  double l_observed = 0.0;  // max |dloss/dmargin| * ||x|| over sampled steps
  double max_iterate_norm = 0.0;

  // debug_retain only: wbar(1..T+1), mean gradient and eta for rounds 1..T
  std::vector<std::vector<double>> dbg_wbar;
  std::vector<std::vector<double>> dbg_mean_grad;
  std::vector<double> dbg_eta;
};

class SampleSource {
 public:
  struct Sample {
    const SparseVector* x;
    double y;
    double x_norm;
  };
  virtual ~SampleSource() = default;
  // returned view stays valid until the next draw on this source
  virtual Sample draw(RngStream& rng) = 0;
};

// samples uniformly with replacement from one shard
std::unique_ptr<SampleSource> make_shard_source(const Dataset& data,
                                                const Shards& shards,
                                                std::uint32_t node);

RunTrace run(const RunConfig& cfg, const Dataset& data, const Shards& shards);
RunTrace run_minibatch(const RunConfig& cfg, const Dataset& data,
                       const Shards& shards);

// Custom per-node sources (e.g. infinite-data generators); eval_obj may be
// null when no objective evaluation is wanted.
RunTrace run_with_sources(const RunConfig& cfg,
                          std::vector<std::unique_ptr<SampleSource>>& sources,
                          const Objective* eval_obj);

// Max over rounds of ||wbar(t+1) - (wbar(t) - eta_t * mean g)|| scaled by
// 1/(1 + ||wbar(t)||); requires debug_retain.  The recursion is an algebraic
// identity whenever every P(t) is doubly stochastic.
double average_iterate_check(const RunTrace& trace);

// `t,comm_count,samples_total,node,J_polyak,net_err,norm_wbar`
void write_trace_csv(const RunTrace& trace, std::ostream& out);

}  // namespace dsgd
