#pragma once

// Named experiment recipes at desk scale: paired intermittent-communication
// sweeps, the three-scheme comparison at equal sample budget, diminishing
// communication, and the infinite-data emulation.  Each recipe writes trace
// CSVs plus a manifest JSON that records every config and seed.

#include <cstdint>
#include <string>
#include <vector>

namespace dsgd {

struct RecipeOptions {
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  int runs = 5;  // distinct sampling seeds per cell

  // 0 means recipe default
  int m = 0;
  std::size_t n_examples = 0;
  std::uint32_t d = 0;
  std::int64_t T = 0;
  double mu = 0.0;
  std::int64_t floor_T = 0;  // hinge-floor run length
};

// Fig. 1: IidBernoulli nu in {1, 0.1, 0.02, 0.002} on a low/high rho^2
// dataset pair (0.01 vs 0.21), hinge loss.
std::string recipe_fig1_intermittent(const RecipeOptions& opts);

// Fig. 3a: mini-batch (b = 128) vs intermittent (nu = 1/128) vs standard,
// equal total sample budget, traces keyed by samples_total.
std::string recipe_fig3a_schemes(const RecipeOptions& opts);

// Fig. 3b: power-law (C = 1, p = 0.5) vs constant communication.
std::string recipe_fig3b_diminishing(const RecipeOptions& opts);

// Fig. 2: infinite-data emulation across m in {1, 4, 16, 64}.
std::string recipe_fig2_infinite(const RecipeOptions& opts);

// Table 1: N, d, nnz, rho^2 per supplied dataset, with the paper's values
// side by side for recognized names (rcv1, covtype).  Returns the JSON text.
std::string recipe_table1_profile(const std::vector<std::string>& paths,
                                  const RecipeOptions& opts);

}  // namespace dsgd
