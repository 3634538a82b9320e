#pragma once

// Reference optimum for measuring J(w_hat) - J(w*).  Squared loss is solved
// to a gradient-norm certificate (gap <= ||grad||^2 / (2 mu)); the hinge
// gets a best-effort floor from long single-node runs, flagged as such.

#include <cstdint>
#include <string>
#include <vector>

#include "dsgd/dataset.hpp"
#include "dsgd/objective.hpp"

namespace dsgd {

struct ReferenceOptimum {
  std::vector<double> w;
  double j_star = 0.0;
  std::string method;
  double certified_gap = 0.0;  // strong-convexity certificate (squared loss)
  bool floor = false;          // hinge: j_star is a floor, not a certificate
};

struct ReferenceOptions {
  double grad_tol = 1e-9;
  std::int64_t max_iter = 2000000;
  std::int64_t floor_T = 10000000;  // hinge floor run length
  int floor_seeds = 5;
  std::uint64_t seed = 17;
};

ReferenceOptimum reference_optimum(const Dataset& data, const LossSpec& loss,
                                   double mu,
                                   const ReferenceOptions& opts = {});

}  // namespace dsgd
