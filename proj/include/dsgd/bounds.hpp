#pragma once

// Closed-form suboptimality and network-error bounds, evaluated as
// diagnostics to overlay against measured traces.  Constants are the ones in
// the theorem statements (100, 200*sqrt(5)), not intermediate ones; bounds
// never gate a run, failed preconditions are only reported.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dsgd {

struct BoundInputs {
  int m = 1;
  std::int64_t n = 1;  // samples per node
  int d = 1;
  std::int64_t T = 1;
  double mu = 1.0;
  double lipschitz = 1.0;
  double rho_sq = 1.0;
  double lambda2 = 0.0;  // of P (thm 1, 3) or of E[P^2(t)] (thm 2)
  std::optional<double> nu;

  // the mixing constant appears as (1/2) log(1/lambda2) in the network
  // lemma and as log(1/lambda2) in the final substitution; both accessors
  // exist, the evaluators use 1 - sqrt(lambda2) directly as printed
  double half_log_inv_lambda2() const { return 0.5 * std::log(1.0 / lambda2); }
  double log_inv_lambda2() const { return std::log(1.0 / lambda2); }
};

struct Precondition {
  std::string name;
  double required = 0.0;  // threshold the actual value must exceed
  double actual = 0.0;
  bool ok = false;
};

struct BoundReport {
  double value = 0.0;
  std::vector<Precondition> preconditions;
  std::string formula_id;
  bool guaranteed = false;  // all preconditions hold
  std::string note;         // set when not guaranteed / degenerate
};

// (1/m + 100 sqrt(m rho^2) log T / (1 - sqrt(lambda2))) * (L^2/mu) * (log T / T)
BoundReport theorem1_bound(const BoundInputs& in);
// same shape with lambda2 = lambda2(E[P^2(t)])
BoundReport theorem2_bound(const BoundInputs& in);
// (1/m + 200 sqrt(5) sqrt(m rho^4) log(nu T) / (1 - sqrt(lambda2)))
//   * (L^2/mu) * (log(nu T) / T); requires in.nu
BoundReport theorem3_bound(const BoundInputs& in);

// (2L/mu) * (sqrt(m)/b) * log(2 b e t^2) / t with b = (1/2) log(1/lambda2);
// lambda2 == 0 returns 0 (instant mixing).
double network_error_bound(std::int64_t t, int m, double lipschitz, double mu,
                           double lambda2);

// Remark-1 cases: (a) m <= rho^(-2/3), (b) up to rho^(-2), (c) beyond.
enum class Regime { a, b, c };
Regime regime_classify(int m, double rho_sq);

}  // namespace dsgd
