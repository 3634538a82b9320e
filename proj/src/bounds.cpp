#include "dsgd/bounds.hpp"

#include <limits>
#include <stdexcept>

namespace dsgd {

namespace {

constexpr double kE = 2.718281828459045235360287471353;

void validate_common(const BoundInputs& in) {
  if (in.m < 1 || in.n < 1 || in.d < 1 || in.T < 1)
    throw std::invalid_argument("bounds: m, n, d, T must be >= 1");
  if (!(in.mu > 0.0) || !(in.lipschitz > 0.0))
    throw std::invalid_argument("bounds: mu and L must be positive");
  if (!(in.rho_sq > 0.0) || in.rho_sq > 1.0 + 1e-12)
    throw std::invalid_argument("bounds: rho_sq must lie in (0, 1]");
  if (in.lambda2 < 0.0)
    throw std::invalid_argument(
        "bounds: lambda2 < 0 (constructions here keep lambda2 >= 0)");
  if (in.lambda2 > 1.0)
    throw std::invalid_argument("bounds: lambda2 must lie in [0, 1]");
}

void push(BoundReport& rep, std::string name, double required,
          double actual) {
  bool ok = actual > required;
  rep.preconditions.push_back({std::move(name), required, actual, ok});
}

double sample_size_threshold(const BoundInputs& in) {
  return 4.0 / (3.0 * in.rho_sq) * std::log(double(in.d));
}

void finish(BoundReport& rep, const BoundInputs& in) {
  rep.guaranteed = true;
  for (const auto& pc : rep.preconditions) rep.guaranteed &= pc.ok;
  if (!rep.guaranteed) rep.note = "bound not guaranteed by the paper";
  if (in.lambda2 == 0.0)
    rep.note = "single-node/complete-graph regime; theorem condition "
               "degenerate (lambda2 = 0)";
}

}  // namespace

BoundReport theorem1_bound(const BoundInputs& in) {
  validate_common(in);
  BoundReport rep;
  rep.formula_id = "thm1-constant-P";

  const double log_t = std::log(double(in.T));
  const double log_inv =
      in.lambda2 > 0.0 ? std::log(1.0 / in.lambda2)
                       : std::numeric_limits<double>::infinity();
  const double rho = std::sqrt(in.rho_sq);

  push(rep, "n > (4/(3 rho^2)) log d", sample_size_threshold(in),
       double(in.n));
  push(rep, "T > 2e log(1/sqrt(lambda2))", 2.0 * kE * 0.5 * log_inv,
       double(in.T));
  double req_ratio = std::max(sample_size_threshold(in),
                              std::pow(8.0 / 5.0, 0.25) *
                                  std::sqrt(double(in.m) / rho) / log_inv);
  push(rep, "T/log T > max(sampling, mixing)", req_ratio,
       in.T > 1 ? double(in.T) / log_t
                : std::numeric_limits<double>::infinity());
  if (in.lambda2 == 0.0)
    rep.preconditions.push_back(
        {"lambda2 > 0 (m >= 2, non-degenerate mixing)", 0.0, in.lambda2,
         false});

  const double denom = 1.0 - std::sqrt(in.lambda2);
  rep.value = (1.0 / in.m +
               100.0 * std::sqrt(in.m * in.rho_sq) * log_t / denom) *
              (in.lipschitz * in.lipschitz / in.mu) * (log_t / double(in.T));
  finish(rep, in);
  return rep;
}

BoundReport theorem2_bound(const BoundInputs& in) {
  validate_common(in);
  BoundReport rep;
  rep.formula_id = "thm2-iid-P(t)";

  const double log_t = std::log(double(in.T));
  const double log_inv =
      in.lambda2 > 0.0 ? std::log(1.0 / in.lambda2)
                       : std::numeric_limits<double>::infinity();

  push(rep, "n > (4/(3 rho^2)) log d", sample_size_threshold(in),
       double(in.n));
  push(rep, "T > 2e log(1/sqrt(lambda2(E[P^2])))", 2.0 * kE * 0.5 * log_inv,
       double(in.T));
  double req_ratio =
      std::max(sample_size_threshold(in),
               std::sqrt(8.0 / 5.0) * std::sqrt(double(in.m) / in.rho_sq) /
                   log_inv);
  push(rep, "T/log T > max(sampling, mixing)", req_ratio,
       in.T > 1 ? double(in.T) / log_t
                : std::numeric_limits<double>::infinity());
  if (in.lambda2 == 0.0)
    rep.preconditions.push_back(
        {"lambda2(E[P^2]) > 0 (non-degenerate mixing)", 0.0, in.lambda2,
         false});

  const double denom = 1.0 - std::sqrt(in.lambda2);
  rep.value = (1.0 / in.m +
               100.0 * std::sqrt(in.m * in.rho_sq) * log_t / denom) *
              (in.lipschitz * in.lipschitz / in.mu) * (log_t / double(in.T));
  finish(rep, in);
  return rep;
}

BoundReport theorem3_bound(const BoundInputs& in) {
  validate_common(in);
  if (!in.nu || !(*in.nu > 0.0) || *in.nu > 1.0)
    throw std::invalid_argument("theorem3_bound: nu in (0, 1] required");
  const double nu = *in.nu;

  BoundReport rep;
  rep.formula_id = "thm3-minibatch";

  const double log_nu_t = std::log(nu * double(in.T));
  const double log_inv =
      in.lambda2 > 0.0 ? std::log(1.0 / in.lambda2)
                       : std::numeric_limits<double>::infinity();

  push(rep, "n > (4/(3 rho^2)) log d", sample_size_threshold(in),
       double(in.n));
  push(rep, "T > (2e/nu) log(1/sqrt(lambda2))",
       (2.0 * kE / nu) * 0.5 * log_inv, double(in.T));
  double req_ratio =
      std::max(sample_size_threshold(in) / nu,
               std::pow(8.0 / 5.0, 0.25) *
                   std::sqrt(double(in.m) / in.rho_sq) / log_inv);
  push(rep, "T/log(nu T) > max(sampling, mixing)", req_ratio,
       log_nu_t > 0.0 ? double(in.T) / log_nu_t
                      : std::numeric_limits<double>::infinity());
  push(rep, "1/nu > (4/(3 rho^2)) log d", sample_size_threshold(in),
       1.0 / nu);
  if (in.lambda2 == 0.0)
    rep.preconditions.push_back(
        {"lambda2 > 0 (non-degenerate mixing)", 0.0, in.lambda2, false});

  const double denom = 1.0 - std::sqrt(in.lambda2);
  rep.value =
      (1.0 / in.m + 200.0 * std::sqrt(5.0) *
                        std::sqrt(double(in.m)) * in.rho_sq * log_nu_t /
                        denom) *
      (in.lipschitz * in.lipschitz / in.mu) * (log_nu_t / double(in.T));
  finish(rep, in);
  return rep;
}

double network_error_bound(std::int64_t t, int m, double lipschitz, double mu,
                           double lambda2) {
  if (t < 1) throw std::invalid_argument("network_error_bound: t >= 1");
  if (m < 1) throw std::invalid_argument("network_error_bound: m >= 1");
  if (!(mu > 0.0) || !(lipschitz > 0.0))
    throw std::invalid_argument("network_error_bound: mu, L > 0");
  if (lambda2 < 0.0 || lambda2 >= 1.0)
    throw std::invalid_argument("network_error_bound: lambda2 in [0, 1)");
  if (lambda2 == 0.0) return 0.0;  // instant mixing
  const double b = 0.5 * std::log(1.0 / lambda2);
  return (2.0 * lipschitz / mu) * (std::sqrt(double(m)) / b) *
         std::log(2.0 * b * kE * double(t) * double(t)) / double(t);
}

Regime regime_classify(int m, double rho_sq) {
  if (m < 1 || !(rho_sq > 0.0) || rho_sq > 1.0 + 1e-12)
    throw std::invalid_argument("regime_classify: invalid inputs");
  // case (a) is where 1/m >= sqrt(m rho^2), i.e. m^3 rho^2 <= 1; products
  // keep the boundaries exact where rho^2 is representable
  const double md = double(m);
  if (md * md * md * rho_sq <= 1.0) return Regime::a;
  if (md * rho_sq <= 1.0) return Regime::b;
  return Regime::c;
}

}  // namespace dsgd
