#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsgd/bounds.hpp"
#include "dsgd/rng.hpp"

using namespace dsgd;

namespace {

// independently coded arithmetic (factored differently on purpose)
double thm1_oracle(const BoundInputs& in) {
  const double log_t = std::log(double(in.T));
  const double mixing =
      100.0 * std::sqrt(double(in.m)) * std::sqrt(in.rho_sq) * log_t /
      (1.0 - std::sqrt(in.lambda2));
  double v = 1.0 / double(in.m) + mixing;
  v *= in.lipschitz * in.lipschitz;
  v /= in.mu;
  v *= log_t;
  v /= double(in.T);
  return v;
}

double thm3_oracle(const BoundInputs& in) {
  const double log_nt = std::log(*in.nu * double(in.T));
  const double mixing = 200.0 * std::sqrt(5.0) * std::sqrt(double(in.m)) *
                        in.rho_sq / (1.0 - std::sqrt(in.lambda2)) * log_nt;
  double v = 1.0 / double(in.m) + mixing;
  v *= (in.lipschitz / in.mu) * in.lipschitz;
  v *= log_nt / double(in.T);
  return v;
}

bool close_rel(double a, double b, double tol = 1e-12) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

BoundInputs random_valid(RngStream& rng) {
  BoundInputs in;
  in.m = 2 + int(rng.uniform_index(127));
  in.n = 100 + std::int64_t(rng.uniform_index(100000));
  in.d = 2 + int(rng.uniform_index(5000));
  in.T = 10 + std::int64_t(rng.uniform_index(1000000));
  in.mu = std::pow(10.0, -6.0 + 5.0 * rng.uniform());
  in.lipschitz = 0.5 + rng.uniform();
  in.rho_sq = 1e-4 + (1.0 - 1e-4) * rng.uniform();
  in.lambda2 = 1e-6 + 0.999 * rng.uniform();
  in.nu = 0.001 + 0.999 * rng.uniform();
  return in;
}

}  // namespace

TEST_CASE("theorem 1 value agrees with the independent arithmetic") {
  BoundInputs in;
  in.m = 16;
  in.n = 10000;
  in.d = 500;
  in.T = 100000;
  in.mu = 1e-4;
  in.lipschitz = 1.0;
  in.rho_sq = 0.01;
  in.lambda2 = 0.5;
  BoundReport rep = theorem1_bound(in);
  CHECK(close_rel(rep.value, thm1_oracle(in)));
  CHECK(rep.preconditions.size() == 3);
}

TEST_CASE("case (c): the mixing summand dominates when m = 1/rho^2") {
  BoundInputs in;
  in.m = 25;
  in.rho_sq = 1.0 / 25.0;  // sqrt(m rho^2) = 1
  in.n = 100000;
  in.d = 100;
  in.T = 100000;
  in.mu = 1e-3;
  in.lambda2 = 0.4;
  const double log_t = std::log(double(in.T));
  double mixing_summand = 100.0 * std::sqrt(in.m * in.rho_sq) * log_t /
                          (1.0 - std::sqrt(in.lambda2));
  CHECK(mixing_summand >= 1.0);
  CHECK(1.0 >= 1.0 / in.m);
  CHECK(regime_classify(in.m, in.rho_sq) == Regime::c);
}

TEST_CASE("T below the threshold flags a precondition") {
  BoundInputs in;
  in.m = 16;
  in.n = 10000;
  in.d = 47236;
  in.T = 3;  // way below every requirement
  in.mu = 1e-4;
  in.rho_sq = 0.01;
  in.lambda2 = 0.5;
  BoundReport rep = theorem1_bound(in);
  bool any_false = false;
  for (const auto& pc : rep.preconditions) any_false |= !pc.ok;
  CHECK(any_false);
  CHECK_FALSE(rep.guaranteed);
  CHECK(rep.note == "bound not guaranteed by the paper");
}

TEST_CASE("lambda2 = 0 reports the degenerate regime") {
  BoundInputs in;
  in.m = 1;
  in.n = 1000;
  in.d = 10;
  in.T = 1000;
  in.rho_sq = 0.5;
  in.lambda2 = 0.0;
  BoundReport rep = theorem1_bound(in);
  CHECK(rep.note.find("degenerate") != std::string::npos);
  CHECK(std::isfinite(rep.value));
}

TEST_CASE("theorem 2 matches theorem 1 at the same lambda2 input") {
  RngStream rng(3);
  for (int i = 0; i < 100; ++i) {
    BoundInputs in = random_valid(rng);
    CHECK(theorem2_bound(in).value == theorem1_bound(in).value);
  }
}

TEST_CASE("theorem 2 blows up as lambda2(E[P^2]) approaches 1") {
  BoundInputs in;
  in.m = 8;
  in.n = 10000;
  in.d = 100;
  in.T = 100000;
  in.mu = 1e-3;
  in.rho_sq = 0.1;
  in.lambda2 = 0.5;
  double prev = theorem2_bound(in).value;
  for (double eps : {1e-2, 1e-4, 1e-8, 1e-12}) {
    in.lambda2 = 1.0 - eps;
    double v = theorem2_bound(in).value;
    CHECK(v > prev);
    prev = v;
  }
  CHECK(prev > 1e8);
}

TEST_CASE("theorem 3 value, constant ratio, and batch precondition") {
  RngStream rng(5);
  for (int i = 0; i < 100; ++i) {
    BoundInputs in = random_valid(rng);
    CHECK(close_rel(theorem3_bound(in).value, thm3_oracle(in)));
  }

  // rho^2 = 1, nu = 1: second summands differ exactly by 2 sqrt(5)
  BoundInputs in;
  in.m = 9;
  in.n = 10000;
  in.d = 50;
  in.T = 100000;
  in.mu = 1e-2;
  in.rho_sq = 1.0;
  in.lambda2 = 0.3;
  in.nu = 1.0;
  const double log_t = std::log(double(in.T));
  double s1 = 100.0 * std::sqrt(in.m * in.rho_sq) * log_t /
              (1.0 - std::sqrt(in.lambda2));
  double s3 = 200.0 * std::sqrt(5.0) * std::sqrt(double(in.m)) * in.rho_sq *
              log_t / (1.0 - std::sqrt(in.lambda2));
  CHECK(s3 / s1 == doctest::Approx(2.0 * std::sqrt(5.0)).epsilon(1e-12));

  // the mini-batch sizing rule satisfies the 1/nu precondition
  in.rho_sq = 0.05;
  double threshold = 4.0 / (3.0 * in.rho_sq) * std::log(double(in.d));
  double batch = std::ceil(threshold) + 1.0;
  in.nu = 1.0 / batch;
  BoundReport rep = theorem3_bound(in);
  bool found = false;
  for (const auto& pc : rep.preconditions)
    if (pc.name.find("1/nu") != std::string::npos) {
      found = true;
      CHECK(pc.ok);
    }
  CHECK(found);

  BoundInputs no_nu = in;
  no_nu.nu.reset();
  CHECK_THROWS_AS(theorem3_bound(no_nu), std::invalid_argument);
}

TEST_CASE("monotone in lambda2 and rho^2") {
  RngStream rng(7);
  for (int i = 0; i < 2000; ++i) {
    BoundInputs in = random_valid(rng);
    in.lambda2 = std::min(in.lambda2, 0.999);
    in.rho_sq = std::min(in.rho_sq, 0.99);
    for (auto eval : {theorem1_bound, theorem2_bound, theorem3_bound}) {
      double base = eval(in).value;
      BoundInputs up_lam = in;
      up_lam.lambda2 += 0.5 * (1.0 - in.lambda2);
      CHECK(eval(up_lam).value > base);
      BoundInputs up_rho = in;
      up_rho.rho_sq += 0.5 * (1.0 - in.rho_sq);
      CHECK(eval(up_rho).value > base);
    }
  }
}

TEST_CASE("rate shape: value * T / log^2 T is bounded and settles") {
  BoundInputs in;
  in.m = 16;
  in.n = 100000;
  in.d = 500;
  in.mu = 1e-3;
  in.rho_sq = 0.05;
  in.lambda2 = 0.5;
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t T : {1000, 10000, 100000, 1000000, 10000000}) {
    in.T = T;
    double log_t = std::log(double(T));
    double normalized = theorem1_bound(in).value * double(T) / (log_t * log_t);
    CHECK(normalized <= prev);
    CHECK(normalized > 0.0);
    prev = normalized;
  }
}

TEST_CASE("network error bound shape") {
  // doubling t at fixed parameters shrinks the bound by roughly half
  for (double lam : {0.1, 0.5, 0.9}) {
    for (std::int64_t t : {100, 1000, 10000}) {
      double r = network_error_bound(2 * t, 16, 1.0, 1e-3, lam) /
                 network_error_bound(t, 16, 1.0, 1e-3, lam);
      CHECK(r > 0.5);
      CHECK(r < 0.62);
    }
  }
  CHECK(network_error_bound(100, 4, 1.0, 0.1, 0.0) == 0.0);
  CHECK(network_error_bound(100, 4, 1.0, 0.1, 1.0 - 1e-12) > 1e6);
  CHECK_THROWS_AS(network_error_bound(0, 4, 1.0, 0.1, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(network_error_bound(100, 4, 1.0, 0.1, 1.0),
                  std::invalid_argument);
}

TEST_CASE("regime classification") {
  CHECK(regime_classify(4, 0.01) == Regime::a);
  CHECK(regime_classify(64, 0.01) == Regime::b);
  CHECK(regime_classify(64, 0.21) == Regime::c);

  // boundaries: left-closed case (a); case (b) is (rho^-2/3, rho^-2]
  CHECK(regime_classify(10, 1e-3) == Regime::a);   // boundary m = 10
  CHECK(regime_classify(11, 1e-3) == Regime::b);
  CHECK(regime_classify(1000, 1e-3) == Regime::b);  // boundary m = 1000
  CHECK(regime_classify(1001, 1e-3) == Regime::c);

  CHECK_THROWS_AS(regime_classify(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(regime_classify(4, 0.0), std::invalid_argument);
}

TEST_CASE("input validation and accessors") {
  BoundInputs in;
  in.m = 4;
  in.n = 100;
  in.d = 10;
  in.T = 100;
  in.rho_sq = 0.5;
  in.lambda2 = 0.25;
  CHECK(in.half_log_inv_lambda2() ==
        doctest::Approx(0.5 * std::log(4.0)).epsilon(1e-15));
  CHECK(in.log_inv_lambda2() == doctest::Approx(std::log(4.0)).epsilon(1e-15));

  BoundInputs bad = in;
  bad.rho_sq = 0.0;
  CHECK_THROWS_AS(theorem1_bound(bad), std::invalid_argument);
  bad = in;
  bad.lambda2 = -0.1;
  CHECK_THROWS_AS(theorem1_bound(bad), std::invalid_argument);
  bad = in;
  bad.mu = 0.0;
  CHECK_THROWS_AS(theorem1_bound(bad), std::invalid_argument);
}
