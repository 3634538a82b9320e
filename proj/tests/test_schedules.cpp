#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dsgd/rng.hpp"
#include "dsgd/schedules.hpp"

using namespace dsgd;

namespace {

MixingMatrix cycle4() { return max_degree_weights(k_regular_graph(4, 2)); }

Eigen::MatrixXd to_eigen(const std::vector<double>& a, int m) {
  Eigen::MatrixXd out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = a[std::size_t(i) * m + j];
  return out;
}

}  // namespace

TEST_CASE("constant schedule always communicates") {
  Schedule s = Schedule::constant(cycle4());
  RngStream rng(1);
  for (std::int64_t t = 1; t <= 100; ++t) CHECK(s.communicates_at(t, rng));
}

TEST_CASE("iid bernoulli degenerate and invalid parameters") {
  Schedule s = Schedule::iid_bernoulli(cycle4(), 1.0);
  RngStream rng(1);
  for (std::int64_t t = 1; t <= 100; ++t) CHECK(s.communicates_at(t, rng));

  CHECK_THROWS_AS(Schedule::iid_bernoulli(cycle4(), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(Schedule::iid_bernoulli(cycle4(), 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(Schedule::minibatch_periodic(cycle4(), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(Schedule::power_law(cycle4(), 0.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("power law clamps the probability at 1") {
  Schedule s = Schedule::power_law(cycle4(), 1.0, 0.5);
  // C t^-p = 1 at t = 1: communicates with probability 1
  RngStream rng(3);
  CHECK(s.communicates_at(1, rng));

  Schedule s2 = Schedule::power_law(cycle4(), 3.0, 0.5);
  RngStream rng2(4);
  for (int rep = 0; rep < 50; ++rep) {
    CHECK(s2.communicates_at(1, rng2));  // 3 t^-0.5 clamped
    CHECK(s2.communicates_at(4, rng2));
  }
  CHECK_THROWS_AS(s2.communicates_at(0, rng2), std::invalid_argument);
}

TEST_CASE("empirical communication frequency within 3 sigma") {
  const double nu = 0.1;
  const std::int64_t T = 100000;
  Schedule s = Schedule::iid_bernoulli(cycle4(), nu);
  RngStream rng(12);
  std::int64_t count = 0;
  for (std::int64_t t = 1; t <= T; ++t) count += s.communicates_at(t, rng);
  double sigma = std::sqrt(T * nu * (1 - nu));
  CHECK(std::fabs(double(count) - nu * T) <= 3.0 * sigma);
}

TEST_CASE("identical seeds give identical realizations") {
  Schedule s = Schedule::iid_bernoulli(cycle4(), 0.3);
  RngStream a(9), b(9);
  for (std::int64_t t = 1; t <= 1000; ++t)
    CHECK(s.communicates_at(t, a) == s.communicates_at(t, b));
}

TEST_CASE("expected square closed forms") {
  MixingMatrix p = cycle4();
  const int m = 4;

  {  // nu = 1 reduces to P^2
    Schedule s = Schedule::iid_bernoulli(p, 1.0);
    Eigen::MatrixXd e = to_eigen(s.expected_square(), m);
    Eigen::MatrixXd p2 = to_eigen(p.dense(), m) * to_eigen(p.dense(), m);
    CHECK((e - p2).norm() < 1e-14);
  }
  {  // projector: P = (1/m) 1 1^T, E = 0.5 I + 0.5 P
    MixingMatrix proj = uniform_neighbor_weights(complete_graph(m));
    Schedule s = Schedule::iid_bernoulli(proj, 0.5);
    Eigen::MatrixXd e = to_eigen(s.expected_square(), m);
    Eigen::MatrixXd expect = 0.5 * Eigen::MatrixXd::Identity(m, m) +
                             0.5 * to_eigen(proj.dense(), m);
    CHECK((e - expect).norm() < 1e-14);
  }
  {  // generic nu against a Monte-Carlo average of P(t)^2
    const double nu = 0.35;
    Schedule s = Schedule::iid_bernoulli(p, nu);
    Eigen::MatrixXd closed = to_eigen(s.expected_square(), m);

    Eigen::MatrixXd p2 = to_eigen(p.dense(), m) * to_eigen(p.dense(), m);
    Eigen::MatrixXd mc = Eigen::MatrixXd::Zero(m, m);
    RngStream rng(77);
    const int draws = 100000;
    for (int it = 0; it < draws; ++it)
      mc += (rng.uniform() < nu) ? p2 : Eigen::MatrixXd::Identity(m, m);
    mc /= draws;
    CHECK((closed - mc).cwiseAbs().maxCoeff() < 1e-2);
  }

  Schedule pl = Schedule::power_law(p, 1.0, 0.5);
  CHECK_THROWS_AS(pl.expected_square(), unsupported_schedule);
  Schedule mb = Schedule::minibatch_periodic(p, 8);
  CHECK_THROWS_AS(mb.expected_square(), unsupported_schedule);
}

TEST_CASE("lambda2 of the expected square") {
  MixingMatrix p = cycle4();

  {  // constant: lambda2(P^2) = max(lambda2^2, lambda_min^2) = 1/9 for C4
    Schedule s = Schedule::constant(p);
    CHECK(lambda2_of_expected_square(s) ==
          doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  }
  {  // lambda2((1-nu) I + nu P^2) = 1 - nu + nu/9
    const double nu = 0.25;
    Schedule s = Schedule::iid_bernoulli(p, nu);
    CHECK(lambda2_of_expected_square(s) ==
          doctest::Approx(1.0 - nu + nu / 9.0).epsilon(1e-12));
  }
}

TEST_CASE("schedule specs parse from JSON") {
  ScheduleSpec c = parse_schedule_json(R"({"type":"constant"})");
  CHECK(c.type == "constant");
  ScheduleSpec i = parse_schedule_json(R"({"type":"iid","nu":0.1})");
  CHECK(i.nu == 0.1);
  ScheduleSpec mbs = parse_schedule_json(R"({"type":"minibatch","batch":128})");
  CHECK(mbs.batch == 128);
  ScheduleSpec plw = parse_schedule_json(R"({"type":"powerlaw","C":1.0,"p":0.5})");
  CHECK(plw.c == 1.0);
  CHECK(plw.p == 0.5);
  CHECK_THROWS(parse_schedule_json(R"({"type":"bogus"})"));

  Schedule s = build_schedule(i, cycle4());
  CHECK(s.kind() == Schedule::Kind::iid_bernoulli);
  CHECK(s.nu() == 0.1);
}
