#include "dsgd/schedules.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace dsgd {

Schedule Schedule::constant(MixingMatrix p) {
  return Schedule(Kind::constant, std::move(p));
}

Schedule Schedule::iid_bernoulli(MixingMatrix p, double nu) {
  if (!(nu > 0.0 && nu <= 1.0))
    throw std::invalid_argument("iid_bernoulli: nu must be in (0, 1]");
  Schedule s(Kind::iid_bernoulli, std::move(p));
  s.nu_ = nu;
  return s;
}

Schedule Schedule::minibatch_periodic(MixingMatrix p, int batch) {
  if (batch < 1)
    throw std::invalid_argument("minibatch_periodic: batch >= 1");
  Schedule s(Kind::minibatch_periodic, std::move(p));
  s.batch_ = batch;
  s.nu_ = 1.0 / double(batch);
  return s;
}

Schedule Schedule::power_law(MixingMatrix p, double c, double exponent) {
  if (!(c > 0.0) || !(exponent > 0.0))
    throw std::invalid_argument("power_law: C > 0 and p > 0 required");
  Schedule s(Kind::power_law, std::move(p));
  s.c_ = c;
  s.p_exp_ = exponent;
  return s;
}

bool Schedule::communicates_at(std::int64_t t, RngStream& rng) const {
  if (t < 1) throw std::invalid_argument("communicates_at: t >= 1");
  switch (kind_) {
    case Kind::constant:
    case Kind::minibatch_periodic:
      return true;
    case Kind::iid_bernoulli:
      return rng.uniform() < nu_;
    case Kind::power_law: {
      double prob = std::min(1.0, c_ * std::pow(double(t), -p_exp_));
      return rng.uniform() < prob;
    }
  }
  return true;
}

std::vector<double> Schedule::expected_square() const {
  if (!stationary())
    throw unsupported_schedule(
        "expected_square: schedule is not stationary (constant or iid)");
  const int m = p_.size();
  std::vector<double> sq(std::size_t(m) * m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k : p_.row_support(i)) s += p_.at(i, k) * p_.at(k, j);
      sq[std::size_t(i) * m + j] = s;
    }
  if (kind_ == Kind::iid_bernoulli && nu_ < 1.0) {
    for (auto& v : sq) v *= nu_;
    for (int i = 0; i < m; ++i) sq[std::size_t(i) * m + i] += 1.0 - nu_;
  }
  return sq;
}

double lambda2_of_expected_square(const Schedule& s) {
  return lambda2_dense(s.expected_square(), s.matrix().size());
}

ScheduleSpec parse_schedule_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ScheduleSpec spec;
  spec.type = j.at("type").get<std::string>();
  if (spec.type == "constant") {
  } else if (spec.type == "iid") {
    spec.nu = j.at("nu").get<double>();
  } else if (spec.type == "minibatch") {
    spec.batch = j.at("batch").get<int>();
  } else if (spec.type == "powerlaw") {
    spec.c = j.at("C").get<double>();
    spec.p = j.at("p").get<double>();
  } else {
    throw std::invalid_argument("schedule type '" + spec.type +
                                "' is not one of constant|iid|minibatch|powerlaw");
  }
  return spec;
}

Schedule build_schedule(const ScheduleSpec& spec, MixingMatrix p) {
  if (spec.type == "constant") return Schedule::constant(std::move(p));
  if (spec.type == "iid") return Schedule::iid_bernoulli(std::move(p), spec.nu);
  if (spec.type == "minibatch")
    return Schedule::minibatch_periodic(std::move(p), spec.batch);
  if (spec.type == "powerlaw")
    return Schedule::power_law(std::move(p), spec.c, spec.p);
  throw std::invalid_argument("unknown schedule type: " + spec.type);
}

}  // namespace dsgd
