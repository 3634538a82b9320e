#pragma once

// Communication schedules: which mixing matrix a round uses.  Identity
// rounds are a distinguished token so the engine can skip the O(m*d)
// averaging pass entirely.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsgd/rng.hpp"
#include "dsgd/topology.hpp"

namespace dsgd {

struct unsupported_schedule : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class Schedule {
 public:
  enum class Kind { constant, iid_bernoulli, minibatch_periodic, power_law };

  static Schedule constant(MixingMatrix p);
  static Schedule iid_bernoulli(MixingMatrix p, double nu);  // nu in (0,1]
  static Schedule minibatch_periodic(MixingMatrix p, int batch);  // b >= 1
  static Schedule power_law(MixingMatrix p, double c, double exponent);

  Kind kind() const { return kind_; }
  const MixingMatrix& matrix() const { return p_; }
  double nu() const { return nu_; }
  int batch() const { return batch_; }
  double power_c() const { return c_; }
  double power_p() const { return p_exp_; }

  // true: use matrix(); false: identity round.  t >= 1.  The rng stream is
  // owned by the caller (the engine's coordinator).
  bool communicates_at(std::int64_t t, RngStream& rng) const;

  // E[P^2(t)] in closed form: P^2 (constant) or (1-nu) I + nu P^2 (iid).
  // Dense row-major; throws unsupported_schedule otherwise.
  std::vector<double> expected_square() const;

  bool stationary() const {
    return kind_ == Kind::constant || kind_ == Kind::iid_bernoulli;
  }

 private:
  Schedule(Kind k, MixingMatrix p) : kind_(k), p_(std::move(p)) {}
  Kind kind_;
  MixingMatrix p_;
  double nu_ = 1.0;
  int batch_ = 1;
  double c_ = 1.0;
  double p_exp_ = 0.5;
};

double lambda2_of_expected_square(const Schedule& s);

// Run-config JSON fragment, e.g. {"type":"iid","nu":0.1},
// {"type":"minibatch","batch":128}, {"type":"powerlaw","C":1.0,"p":0.5},
// {"type":"constant"}.  The mixing matrix is built separately from the
// topology part of the config.
struct ScheduleSpec {
  std::string type;  // constant | iid | minibatch | powerlaw
  double nu = 1.0;
  int batch = 1;
  double c = 1.0;
  double p = 0.5;
};

ScheduleSpec parse_schedule_json(const std::string& text);
Schedule build_schedule(const ScheduleSpec& spec, MixingMatrix p);

}  // namespace dsgd
