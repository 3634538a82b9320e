#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dsgd/dataset.hpp"

namespace dsgd {

enum class LossKind { hinge, squared };

struct LossSpec {
  LossKind kind = LossKind::hinge;
  double lipschitz = 1.0;             // bound on |dloss/dmargin| * ||x||
  std::optional<double> smoothness;   // present iff twice differentiable

  static LossSpec hinge() { return {LossKind::hinge, 1.0, std::nullopt}; }
  // the Lipschitz constant of the squared loss depends on the iterate ball;
  // callers certify it (engine traces record the observed value)
  static LossSpec squared(double lipschitz = 2.0) {
    return {LossKind::squared, lipschitz, 1.0};
  }
};

// margin z = y * w.x;  hinge: max(0, 1-z), squared: (1-z)^2 / 2
double loss_value(const LossSpec& loss, double margin);
// dloss/dmargin; the hinge kink at z == 1 resolves to 0
double loss_dmargin(const LossSpec& loss, double margin);

// Global objective over `data`, or the local objective of a shard when
// `subset` is set (mean loss over the subset plus the same regularizer).
struct Objective {
  LossSpec loss;
  double mu = 0.0;
  const Dataset* data = nullptr;
  const std::vector<std::uint32_t>* subset = nullptr;

  std::size_t count() const { return subset ? subset->size() : data->size(); }
  std::uint32_t example(std::size_t k) const {
    return subset ? (*subset)[k] : std::uint32_t(k);
  }
};

double objective_value(const Objective& obj, std::span<const double> w);

// g = data_coef * x + reg_coef * w; kept in parts so the mu*w term never
// densifies the sparse x part.
struct SubgradParts {
  double data_coef = 0.0;
  const SparseVector* x = nullptr;
  double reg_coef = 0.0;
};

SubgradParts stochastic_subgradient(const Objective& obj,
                                    std::span<const double> w,
                                    const SparseVector& x, double y);

// dense materialization of SubgradParts (tests, reference solvers)
std::vector<double> subgradient_dense(const SubgradParts& g,
                                      std::span<const double> w);

// Average of the per-example subgradients (same kink rule) plus mu*w.
std::vector<double> full_subgradient(const Objective& obj,
                                     std::span<const double> w);

// Exact gradient; squared loss only (hinge throws std::invalid_argument).
std::vector<double> full_gradient(const Objective& obj,
                                  std::span<const double> w);

}  // namespace dsgd
