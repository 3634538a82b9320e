#include "dsgd/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "dsgd/kernels.hpp"

namespace dsgd {

double loss_value(const LossSpec& loss, double margin) {
  switch (loss.kind) {
    case LossKind::hinge:
      return std::max(0.0, 1.0 - margin);
    case LossKind::squared:
      return 0.5 * (1.0 - margin) * (1.0 - margin);
  }
  return 0.0;
}

double loss_dmargin(const LossSpec& loss, double margin) {
  switch (loss.kind) {
    case LossKind::hinge:
      return margin < 1.0 ? -1.0 : 0.0;
    case LossKind::squared:
      return margin - 1.0;
  }
  return 0.0;
}

double objective_value(const Objective& obj, std::span<const double> w) {
  const Dataset& data = *obj.data;
  if (w.size() != data.d)
    throw std::invalid_argument("objective_value: dimension mismatch");
  double acc = 0.0;
  const std::size_t n = obj.count();
  for (std::size_t k = 0; k < n; ++k) {
    std::uint32_t i = obj.example(k);
    const SparseVector& x = data.x[i];
    double z = data.y[i] *
               kern::sdot(w.data(), x.idx.data(), x.val.data(), x.nnz());
    acc += loss_value(obj.loss, z);
  }
  return acc / double(n) + 0.5 * obj.mu * kern::nrm2sq(w.data(), w.size());
}

SubgradParts stochastic_subgradient(const Objective& obj,
                                    std::span<const double> w,
                                    const SparseVector& x, double y) {
  if (w.size() != x.dim)
    throw std::invalid_argument("stochastic_subgradient: dimension mismatch");
  double z = y * kern::sdot(w.data(), x.idx.data(), x.val.data(), x.nnz());
  return SubgradParts{loss_dmargin(obj.loss, z) * y, &x, obj.mu};
}

std::vector<double> subgradient_dense(const SubgradParts& g,
                                      std::span<const double> w) {
  std::vector<double> out(w.size(), 0.0);
  kern::axpy(g.reg_coef, w.data(), out.data(), w.size());
  kern::saxpy(g.data_coef, g.x->idx.data(), g.x->val.data(), out.data(),
              g.x->nnz());
  return out;
}

std::vector<double> full_subgradient(const Objective& obj,
                                     std::span<const double> w) {
  const Dataset& data = *obj.data;
  if (w.size() != data.d)
    throw std::invalid_argument("full_subgradient: dimension mismatch");
  std::vector<double> out(w.size(), 0.0);
  const std::size_t n = obj.count();
  for (std::size_t k = 0; k < n; ++k) {
    std::uint32_t i = obj.example(k);
    const SparseVector& x = data.x[i];
    double z = data.y[i] *
               kern::sdot(w.data(), x.idx.data(), x.val.data(), x.nnz());
    double c = loss_dmargin(obj.loss, z) * data.y[i];
    kern::saxpy(c, x.idx.data(), x.val.data(), out.data(), x.nnz());
  }
  kern::scal(1.0 / double(n), out.data(), out.size());
  kern::axpy(obj.mu, w.data(), out.data(), out.size());
  return out;
}

std::vector<double> full_gradient(const Objective& obj,
                                  std::span<const double> w) {
  if (obj.loss.kind != LossKind::squared)
    throw std::invalid_argument(
        "full_gradient: loss must be twice differentiable (squared)");
  return full_subgradient(obj, w);
}

}  // namespace dsgd
