// NEON kernel variants for aarch64.  Same contract as the AVX2 set: mul+add
// (no fused ops) so element-wise kernels match the scalar reference exactly.

#include "dsgd/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace dsgd::kern::detail {

namespace {

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t yv = vld1q_f64(y + i);
    float64x2_t xv = vld1q_f64(x + i);
    vst1q_f64(y + i, vaddq_f64(yv, vmulq_f64(va, xv)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_copy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = a * x[i];
}

void scal_neon(double a, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t s0 = vdupq_n_f64(0.0);
  float64x2_t s1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = vaddq_f64(s0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    s1 = vaddq_f64(s1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double s = vaddvq_f64(vaddq_f64(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double nrm2sq_neon(const double* x, std::size_t n) {
  return dot_neon(x, x, n);
}

double sdot_neon(const double* w, const std::uint32_t* idx, const double* vals,
                 std::size_t nnz) {
  double s = 0.0;
  for (std::size_t k = 0; k < nnz; ++k) s += vals[k] * w[idx[k]];
  return s;
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable t{axpy_neon, scale_copy_neon, scal_neon,
                             dot_neon,  nrm2sq_neon,     sdot_neon};
  return t;
}

}  // namespace dsgd::kern::detail

#endif  // aarch64
