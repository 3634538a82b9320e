// AVX2 kernel variants.  Compiled with -mavx2 (no FMA: mul+add keeps the
// element-wise kernels bit-identical to the scalar reference).

#include "dsgd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace dsgd::kern::detail {

namespace {

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    __m256d y1 = _mm256_loadu_pd(y + i + 4);
    __m256d x0 = _mm256_loadu_pd(x + i);
    __m256d x1 = _mm256_loadu_pd(x + i + 4);
    _mm256_storeu_pd(y + i, _mm256_add_pd(y0, _mm256_mul_pd(va, x0)));
    _mm256_storeu_pd(y + i + 4, _mm256_add_pd(y1, _mm256_mul_pd(va, x1)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_copy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i + 4, _mm256_mul_pd(va, _mm256_loadu_pd(x + i + 4)));
  }
  for (; i < n; ++i) y[i] = a * x[i];
}

void scal_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_add_pd(
        s0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    s1 = _mm256_add_pd(s1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4),
                                         _mm256_loadu_pd(b + i + 4)));
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double nrm2sq_avx2(const double* x, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d v0 = _mm256_loadu_pd(x + i);
    __m256d v1 = _mm256_loadu_pd(x + i + 4);
    s0 = _mm256_add_pd(s0, _mm256_mul_pd(v0, v0));
    s1 = _mm256_add_pd(s1, _mm256_mul_pd(v1, v1));
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

double sdot_avx2(const double* w, const std::uint32_t* idx, const double* vals,
                 std::size_t nnz) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= nnz; k += 4) {
    __m128i ix = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
    __m256d g = _mm256_i32gather_pd(w, ix, 8);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(g, _mm256_loadu_pd(vals + k)));
  }
  double s = hsum(acc);
  for (; k < nnz; ++k) s += vals[k] * w[idx[k]];
  return s;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{axpy_avx2, scale_copy_avx2, scal_avx2,
                             dot_avx2,  nrm2sq_avx2,     sdot_avx2};
  return t;
}

}  // namespace dsgd::kern::detail

#endif  // x86-64
