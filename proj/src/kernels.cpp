#include "dsgd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace dsgd::kern {

namespace detail {

namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_copy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double nrm2sq_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double sdot_scalar(const double* w, const std::uint32_t* idx,
                   const double* vals, std::size_t nnz) {
  double s = 0.0;
  for (std::size_t k = 0; k < nnz; ++k) s += vals[k] * w[idx[k]];
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{axpy_scalar, scale_copy_scalar, scal_scalar,
                             dot_scalar,  nrm2sq_scalar,     sdot_scalar};
  return t;
}

}  // namespace detail

namespace {

bool cpu_has_backend(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Backend::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend pick_default() {
  if (const char* env = std::getenv("DSGD_KERNEL")) {
    std::string s(env);
    Backend b;
    if (s == "scalar")
      b = Backend::scalar;
    else if (s == "avx2")
      b = Backend::avx2;
    else if (s == "neon")
      b = Backend::neon;
    else
      throw std::invalid_argument("DSGD_KERNEL: unknown backend '" + s + "'");
    if (!cpu_has_backend(b))
      throw std::invalid_argument("DSGD_KERNEL: backend '" + s +
                                  "' not supported on this CPU");
    return b;
  }
  if (cpu_has_backend(Backend::avx2)) return Backend::avx2;
  if (cpu_has_backend(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

const detail::KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &detail::scalar_table();
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return &detail::avx2_table();
#else
      break;
#endif
    case Backend::neon:
#if defined(__aarch64__)
      return &detail::neon_table();
#else
      break;
#endif
  }
  return &detail::scalar_table();
}

struct Dispatch {
  Backend backend;
  const detail::KernelTable* table;
  Dispatch() : backend(pick_default()), table(table_for(backend)) {}
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "?";
}

bool backend_supported(Backend b) { return cpu_has_backend(b); }

Backend active_backend() { return dispatch().backend; }

void force_backend(Backend b) {
  if (!cpu_has_backend(b))
    throw std::invalid_argument(std::string("backend not supported: ") +
                                backend_name(b));
  dispatch().backend = b;
  dispatch().table = table_for(b);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  dispatch().table->axpy(a, x, y, n);
}

void scale_copy(double a, const double* x, double* y, std::size_t n) {
  dispatch().table->scale_copy(a, x, y, n);
}

void scal(double a, double* x, std::size_t n) {
  dispatch().table->scal(a, x, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().table->dot(a, b, n);
}

double nrm2sq(const double* x, std::size_t n) {
  return dispatch().table->nrm2sq(x, n);
}

double sdot(const double* w, const std::uint32_t* idx, const double* vals,
            std::size_t nnz) {
  return dispatch().table->sdot(w, idx, vals, nnz);
}

// No scatter instruction before AVX-512; the gather/compute part of the
// update is dominated by the dense ops anyway, so this stays scalar.
void saxpy(double a, const std::uint32_t* idx, const double* vals, double* w,
           std::size_t nnz) {
  for (std::size_t k = 0; k < nnz; ++k) w[idx[k]] += a * vals[k];
}

}  // namespace dsgd::kern
