#pragma once

// Dense/sparse vector kernels used by the hot loops (consensus mixing,
// iterate updates, power iteration, objective evaluation).
//
// Scalar reference implementations always exist; an AVX2 (x86-64) or NEON
// (aarch64) variant is selected at runtime when the CPU supports it.  The
// selection can be overridden with the DSGD_KERNEL environment variable
// ("scalar", "avx2", "neon") or force_backend(), which the equivalence
// tests use.  Element-wise kernels match the scalar results exactly;
// reductions (dot, nrm2sq, sdot) may differ from scalar only by summation
// order, i.e. at the 1e-15 relative level.

#include <cstddef>
#include <cstdint>

namespace dsgd::kern {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);
bool backend_supported(Backend b);
Backend active_backend();
// Testing hook; throws std::invalid_argument if unsupported on this CPU.
void force_backend(Backend b);

// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
// y = a * x
void scale_copy(double a, const double* x, double* y, std::size_t n);
// x *= a
void scal(double a, double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double nrm2sq(const double* x, std::size_t n);
// sum_k vals[k] * w[idx[k]]
double sdot(const double* w, const std::uint32_t* idx, const double* vals,
            std::size_t nnz);
// w[idx[k]] += a * vals[k]; indices must be distinct (sparse-vector invariant)
void saxpy(double a, const std::uint32_t* idx, const double* vals, double* w,
           std::size_t nnz);

namespace detail {

struct KernelTable {
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale_copy)(double, const double*, double*, std::size_t);
  void (*scal)(double, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*nrm2sq)(const double*, std::size_t);
  double (*sdot)(const double*, const std::uint32_t*, const double*,
                 std::size_t);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif

}  // namespace detail

}  // namespace dsgd::kern
