#pragma once

// Dense symmetric eigensolver (cyclic Jacobi).  Used for mixing-matrix
// spectra (m up to a few hundred) and the asymptotic-regime diagnostics
// (d <= 200); O(n^3) per sweep, typically < 10 sweeps.

#include <cstddef>
#include <vector>

namespace dsgd {

struct SymEig {
  int n = 0;
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // row-major n x n; column k pairs with values[k]

  double vec(int row, int col) const { return vectors[std::size_t(row) * n + col]; }
};

// a: row-major n x n, must be symmetric (asymmetry beyond sym_tol throws
// std::invalid_argument).
SymEig sym_eig(const double* a, int n, double sym_tol = 1e-9);

inline SymEig sym_eig(const std::vector<double>& a, int n,
                      double sym_tol = 1e-9) {
  return sym_eig(a.data(), n, sym_tol);
}

}  // namespace dsgd
