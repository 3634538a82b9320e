#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsgd {

struct SparseVector {
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> idx;  // strictly increasing
  std::vector<double> val;

  std::size_t nnz() const { return idx.size(); }
  double norm_sq() const;
  double norm() const;
  // throws std::invalid_argument on out-of-range or non-increasing indices
  void validate() const;
};

struct Dataset {
  std::uint32_t d = 0;
  std::vector<SparseVector> x;
  std::vector<double> y;  // labels in {-1, +1}

  std::size_t size() const { return x.size(); }
  std::size_t nnz() const;
};

class parse_error : public std::runtime_error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ParseOptions {
  // force feature dimension (so train/test files agree); indices beyond it
  // are a parse error
  std::optional<std::uint32_t> forced_dim;
  // explicit raw-label remap, e.g. {{3.0, +1.0}, {5.0, -1.0}}
  std::map<double, double> label_map;
};

// Lines look like `<label> <idx>:<val> <idx>:<val> ...` with 1-based,
// strictly increasing indices.  `#` starts a comment; blank lines are
// skipped.  Labels: {-1,+1} kept as-is; {1,2} sources map 1 -> +1, 2 -> -1;
// anything else needs ParseOptions::label_map.
Dataset parse_libsvm(std::istream& in, const ParseOptions& opts = {});
Dataset load_libsvm(const std::string& path, const ParseOptions& opts = {});

// Inverse of parse_libsvm up to Dataset equality (1-based indices, %.17g).
void write_libsvm(const Dataset& data, std::ostream& out);

// Scales every example with norm > 1 by 1/norm; examples already inside the
// unit ball are untouched, so a second application is a no-op.  Returns the
// number of rescaled examples via num_scaled.
Dataset normalize(Dataset data, std::size_t* num_scaled = nullptr);

// x ~ N(0, I_d/d) then normalized; y = sign(w_h . x) for a random unit
// hyperplane w_h.  margin_scale > 0 additionally shifts each point by
// margin_scale * y * w_h (then renormalizes) to separate the classes.
Dataset synth_gaussian_classification(std::size_t n, std::uint32_t d,
                                      std::uint64_t seed,
                                      double margin_scale = 0.0);

// Rank-one direction of weight target_rho_sq plus isotropic noise,
// recalibrated against the measured spectral norm until the empirical rho^2
// is within 10% of target (at most 5 attempts; failure carries the achieved
// value in the exception message).
Dataset synth_controlled_rho(std::size_t n, std::uint32_t d,
                             double target_rho_sq, std::uint64_t seed);

// Bernoulli(density) support with N(0,1) values, normalized, labeled by a
// random hyperplane.
Dataset synth_sparse(std::size_t n, std::uint32_t d, double density,
                     std::uint64_t seed);

struct Shards {
  std::uint32_t m = 0;
  std::uint32_t n = 0;                                // examples per node
  std::size_t dropped = 0;                            // N - m*n leftovers
  std::uint64_t seed = 0;
  std::vector<std::vector<std::uint32_t>> node_index;  // into the Dataset

  const std::vector<std::uint32_t>& at(std::uint32_t node) const {
    return node_index.at(node);
  }
};

class RngStream;

// Gaussian direction normalized to unit length (consumes d normals).
std::vector<double> random_unit_vector(std::uint32_t d, RngStream& rng);

// Seeded uniform permutation, then contiguous blocks of size floor(N/m).
Shards split_uniform(const Dataset& data, std::uint32_t m, std::uint64_t seed);

// Copy of one shard as a standalone Dataset (diagnostics/tests).
Dataset materialize_shard(const Dataset& data, const Shards& shards,
                          std::uint32_t node);

}  // namespace dsgd
