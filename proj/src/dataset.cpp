#include "dsgd/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "dsgd/kernels.hpp"
#include "dsgd/rng.hpp"
#include "dsgd/spectral.hpp"

namespace dsgd {

double SparseVector::norm_sq() const {
  return kern::nrm2sq(val.data(), val.size());
}

double SparseVector::norm() const { return std::sqrt(norm_sq()); }

void SparseVector::validate() const {
  if (idx.size() != val.size())
    throw std::invalid_argument("SparseVector: idx/val size mismatch");
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= dim)
      throw std::invalid_argument("SparseVector: index out of range");
    if (k > 0 && idx[k] <= idx[k - 1])
      throw std::invalid_argument("SparseVector: indices not increasing");
  }
}

std::size_t Dataset::nnz() const {
  std::size_t s = 0;
  for (const auto& v : x) s += v.nnz();
  return s;
}

namespace {

const char* skip_ws(const char* p, const char* end) {
  while (p != end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
  return p;
}

double parse_double(const char*& p, const char* end, std::size_t line,
                    const char* what) {
  const char* q = p;
  if (q != end && *q == '+') ++q;  // from_chars rejects an explicit plus
  double v = 0.0;
  auto [next, ec] = std::from_chars(q, end, v);
  if (ec != std::errc() || next == q)
    throw parse_error(line, std::string("expected a number for ") + what);
  p = next;
  return v;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const ParseOptions& opts) {
  Dataset data;
  std::vector<double> raw_labels;
  std::uint32_t max_index = 0;  // 0-based
  bool any_feature = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    p = skip_ws(p, end);
    if (p == end) continue;

    raw_labels.push_back(parse_double(p, end, line_no, "the label"));

    SparseVector sv;
    long long prev = -1;
    for (;;) {
      p = skip_ws(p, end);
      if (p == end) break;
      unsigned long index1 = 0;
      auto [next, ec] = std::from_chars(p, end, index1);
      if (ec != std::errc() || next == end || *next != ':')
        throw parse_error(line_no, "malformed index:value pair");
      if (index1 == 0)
        throw parse_error(line_no, "feature indices are 1-based");
      p = next + 1;
      double value = parse_double(p, end, line_no, "a feature value");
      long long index0 = static_cast<long long>(index1) - 1;
      if (index0 <= prev)
        throw parse_error(line_no, "feature indices not strictly increasing");
      prev = index0;
      sv.idx.push_back(static_cast<std::uint32_t>(index0));
      sv.val.push_back(value);
      any_feature = true;
      max_index = std::max(max_index, sv.idx.back());
    }
    data.x.push_back(std::move(sv));
  }

  data.d = any_feature ? max_index + 1 : 0;
  if (opts.forced_dim) {
    if (any_feature && max_index >= *opts.forced_dim)
      throw parse_error(0, "feature index " + std::to_string(max_index + 1) +
                               " exceeds forced dimension " +
                               std::to_string(*opts.forced_dim));
    data.d = *opts.forced_dim;
  }
  for (auto& v : data.x) v.dim = data.d;

  // label remap: explicit map wins; {1,2} sources flip 2 -> -1; otherwise
  // labels must already be in {-1,+1}
  data.y.reserve(raw_labels.size());
  if (!opts.label_map.empty()) {
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      auto it = opts.label_map.find(raw_labels[i]);
      if (it == opts.label_map.end() ||
          (it->second != 1.0 && it->second != -1.0))
        throw parse_error(i + 1, "label " + std::to_string(raw_labels[i]) +
                                     " not covered by the label map");
      data.y.push_back(it->second);
    }
  } else {
    std::set<double> distinct(raw_labels.begin(), raw_labels.end());
    bool plus_minus = true, one_two = true;
    for (double v : distinct) {
      if (v != 1.0 && v != -1.0) plus_minus = false;
      if (v != 1.0 && v != 2.0) one_two = false;
    }
    if (plus_minus) {
      data.y = std::move(raw_labels);
    } else if (one_two) {
      for (double v : raw_labels) data.y.push_back(v == 1.0 ? 1.0 : -1.0);
    } else {
      for (double v : distinct)
        if (v != 1.0 && v != -1.0 && v != 2.0)
          throw parse_error(0, "label " + std::to_string(v) +
                                   " is not binary; use a label map");
      throw parse_error(0, "mixed label conventions; use a label map");
    }
  }
  return data;
}

Dataset load_libsvm(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_libsvm(in, opts);
}

void write_libsvm(const Dataset& data, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << (data.y[i] > 0 ? "+1" : "-1");
    const SparseVector& v = data.x[i];
    for (std::size_t k = 0; k < v.nnz(); ++k) {
      std::snprintf(buf, sizeof buf, " %u:%.17g", v.idx[k] + 1, v.val[k]);
      out << buf;
    }
    out << '\n';
  }
}

Dataset normalize(Dataset data, std::size_t* num_scaled) {
  std::size_t scaled = 0;
  for (auto& v : data.x) {
    double nsq = v.norm_sq();
    if (nsq > 1.0 + 1e-12) {
      kern::scal(1.0 / std::sqrt(nsq), v.val.data(), v.val.size());
      ++scaled;
    }
  }
  if (num_scaled) *num_scaled = scaled;
  return data;
}

namespace {

SparseVector dense_to_sparse(const std::vector<double>& v) {
  SparseVector sv;
  sv.dim = static_cast<std::uint32_t>(v.size());
  for (std::uint32_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      sv.idx.push_back(i);
      sv.val.push_back(v[i]);
    }
  }
  return sv;
}

double sparse_dot_dense(const SparseVector& sv, const std::vector<double>& w) {
  return kern::sdot(w.data(), sv.idx.data(), sv.val.data(), sv.nnz());
}

}  // namespace

std::vector<double> random_unit_vector(std::uint32_t d, RngStream& rng) {
  std::vector<double> u(d);
  double nsq = 0.0;
  do {
    for (auto& e : u) e = rng.normal();
    nsq = kern::nrm2sq(u.data(), d);
  } while (nsq == 0.0);
  kern::scal(1.0 / std::sqrt(nsq), u.data(), d);
  return u;
}

Dataset synth_gaussian_classification(std::size_t n, std::uint32_t d,
                                      std::uint64_t seed,
                                      double margin_scale) {
  if (n == 0 || d == 0)
    throw std::invalid_argument("synth_gaussian_classification: n, d >= 1");
  RngStream hyper(seed, 0);
  RngStream points(seed, 1);
  std::vector<double> w_h = random_unit_vector(d, hyper);

  Dataset data;
  data.d = d;
  data.x.reserve(n);
  data.y.reserve(n);
  const double inv_sqrt_d = 1.0 / std::sqrt(double(d));
  std::vector<double> xv(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& e : xv) e = points.normal() * inv_sqrt_d;
    double margin = kern::dot(xv.data(), w_h.data(), d);
    double label = margin >= 0.0 ? 1.0 : -1.0;
    if (margin_scale > 0.0) {
      kern::axpy(margin_scale * label, w_h.data(), xv.data(), d);
    }
    data.x.push_back(dense_to_sparse(xv));
    data.y.push_back(label);
  }
  return normalize(std::move(data));
}

Dataset synth_controlled_rho(std::size_t n, std::uint32_t d,
                             double target_rho_sq, std::uint64_t seed) {
  if (n == 0 || d == 0) throw std::invalid_argument("synth_controlled_rho: n, d >= 1");
  if (target_rho_sq < 1.0 / d - 1e-12 || target_rho_sq > 1.0 + 1e-12)
    throw std::invalid_argument(
        "synth_controlled_rho: target must lie in [1/d, 1]");

  RngStream setup(seed, 0);
  std::vector<double> u = random_unit_vector(d, setup);
  std::vector<double> w_h = random_unit_vector(d, setup);

  double noise_sq = 0.9 * (1.0 - target_rho_sq);              // c^2
  double spike_sq = std::max(0.0, target_rho_sq - noise_sq / d);  // a^2

  double achieved = 0.0;
  for (int attempt = 0; attempt < 5; ++attempt) {
    RngStream points(seed, 1 + attempt);
    Dataset data;
    data.d = d;
    data.x.reserve(n);
    data.y.reserve(n);
    const double a = std::sqrt(spike_sq);
    const double c = std::sqrt(noise_sq / d);
    std::vector<double> xv(d);
    for (std::size_t i = 0; i < n; ++i) {
      double s = points.uniform() < 0.5 ? -1.0 : 1.0;
      for (auto& e : xv) e = c * points.normal();
      kern::axpy(a * s, u.data(), xv.data(), d);
      data.x.push_back(dense_to_sparse(xv));
    }
    data = normalize(std::move(data));
    for (std::size_t i = 0; i < n; ++i)
      data.y.push_back(sparse_dot_dense(data.x[i], w_h) >= 0.0 ? 1.0 : -1.0);

    auto est = estimate_spectral_norm(data, 1e-7, 2000, derive_seed(seed, 99));
    achieved = est.rho_sq;
    if (std::fabs(achieved - target_rho_sq) <= 0.1 * target_rho_sq)
      return data;

    if (achieved > target_rho_sq) {
      // scaling all examples by s scales rho^2 by s^2 and cannot re-clip
      double s = std::sqrt(target_rho_sq / achieved);
      for (auto& v : data.x) kern::scal(s, v.val.data(), v.val.size());
      est = estimate_spectral_norm(data, 1e-7, 2000, derive_seed(seed, 99));
      achieved = est.rho_sq;
      if (std::fabs(achieved - target_rho_sq) <= 0.1 * target_rho_sq)
        return data;
      spike_sq *= target_rho_sq / achieved;
      noise_sq *= target_rho_sq / achieved;
    } else {
      double ratio = std::min(4.0, target_rho_sq / std::max(achieved, 1e-12));
      spike_sq = std::min(1.0, std::max(spike_sq * ratio, spike_sq + 1e-6));
    }
  }
  throw std::runtime_error(
      "synth_controlled_rho: target " + std::to_string(target_rho_sq) +
      " unreachable after 5 attempts; achieved " + std::to_string(achieved));
}

Dataset synth_sparse(std::size_t n, std::uint32_t d, double density,
                     std::uint64_t seed) {
  if (n == 0 || d == 0) throw std::invalid_argument("synth_sparse: n, d >= 1");
  if (!(density > 0.0) || density > 1.0)
    throw std::invalid_argument("synth_sparse: density in (0, 1]");
  RngStream hyper(seed, 0);
  RngStream points(seed, 1);
  std::vector<double> w_h = random_unit_vector(d, hyper);

  Dataset data;
  data.d = d;
  data.x.reserve(n);
  data.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SparseVector sv;
    sv.dim = d;
    for (std::uint32_t j = 0; j < d; ++j)
      if (points.uniform() < density) {
        sv.idx.push_back(j);
        sv.val.push_back(points.normal());
      }
    data.x.push_back(std::move(sv));
    data.y.push_back(sparse_dot_dense(data.x.back(), w_h) >= 0.0 ? 1.0
                                                                 : -1.0);
  }
  return normalize(std::move(data));
}

Shards split_uniform(const Dataset& data, std::uint32_t m,
                     std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("split_uniform: m >= 1");
  if (data.size() < m)
    throw std::invalid_argument("split_uniform: need at least m examples");

  std::vector<std::uint32_t> perm(data.size());
  std::iota(perm.begin(), perm.end(), 0u);
  RngStream rng(seed, 0);
  for (std::size_t i = perm.size() - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.uniform_index(i + 1)]);

  Shards shards;
  shards.m = m;
  shards.n = static_cast<std::uint32_t>(data.size() / m);
  shards.dropped = data.size() - std::size_t(shards.n) * m;
  shards.seed = seed;
  shards.node_index.resize(m);
  std::size_t pos = 0;
  for (std::uint32_t i = 0; i < m; ++i) {
    shards.node_index[i].assign(perm.begin() + pos,
                                perm.begin() + pos + shards.n);
    pos += shards.n;
  }
  return shards;
}

Dataset materialize_shard(const Dataset& data, const Shards& shards,
                          std::uint32_t node) {
  Dataset out;
  out.d = data.d;
  for (std::uint32_t ix : shards.at(node)) {
    out.x.push_back(data.x[ix]);
    out.y.push_back(data.y[ix]);
  }
  return out;
}

}  // namespace dsgd
