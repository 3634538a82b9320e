#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dsgd/kernels.hpp"
#include "dsgd/rng.hpp"

using namespace dsgd;

namespace {

std::vector<double> random_vec(std::size_t n, RngStream& rng) {
  std::vector<double> v(n);
  for (auto& e : v) e = rng.normal();
  return v;
}

// every available SIMD backend must agree with the scalar reference
std::vector<kern::Backend> simd_backends() {
  std::vector<kern::Backend> out;
  for (auto b : {kern::Backend::avx2, kern::Backend::neon})
    if (kern::backend_supported(b)) out.push_back(b);
  return out;
}

struct BackendGuard {
  kern::Backend saved;
  BackendGuard() : saved(kern::active_backend()) {}
  ~BackendGuard() { kern::force_backend(saved); }
};

}  // namespace

TEST_CASE("scalar backend is always supported") {
  CHECK(kern::backend_supported(kern::Backend::scalar));
  CHECK(kern::backend_name(kern::active_backend()) != nullptr);
}

TEST_CASE("simd variants match the scalar reference") {
  RngStream rng(42);
  BackendGuard guard;
  // odd sizes exercise the tails
  for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 8ul, 17ul, 256ul, 1001ul}) {
    auto x = random_vec(n, rng);
    auto y = random_vec(n, rng);
    const double a = 0.37;

    kern::force_backend(kern::Backend::scalar);
    auto y_ref = y;
    kern::axpy(a, x.data(), y_ref.data(), n);
    std::vector<double> sc_ref(n);
    kern::scale_copy(a, x.data(), sc_ref.data(), n);
    auto scal_ref = x;
    kern::scal(a, scal_ref.data(), n);
    double dot_ref = kern::dot(x.data(), y.data(), n);
    double nrm_ref = kern::nrm2sq(x.data(), n);

    for (auto backend : simd_backends()) {
      kern::force_backend(backend);
      auto y2 = y;
      kern::axpy(a, x.data(), y2.data(), n);
      CHECK(y2 == y_ref);  // element-wise ops match exactly (no fused ops)
      std::vector<double> sc2(n);
      kern::scale_copy(a, x.data(), sc2.data(), n);
      CHECK(sc2 == sc_ref);
      auto scal2 = x;
      kern::scal(a, scal2.data(), n);
      CHECK(scal2 == scal_ref);
      double dot2 = kern::dot(x.data(), y.data(), n);
      CHECK(dot2 == doctest::Approx(dot_ref).epsilon(1e-12));
      double nrm2 = kern::nrm2sq(x.data(), n);
      CHECK(nrm2 == doctest::Approx(nrm_ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("sparse gather dot matches across backends") {
  RngStream rng(7);
  BackendGuard guard;
  for (std::size_t nnz : {0ul, 1ul, 3ul, 5ul, 64ul, 129ul}) {
    std::size_t d = 4 * nnz + 16;
    auto w = random_vec(d, rng);
    std::vector<std::uint32_t> idx(nnz);
    std::vector<double> vals(nnz);
    std::uint32_t pos = 0;
    for (std::size_t k = 0; k < nnz; ++k) {
      pos += 1 + std::uint32_t(rng.uniform_index(3));
      idx[k] = pos;
      vals[k] = rng.normal();
    }

    kern::force_backend(kern::Backend::scalar);
    double ref = kern::sdot(w.data(), idx.data(), vals.data(), nnz);
    for (auto backend : simd_backends()) {
      kern::force_backend(backend);
      double got = kern::sdot(w.data(), idx.data(), vals.data(), nnz);
      CHECK(got == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("saxpy scatters into distinct indices") {
  std::vector<double> w(10, 1.0);
  std::vector<std::uint32_t> idx{1, 4, 9};
  std::vector<double> vals{2.0, -1.0, 0.5};
  kern::saxpy(2.0, idx.data(), vals.data(), w.data(), 3);
  CHECK(w[1] == 5.0);
  CHECK(w[4] == -1.0);
  CHECK(w[9] == 2.0);
  CHECK(w[0] == 1.0);
}

TEST_CASE("deterministic rng streams") {
  RngStream a(123, 5), b(123, 5), c(123, 6);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    double ua = a.uniform(), ub = b.uniform(), uc = c.uniform();
    all_equal &= (ua == ub);
    any_diff |= (ua != uc);
    CHECK(ua >= 0.0);
    CHECK(ua < 1.0);
  }
  CHECK(all_equal);
  CHECK(any_diff);

  RngStream d(99);
  for (int i = 0; i < 1000; ++i) {
    auto ix = d.uniform_index(7);
    CHECK(ix < 7);
  }
}

TEST_CASE("normal draws have sane moments") {
  RngStream rng(2024);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = rng.normal();
    sum += v;
    sum_sq += v * v;
  }
  CHECK(std::fabs(sum / n) < 0.01);
  CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.02));
}
