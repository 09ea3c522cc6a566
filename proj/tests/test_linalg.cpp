#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mcomp/linalg.hpp"

using namespace mcomp;

namespace {

// Independent reference: exp(A) in long double, scaling + order-24 Taylor.
Mat expm_reference(const Mat& a) {
  const std::size_t n = a.rows();
  std::vector<long double> work(n * n), acc(n * n), term(n * n);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::abs(a(i, j));
    norm = std::max(norm, s);
  }
  int k = 0;
  while (norm > 0.25) {
    norm /= 2.0;
    ++k;
  }
  const long double scale = std::pow(2.0L, -k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) work[i * n + j] = scale * (long double)a(i, j);
  // acc = I + sum_{m=1..24} work^m / m!
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      acc[i * n + j] = i == j ? 1.0L : 0.0L;
      term[i * n + j] = acc[i * n + j];
    }
  for (int m = 1; m <= 24; ++m) {
    std::vector<long double> next(n * n, 0.0L);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) {
        const long double t = term[i * n + l] / m;
        if (t == 0.0L) continue;
        for (std::size_t j = 0; j < n; ++j) next[i * n + j] += t * work[l * n + j];
      }
    term = next;
    for (std::size_t i = 0; i < n * n; ++i) acc[i] += term[i];
  }
  for (int s = 0; s < k; ++s) {
    std::vector<long double> sq(n * n, 0.0L);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t j = 0; j < n; ++j) sq[i * n + j] += acc[i * n + l] * acc[l * n + j];
    acc = sq;
  }
  Mat out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = (double)acc[i * n + j];
  return out;
}

Mat random_conservative(std::uint64_t seed, std::size_t n, double scale) {
  std::uint64_t s = seed;
  auto next = [&s] {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  Mat q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      q(i, j) = scale * (double)(next() >> 11) * 0x1.0p-53;
      off += q(i, j);
    }
    q(i, i) = -off;
  }
  return q;
}

}  // namespace

TEST_CASE("matrix arithmetic basics") {
  Mat a(2, 2);
  a(0, 0) = 1.0; a(0, 1) = 2.0; a(1, 0) = 3.0; a(1, 1) = 4.0;
  const Mat i2 = Mat::identity(2);
  CHECK(a * i2 == a);
  CHECK(i2 * a == a);
  const Vec x{1.0, -1.0};
  const Vec ax = mat_vec(a, x);
  CHECK(ax[0] == -1.0);
  CHECK(ax[1] == -1.0);
  const Vec xa = vec_mat(x, a);
  CHECK(xa[0] == -2.0);
  CHECK(xa[1] == -2.0);
  CHECK(dot(x, x) == 2.0);
  CHECK(inf_norm(a) == 7.0);
  CHECK(max_abs(a) == 4.0);
}

TEST_CASE("expm of zero and nilpotent matrices is exact") {
  CHECK(expm(Mat(3, 3)) == Mat::identity(3));
  Mat nil(2, 2);
  nil(0, 1) = 1.0;
  const Mat e = expm(nil);
  CHECK(e(0, 0) == 1.0);
  CHECK(e(0, 1) == 1.0);
  CHECK(e(1, 0) == 0.0);
  CHECK(e(1, 1) == 1.0);
}

TEST_CASE("expm matches the two-state closed form") {
  // Q = [[-a, a], [b, -b]]: exp(Q) has off-diagonal a/l*(1-e^{-l}), l = a+b.
  const double a = 2.0, b = 1.0, l = a + b;
  Mat q(2, 2);
  q(0, 0) = -a; q(0, 1) = a; q(1, 0) = b; q(1, 1) = -b;
  const Mat e = expm(q);
  const double decay = std::exp(-l);
  CHECK(e(0, 1) == doctest::Approx(a / l * (1.0 - decay)).epsilon(1e-14));
  CHECK(e(1, 0) == doctest::Approx(b / l * (1.0 - decay)).epsilon(1e-14));
  CHECK(e(0, 0) == doctest::Approx((b + a * decay) / l).epsilon(1e-14));
}

TEST_CASE("expm matches a long-double reference on random generators") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const Mat q = random_conservative(seed, 5, 3.0);
    CHECK(max_abs_diff(expm(q), expm_reference(q)) <= 1e-13);
  }
}

TEST_CASE("expm of a conservative generator is stochastic") {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const Mat e = expm(random_conservative(seed, 6, 8.0));
    for (std::size_t i = 0; i < 6; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 6; ++j) {
        sum += e(i, j);
        CHECK(e(i, j) >= -1e-15);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("rk4_flow reproduces the exponential of a commuting family") {
  // Q(t) = qa * (1 + t): commuting, so T_{0,1} = exp(qa * 3/2).
  const Mat qa = random_conservative(11, 4, 1.5);
  auto rhs = [&qa](double t) { return qa * (1.0 + t); };
  const FlowResult r = rk4_flow(0.0, 1.0, 1e-12, rhs);
  CHECK(r.converged);
  CHECK(r.error_estimate <= 1e-12);
  CHECK(max_abs_diff(r.m, expm_reference(qa * 1.5)) <= 1e-10);
}

TEST_CASE("rk4_flow on a constant matrix agrees with expm") {
  const Mat q = random_conservative(13, 3, 2.0);
  auto rhs = [&q](double) { return q; };
  const FlowResult r = rk4_flow(0.0, 0.7, 1e-13, rhs);
  Mat scaled = q;
  scaled *= 0.7;
  CHECK(max_abs_diff(r.m, expm(scaled)) <= 1e-11);
}

TEST_CASE("nnls solves constrained fits") {
  // Unconstrained optimum has a negative coordinate; nnls clamps it.
  Mat a = Mat::identity(2);
  const Vec x = nnls(a, {-1.0, 2.0});
  CHECK(x[0] == 0.0);
  CHECK(x[1] == doctest::Approx(2.0));

  // Exactly representable nonnegative combination is recovered.
  Mat g(3, 2);
  g(0, 0) = 1.0; g(0, 1) = 1.0;
  g(1, 0) = 0.0; g(1, 1) = 1.0;
  g(2, 0) = 0.0; g(2, 1) = 1.0;
  const Vec target{0.5, 0.3, 0.3};
  const Vec w = nnls(g, target);
  const Vec fit = mat_vec(g, w);
  CHECK(max_abs_diff(fit, target) <= 1e-12);
  CHECK(w[0] >= 0.0);
  CHECK(w[1] >= 0.0);
}
