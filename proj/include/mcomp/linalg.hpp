#pragma once
// Small dense row-major matrices and the two kernels everything else sits on:
// the matrix exponential and an RK4 flow integrator. All norms in this
// project are max-abs (sup norm on a finite state space).

#include <cstddef>
#include <span>
#include <vector>

namespace mcomp {

using Vec = std::vector<double>;

class Mat {
public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), d_(rows * cols, fill) {}

  static Mat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {d_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {d_.data() + i * cols_, cols_}; }

  double* data() { return d_.data(); }
  const double* data() const { return d_.data(); }

  bool operator==(const Mat&) const = default;

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double c);

private:
  std::size_t rows_ = 0, cols_ = 0;
  Vec d_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(Mat a, double c);
Mat operator*(const Mat& a, const Mat& b);

// y = A x (column action) and y = x A (row action: distributions).
Vec mat_vec(const Mat& a, const Vec& x);
Vec vec_mat(const Vec& x, const Mat& a);

double dot(const Vec& a, const Vec& b);

double max_abs(const Mat& a);
double max_abs(const Vec& a);
double max_abs_diff(const Mat& a, const Mat& b);
double max_abs_diff(const Vec& a, const Vec& b);

// Induced sup-norm (max absolute row sum); drives expm scaling.
double inf_norm(const Mat& a);

// exp(A) by scaling-and-squaring on a truncated Taylor series: scale so
// ||A||/2^k <= 0.5, sum 14 Taylor terms by Horner (truncation < 2.4e-17 at
// that norm), square k times. Preserves zero row sums exactly in arithmetic.
Mat expm(const Mat& a);

// One classical RK4 step for T' = T Q(t), Q supplied by the callback.
// rhs(t) must return the coefficient matrix at time t.
template <class Rhs>
Mat rk4_step(const Mat& t0, double a, double h, Rhs&& rhs) {
  const Mat q1 = rhs(a);
  const Mat q2 = rhs(a + 0.5 * h);
  const Mat q4 = rhs(a + h);
  Mat k1 = t0 * q1;
  Mat k2 = (t0 + k1 * (0.5 * h)) * q2;
  Mat k3 = (t0 + k2 * (0.5 * h)) * q2;
  Mat k4 = (t0 + k3 * h) * q4;
  k2 *= 2.0;
  k3 *= 2.0;
  k1 += k2;
  k1 += k3;
  k1 += k4;
  return t0 + k1 * (h / 6.0);
}

struct FlowResult {
  Mat m;
  double error_estimate = 0.0;  // max-abs gap of the final Richardson pair
  int substeps = 1;             // substep count of the accepted solve
  bool converged = true;        // false if the substep cap was hit
};

// Integrates T' = T Q(t) over [a,b] from T=I with RK4, doubling the substep
// count until successive solutions agree to tol in max-abs (cap 2^14).
template <class Rhs>
FlowResult rk4_flow(double a, double b, double tol, Rhs&& rhs) {
  constexpr int kMaxSub = 1 << 14;
  auto solve = [&](int nsub) {
    Mat t = Mat::identity(rhs(a).rows());
    const double h = (b - a) / nsub;
    for (int i = 0; i < nsub; ++i) t = rk4_step(t, a + i * h, h, rhs);
    return t;
  };
  FlowResult r;
  Mat prev = solve(1);
  for (int nsub = 2;; nsub *= 2) {
    Mat cur = solve(nsub);
    r.error_estimate = max_abs_diff(cur, prev);
    r.substeps = nsub;
    if (r.error_estimate <= tol) {
      r.m = std::move(cur);
      return r;
    }
    if (nsub >= kMaxSub) {
      r.m = std::move(cur);
      r.converged = false;
      return r;
    }
    prev = std::move(cur);
  }
}

// Nonnegative least squares (Lawson–Hanson): minimize ||A x - b||_2, x >= 0.
// Returns x; used for cone membership tests.
Vec nnls(const Mat& a, const Vec& b, int max_iter = 0);

}  // namespace mcomp
