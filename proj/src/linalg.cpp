#include "mcomp/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace mcomp {

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat& Mat::operator+=(const Mat& o) {
  assert(rows_ == o.rows_ && cols_ == o.cols_);
  for (std::size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  assert(rows_ == o.rows_ && cols_ == o.cols_);
  for (std::size_t i = 0; i < d_.size(); ++i) d_[i] -= o.d_[i];
  return *this;
}

Mat& Mat::operator*=(double c) {
  for (double& v : d_) v *= c;
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(Mat a, double c) { return a *= c; }

Mat operator*(const Mat& a, const Mat& b) {
  assert(a.cols() == b.rows());
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ar = a.data() + i * a.cols();
    double* cr = c.data() + i * b.cols();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ar[k];
      if (aik == 0.0) continue;
      const double* br = b.data() + k * b.cols();
      for (std::size_t j = 0; j < b.cols(); ++j) cr[j] += aik * br[j];
    }
  }
  return c;
}

Vec mat_vec(const Mat& a, const Vec& x) {
  assert(a.cols() == x.size());
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ar = a.data() + i * a.cols();
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += ar[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vec vec_mat(const Vec& x, const Mat& a) {
  assert(a.rows() == x.size());
  Vec y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* ar = a.data() + i * a.cols();
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * ar[j];
  }
  return y;
}

double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
    m = std::max(m, std::abs(a.data()[i]));
  return m;
}

double max_abs(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double inf_norm(const Mat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

Mat expm(const Mat& a) {
  assert(a.rows() == a.cols());
  const std::size_t n = a.rows();
  const double norm = inf_norm(a);
  int k = 0;
  if (norm > 0.5) k = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  Mat b = a * std::ldexp(1.0, -k);

  // Horner on sum_{j<=14} B^j/j!: S = I + B/14 (I + ... (I + B/1 S)).
  constexpr int kOrder = 14;
  Mat s = Mat::identity(n);
  for (int j = kOrder; j >= 1; --j) {
    s = b * s;
    s *= 1.0 / j;
    s += Mat::identity(n);
  }
  for (int i = 0; i < k; ++i) s = s * s;
  return s;
}

Vec nnls(const Mat& a, const Vec& b, int max_iter) {
  // Lawson–Hanson active set on the normal equations; fine at the sizes the
  // cone tests use (tens of generators).
  const std::size_t m = a.rows(), n = a.cols();
  assert(b.size() == m);
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 30);

  Vec x(n, 0.0);
  std::vector<bool> passive(n, false);

  auto residual = [&] {
    Vec r = b;
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] == 0.0) continue;
      for (std::size_t i = 0; i < m; ++i) r[i] -= a(i, j) * x[j];
    }
    return r;
  };

  // Solves the unconstrained LS problem on the passive set via normal
  // equations with Gaussian elimination (partial pivoting).
  auto solve_passive = [&](const std::vector<std::size_t>& idx) {
    const std::size_t p = idx.size();
    Mat g(p, p);
    Vec rhs(p, 0.0);
    for (std::size_t u = 0; u < p; ++u) {
      for (std::size_t v = 0; v < p; ++v) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += a(i, idx[u]) * a(i, idx[v]);
        g(u, v) = s;
      }
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += a(i, idx[u]) * b[i];
      rhs[u] = s;
    }
    for (std::size_t c = 0; c < p; ++c) {
      std::size_t piv = c;
      for (std::size_t r2 = c + 1; r2 < p; ++r2)
        if (std::abs(g(r2, c)) > std::abs(g(piv, c))) piv = r2;
      if (piv != c) {
        for (std::size_t j = 0; j < p; ++j) std::swap(g(c, j), g(piv, j));
        std::swap(rhs[c], rhs[piv]);
      }
      const double d = g(c, c);
      if (std::abs(d) < 1e-14) {
        rhs[c] = 0.0;
        continue;
      }
      for (std::size_t r2 = c + 1; r2 < p; ++r2) {
        const double f = g(r2, c) / d;
        if (f == 0.0) continue;
        for (std::size_t j = c; j < p; ++j) g(r2, j) -= f * g(c, j);
        rhs[r2] -= f * rhs[c];
      }
    }
    Vec z(p, 0.0);
    for (std::size_t c = p; c-- > 0;) {
      double s = rhs[c];
      for (std::size_t j = c + 1; j < p; ++j) s -= g(c, j) * z[j];
      z[c] = (std::abs(g(c, c)) < 1e-14) ? 0.0 : s / g(c, c);
    }
    return z;
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    Vec r = residual();
    // Gradient of 0.5||Ax-b||^2 is -A^T r; pick the most negative component
    // over the active (zero) set.
    std::size_t best = n;
    double best_w = 1e-11;
    for (std::size_t j = 0; j < n; ++j) {
      if (passive[j]) continue;
      double w = 0.0;
      for (std::size_t i = 0; i < m; ++i) w += a(i, j) * r[i];
      if (w > best_w) {
        best_w = w;
        best = j;
      }
    }
    if (best == n) break;
    passive[best] = true;

    for (;;) {
      std::vector<std::size_t> idx;
      for (std::size_t j = 0; j < n; ++j)
        if (passive[j]) idx.push_back(j);
      Vec z = solve_passive(idx);
      bool all_pos = true;
      for (double v : z)
        if (v <= 0.0) all_pos = false;
      if (all_pos) {
        for (std::size_t u = 0; u < idx.size(); ++u) x[idx[u]] = z[u];
        break;
      }
      double alpha = 1.0;
      for (std::size_t u = 0; u < idx.size(); ++u) {
        if (z[u] <= 0.0) {
          const double xj = x[idx[u]];
          if (xj - z[u] > 0.0) alpha = std::min(alpha, xj / (xj - z[u]));
        }
      }
      for (std::size_t u = 0; u < idx.size(); ++u) {
        x[idx[u]] += alpha * (z[u] - x[idx[u]]);
        if (x[idx[u]] <= 1e-13) {
          x[idx[u]] = 0.0;
          passive[idx[u]] = false;
        }
      }
    }
  }
  return x;
}

}  // namespace mcomp
