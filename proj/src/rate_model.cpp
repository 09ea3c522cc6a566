#include "mcomp/rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcomp {

namespace {

constexpr double kQTol = 1e-12;

void require_square(const Mat& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw std::invalid_argument(std::string(what) + " must be square and nonempty");
}

// Clamp negative off-diagonals to zero and set the diagonal to minus the
// off-diagonal row sum; identity on matrices that are already conservative.
Mat repair_q(Mat q) {
  for (std::size_t i = 0; i < q.rows(); ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < q.cols(); ++j) {
      if (j == i) continue;
      if (q(i, j) < 0.0) q(i, j) = 0.0;
      off += q(i, j);
    }
    q(i, i) = -off;
  }
  return q;
}

}  // namespace

bool is_conservative_q(const Mat& q, double tol) {
  if (q.rows() != q.cols()) return false;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < q.cols(); ++j) {
      if (j != i && q(i, j) < -tol) return false;
      sum += q(i, j);
    }
    if (std::abs(sum) > tol) return false;
  }
  return true;
}

bool is_stochastic(const Mat& k, double tol) {
  if (k.rows() != k.cols()) return false;
  for (std::size_t i = 0; i < k.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < k.cols(); ++j) {
      if (k(i, j) < -tol) return false;
      sum += k(i, j);
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

RateModel RateModel::constant(Mat q, double horizon) {
  require_square(q, "rate matrix");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  RateModel m;
  m.variant_ = Variant::constant;
  m.horizon_ = horizon;
  m.dim_ = static_cast<int>(q.rows());
  m.mats_.push_back(std::move(q));
  return m;
}

RateModel RateModel::piecewise(std::vector<double> breakpoints, std::vector<Mat> pieces,
                               double horizon) {
  if (pieces.empty()) throw std::invalid_argument("piecewise model needs pieces");
  if (pieces.size() != breakpoints.size() + 1)
    throw std::invalid_argument("piecewise model needs one more piece than breakpoints");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    if (!(breakpoints[k] > 0.0) || !(breakpoints[k] < horizon))
      throw std::invalid_argument("breakpoints must lie strictly inside (0, horizon)");
    if (k > 0 && !(breakpoints[k] > breakpoints[k - 1]))
      throw std::invalid_argument("breakpoints must be strictly increasing");
  }
  for (const auto& p : pieces) require_square(p, "rate matrix");
  RateModel m;
  m.variant_ = Variant::piecewise;
  m.horizon_ = horizon;
  m.dim_ = static_cast<int>(pieces[0].rows());
  for (const auto& p : pieces)
    if (static_cast<int>(p.rows()) != m.dim_)
      throw std::invalid_argument("piecewise pieces must share a dimension");
  m.breaks_ = std::move(breakpoints);
  m.mats_ = std::move(pieces);
  m.kinks_ = m.breaks_;
  return m;
}

RateModel RateModel::affine(Mat qa, Mat qb, double horizon) {
  require_square(qa, "rate matrix");
  require_square(qb, "rate matrix");
  if (qa.rows() != qb.rows())
    throw std::invalid_argument("affine coefficients must share a dimension");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  RateModel m;
  m.variant_ = Variant::affine;
  m.horizon_ = horizon;
  m.dim_ = static_cast<int>(qa.rows());
  m.qa_ = std::move(qa);
  m.qb_ = std::move(qb);
  return m;
}

RateModel RateModel::sampled(std::vector<double> times, std::vector<Mat> samples,
                             double horizon) {
  if (times.size() < 2 || times.size() != samples.size())
    throw std::invalid_argument("sampled model needs matching times and samples (>= 2)");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (times.front() != 0.0 || std::abs(times.back() - horizon) > 1e-12 * std::max(1.0, horizon))
    throw std::invalid_argument("sample times must start at 0 and end at the horizon");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw std::invalid_argument("sample times must be strictly increasing");
  for (const auto& s : samples) require_square(s, "rate matrix");
  RateModel m;
  m.variant_ = Variant::sampled;
  m.horizon_ = horizon;
  m.dim_ = static_cast<int>(samples[0].rows());
  for (const auto& s : samples)
    if (static_cast<int>(s.rows()) != m.dim_)
      throw std::invalid_argument("samples must share a dimension");
  m.times_ = std::move(times);
  m.mats_ = std::move(samples);
  m.kinks_.assign(m.times_.begin() + 1, m.times_.end() - 1);
  return m;
}

Mat RateModel::at(double t, Side side) const {
  const double slack = 1e-12 * std::max(1.0, horizon_);
  if (t < -slack || t > horizon_ + slack)
    throw std::out_of_range("rate requested outside [0, horizon]");
  t = std::clamp(t, 0.0, horizon_);
  switch (variant_) {
    case Variant::constant:
      return mats_[0];
    case Variant::piecewise: {
      // Right-continuous pieces; side=left at a breakpoint picks the piece
      // realised just before it.
      std::size_t k = std::upper_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin();
      if (side == Side::left && k > 0 && t == breaks_[k - 1]) --k;
      return mats_[k];
    }
    case Variant::affine:
      return qa_ + qb_ * t;
    case Variant::sampled: {
      std::size_t k = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
      if (k == 0) k = 1;
      if (k == times_.size()) k = times_.size() - 1;
      const double lo = times_[k - 1], hi = times_[k];
      const double w = (t - lo) / (hi - lo);
      Mat q = mats_[k - 1] * (1.0 - w) + mats_[k] * w;
      return repair_q(std::move(q));
    }
  }
  throw std::logic_error("unreachable");
}

double RateModel::uniformization_bound() const {
  auto max_exit = [](const Mat& q) {
    double m = 0.0;
    for (std::size_t i = 0; i < q.rows(); ++i) m = std::max(m, -q(i, i));
    return m;
  };
  switch (variant_) {
    case Variant::constant:
    case Variant::piecewise:
    case Variant::sampled: {
      // Interpolants are convex combinations of valid samples, so the
      // endpoint maximum dominates.
      double m = 0.0;
      for (const auto& q : mats_) m = std::max(m, max_exit(q));
      return m;
    }
    case Variant::affine:
      return std::max(max_exit(qa_), max_exit(qa_ + qb_ * horizon_));
  }
  throw std::logic_error("unreachable");
}

std::vector<double> RateModel::kinks_in(double a, double b) const {
  std::vector<double> out;
  for (double k : kinks_)
    if (k > a && k < b) out.push_back(k);
  return out;
}

double RateModel::integrate_row(const Vec& f, int i, double a, double b) const {
  if (b <= a) return 0.0;
  // Q(t) f is linear in t on each smooth segment for every variant, so the
  // trapezoid rule per segment is exact. Segment interiors use side=right.
  double total = 0.0;
  std::vector<double> cuts = kinks_in(a, b);
  double lo = a;
  auto seg = [&](double p, double q) {
    const Vec flo = mat_vec(at(p, Side::right), f);
    const Vec fhi = mat_vec(at(q, Side::left), f);
    total += 0.5 * (q - p) * (flo[i] + fhi[i]);
  };
  for (double c : cuts) {
    seg(lo, c);
    lo = c;
  }
  seg(lo, b);
  return total;
}

int ProcessSpec::epoch_at(double t, double tol) const {
  if (!jumps) return -1;
  for (std::size_t e = 0; e < jumps->times.size(); ++e)
    if (std::abs(jumps->times[e] - t) <= tol) return static_cast<int>(e);
  return -1;
}

std::vector<Diagnostic> validate(const ProcessSpec& spec) {
  std::vector<Diagnostic> out;
  auto err = [&](std::string where, std::string msg) {
    out.push_back({Diagnostic::Severity::error, std::move(where), std::move(msg)});
  };
  const int n = spec.dim();
  const double T = spec.horizon();

  if (static_cast<int>(spec.initial.size()) != n) {
    err("/initial", "initial distribution length does not match state count");
  } else {
    double sum = 0.0;
    for (std::size_t i = 0; i < spec.initial.size(); ++i) {
      if (spec.initial[i] < -kQTol)
        err("/initial/" + std::to_string(i), "negative probability");
      sum += spec.initial[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
      err("/initial", "probabilities do not sum to 1");
  }

  switch (spec.rates.variant()) {
    case RateModel::Variant::constant:
      if (!is_conservative_q(spec.rates.pieces()[0], kQTol))
        err("/rates/q", "not a conservative rate matrix");
      break;
    case RateModel::Variant::piecewise:
      for (std::size_t k = 0; k < spec.rates.pieces().size(); ++k)
        if (!is_conservative_q(spec.rates.pieces()[k], kQTol))
          err("/rates/pieces/" + std::to_string(k), "not a conservative rate matrix");
      break;
    case RateModel::Variant::affine: {
      // Rows of both coefficients must sum to zero; off-diagonal positivity
      // is affine in t, so the endpoints decide.
      auto rowsum_zero = [&](const Mat& m) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j);
          if (std::abs(s) > kQTol) return false;
        }
        return true;
      };
      if (!rowsum_zero(spec.rates.affine_a()))
        err("/rates/qa", "rows must sum to 0");
      if (!rowsum_zero(spec.rates.affine_b()))
        err("/rates/qb", "rows must sum to 0");
      if (!is_conservative_q(spec.rates.affine_a(), kQTol))
        err("/rates/qa", "rate matrix invalid at t=0");
      if (!is_conservative_q(spec.rates.affine_a() + spec.rates.affine_b() * T, kQTol))
        err("/rates", "rate matrix invalid at t=horizon");
      break;
    }
    case RateModel::Variant::sampled:
      for (std::size_t k = 0; k < spec.rates.pieces().size(); ++k)
        if (!is_conservative_q(spec.rates.pieces()[k], kQTol))
          err("/rates/samples/" + std::to_string(k), "not a conservative rate matrix");
      break;
  }

  if (spec.jumps) {
    const auto& js = *spec.jumps;
    if (js.times.size() != js.kernels.size())
      err("/jumps", "times and kernels must have matching lengths");
    for (std::size_t e = 0; e < js.times.size(); ++e) {
      if (!(js.times[e] > 0.0) || js.times[e] > T + 1e-12 * std::max(1.0, T))
        err("/jumps/times/" + std::to_string(e), "epoch must lie in (0, horizon]");
      if (e > 0 && !(js.times[e] > js.times[e - 1]))
        err("/jumps/times/" + std::to_string(e), "epochs must be strictly increasing");
    }
    for (std::size_t e = 0; e < js.kernels.size(); ++e) {
      if (static_cast<int>(js.kernels[e].rows()) != n ||
          static_cast<int>(js.kernels[e].cols()) != n)
        err("/jumps/kernels/" + std::to_string(e), "kernel dimension mismatch");
      else if (!is_stochastic(js.kernels[e], kQTol))
        err("/jumps/kernels/" + std::to_string(e), "kernel is not row-stochastic");
    }
  }
  return out;
}

CompensatorTable::CompensatorTable(const RateModel& rates, const Vec& f)
    : rates_(&rates), f_(f) {
  seg_.push_back(0.0);
  for (double k : rates.kinks()) seg_.push_back(k);
  seg_.push_back(rates.horizon());
  for (std::size_t s = 0; s + 1 < seg_.size(); ++s) {
    qf_lo_.push_back(mat_vec(rates.at(seg_[s], Side::right), f));
    qf_hi_.push_back(mat_vec(rates.at(seg_[s + 1], Side::left), f));
  }
}

double CompensatorTable::integrate(int i, double a, double b) const {
  if (b <= a) return 0.0;
  double total = 0.0;
  // Locate the first segment containing a.
  std::size_t s = std::upper_bound(seg_.begin(), seg_.end(), a) - seg_.begin();
  if (s > 0) --s;
  if (s + 1 >= seg_.size()) s = seg_.size() - 2;
  for (; s + 1 < seg_.size() && seg_[s] < b; ++s) {
    const double lo = std::max(a, seg_[s]);
    const double hi = std::min(b, seg_[s + 1]);
    if (hi <= lo) continue;
    const double len = seg_[s + 1] - seg_[s];
    // Qf is linear on the segment: interpolate its value at lo and hi.
    const double wlo = (lo - seg_[s]) / len, whi = (hi - seg_[s]) / len;
    const double vlo = (1.0 - wlo) * qf_lo_[s][i] + wlo * qf_hi_[s][i];
    const double vhi = (1.0 - whi) * qf_lo_[s][i] + whi * qf_hi_[s][i];
    total += 0.5 * (hi - lo) * (vlo + vhi);
  }
  return total;
}

}  // namespace mcomp
