#pragma once
// Time-dependent rate matrices (four variants), fixed jump schedules, and the
// full process specification (rates + jumps + initial law) with validation.

#include <optional>
#include <string>
#include <vector>

#include "mcomp/linalg.hpp"

namespace mcomp {

// One-sided evaluation: at a discontinuity `right` returns the value realised
// on [t, t+dt), `left` the value realised on (t-dt, t].
enum class Side { right, left };

class RateModel {
public:
  enum class Variant { constant, piecewise, affine, sampled };

  static RateModel constant(Mat q, double horizon);
  // Pieces are right-continuous: piece k applies on [break_{k-1}, break_k).
  static RateModel piecewise(std::vector<double> breakpoints, std::vector<Mat> pieces,
                             double horizon);
  // Q(t) = qa + t*qb.
  static RateModel affine(Mat qa, Mat qb, double horizon);
  // Linear interpolation between samples at the given times (must start at 0
  // and end at horizon); interpolants are re-validated on evaluation by
  // clamping negative off-diagonals and rebalancing the diagonal.
  static RateModel sampled(std::vector<double> times, std::vector<Mat> samples,
                           double horizon);

  Variant variant() const { return variant_; }
  double horizon() const { return horizon_; }
  int dim() const { return dim_; }

  // Q(t) with the requested side; throws std::out_of_range outside [0, horizon].
  Mat at(double t, Side side = Side::right) const;

  // Uniform bound on total jump intensity: sup_t max_i -Q_ii(t).
  double uniformization_bound() const;

  // Times in (a,b) where the model is non-smooth (piece breaks, sample knots);
  // integration and block assembly split there.
  std::vector<double> kinks_in(double a, double b) const;
  const std::vector<double>& kinks() const { return kinks_; }

  // Exact integral of (Q_s f)(i) ds over [a,b] (trapezoid on smooth-linear
  // segments, which is exact for every variant).
  double integrate_row(const Vec& f, int i, double a, double b) const;

  const std::vector<Mat>& pieces() const { return mats_; }
  const Mat& affine_a() const { return qa_; }
  const Mat& affine_b() const { return qb_; }
  const std::vector<double>& sample_times() const { return times_; }

private:
  Variant variant_ = Variant::constant;
  double horizon_ = 0.0;
  int dim_ = 0;
  std::vector<double> breaks_;  // piecewise: interior breakpoints
  std::vector<Mat> mats_;       // piecewise pieces or sampled values
  Mat qa_, qb_;                 // affine coefficients
  std::vector<double> times_;   // sampled knots
  std::vector<double> kinks_;   // cached non-smooth times (interior)
};

struct JumpSchedule {
  std::vector<double> times;  // strictly increasing, in (0, horizon]
  std::vector<Mat> kernels;   // row-stochastic, one per time
};

struct ProcessSpec {
  RateModel rates;
  std::optional<JumpSchedule> jumps;
  Vec initial;  // probability vector over states

  int dim() const { return rates.dim(); }
  double horizon() const { return rates.horizon(); }
  // Index of the epoch at time t (exact match within tol), or -1.
  int epoch_at(double t, double tol = 1e-12) const;
};

struct Diagnostic {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string where;  // JSON-pointer-style path into the spec
  std::string message;
};

// True Q-matrix within tol: off-diagonals >= -tol, row sums within tol of 0.
bool is_conservative_q(const Mat& q, double tol = 1e-12);
bool is_stochastic(const Mat& k, double tol = 1e-12);

// Structural validation of a full spec; empty result means usable.
std::vector<Diagnostic> validate(const ProcessSpec& spec);

// Precomputed per-piece Q*f products for fast repeated compensator
// integration along simulated paths; exact per segment.
class CompensatorTable {
public:
  CompensatorTable(const RateModel& rates, const Vec& f);
  // Integral of (Q_s f)(i) ds over [a, b].
  double integrate(int i, double a, double b) const;

private:
  const RateModel* rates_;
  Vec f_;
  // Segment boundaries 0 = s_0 < ... < s_m = T and Qf evaluated at both ends
  // of each segment (Qf is linear inside a segment for every variant).
  std::vector<double> seg_;
  std::vector<Vec> qf_lo_, qf_hi_;
};

}  // namespace mcomp
