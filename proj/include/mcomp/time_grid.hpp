#pragma once
// Knot grids: uniform steps over [0, horizon] augmented with every time the
// models distinguish (rate kinks, jump epochs, requested horizons and
// checkpoints). Every analytic check in the project lands on a knot.

#include <span>
#include <vector>

#include "mcomp/rate_model.hpp"

namespace mcomp {

class TimeGrid {
public:
  // Uniform grid of `steps` intervals plus special times from the specs and
  // `extra`. Near-duplicates (within 1e-12 * max(1, horizon)) collapse onto
  // the special value so side-sensitive lookups land exactly.
  static TimeGrid make(double horizon, int steps, std::span<const ProcessSpec* const> specs,
                       std::span<const double> extra = {});
  static TimeGrid make(const ProcessSpec& spec, int steps, std::span<const double> extra = {});

  double horizon() const { return horizon_; }
  std::size_t size() const { return knots_.size(); }
  double operator[](std::size_t k) const { return knots_[k]; }
  const std::vector<double>& knots() const { return knots_; }
  double spacing(std::size_t k) const { return knots_[k + 1] - knots_[k]; }

  // Exact knot lookup (within tolerance); throws std::invalid_argument for
  // off-knot times — callers must not silently round.
  std::size_t index_of(double t) const;
  bool has(double t) const;

private:
  double horizon_ = 0.0;
  std::vector<double> knots_;
};

}  // namespace mcomp
