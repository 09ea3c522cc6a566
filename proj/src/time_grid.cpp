#include "mcomp/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcomp {

TimeGrid TimeGrid::make(double horizon, int steps, std::span<const ProcessSpec* const> specs,
                        std::span<const double> extra) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (steps < 1) throw std::invalid_argument("grid needs at least one step");
  const double tol = 1e-12 * std::max(1.0, horizon);

  // Special times first; uniform knots are added only where no special time
  // already sits, so breakpoints/epochs keep their exact values.
  std::vector<double> special{0.0, horizon};
  auto add_special = [&](double t) {
    if (t < -tol || t > horizon + tol)
      throw std::invalid_argument("grid time outside [0, horizon]");
    special.push_back(std::clamp(t, 0.0, horizon));
  };
  for (const ProcessSpec* spec : specs) {
    if (std::abs(spec->horizon() - horizon) > tol)
      throw std::invalid_argument("specs disagree on the horizon");
    for (double k : spec->rates.kinks()) add_special(k);
    if (spec->jumps)
      for (double e : spec->jumps->times) add_special(e);
  }
  for (double t : extra) add_special(t);
  std::sort(special.begin(), special.end());
  special.erase(std::unique(special.begin(), special.end(),
                            [&](double a, double b) { return std::abs(a - b) <= tol; }),
                special.end());

  std::vector<double> knots = special;
  for (int k = 0; k <= steps; ++k) {
    const double t = horizon * k / steps;
    auto it = std::lower_bound(special.begin(), special.end(), t - tol);
    if (it != special.end() && std::abs(*it - t) <= tol) continue;
    knots.push_back(t);
  }
  std::sort(knots.begin(), knots.end());

  TimeGrid g;
  g.horizon_ = horizon;
  g.knots_ = std::move(knots);
  return g;
}

TimeGrid TimeGrid::make(const ProcessSpec& spec, int steps, std::span<const double> extra) {
  const ProcessSpec* one[] = {&spec};
  return make(spec.horizon(), steps, one, extra);
}

std::size_t TimeGrid::index_of(double t) const {
  const double tol = 1e-9 * std::max(1.0, horizon_);
  auto it = std::lower_bound(knots_.begin(), knots_.end(), t - tol);
  if (it == knots_.end() || std::abs(*it - t) > tol)
    throw std::invalid_argument("time does not lie on a grid knot");
  return static_cast<std::size_t>(it - knots_.begin());
}

bool TimeGrid::has(double t) const {
  const double tol = 1e-9 * std::max(1.0, horizon_);
  auto it = std::lower_bound(knots_.begin(), knots_.end(), t - tol);
  return it != knots_.end() && std::abs(*it - t) <= tol;
}

}  // namespace mcomp
