#include "mcomp/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcomp/montecarlo.hpp"

namespace mcomp {

namespace {

double uni(Rng& r, double lo, double hi) { return lo + (hi - lo) * r.uniform(); }

Mat random_q(Rng& r, int n, double scale) {
  Mat q(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      q(i, j) = uni(r, 0.05, scale);
      off += q(i, j);
    }
    q(i, i) = -off;
  }
  return q;
}

// Birth-death generator from per-state up/down rates (chain order 0 < ... < n-1).
Mat birth_death_q(const Vec& up, const Vec& down) {
  const int n = static_cast<int>(up.size());
  Mat q(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    if (i + 1 < n) {
      q(i, i + 1) = up[i];
      off += up[i];
    }
    if (i > 0) {
      q(i, i - 1) = down[i];
      off += down[i];
    }
    q(i, i) = -off;
  }
  return q;
}

// Kernel that moves one step up the chain with probability p, else stays.
Mat upstep_kernel(int n, double p) {
  Mat k(n, n);
  for (int i = 0; i < n; ++i) {
    if (i + 1 < n) {
      k(i, i + 1) = p;
      k(i, i) = 1.0 - p;
    } else {
      k(i, i) = 1.0;
    }
  }
  return k;
}

Vec random_simplex(Rng& r, int n) {
  Vec v(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    v[i] = 0.2 + r.uniform();
    sum += v[i];
  }
  for (int i = 0; i < n; ++i) v[i] /= sum;
  return v;
}

Vec increasing_f(Rng& r, int n) {
  Vec f(n);
  for (int i = 0; i < n; ++i) f[i] = uni(r, -1.0, 1.0);
  std::sort(f.begin(), f.end());
  return f;
}

std::vector<std::pair<int, int>> chain_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  return pairs;
}

// Positive time-reweighting of a fixed generator: Q(t) = mod(t) * q. Drawing
// the modulation once and applying it to both processes keeps any ratewise
// ordering of the pair exact for all t.
struct Modulation {
  int variant = 0;
  double p1 = 1.0, p2 = 1.0, p3 = 1.0;
};

Modulation draw_modulation(Rng& r, int variant) {
  Modulation m;
  m.variant = variant % 4;
  m.p1 = uni(r, 0.7, 1.1);
  m.p2 = uni(r, 0.9, 1.4);
  m.p3 = uni(r, 0.8, 1.2);
  return m;
}

RateModel apply_modulation(const Mat& q, const Modulation& m, double horizon) {
  switch (m.variant) {
    case 0:
      return RateModel::constant(q, horizon);
    case 1: {
      std::vector<Mat> pieces{q * m.p1, q * m.p2};
      return RateModel::piecewise({0.45 * horizon}, std::move(pieces), horizon);
    }
    case 2:
      // Q(t) = q * (1 + c t) with c > 0.
      return RateModel::affine(q, q * (0.4 * m.p1), horizon);
    default: {
      std::vector<double> times{0.0, 0.4 * horizon, horizon};
      std::vector<Mat> samples{q * m.p1, q * m.p2, q * m.p3};
      return RateModel::sampled(std::move(times), std::move(samples), horizon);
    }
  }
}

RateModel wrap_variant(Rng& r, const Mat& q, int variant, double horizon) {
  return apply_modulation(q, draw_modulation(r, variant), horizon);
}

Scenario base_scenario(const std::string& name, int n, double horizon) {
  Scenario s;
  s.name = name;
  s.horizon = horizon;
  s.grid_steps = 128;
  s.space = StateSpace::make(n, {}, chain_pairs(n));
  s.horizons = {horizon};
  s.theorems = {"thm4", "thm7", "thm8", "thm9"};
  return s;
}

Scenario make_unstructured(Rng& r, std::size_t idx) {
  const int n = 2 + static_cast<int>(r.next() % 4);
  Scenario s = base_scenario("corpus_" + std::to_string(idx) + "_unstructured", n, 1.0);
  const Mat qx = random_q(r, n, 1.5);
  const Mat qy = random_q(r, n, 1.5);
  const int vx = static_cast<int>(r.next() % 4);
  const int vy = static_cast<int>(r.next() % 4);
  const Vec mu = random_simplex(r, n);
  s.x = {wrap_variant(r, qx, vx, 1.0), {}, mu};
  s.y = {wrap_variant(r, qy, vy, 1.0), {}, mu};
  TestFunction f;
  f.name = "random_f";
  f.values.resize(n);
  for (int i = 0; i < n; ++i) f.values[i] = uni(r, -1.0, 1.0);
  s.functions.push_back(std::move(f));
  return s;
}

Scenario make_birth_death(Rng& r, std::size_t idx) {
  const int n = 3 + static_cast<int>(r.next() % 4);
  Scenario s = base_scenario("corpus_" + std::to_string(idx) + "_birthdeath", n, 1.0);
  Vec upx(n, 0.0), downx(n, 0.0), upy(n, 0.0), downy(n, 0.0);
  for (int i = 0; i < n; ++i) {
    upx[i] = uni(r, 0.5, 1.5);
    downx[i] = uni(r, 0.2, 0.8);
    upy[i] = upx[i] * uni(r, 0.3, 0.95);   // Y climbs slower
    downy[i] = downx[i] * uni(r, 1.05, 2.0);  // and falls faster
  }
  const Mat qx = birth_death_q(upx, downx);
  const Mat qy = birth_death_q(upy, downy);
  const Modulation mod = draw_modulation(r, static_cast<int>(r.next() % 4));
  const Vec mu = random_simplex(r, n);
  s.x = {apply_modulation(qx, mod, 1.0), {}, mu};
  s.y = {apply_modulation(qy, mod, 1.0), {}, mu};
  TestFunction f;
  f.name = "increasing_f";
  f.values = increasing_f(r, n);
  s.functions.push_back(std::move(f));
  return s;
}

Scenario make_special(Rng& r, std::size_t idx, int kind) {
  switch (kind % 5) {
    case 0: {  // identical processes: certified equality, zero margin
      const int n = 2 + static_cast<int>(r.next() % 3);
      Scenario s = base_scenario("corpus_" + std::to_string(idx) + "_identical", n, 1.0);
      const Mat q = random_q(r, n, 1.2);
      const Vec mu = random_simplex(r, n);
      s.x = {RateModel::constant(q, 1.0), {}, mu};
      s.y = {RateModel::constant(q, 1.0), {}, mu};
      TestFunction f;
      f.name = "random_f";
      f.values.resize(n);
      for (int i = 0; i < n; ++i) f.values[i] = uni(r, -1.0, 1.0);
      s.functions.push_back(std::move(f));
      return s;
    }
    case 1: {  // X frozen at the start state: Y leaves X's support
      const int n = 3;
      Scenario s =
          base_scenario("corpus_" + std::to_string(idx) + "_supportgap", n, 1.0);
      Mat zero(n, n);
      s.x = {RateModel::constant(zero, 1.0), {}, {1.0, 0.0, 0.0}};
      s.y = {RateModel::constant(random_q(r, n, 1.0), 1.0), {}, {1.0, 0.0, 0.0}};
      TestFunction f;
      f.name = "increasing_f";
      f.values = increasing_f(r, n);
      s.functions.push_back(std::move(f));
      return s;
    }
    case 2: {  // pure jumps at shared epochs, ordered kernels
      const int n = 3;
      Scenario s = base_scenario("corpus_" + std::to_string(idx) + "_purejump", n, 1.0);
      s.theorems.push_back("thm10");
      Mat zero(n, n);
      const double p_hi = uni(r, 0.5, 0.9);
      const double p_lo = p_hi * uni(r, 0.3, 0.8);
      JumpSchedule jx{{0.35, 0.7}, {upstep_kernel(n, p_hi), upstep_kernel(n, p_hi)}};
      JumpSchedule jy{{0.35, 0.7}, {upstep_kernel(n, p_lo), upstep_kernel(n, p_lo)}};
      const Vec mu = random_simplex(r, n);
      s.x = {RateModel::constant(zero, 1.0), jx, mu};
      s.y = {RateModel::constant(zero, 1.0), jy, mu};
      TestFunction f;
      f.name = "increasing_f";
      f.values = increasing_f(r, n);
      s.functions.push_back(std::move(f));
      return s;
    }
    case 3: {  // ordered rates and ordered kernels together
      const int n = 4;
      Scenario s = base_scenario("corpus_" + std::to_string(idx) + "_mixedjump", n, 1.0);
      s.theorems.push_back("thm10");
      Vec upx(n, 0.0), downx(n, 0.0), upy(n, 0.0), downy(n, 0.0);
      for (int i = 0; i < n; ++i) {
        upx[i] = uni(r, 0.6, 1.2);
        downx[i] = uni(r, 0.2, 0.6);
        upy[i] = upx[i] * uni(r, 0.4, 0.9);
        downy[i] = downx[i] * uni(r, 1.1, 1.8);
      }
      const double p_hi = uni(r, 0.4, 0.8);
      const double p_lo = p_hi * uni(r, 0.4, 0.9);
      JumpSchedule jx{{0.5}, {upstep_kernel(n, p_hi)}};
      JumpSchedule jy{{0.5}, {upstep_kernel(n, p_lo)}};
      const Vec mu = random_simplex(r, n);
      s.x = {RateModel::constant(birth_death_q(upx, downx), 1.0), jx, mu};
      s.y = {RateModel::constant(birth_death_q(upy, downy), 1.0), jy, mu};
      TestFunction f;
      f.name = "increasing_f";
      f.values = increasing_f(r, n);
      s.functions.push_back(std::move(f));
      return s;
    }
    default: {  // shared epochs, equal rates, deliberately unordered kernels
      const int n = 3;
      Scenario s =
          base_scenario("corpus_" + std::to_string(idx) + "_kernelclash", n, 1.0);
      s.theorems.push_back("thm10");
      const Mat q = random_q(r, n, 0.8);
      Mat kx(n, n), ky(n, n);
      // X pushes state 0 up but state 1 down; Y does the opposite.
      kx(0, 1) = 0.8; kx(0, 0) = 0.2;
      kx(1, 0) = 0.7; kx(1, 1) = 0.3;
      kx(2, 2) = 1.0;
      ky(0, 0) = 0.9; ky(0, 1) = 0.1;
      ky(1, 2) = 0.6; ky(1, 1) = 0.4;
      ky(2, 2) = 1.0;
      JumpSchedule jx{{0.5}, {kx}};
      JumpSchedule jy{{0.5}, {ky}};
      const Vec mu = random_simplex(r, n);
      s.x = {RateModel::constant(q, 1.0), jx, mu};
      s.y = {RateModel::constant(q, 1.0), jy, mu};
      TestFunction f;
      f.name = "increasing_f";
      f.values = increasing_f(r, n);
      s.functions.push_back(std::move(f));
      return s;
    }
  }
}

}  // namespace

Scenario demo_scenario(int grid_steps) {
  Scenario s;
  s.name = "demo_two_state";
  s.horizon = 1.0;
  s.grid_steps = grid_steps;
  s.space = StateSpace::make(2, {"low", "high"}, {{0, 1}});
  Mat qx(2, 2), qy(2, 2);
  qx(0, 0) = -2.0; qx(0, 1) = 2.0; qx(1, 0) = 1.0; qx(1, 1) = -1.0;
  qy(0, 0) = -1.0; qy(0, 1) = 1.0; qy(1, 0) = 1.0; qy(1, 1) = -1.0;
  s.x = {RateModel::constant(qx, 1.0), {}, {1.0, 0.0}};
  s.y = {RateModel::constant(qy, 1.0), {}, {1.0, 0.0}};
  TestFunction f;
  f.name = "high";
  f.values = {0.0, 1.0};
  s.functions.push_back(std::move(f));
  s.horizons = {1.0};
  s.theorems = {"thm4", "thm7", "thm8", "thm9"};
  s.cone = ConeRequest{"increasing", {}};
  s.mc.enabled = true;
  s.mc.paths = 20000;
  s.mc.seed = 20250814;
  s.mc.checkpoints = {0.0, 0.5, 1.0};
  return s;
}

Scenario demo_piecewise_scenario(int grid_steps) {
  Scenario s = demo_scenario(grid_steps);
  s.name = "demo_piecewise";
  Mat qa(2, 2), qb(2, 2);
  qa(0, 0) = -2.0; qa(0, 1) = 2.0; qa(1, 0) = 1.0; qa(1, 1) = -1.0;
  qb(0, 0) = -1.5; qb(0, 1) = 1.5; qb(1, 0) = 0.5; qb(1, 1) = -0.5;
  s.x.rates = RateModel::piecewise({0.5}, {qa, qb}, 1.0);
  s.mc.enabled = false;
  return s;
}

Scenario purejump_scenario(int grid_steps) {
  Scenario s;
  s.name = "demo_purejump";
  s.horizon = 1.0;
  s.grid_steps = grid_steps;
  s.space = StateSpace::make(2, {"low", "high"}, {{0, 1}});
  const Mat zero(2, 2);
  JumpSchedule jx{{0.35, 0.7}, {upstep_kernel(2, 0.5), upstep_kernel(2, 0.5)}};
  JumpSchedule jy{{0.35, 0.7}, {upstep_kernel(2, 0.3), upstep_kernel(2, 0.3)}};
  s.x = {RateModel::constant(zero, 1.0), jx, {1.0, 0.0}};
  s.y = {RateModel::constant(zero, 1.0), jy, {1.0, 0.0}};
  TestFunction f;
  f.name = "high";
  f.values = {0.0, 1.0};
  s.functions.push_back(std::move(f));
  s.horizons = {1.0};
  s.theorems = {"thm4", "thm7", "thm10"};
  s.mc.enabled = true;
  s.mc.paths = 20000;
  s.mc.seed = 20250814;
  s.mc.checkpoints = {0.0, 0.5, 1.0};
  return s;
}

std::vector<Scenario> soundness_corpus(std::size_t count, std::uint64_t master_seed) {
  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    Rng r = Rng::for_path(master_seed, idx);
    switch (idx % 5) {
      case 0:
      case 1:
        out.push_back(make_unstructured(r, idx));
        break;
      case 2:
      case 3:
        out.push_back(make_birth_death(r, idx));
        break;
      default:
        out.push_back(make_special(r, idx, static_cast<int>(idx / 5)));
        break;
    }
  }
  return out;
}

}  // namespace mcomp
