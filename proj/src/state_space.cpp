#include "mcomp/state_space.hpp"

#include <algorithm>
#include <stdexcept>

namespace mcomp {

StateSpace StateSpace::make(int n, std::vector<std::string> labels,
                            std::vector<std::pair<int, int>> order_pairs) {
  if (n <= 0) throw std::invalid_argument("state space needs at least one state");
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("label count does not match state count");
  StateSpace s;
  s.n_ = n;
  s.labels_ = std::move(labels);
  s.leq_.assign(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) s.leq_[static_cast<std::size_t>(i) * n + i] = 1;
  if (!order_pairs.empty()) {
    s.has_order_ = true;
    for (auto [i, j] : order_pairs) {
      if (i < 0 || i >= n || j < 0 || j >= n)
        throw std::invalid_argument("order pair references a state outside the space");
      s.leq_[static_cast<std::size_t>(i) * n + j] = 1;
    }
    // Reflexive-transitive closure (Warshall), then antisymmetry check.
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        if (!s.leq_[static_cast<std::size_t>(i) * n + k]) continue;
        for (int j = 0; j < n; ++j)
          if (s.leq_[static_cast<std::size_t>(k) * n + j])
            s.leq_[static_cast<std::size_t>(i) * n + j] = 1;
      }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (s.leq(i, j) && s.leq(j, i))
          throw std::invalid_argument("order relation has a cycle between distinct states");
  }
  return s;
}

bool StateSpace::is_total_order() const {
  if (!has_order_) return false;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (!leq(i, j) && !leq(j, i)) return false;
  return true;
}

std::vector<int> StateSpace::chain_order() const {
  std::vector<int> idx(n_);
  for (int i = 0; i < n_; ++i) idx[i] = i;
  // Rank by the number of states below; for a total order this sorts the chain.
  std::vector<int> below(n_, 0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (j != i && leq(j, i)) ++below[i];
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return below[a] < below[b]; });
  return idx;
}

bool is_increasing(const TestFunction& f, const StateSpace& s, double tol) {
  if (static_cast<int>(f.values.size()) != s.size())
    throw std::invalid_argument("function length does not match state count");
  for (int i = 0; i < s.size(); ++i)
    for (int j = 0; j < s.size(); ++j)
      if (s.leq(i, j) && f.values[i] > f.values[j] + tol) return false;
  return true;
}

namespace {

std::string upset_name(std::uint32_t mask, int n) {
  std::string name = "up";
  for (int i = 0; i < n; ++i)
    if (mask & (1u << i)) name += "_" + std::to_string(i);
  return name;
}

TestFunction indicator(std::uint32_t mask, int n, std::string name) {
  TestFunction f;
  f.values.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (mask & (1u << i)) f.values[i] = 1.0;
  f.name = std::move(name);
  return f;
}

}  // namespace

FunctionCone increasing_cone(const StateSpace& s) {
  if (!s.has_order())
    throw std::invalid_argument("increasing cone needs an ordered state space");
  FunctionCone cone;
  cone.kind = FunctionCone::Kind::increasing;
  cone.space = s;
  const int n = s.size();

  if (s.is_total_order()) {
    // Constant plus the n-1 suffix indicators along the chain.
    const std::vector<int> chain = s.chain_order();
    TestFunction one;
    one.values.assign(n, 1.0);
    one.name = "const";
    cone.generators.push_back(std::move(one));
    for (int k = 1; k < n; ++k) {
      TestFunction f;
      f.values.assign(n, 0.0);
      for (int p = k; p < n; ++p) f.values[chain[p]] = 1.0;
      f.name = "geq_" + std::to_string(chain[k]);
      cone.generators.push_back(std::move(f));
    }
    return cone;
  }

  if (n > 16)
    throw std::invalid_argument(
        "up-set enumeration for a non-total order is limited to 16 states");
  // All nonempty up-sets; the full set is the constant. Ordered by size
  // descending (constant first), then by mask for determinism.
  std::vector<std::uint32_t> masks;
  const std::uint32_t full = (n == 32) ? 0xffffffffu : ((1u << n) - 1u);
  for (std::uint32_t m = 1; m <= full; ++m) {
    bool up_closed = true;
    for (int i = 0; i < n && up_closed; ++i) {
      if (!(m & (1u << i))) continue;
      for (int j = 0; j < n; ++j)
        if (s.leq(i, j) && !(m & (1u << j))) {
          up_closed = false;
          break;
        }
    }
    if (up_closed) masks.push_back(m);
  }
  std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    const int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
    return pa != pb ? pa > pb : a < b;
  });
  for (std::uint32_t m : masks)
    cone.generators.push_back(
        indicator(m, n, m == full ? "const" : upset_name(m, n)));
  return cone;
}

FunctionCone all_bounded_cone(const StateSpace& s) {
  FunctionCone cone;
  cone.kind = FunctionCone::Kind::all_bounded;
  cone.space = s;
  const int n = s.size();
  // Signed singleton indicators: sweeping them tests equality of marginals.
  for (int sign = 0; sign < 2; ++sign)
    for (int i = 0; i < n; ++i) {
      TestFunction f;
      f.values.assign(n, 0.0);
      f.values[i] = sign == 0 ? 1.0 : -1.0;
      f.name = (sign == 0 ? "e_" : "neg_e_") + std::to_string(i);
      cone.generators.push_back(std::move(f));
    }
  return cone;
}

FunctionCone custom_cone(const StateSpace& s, std::vector<TestFunction> generators) {
  if (generators.empty())
    throw std::invalid_argument("custom cone needs at least one generator");
  for (const auto& g : generators)
    if (static_cast<int>(g.values.size()) != s.size())
      throw std::invalid_argument("cone generator length does not match state count");
  FunctionCone cone;
  cone.kind = FunctionCone::Kind::custom;
  cone.space = s;
  cone.generators = std::move(generators);
  return cone;
}

bool is_in_cone(const TestFunction& f, const FunctionCone& cone, double tol) {
  const int n = cone.space.size();
  if (static_cast<int>(f.values.size()) != n)
    throw std::invalid_argument("function length does not match state count");
  switch (cone.kind) {
    case FunctionCone::Kind::all_bounded:
      return true;
    case FunctionCone::Kind::increasing:
      return is_increasing(f, cone.space, tol);
    case FunctionCone::Kind::custom: {
      // Fit f = sum lambda_g g + c*1 with lambda >= 0 and a free constant
      // (split into +/- columns); member iff the max-abs residual is <= tol.
      const std::size_t ng = cone.generators.size();
      Mat a(n, ng + 2);
      for (std::size_t g = 0; g < ng; ++g)
        for (int i = 0; i < n; ++i) a(i, g) = cone.generators[g].values[i];
      for (int i = 0; i < n; ++i) {
        a(i, ng) = 1.0;
        a(i, ng + 1) = -1.0;
      }
      Vec x = nnls(a, f.values);
      Vec fit = mat_vec(a, x);
      return max_abs_diff(fit, f.values) <= tol;
    }
  }
  return false;
}

}  // namespace mcomp
