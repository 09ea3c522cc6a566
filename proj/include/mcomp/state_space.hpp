#pragma once
// Finite state spaces with an optional partial order, bounded test functions,
// and function cones (increasing / all-bounded / custom generator sets).

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcomp/linalg.hpp"

namespace mcomp {

class StateSpace {
public:
  // `order_pairs` lists i <= j relations; the constructor takes the
  // reflexive-transitive closure and rejects cycles between distinct states.
  static StateSpace make(int n, std::vector<std::string> labels = {},
                         std::vector<std::pair<int, int>> order_pairs = {});

  int size() const { return n_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool has_order() const { return has_order_; }
  bool leq(int i, int j) const { return leq_[static_cast<std::size_t>(i) * n_ + j] != 0; }
  // True iff the order is total; `chain_position` then ranks states bottom-up.
  bool is_total_order() const;
  std::vector<int> chain_order() const;  // states sorted ascending in the order

private:
  int n_ = 0;
  bool has_order_ = false;
  std::vector<std::string> labels_;
  std::vector<std::uint8_t> leq_;  // row-major n*n, leq_[i*n+j] = (i <= j)
};

struct TestFunction {
  Vec values;
  std::string name;
};

// f increasing w.r.t. the order: i <= j implies f(i) <= f(j) (tolerance slack).
bool is_increasing(const TestFunction& f, const StateSpace& s, double tol = 0.0);

struct FunctionCone {
  enum class Kind { increasing, all_bounded, custom };
  Kind kind = Kind::all_bounded;
  StateSpace space;                      // the space the cone lives on
  std::vector<TestFunction> generators;  // finite generating set
};

// Cone of increasing functions: generators are the constant 1 plus the
// indicators of nonempty proper up-sets. Total orders get the n-1 suffix
// indicators directly; general orders enumerate subsets (guarded n <= 16).
FunctionCone increasing_cone(const StateSpace& s);

FunctionCone all_bounded_cone(const StateSpace& s);
FunctionCone custom_cone(const StateSpace& s, std::vector<TestFunction> generators);

// Membership of f in the cone within max-abs tolerance tol. `increasing`
// checks the order relation directly; `custom` solves a nonnegative
// least-squares fit over generators plus +/- constants.
bool is_in_cone(const TestFunction& f, const FunctionCone& cone, double tol);

}  // namespace mcomp
