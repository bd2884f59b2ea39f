#pragma once

#include <set>
#include <string>
#include <vector>

#include "thesee/ast.hpp"
#include "thesee/interval.hpp"

namespace thesee {

using LabelSet = std::set<Label>;

// Non-relational environment: either empty, or one non-empty interval per variable.
class BoxEnv {
 public:
  BoxEnv() = default;
  static BoxEnv bottom(size_t num_vars);
  static BoxEnv top(size_t num_vars);
  static BoxEnv initial(const Program& p);

  bool is_bot() const { return bot_; }
  size_t size() const { return size_; }
  const Interval& get(VarId v) const;
  // Setting a component to Bot collapses the whole environment.
  void set(VarId v, const Interval& value);
  void make_bot();

  friend bool operator==(const BoxEnv& a, const BoxEnv& b);

  // Components sorted by variable name: "{x:[0,1], y:[2,2]}" or "⊥".
  std::string str(const Program& p) const;

 private:
  bool bot_ = true;
  size_t size_ = 0;
  std::vector<Interval> vals_;
};

// Value of `v` in `env`, or Bot for the empty environment.
Interval get(VarId v, const BoxEnv& env);

BoxEnv box_join(const BoxEnv& a, const BoxEnv& b);
BoxEnv box_widen(const BoxEnv& a, const BoxEnv& b, const Thresholds& thresholds);
bool box_leq(const BoxEnv& a, const BoxEnv& b);

// Forward interval evaluation; labels of divisions whose divisor may be 0 are added to `alarms`.
Interval abs_eval(const Expr& e, const BoxEnv& env, LabelSet& alarms);

BoxEnv transfer_assign(VarId x, const Expr& e, const BoxEnv& env, LabelSet& alarms);
// Keeps the environments where `e cmp 0` may hold, refined by one backward pass over `e`.
BoxEnv transfer_guard(const Expr& e, Cmp cmp, const BoxEnv& env, LabelSet& alarms);

}  // namespace thesee
