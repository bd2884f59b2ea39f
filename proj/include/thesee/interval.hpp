#pragma once

#include <string>
#include <vector>

#include "thesee/ast.hpp"
#include "thesee/rational.hpp"

namespace thesee {

// Set of reals [lo,hi] with exact rational or infinite bounds, or the empty set.
// When `integral` is set the interval denotes only the integers it contains;
// bounds are then kept integral. Singleton integers are always flagged integral.
class Interval {
 public:
  Interval() = default;  // Bot
  static Interval bottom() { return Interval(); }
  static Interval top() { return of(Bound::neg_inf(), Bound::pos_inf()); }
  static Interval of(Bound lo, Bound hi, bool integral = false);
  static Interval point(const Rational& v) { return of(Bound(v), Bound(v)); }

  bool is_bot() const { return bot_; }
  const Bound& lo() const { return lo_; }
  const Bound& hi() const { return hi_; }
  bool integral() const { return integral_; }
  bool contains(const Rational& v) const;
  bool contains_zero() const { return contains(Rational(0)); }
  bool is_singleton() const { return !bot_ && lo_ == hi_; }

  friend bool operator==(const Interval& a, const Interval& b);

  // "[lo,hi]" with "inf" for infinite bounds, "⊥" when empty.
  std::string str() const;

 private:
  bool bot_ = true;
  Bound lo_;
  Bound hi_;
  bool integral_ = false;
};

struct Thresholds {
  std::vector<Rational> values;  // sorted, unique

  static Thresholds defaults();
  static Thresholds none() { return {}; }
  static Thresholds from(std::vector<Rational> values);
};

Interval ival_join(const Interval& a, const Interval& b);
Interval ival_meet(const Interval& a, const Interval& b);
Interval ival_widen(const Interval& a, const Interval& b, const Thresholds& thresholds);
bool ival_leq(const Interval& a, const Interval& b);

Interval ival_neg(const Interval& a);
Interval ival_add(const Interval& a, const Interval& b);
Interval ival_sub(const Interval& a, const Interval& b);
Interval ival_mul(const Interval& a, const Interval& b);

struct DivResult {
  Interval quotient;
  bool divisor_has_zero = false;
};
// Quotient over the non-zero part of the divisor.
DivResult ival_div(const Interval& a, const Interval& b);

// The subset of `v` whose elements satisfy `x cmp 0`.
Interval ival_constrain(Cmp cmp, const Interval& v);

// Expression denoting exactly the set of `v`. Throws BotNotRepresentable on Bot.
ExprPtr as_expr(const Interval& v);

}  // namespace thesee
