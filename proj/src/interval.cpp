#include "thesee/interval.hpp"

#include <algorithm>

#include "thesee/error.hpp"

namespace thesee {

namespace {

enum class Round { Down, Up };

Bound overflow_bound(Round r) { return r == Round::Down ? Bound::neg_inf() : Bound::pos_inf(); }

Bound add_bound(const Bound& a, const Bound& b, Round r) {
  if (!a.is_finite()) return a;
  if (!b.is_finite()) return b;
  try {
    return Bound(a.value() + b.value());
  } catch (const OverflowError&) {
    return overflow_bound(r);
  }
}

int bound_sign(const Bound& b) {
  if (b.is_neg_inf()) return -1;
  if (b.is_pos_inf()) return 1;
  return b.value().sign();
}

// Product of bounds with 0 * inf = 0, which is exact for closed bounds of real sets.
Bound mul_bound(const Bound& a, const Bound& b, Round r) {
  int sa = bound_sign(a);
  int sb = bound_sign(b);
  if (sa == 0 || sb == 0) return Bound(0);
  if (!a.is_finite() || !b.is_finite()) return sa * sb > 0 ? Bound::pos_inf() : Bound::neg_inf();
  try {
    return Bound(a.value() * b.value());
  } catch (const OverflowError&) {
    return overflow_bound(r);
  }
}

Bound ceil_bound(const Bound& b) { return b.is_finite() ? Bound(b.value().ceil()) : b; }
Bound floor_bound(const Bound& b) { return b.is_finite() ? Bound(b.value().floor()) : b; }

}  // namespace

Interval Interval::of(Bound lo, Bound hi, bool integral) {
  Interval r;
  if (integral) {
    lo = ceil_bound(lo);
    hi = floor_bound(hi);
  }
  if (lo > hi || lo.is_pos_inf() || hi.is_neg_inf()) return r;
  r.bot_ = false;
  r.lo_ = lo;
  r.hi_ = hi;
  r.integral_ = integral || (lo == hi && lo.is_finite() && lo.value().is_integer());
  return r;
}

bool Interval::contains(const Rational& v) const {
  if (bot_) return false;
  Bound b(v);
  if (b < lo_ || hi_ < b) return false;
  return !integral_ || v.is_integer();
}

bool operator==(const Interval& a, const Interval& b) {
  if (a.bot_ || b.bot_) return a.bot_ == b.bot_;
  return a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.integral_ == b.integral_;
}

std::string Interval::str() const {
  if (bot_) return "⊥";
  return "[" + lo_.str() + "," + hi_.str() + "]";
}

Thresholds Thresholds::defaults() { return from({Rational(-10000), Rational(-1), Rational(0), Rational(1), Rational(10000)}); }

Thresholds Thresholds::from(std::vector<Rational> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return Thresholds{std::move(values)};
}

Interval ival_join(const Interval& a, const Interval& b) {
  if (a.is_bot()) return b;
  if (b.is_bot()) return a;
  return Interval::of(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()), a.integral() && b.integral());
}

Interval ival_meet(const Interval& a, const Interval& b) {
  if (a.is_bot() || b.is_bot()) return Interval::bottom();
  return Interval::of(std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi()), a.integral() || b.integral());
}

Interval ival_widen(const Interval& a, const Interval& b, const Thresholds& thresholds) {
  if (a.is_bot()) return b;
  if (b.is_bot()) return a;
  Bound lo = a.lo();
  if (b.lo() < a.lo()) {
    lo = Bound::neg_inf();
    for (auto it = thresholds.values.rbegin(); it != thresholds.values.rend(); ++it) {
      if (Bound(*it) <= b.lo()) {
        lo = Bound(*it);
        break;
      }
    }
  }
  Bound hi = a.hi();
  if (b.hi() > a.hi()) {
    hi = Bound::pos_inf();
    for (const auto& t : thresholds.values) {
      if (Bound(t) >= b.hi()) {
        hi = Bound(t);
        break;
      }
    }
  }
  return Interval::of(lo, hi, a.integral() && b.integral());
}

bool ival_leq(const Interval& a, const Interval& b) {
  if (a.is_bot()) return true;
  if (b.is_bot()) return false;
  if (b.integral() && !a.integral()) return false;
  return b.lo() <= a.lo() && a.hi() <= b.hi();
}

Interval ival_neg(const Interval& a) {
  if (a.is_bot()) return a;
  return Interval::of(-a.hi(), -a.lo(), a.integral());
}

Interval ival_add(const Interval& a, const Interval& b) {
  if (a.is_bot() || b.is_bot()) return Interval::bottom();
  return Interval::of(add_bound(a.lo(), b.lo(), Round::Down), add_bound(a.hi(), b.hi(), Round::Up),
                      a.integral() && b.integral());
}

Interval ival_sub(const Interval& a, const Interval& b) { return ival_add(a, ival_neg(b)); }

Interval ival_mul(const Interval& a, const Interval& b) {
  if (a.is_bot() || b.is_bot()) return Interval::bottom();
  const Bound* xs[2] = {&a.lo(), &a.hi()};
  const Bound* ys[2] = {&b.lo(), &b.hi()};
  Bound lo = Bound::pos_inf();
  Bound hi = Bound::neg_inf();
  for (const Bound* x : xs) {
    for (const Bound* y : ys) {
      lo = std::min(lo, mul_bound(*x, *y, Round::Down));
      hi = std::max(hi, mul_bound(*x, *y, Round::Up));
    }
  }
  return Interval::of(lo, hi, a.integral() && b.integral());
}

namespace {

Bound reciprocal(const Bound& b) {
  if (!b.is_finite()) return Bound(0);
  return Bound(Rational(1) / b.value());
}

}  // namespace

DivResult ival_div(const Interval& a, const Interval& b) {
  DivResult r;
  r.divisor_has_zero = b.contains_zero();
  if (a.is_bot() || b.is_bot()) return r;
  Interval recip;
  Bound zero(0);
  if (b.lo() < zero) {
    // Negative part of the divisor.
    Bound top = b.hi() < zero ? b.hi() : (b.integral() ? Bound(-1) : zero);
    if (top.is_finite() && top.value().is_zero()) {
      recip = ival_join(recip, Interval::of(Bound::neg_inf(), reciprocal(b.lo())));
    } else if (b.lo() <= top) {
      recip = ival_join(recip, Interval::of(reciprocal(top), reciprocal(b.lo())));
    }
  }
  if (b.hi() > zero) {
    Bound bottom = b.lo() > zero ? b.lo() : (b.integral() ? Bound(1) : zero);
    if (bottom.is_finite() && bottom.value().is_zero()) {
      recip = ival_join(recip, Interval::of(reciprocal(b.hi()), Bound::pos_inf()));
    } else if (bottom <= b.hi()) {
      recip = ival_join(recip, Interval::of(reciprocal(b.hi()), reciprocal(bottom)));
    }
  }
  if (recip.is_bot()) return r;
  Interval q = ival_mul(a, Interval::of(recip.lo(), recip.hi()));
  r.quotient = Interval::of(q.lo(), q.hi());
  return r;
}

Interval ival_constrain(Cmp cmp, const Interval& v) {
  if (v.is_bot()) return v;
  Bound zero(0);
  bool integral = v.integral();
  switch (cmp) {
    case Cmp::Eq:
      return ival_meet(v, Interval::point(Rational(0)));
    case Cmp::Ne:
      if (v.lo() == zero && v.hi() == zero) return Interval::bottom();
      if (integral && v.lo() == zero) return Interval::of(Bound(1), v.hi(), true);
      if (integral && v.hi() == zero) return Interval::of(v.lo(), Bound(-1), true);
      return v;
    case Cmp::Le:
      return ival_meet(v, Interval::of(Bound::neg_inf(), zero));
    case Cmp::Ge:
      return ival_meet(v, Interval::of(zero, Bound::pos_inf()));
    case Cmp::Lt:
      if (integral) return ival_meet(v, Interval::of(Bound::neg_inf(), Bound(-1)));
      if (v.lo() >= zero) return Interval::bottom();
      return Interval::of(v.lo(), std::min(v.hi(), zero));
    case Cmp::Gt:
      if (integral) return ival_meet(v, Interval::of(Bound(1), Bound::pos_inf()));
      if (v.hi() <= zero) return Interval::bottom();
      return Interval::of(std::max(v.lo(), zero), v.hi());
  }
  return v;
}

ExprPtr as_expr(const Interval& v) {
  if (v.is_bot()) throw Error(ErrorKind::BotNotRepresentable, "empty value has no expression");
  return Expr::make_const(v.lo(), v.hi(), v.integral() && !v.is_singleton());
}

}  // namespace thesee
