#include <random>

#include "doctest.h"
#include "support/util.hpp"
#include "thesee/box.hpp"
#include "thesee/concrete.hpp"
#include "thesee/error.hpp"
#include "thesee/interval.hpp"

using namespace thesee;

namespace {

Interval iv(int64_t lo, int64_t hi) { return Interval::of(Bound(lo), Bound(hi)); }

// Random expression over variables 0..nvars-1 with small constants.
class ExprGen {
 public:
  ExprGen(uint64_t seed, size_t nvars) : rng_(seed), nvars_(nvars) {}

  ExprPtr gen(int depth) {
    int pick = roll(0, 9);
    if (depth == 0 || pick < 3) {
      if (roll(0, 1) == 0) {
        VarId v = static_cast<VarId>(roll(0, static_cast<int>(nvars_) - 1));
        return Expr::make_var(v, std::string(1, static_cast<char>('a' + v)));
      }
      int a = roll(-3, 3);
      int b = roll(0, 1) ? a : roll(a, 3);
      return Expr::make_const(a, b);
    }
    if (pick == 3) return Expr::make_neg(next_label_++, gen(depth - 1));
    static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div};
    return Expr::make_bin(ops[roll(0, 3)], next_label_++, gen(depth - 1), gen(depth - 1));
  }

  int roll(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
  size_t nvars_;
  Label next_label_ = 1;
};

}  // namespace

TEST_CASE("interval lattice operations") {
  CHECK(ival_join(iv(0, 1), iv(2, 3)) == iv(0, 3));
  CHECK(ival_meet(iv(0, 5), iv(3, 9)) == iv(3, 5));
  CHECK(ival_meet(iv(0, 1), iv(2, 3)).is_bot());
  CHECK(ival_widen(iv(0, 1), iv(0, 2), Thresholds::none()) == Interval::of(Bound(0), Bound::pos_inf()));
  CHECK(ival_widen(Interval::bottom(), iv(4, 7), Thresholds::none()) == iv(4, 7));
  CHECK(ival_widen(iv(0, 1), iv(0, 2), Thresholds::defaults()) == iv(0, 10000));
  CHECK(ival_widen(iv(0, 1), iv(-2, 1), Thresholds::defaults()) == iv(-10000, 1));
  CHECK(ival_widen(iv(0, 1), iv(0, 1), Thresholds::defaults()) == iv(0, 1));
  CHECK(ival_leq(iv(1, 2), iv(0, 3)));
  CHECK_FALSE(ival_leq(iv(-1, 2), iv(0, 3)));
  CHECK(ival_leq(Interval::bottom(), iv(0, 0)));
}

TEST_CASE("widening with thresholds stabilizes within #thresholds + 2 steps per bound") {
  Thresholds th = Thresholds::defaults();
  for (int64_t step : {1, 3, 1000, 20000}) {
    Interval x = Interval::bottom();
    size_t changes = 0;
    for (int64_t i = 0; i < 100; ++i) {
      Interval next = ival_widen(x, iv(-i * step, i * step), th);
      if (!(next == x)) ++changes;
      x = next;
    }
    CHECK(changes <= 2 * (th.values.size() + 2));
    CHECK(x.contains(Rational(-99 * step)));
    CHECK(x.contains(Rational(99 * step)));
    CHECK(x.hi().is_pos_inf() == (99 * step > 10000));
  }
}

TEST_CASE("integral intervals") {
  Interval a = Interval::of(Bound(Rational::make(1, 2)), Bound(Rational::make(7, 2)), true);
  CHECK(a == Interval::of(Bound(1), Bound(3), true));
  CHECK(Interval::point(2).integral());
  CHECK(ival_constrain(Cmp::Lt, Interval::of(Bound(-5), Bound(5), true)) == Interval::of(Bound(-5), Bound(-1), true));
  CHECK(ival_constrain(Cmp::Lt, iv(-5, 5)) == iv(-5, 0));
  CHECK(ival_constrain(Cmp::Ne, Interval::point(0)).is_bot());
}

TEST_CASE("arithmetic") {
  CHECK(ival_add(iv(1, 2), iv(3, 4)) == iv(4, 6));
  CHECK(ival_sub(iv(1, 2), iv(3, 4)) == iv(-3, -1));
  CHECK(ival_mul(iv(-1, 2), iv(3, 4)) == iv(-4, 8));
  CHECK(ival_mul(iv(0, 0), Interval::top()) == iv(0, 0));
  CHECK(ival_neg(iv(1, 2)) == iv(-2, -1));
  auto d = ival_div(iv(1, 1), iv(-1, 1));
  CHECK(d.divisor_has_zero);
  CHECK(d.quotient == Interval::top());
  auto z = ival_div(iv(1, 1), iv(0, 0));
  CHECK(z.divisor_has_zero);
  CHECK(z.quotient.is_bot());
  auto q = ival_div(iv(1, 1), iv(2, 4));
  CHECK_FALSE(q.divisor_has_zero);
  CHECK(q.quotient == Interval::of(Bound(Rational::make(1, 4)), Bound(Rational::make(1, 2))));
}

TEST_CASE("environment accessors") {
  Program p = parse_program("var x = [1,2]; var y; thread 1 { x <- y; }");
  VarId x = *p.find_var("x");
  VarId y = *p.find_var("y");
  BoxEnv env = BoxEnv::initial(p);
  CHECK(get(x, env) == iv(1, 2));
  CHECK(get(y, env) == iv(0, 0));
  CHECK(get(x, BoxEnv::bottom(p.num_vars())).is_bot());
  CHECK(env.str(p) == "{x:[1,2], y:[0,0]}");
  env.set(y, Interval::bottom());
  CHECK(env.is_bot());
}

TEST_CASE("value to expression conversion") {
  ExprPtr e = as_expr(iv(0, 5));
  REQUIRE(e->kind == Expr::Kind::Const);
  CHECK(e->lo == Bound(0));
  CHECK(e->hi == Bound(5));
  ExprPtr u = as_expr(Interval::of(Bound::neg_inf(), Bound(3)));
  CHECK(u->lo.is_neg_inf());
  CHECK(u->hi == Bound(3));
  try {
    as_expr(Interval::bottom());
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::BotNotRepresentable);
  }
}

TEST_CASE("transfer functions") {
  Program p = parse_program("thread 1 { x <- [1,2] + [3,4]; y <- 1 / [-1,1]; if x <= 0 then { } }");
  VarId x = *p.find_var("x");
  VarId y = *p.find_var("y");
  const Stmt& body = *p.threads[0].body;
  LabelSet alarms;
  BoxEnv top = BoxEnv::top(p.num_vars());
  BoxEnv r1 = transfer_assign(x, *body.children[0]->expr, top, alarms);
  CHECK(get(x, r1) == iv(4, 6));
  CHECK(alarms.empty());
  BoxEnv r2 = transfer_assign(y, *body.children[1]->expr, top, alarms);
  CHECK(get(y, r2) == Interval::top());
  CHECK(alarms == LabelSet{2});

  BoxEnv r3 = BoxEnv::top(p.num_vars());
  r3.set(x, iv(-5, 10));
  LabelSet none;
  BoxEnv g = transfer_guard(*Expr::make_var(x, "x"), Cmp::Le, r3, none);
  CHECK(get(x, g) == iv(-5, 0));
  CHECK(transfer_guard(*Expr::make_var(x, "x"), Cmp::Gt, BoxEnv::initial(p), none).is_bot());
}

TEST_CASE("guards refine through arithmetic") {
  Program p = parse_program("var x = [0,20]; thread 1 { if x - 10 < 0 then { } }");
  VarId x = *p.find_var("x");
  const Stmt* s = thesee::testing::find_stmt(*p.threads[0].body, Stmt::Kind::If);
  LabelSet alarms;
  BoxEnv g = transfer_guard(*s->expr, s->cmp, BoxEnv::initial(p), alarms);
  CHECK(get(x, g) == iv(0, 10));
}

TEST_CASE("abstract evaluation over-approximates concrete evaluation") {
  const size_t kVars = 3;
  size_t cases = 0;
  for (uint64_t seed = 1; cases < 10000; ++seed) {
    ExprGen gen(seed, kVars);
    ExprPtr e = gen.gen(3);
    BoxEnv box = BoxEnv::top(kVars);
    std::vector<std::pair<int, int>> ranges;
    for (VarId v = 0; v < kVars; ++v) {
      int lo = gen.roll(-3, 3);
      int hi = gen.roll(lo, 3);
      ranges.emplace_back(lo, hi);
      box.set(v, iv(lo, hi));
    }
    LabelSet alarms;
    Interval abs = abs_eval(*e, box, alarms);
    for (int s = 0; s < 8; ++s) {
      ConcreteEnv env(kVars);
      for (VarId v = 0; v < kVars; ++v) env[v] = gen.roll(ranges[v].first, ranges[v].second);
      EvalResult r;
      try {
        r = eval_concrete(*e, env);
      } catch (const OverflowError&) {
        continue;
      }
      ++cases;
      for (const Rational& val : r.values) {
        if (!abs.contains(val)) {
          FAIL_CHECK(to_string(*e) << " yields " << val.str() << " outside " << abs.str());
        }
      }
      for (Label l : r.errors) {
        if (!alarms.count(l)) FAIL_CHECK(to_string(*e) << " misses alarm " << l);
      }
    }
  }
  CHECK(cases >= 10000);
}
