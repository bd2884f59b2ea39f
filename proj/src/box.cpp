#include "thesee/box.hpp"

#include <unordered_map>

namespace thesee {

namespace {

const Interval& bot_interval() {
  static const Interval bot;
  return bot;
}

}  // namespace

BoxEnv BoxEnv::bottom(size_t num_vars) {
  BoxEnv e;
  e.size_ = num_vars;
  return e;
}

BoxEnv BoxEnv::top(size_t num_vars) {
  BoxEnv e;
  e.bot_ = false;
  e.size_ = num_vars;
  e.vals_.assign(num_vars, Interval::top());
  return e;
}

BoxEnv BoxEnv::initial(const Program& p) {
  BoxEnv e;
  e.bot_ = false;
  e.size_ = p.num_vars();
  for (const auto& v : p.variables) e.vals_.push_back(Interval::of(v.lo, v.hi));
  return e;
}

const Interval& BoxEnv::get(VarId v) const { return bot_ ? bot_interval() : vals_[v]; }

void BoxEnv::set(VarId v, const Interval& value) {
  if (bot_) return;
  if (value.is_bot()) {
    make_bot();
    return;
  }
  vals_[v] = value;
}

void BoxEnv::make_bot() {
  bot_ = true;
  vals_.clear();
}

bool operator==(const BoxEnv& a, const BoxEnv& b) {
  if (a.bot_ || b.bot_) return a.bot_ == b.bot_;
  return a.vals_ == b.vals_;
}

std::string BoxEnv::str(const Program& p) const {
  if (bot_) return "⊥";
  std::string out = "{";
  bool first = true;
  for (VarId v : p.vars_by_name()) {
    if (!first) out += ", ";
    first = false;
    out += p.variables[v].name + ":" + vals_[v].str();
  }
  return out + "}";
}

Interval get(VarId v, const BoxEnv& env) { return env.get(v); }

BoxEnv box_join(const BoxEnv& a, const BoxEnv& b) {
  if (a.is_bot()) return b;
  if (b.is_bot()) return a;
  BoxEnv r = a;
  for (VarId v = 0; v < a.size(); ++v) r.set(v, ival_join(a.get(v), b.get(v)));
  return r;
}

BoxEnv box_widen(const BoxEnv& a, const BoxEnv& b, const Thresholds& thresholds) {
  if (a.is_bot()) return b;
  if (b.is_bot()) return a;
  BoxEnv r = a;
  for (VarId v = 0; v < a.size(); ++v) r.set(v, ival_widen(a.get(v), b.get(v), thresholds));
  return r;
}

bool box_leq(const BoxEnv& a, const BoxEnv& b) {
  if (a.is_bot()) return true;
  if (b.is_bot()) return false;
  for (VarId v = 0; v < a.size(); ++v) {
    if (!ival_leq(a.get(v), b.get(v))) return false;
  }
  return true;
}

namespace {

using ValueCache = std::unordered_map<const Expr*, Interval>;

Interval eval_rec(const Expr& e, const BoxEnv& env, LabelSet& alarms, ValueCache* cache) {
  Interval r;
  switch (e.kind) {
    case Expr::Kind::Var:
      r = env.get(e.var);
      break;
    case Expr::Kind::Const:
      r = Interval::of(e.lo, e.hi, e.integral);
      break;
    case Expr::Kind::Neg:
      r = ival_neg(eval_rec(*e.lhs, env, alarms, cache));
      break;
    case Expr::Kind::Bin: {
      Interval a = eval_rec(*e.lhs, env, alarms, cache);
      Interval b = eval_rec(*e.rhs, env, alarms, cache);
      switch (e.op) {
        case BinOp::Add:
          r = ival_add(a, b);
          break;
        case BinOp::Sub:
          r = ival_sub(a, b);
          break;
        case BinOp::Mul:
          r = ival_mul(a, b);
          break;
        case BinOp::Div: {
          DivResult d = ival_div(a, b);
          if (d.divisor_has_zero) alarms.insert(e.label);
          r = d.quotient;
          break;
        }
      }
      break;
    }
  }
  if (cache != nullptr) (*cache)[&e] = r;
  return r;
}

// Narrows `env` so that `e` may evaluate into `want` (single top-down sweep).
void refine(const Expr& e, const Interval& want, const ValueCache& cache, BoxEnv& env) {
  if (env.is_bot()) return;
  Interval here = ival_meet(cache.at(&e), want);
  if (here.is_bot()) {
    env.make_bot();
    return;
  }
  switch (e.kind) {
    case Expr::Kind::Var:
      env.set(e.var, ival_meet(env.get(e.var), here));
      return;
    case Expr::Kind::Const:
      return;
    case Expr::Kind::Neg:
      refine(*e.lhs, ival_neg(here), cache, env);
      return;
    case Expr::Kind::Bin: {
      const Interval& l = cache.at(e.lhs.get());
      const Interval& r = cache.at(e.rhs.get());
      switch (e.op) {
        case BinOp::Add:
          refine(*e.lhs, ival_sub(here, r), cache, env);
          refine(*e.rhs, ival_sub(here, l), cache, env);
          return;
        case BinOp::Sub:
          refine(*e.lhs, ival_add(here, r), cache, env);
          refine(*e.rhs, ival_sub(l, here), cache, env);
          return;
        case BinOp::Mul:
          if (!r.contains_zero()) refine(*e.lhs, ival_div(here, r).quotient, cache, env);
          if (!l.contains_zero()) refine(*e.rhs, ival_div(here, l).quotient, cache, env);
          return;
        case BinOp::Div:
          refine(*e.lhs, ival_mul(here, r), cache, env);
          return;
      }
    }
  }
}

}  // namespace

Interval abs_eval(const Expr& e, const BoxEnv& env, LabelSet& alarms) {
  if (env.is_bot()) return Interval::bottom();
  return eval_rec(e, env, alarms, nullptr);
}

BoxEnv transfer_assign(VarId x, const Expr& e, const BoxEnv& env, LabelSet& alarms) {
  if (env.is_bot()) return env;
  Interval v = eval_rec(e, env, alarms, nullptr);
  BoxEnv r = env;
  r.set(x, v);
  return r;
}

BoxEnv transfer_guard(const Expr& e, Cmp cmp, const BoxEnv& env, LabelSet& alarms) {
  if (env.is_bot()) return env;
  ValueCache cache;
  Interval v = eval_rec(e, env, alarms, &cache);
  Interval want = ival_constrain(cmp, v);
  BoxEnv r = env;
  if (want.is_bot()) {
    r.make_bot();
    return r;
  }
  refine(e, want, cache, r);
  return r;
}

}  // namespace thesee
