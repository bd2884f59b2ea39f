#pragma once

#include "thesee/analysis.hpp"
#include "thesee/error.hpp"

namespace thesee::detail {

// Rebuilds `e` with each variable replaced by `f(var)` when that is non-null.
// Unchanged subtrees are shared with the input.
template <class F>
ExprPtr substitute_vars(const ExprPtr& e, F&& f) {
  switch (e->kind) {
    case Expr::Kind::Var: {
      ExprPtr r = f(*e);
      return r ? r : e;
    }
    case Expr::Kind::Const:
      return e;
    case Expr::Kind::Neg: {
      ExprPtr a = substitute_vars(e->lhs, f);
      return a == e->lhs ? e : Expr::make_neg(e->label, a, e->pos);
    }
    case Expr::Kind::Bin: {
      ExprPtr a = substitute_vars(e->lhs, f);
      ExprPtr b = substitute_vars(e->rhs, f);
      return a == e->lhs && b == e->rhs ? e : Expr::make_bin(e->op, e->label, a, b, e->pos);
    }
  }
  return e;
}

// Structural abstract interpreter over a state domain `D` providing:
//   State bottom(const State&), join, widen, bool equal,
//   State guard(const Stmt& at, const ExprPtr& e, Cmp, const State&),
//   State primitive(const Stmt&, const State&), void record(const Stmt&, const State&).
template <class D>
class StructuralIterator {
 public:
  using State = typename D::State;

  StructuralIterator(D& domain, const AnalyzerOptions& options) : d_(domain), o_(options) {}

  State run(const Stmt& s, const State& st) {
    switch (s.kind) {
      case Stmt::Kind::Seq: {
        State cur = st;
        for (const auto& c : s.children) cur = run(*c, cur);
        return cur;
      }
      case Stmt::Kind::If: {
        State then_branch = run(*s.body, d_.guard(s, s.expr, s.cmp, st));
        return d_.join(then_branch, d_.guard(s, s.expr, negate(s.cmp), st));
      }
      case Stmt::Kind::While:
        return loop(s, st);
      default:
        d_.record(s, st);
        return d_.primitive(s, st);
    }
  }

 private:
  State loop(const Stmt& s, const State& entry) {
    auto body = [&](const State& x) { return d_.join(entry, run(*s.body, d_.guard(s, s.expr, s.cmp, x))); };
    State x = d_.bottom(entry);
    while (true) {
      if (++steps_ > o_.max_loop_steps) throw Error(ErrorKind::Budget, "loop iteration budget exhausted");
      State next = d_.widen(x, body(x));
      if (d_.equal(next, x)) break;
      x = std::move(next);
    }
    if (o_.decreasing_pass) x = body(x);
    return d_.guard(s, s.expr, negate(s.cmp), x);
  }

  D& d_;
  const AnalyzerOptions& o_;
  size_t steps_ = 0;
};

}  // namespace thesee::detail
