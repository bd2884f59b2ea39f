#include "thesee/transforms.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include "thesee/concrete.hpp"
#include "thesee/error.hpp"

namespace thesee {

const char* rule_name(RuleId r) {
  switch (r) {
    case RuleId::RedundantStore:
      return "redundant-store";
    case RuleId::IdentityStore:
      return "identity-store";
    case RuleId::ReorderAssigns:
      return "reorder-assigns";
    case RuleId::ReorderGuards:
      return "reorder-guards";
    case RuleId::GuardBeforeAssign:
      return "guard-before-assign";
    case RuleId::AssignBeforeGuard:
      return "assign-before-guard";
    case RuleId::AssignPropagation:
      return "assign-propagation";
    case RuleId::SubexprElim:
      return "subexpr-elim";
    case RuleId::ExprSimplify:
      return "expr-simplify";
  }
  return "?";
}

const char* side_condition_name(SideCondition c) {
  switch (c) {
    case SideCondition::Nonblock:
      return "nonblock";
    case SideCondition::Noerror:
      return "noerror";
    case SideCondition::Deterministic:
      return "deterministic";
    case SideCondition::Local:
      return "local";
    case SideCondition::Fresh:
      return "fresh";
    case SideCondition::Disjoint:
      return "disjoint";
  }
  return "?";
}

namespace {

// Visits every division node of `e`.
void for_each_division(const Expr& e, const std::function<void(const Expr&)>& f) {
  if (e.kind == Expr::Kind::Bin) {
    if (e.op == BinOp::Div) f(e);
    for_each_division(*e.lhs, f);
    for_each_division(*e.rhs, f);
  } else if (e.kind == Expr::Kind::Neg) {
    for_each_division(*e.lhs, f);
  }
}

bool has_interval_constant(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return e.lo != e.hi;
    case Expr::Kind::Var:
      return false;
    case Expr::Kind::Neg:
      return has_interval_constant(*e.lhs);
    case Expr::Kind::Bin:
      return has_interval_constant(*e.lhs) || has_interval_constant(*e.rhs);
  }
  return true;
}

}  // namespace

bool check_nonblock(const Expr& e) {
  bool ok = true;
  BoxEnv top = BoxEnv::top(0);
  for_each_division(e, [&](const Expr& d) {
    const Expr& divisor = *d.rhs;
    if (divisor.kind == Expr::Kind::Const && divisor.lo < divisor.hi) return;
    LabelSet ignored;
    // Variables evaluate to top, so only variable-free divisors can be proven non-zero.
    std::vector<VarId> vars;
    expr_vars(divisor, vars);
    if (!vars.empty()) {
      ok = false;
      return;
    }
    if (abs_eval(divisor, top, ignored).contains_zero()) ok = false;
  });
  return ok;
}

bool check_noerror(const Expr& e) {
  std::vector<VarId> vars;
  expr_vars(e, vars);
  VarId n = 0;
  for (VarId v : vars) n = std::max(n, v + 1);
  LabelSet alarms;
  abs_eval(e, BoxEnv::top(n), alarms);
  return alarms.empty();
}

bool check_deterministic(const Expr& e) { return !has_interval_constant(e) && check_nonblock(e); }

namespace {

std::set<VarId> vars_of(const Expr& e) {
  std::vector<VarId> v;
  expr_vars(e, v);
  return {v.begin(), v.end()};
}

std::optional<VarId> lval(const Stmt& s) {
  if (s.kind == Stmt::Kind::Assign || s.kind == Stmt::Kind::IsLocked) return s.var;
  return std::nullopt;
}

StmtPtr with_expr(const Stmt& s, ExprPtr e) {
  if (s.kind == Stmt::Kind::Assign) return Stmt::make_assign(s.var, s.var_name, std::move(e), s.id, s.pos);
  return Stmt::make_guard(std::move(e), s.cmp, s.id, s.pos);
}

bool is_const(const Expr& e, int v) {
  return e.kind == Expr::Kind::Const && e.lo == e.hi && e.lo.is_finite() && e.lo.value() == Rational(v);
}

// Rewrites from a fixed catalog, each denoting a subset of the original values and errors.
ExprPtr simplify_node(const Expr& e) {
  if (e.kind == Expr::Kind::Neg) {
    if (e.lhs->kind == Expr::Kind::Neg) return e.lhs->lhs;
    if (e.lhs->kind == Expr::Kind::Const && e.lhs->lo == e.lhs->hi && e.lhs->lo.is_finite()) {
      Rational v = -e.lhs->lo.value();
      return Expr::make_const(Bound(v), Bound(v));
    }
    return nullptr;
  }
  if (e.kind != Expr::Kind::Bin) return nullptr;
  const Expr& a = *e.lhs;
  const Expr& b = *e.rhs;
  switch (e.op) {
    case BinOp::Add:
      if (is_const(b, 0)) return e.lhs;
      if (is_const(a, 0)) return e.rhs;
      break;
    case BinOp::Sub:
      if (is_const(b, 0)) return e.lhs;
      break;
    case BinOp::Mul:
      if (is_const(b, 1)) return e.lhs;
      if (is_const(a, 1)) return e.rhs;
      break;
    case BinOp::Div:
      if (is_const(b, 1)) return e.lhs;
      break;
  }
  bool point_a = a.kind == Expr::Kind::Const && a.lo == a.hi && a.lo.is_finite();
  bool point_b = b.kind == Expr::Kind::Const && b.lo == b.hi && b.lo.is_finite();
  if (!point_a || !point_b) return nullptr;
  const Rational& x = a.lo.value();
  const Rational& y = b.lo.value();
  try {
    Rational r;
    switch (e.op) {
      case BinOp::Add:
        r = x + y;
        break;
      case BinOp::Sub:
        r = x - y;
        break;
      case BinOp::Mul:
        r = x * y;
        break;
      case BinOp::Div:
        if (y == Rational(0)) return nullptr;
        r = x / y;
        break;
    }
    return Expr::make_const(Bound(r), Bound(r));
  } catch (const OverflowError&) {
    return nullptr;
  }
}

// Subexpression nodes in depth-first order.
void collect_nodes(const ExprPtr& e, std::vector<ExprPtr>& out) {
  out.push_back(e);
  if (e->kind == Expr::Kind::Neg) collect_nodes(e->lhs, out);
  if (e->kind == Expr::Kind::Bin) {
    collect_nodes(e->lhs, out);
    collect_nodes(e->rhs, out);
  }
}

// Rebuilds `e` with `f` applied bottom-up; `f` returns null to keep a node.
ExprPtr rewrite(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& f) {
  ExprPtr cur = e;
  if (e->kind == Expr::Kind::Neg) {
    ExprPtr a = rewrite(e->lhs, f);
    if (a != e->lhs) cur = Expr::make_neg(e->label, a, e->pos);
  } else if (e->kind == Expr::Kind::Bin) {
    ExprPtr a = rewrite(e->lhs, f);
    ExprPtr b = rewrite(e->rhs, f);
    if (a != e->lhs || b != e->rhs) cur = Expr::make_bin(e->op, e->label, a, b, e->pos);
  }
  ExprPtr r = f(cur);
  return r ? r : cur;
}

ExprPtr replace_node(const ExprPtr& e, const Expr* target, const ExprPtr& with) {
  return rewrite(e, [&](const ExprPtr& n) -> ExprPtr { return n.get() == target ? with : nullptr; });
}

class RuleApplier {
 public:
  RuleApplier(const ControlPath& path, const RuleContext& ctx) : path_(path), ctx_(ctx) {}

  RuleResult run(RuleId r) {
    for (size_t i = 0; i < path_.size(); ++i) {
      switch (r) {
        case RuleId::RedundantStore:
          redundant_store(i);
          break;
        case RuleId::IdentityStore:
          identity_store(i);
          break;
        case RuleId::ReorderAssigns:
          reorder_assigns(i);
          break;
        case RuleId::ReorderGuards:
          reorder_guards(i);
          break;
        case RuleId::GuardBeforeAssign:
          guard_before_assign(i);
          break;
        case RuleId::AssignBeforeGuard:
          assign_before_guard(i);
          break;
        case RuleId::AssignPropagation:
          assign_propagation(i);
          break;
        case RuleId::SubexprElim:
          for (size_t len = 1; len <= 3 && i + len <= path_.size(); ++len) subexpr_elim(i, len);
          break;
        case RuleId::ExprSimplify:
          expr_simplify(i);
          break;
      }
    }
    return std::move(out_);
  }

 private:
  bool check(SideCondition c, bool holds) const { return holds || ctx_.unchecked.count(c) != 0; }
  bool nonblock(const Expr& e) const { return check(SideCondition::Nonblock, check_nonblock(e)); }
  bool noerror(const Expr& e) const { return check(SideCondition::Noerror, check_noerror(e)); }
  bool deterministic(const Expr& e) const { return check(SideCondition::Deterministic, check_deterministic(e)); }
  bool local(VarId v) const {
    auto it = ctx_.vars.local.find(ctx_.thread);
    return check(SideCondition::Local, it != ctx_.vars.local.end() && it->second.count(v) != 0);
  }
  bool all_local(const Expr& e) const {
    auto vs = vars_of(e);
    return std::all_of(vs.begin(), vs.end(), [&](VarId v) { return local(v); });
  }

  const Stmt& at(size_t i) const { return *path_[i]; }
  bool is(size_t i, Stmt::Kind k) const { return i < path_.size() && path_[i]->kind == k; }

  void emit(size_t i, size_t len, std::vector<StmtPtr> with) {
    ControlPath p(path_.begin(), path_.begin() + static_cast<ptrdiff_t>(i));
    p.insert(p.end(), with.begin(), with.end());
    p.insert(p.end(), path_.begin() + static_cast<ptrdiff_t>(i + len), path_.end());
    out_.paths.push_back(std::move(p));
  }
  void skip() { ++out_.skipped; }

  void redundant_store(size_t i) {
    if (!is(i, Stmt::Kind::Assign) || !is(i + 1, Stmt::Kind::Assign) || at(i).var != at(i + 1).var) return;
    if (expr_mentions(*at(i + 1).expr, at(i).var) || !nonblock(*at(i).expr)) return skip();
    emit(i, 2, {path_[i + 1]});
  }

  void identity_store(size_t i) {
    if (!is(i, Stmt::Kind::Assign)) return;
    const Expr& e = *at(i).expr;
    if (e.kind == Expr::Kind::Var && e.var == at(i).var) emit(i, 1, {});
  }

  void reorder_assigns(size_t i) {
    if (!is(i, Stmt::Kind::Assign) || !is(i + 1, Stmt::Kind::Assign)) return;
    const Stmt& a = at(i);
    const Stmt& b = at(i + 1);
    if (a.var == b.var) return;
    if (expr_mentions(*b.expr, a.var) || expr_mentions(*a.expr, b.var) || !nonblock(*a.expr)) return skip();
    emit(i, 2, {path_[i + 1], path_[i]});
  }

  void reorder_guards(size_t i) {
    if (!is(i, Stmt::Kind::Guard) || !is(i + 1, Stmt::Kind::Guard)) return;
    if (!noerror(*at(i + 1).expr)) return skip();
    emit(i, 2, {path_[i + 1], path_[i]});
  }

  void guard_before_assign(size_t i) {
    if (!is(i, Stmt::Kind::Assign) || !is(i + 1, Stmt::Kind::Guard)) return;
    const Stmt& a = at(i);
    const Stmt& g = at(i + 1);
    if (expr_mentions(*g.expr, a.var)) return skip();
    if (!(check_nonblock(*a.expr) || check_noerror(*g.expr)) && ctx_.unchecked.count(SideCondition::Nonblock) == 0 &&
        ctx_.unchecked.count(SideCondition::Noerror) == 0) {
      return skip();
    }
    emit(i, 2, {path_[i + 1], path_[i]});
  }

  void assign_before_guard(size_t i) {
    if (!is(i, Stmt::Kind::Guard) || !is(i + 1, Stmt::Kind::Assign)) return;
    const Stmt& g = at(i);
    const Stmt& a = at(i + 1);
    if (expr_mentions(*g.expr, a.var) || !local(a.var) || !noerror(*a.expr)) return skip();
    emit(i, 2, {path_[i + 1], path_[i]});
  }

  void assign_propagation(size_t i) {
    if (!is(i, Stmt::Kind::Assign) || i + 1 >= path_.size() || !at(i + 1).expr) return;
    const Stmt& a = at(i);
    const Stmt& s = at(i + 1);
    if (!expr_mentions(*s.expr, a.var)) return;
    if (expr_mentions(*a.expr, a.var) || !all_local(*a.expr) || !deterministic(*a.expr)) return skip();
    std::vector<ExprPtr> nodes;
    collect_nodes(s.expr, nodes);
    std::vector<const Expr*> occ;
    for (const auto& n : nodes) {
      if (n->kind == Expr::Kind::Var && n->var == a.var) occ.push_back(n.get());
    }
    size_t k = std::min<size_t>(occ.size(), ctx_.max_occurrences);
    for (size_t mask = 1; mask < (size_t{1} << k); ++mask) {
      ExprPtr e = rewrite(s.expr, [&](const ExprPtr& n) -> ExprPtr {
        for (size_t j = 0; j < k; ++j) {
          if (((mask >> j) & 1U) && n.get() == occ[j]) return a.expr;
        }
        return nullptr;
      });
      emit(i, 2, {path_[i], with_expr(s, e)});
    }
  }

  void subexpr_elim(size_t i, size_t len) {
    if (!ctx_.fresh_var) return;
    for (size_t k = i; k < i + len; ++k) {
      if (ctx_.scheduled && at(k).is_sync()) return;
    }
    std::vector<ExprPtr> candidates;
    for (size_t k = i; k < i + len; ++k) {
      if (!at(k).expr) continue;
      std::vector<ExprPtr> nodes;
      collect_nodes(at(k).expr, nodes);
      for (const auto& n : nodes) {
        if (n->kind != Expr::Kind::Bin && n->kind != Expr::Kind::Neg) continue;
        bool dup = std::any_of(candidates.begin(), candidates.end(),
                               [&](const ExprPtr& c) { return expr_equal(*c, *n, false); });
        if (!dup) candidates.push_back(n);
      }
    }
    VarId x = *ctx_.fresh_var;
    for (const auto& e : candidates) {
      auto vs = vars_of(*e);
      bool disjoint = true;
      for (size_t k = i; k < i + len; ++k) {
        auto lv = lval(at(k));
        if (lv && vs.count(*lv) != 0) disjoint = false;
      }
      bool fresh = ctx_.vars.fresh.count(x) != 0;
      if (!check(SideCondition::Disjoint, disjoint) || !check(SideCondition::Fresh, fresh) || !noerror(*e)) {
        skip();
        continue;
      }
      ExprPtr var = Expr::make_var(x, ctx_.fresh_name);
      std::vector<StmtPtr> window = {Stmt::make_assign(x, ctx_.fresh_name, e, path_[i]->id, path_[i]->pos)};
      for (size_t k = i; k < i + len; ++k) {
        if (!at(k).expr) {
          window.push_back(path_[k]);
          continue;
        }
        ExprPtr r = rewrite(at(k).expr, [&](const ExprPtr& n) -> ExprPtr {
          return expr_equal(*n, *e, false) ? var : nullptr;
        });
        window.push_back(r == at(k).expr ? path_[k] : with_expr(at(k), r));
      }
      emit(i, len, std::move(window));
    }
  }

  void expr_simplify(size_t i) {
    if (!at(i).expr) return;
    std::vector<ExprPtr> nodes;
    collect_nodes(at(i).expr, nodes);
    for (const auto& n : nodes) {
      ExprPtr simpler = simplify_node(*n);
      if (!simpler) continue;
      if (!all_local(*n)) {
        skip();
        continue;
      }
      emit(i, 1, {with_expr(at(i), replace_node(at(i).expr, n.get(), simpler))});
    }
  }

  const ControlPath& path_;
  const RuleContext& ctx_;
  RuleResult out_;
};

}  // namespace

RuleResult apply_rule(RuleId r, const ControlPath& path, const RuleContext& ctx) {
  return RuleApplier(path, ctx).run(r);
}

namespace {

LabelSet analyzer_errors(const Program& p, const FuzzOptions& o) {
  if (o.scheduled) {
    AnalyzerOptions a = o.analyzer;
    return analyze_program_C(p, a).errors;
  }
  return analyze_program_I(p, o.analyzer).errors;
}

std::map<ThreadId, std::vector<ControlPath>> thread_paths(const Program& p, unsigned unroll) {
  std::map<ThreadId, std::vector<ControlPath>> out;
  for (const auto& t : p.threads) out[t.id] = paths(t.body, unroll).paths;
  return out;
}

}  // namespace

FuzzTrial check_transformed(const Program& transformed, const std::map<ThreadId, std::vector<ControlPath>>& tpaths,
                            const LabelSet& analyzer_errs, const FuzzOptions& options) {
  OracleOptions oo;
  oo.unroll = options.unroll;
  oo.budget = options.budget;
  oo.thread_paths = &tpaths;
  OracleResult r = options.scheduled ? run_scheduled(transformed, oo) : run_interleavings(transformed, oo);
  SoundnessReport rep = check_soundness_inclusion(r, analyzer_errs);
  FuzzTrial t;
  t.oracle_errors = r.errors;
  t.analyzer_errors = analyzer_errs;
  t.verdict = rep.verdict;
  t.witnesses = rep.witnesses;
  return t;
}

FuzzReport fuzz_weakmem(const Program& p, const FuzzOptions& options) {
  FuzzReport report;
  for (RuleId r : kAllRules) report.rules[r];
  LabelSet analyzed = analyzer_errors(p, options);
  auto base = thread_paths(p, options.unroll);
  std::mt19937_64 master(options.seed);
  for (size_t n = 0; n < options.trials; ++n) {
    uint64_t seed = master();
    std::mt19937_64 rng(seed);
    Program q = p;
    auto tp = base;
    std::vector<std::string> chain;
    std::vector<RuleId> used;
    unsigned length = 1 + static_cast<unsigned>(rng() % options.max_chain);
    std::optional<std::pair<ThreadId, size_t>> last;
    for (unsigned step = 0; step < length; ++step) {
      ThreadId t;
      size_t idx;
      if (last && rng() % 2 == 0) {
        std::tie(t, idx) = *last;
      } else {
        t = q.threads[rng() % q.threads.size()].id;
        if (tp[t].empty()) continue;
        idx = rng() % tp[t].size();
      }
      std::string fresh = "tmp" + std::to_string(q.num_vars());
      q.variables.push_back({fresh, Bound(0), Bound(0), true, false});
      RuleContext ctx;
      ctx.thread = t;
      ctx.vars = classify_vars(q, &tp);
      ctx.fresh_var = static_cast<VarId>(q.num_vars() - 1);
      ctx.fresh_name = fresh;
      ctx.scheduled = options.scheduled;
      std::vector<RuleId> order(std::begin(kAllRules), std::end(kAllRules));
      std::shuffle(order.begin(), order.end(), rng);
      bool applied = false;
      for (RuleId r : order) {
        RuleResult rr = apply_rule(r, tp[t][idx], ctx);
        report.rules[r].skipped += rr.skipped;
        if (rr.paths.empty()) continue;
        tp[t].push_back(rr.paths[rng() % rr.paths.size()]);
        last = {t, tp[t].size() - 1};
        report.rules[r].applied += 1;
        chain.push_back("t" + std::to_string(t) + ":" + rule_name(r));
        used.push_back(r);
        applied = true;
        if (r != RuleId::SubexprElim) q.variables.pop_back();
        break;
      }
      if (!applied) q.variables.pop_back();
    }
    FuzzTrial trial = check_transformed(q, tp, analyzed, options);
    trial.seed = seed;
    trial.chain = std::move(chain);
    if (trial.verdict == Verdict::Fail) {
      ++report.violations;
      for (RuleId r : used) ++report.rules[r].violations;
    } else if (trial.verdict == Verdict::Inconclusive) {
      ++report.inconclusive;
    }
    report.trials.push_back(std::move(trial));
  }
  return report;
}

namespace {

struct ControlSpec {
  const char* name;
  const char* description;
  const char* source;
  ThreadId thread;
  std::optional<RuleId> rule;
  std::set<SideCondition> unchecked;
  // Name of an existing variable reused as the "fresh" temporary.
  const char* temp = nullptr;
};

const ControlSpec kControls[] = {
    {"reorder-blocking-assign", "assignments reordered although the first one always divides by zero",
     "var z = 0;\nthread 1 {\n  x <- 1 / 0;\n  y <- 1 / z;\n}\n", 1, RuleId::ReorderAssigns,
     {SideCondition::Nonblock}},
    {"drop-blocking-store", "store eliminated although it always divides by zero",
     "thread 1 {\n  x <- 1 / 0;\n  x <- 1;\n  y <- 1 / (x - 1);\n}\n", 1, RuleId::RedundantStore,
     {SideCondition::Nonblock}},
    {"hoist-shared-store", "store to a shared variable hoisted above an infeasible guard",
     "thread 1 {\n  if 1 = 0 then {\n    s <- 1;\n  }\n}\nthread 2 {\n  y <- 1 / (s - 1);\n}\n", 1,
     RuleId::AssignBeforeGuard, {SideCondition::Local}},
    {"reorder-erroneous-guard", "guards reordered although the second one may fail",
     "thread 1 {\n  if 1 = 0 then {\n    if 1 / 0 = 0 then {\n      x <- 1;\n    }\n  }\n}\n", 1,
     RuleId::ReorderGuards, {SideCondition::Noerror}},
    {"shared-temporary", "sub-expression stored into a variable read by another thread",
     "var u = 0;\nthread 1 {\n  a <- 1 + 0;\n}\nthread 2 {\n  y <- 1 / (u - 1);\n}\n", 1, RuleId::SubexprElim,
     {SideCondition::Fresh}, "u"},
    {"speculative-store", "out-of-thin-air store of 42 inserted before a flag store",
     "thread 1 {\n  f <- 1;\n}\nthread 2 {\n  y <- 1 / (f - 42);\n}\n", 1, std::nullopt, {}},
};

}  // namespace

std::vector<NegativeControl> run_negative_controls(const FuzzOptions& options) {
  std::vector<NegativeControl> out;
  for (const auto& spec : kControls) {
    Program p = parse_program(spec.source);
    FuzzOptions o = options;
    o.scheduled = false;
    LabelSet analyzed = analyzer_errors(p, o);
    auto tp = thread_paths(p, o.unroll);
    auto& mine = tp[spec.thread];
    std::vector<ControlPath> added;
    if (spec.rule) {
      RuleContext ctx;
      ctx.thread = spec.thread;
      ctx.vars = classify_vars(p, &tp);
      ctx.unchecked = spec.unchecked;
      if (spec.temp != nullptr) {
        ctx.fresh_var = p.find_var(spec.temp);
        ctx.fresh_name = spec.temp;
      }
      for (const auto& path : mine) {
        RuleResult rr = apply_rule(*spec.rule, path, ctx);
        added.insert(added.end(), rr.paths.begin(), rr.paths.end());
      }
    } else {
      VarId f = *p.find_var("f");
      for (const auto& path : mine) {
        ControlPath spec_path = {Stmt::make_assign(f, "f", Expr::make_const(Bound(42), Bound(42)))};
        spec_path.insert(spec_path.end(), path.begin(), path.end());
        added.push_back(std::move(spec_path));
      }
    }
    mine.insert(mine.end(), added.begin(), added.end());
    NegativeControl nc{spec.name, spec.description, check_transformed(p, tp, analyzed, o), false};
    nc.trial.chain.push_back(std::string("t") + std::to_string(spec.thread) + ":" +
                             (spec.rule ? rule_name(*spec.rule) : "speculative-store"));
    nc.detected = nc.trial.verdict == Verdict::Fail && !added.empty();
    out.push_back(std::move(nc));
  }
  return out;
}

}  // namespace thesee
