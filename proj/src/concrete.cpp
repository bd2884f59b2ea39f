#include "thesee/concrete.hpp"

#include <algorithm>

#include "thesee/error.hpp"

namespace thesee {

namespace {

void normalize(ValueSet& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void eval_rec(const Expr& e, const ConcreteEnv& env, ValueMode mode, const VarReader* reader, ValueSet& out,
              LabelSet& errors) {
  switch (e.kind) {
    case Expr::Kind::Var:
      if (reader != nullptr) {
        (*reader)(e.var, env, out);
        normalize(out);
      } else {
        out.push_back(env[e.var]);
      }
      return;
    case Expr::Kind::Const:
      out = const_values(e, mode);
      return;
    case Expr::Kind::Neg: {
      ValueSet sub;
      eval_rec(*e.lhs, env, mode, reader, sub, errors);
      for (const auto& v : sub) out.push_back(-v);
      normalize(out);
      return;
    }
    case Expr::Kind::Bin: {
      ValueSet a;
      ValueSet b;
      eval_rec(*e.lhs, env, mode, reader, a, errors);
      eval_rec(*e.rhs, env, mode, reader, b, errors);
      if (e.op == BinOp::Div && std::binary_search(b.begin(), b.end(), Rational(0))) errors.insert(e.label);
      out.reserve(a.size() * b.size());
      for (const auto& x : a) {
        for (const auto& y : b) {
          switch (e.op) {
            case BinOp::Add:
              out.push_back(x + y);
              break;
            case BinOp::Sub:
              out.push_back(x - y);
              break;
            case BinOp::Mul:
              out.push_back(x * y);
              break;
            case BinOp::Div:
              if (!y.is_zero()) out.push_back(x / y);
              break;
          }
        }
      }
      normalize(out);
      return;
    }
  }
}

}  // namespace

ValueSet const_values(const Expr& c, ValueMode /*mode*/) {
  if (!c.lo.is_finite() || !c.hi.is_finite()) {
    throw Error(ErrorKind::UnsupportedMode, "unbounded constant " + to_string(c) + " in integer-points mode");
  }
  const Rational& lo = c.lo.value();
  const Rational& hi = c.hi.value();
  ValueSet out;
  if (lo == hi) {
    out.push_back(lo);
    return out;
  }
  Rational first = lo.ceil();
  Rational last = hi.floor();
  if (first <= last && (last - first).num() >= static_cast<int64_t>(kMaxConstantPoints)) {
    throw Error(ErrorKind::Budget, "constant " + to_string(c) + " has too many points");
  }
  if (!c.integral && !lo.is_integer()) out.push_back(lo);
  for (Rational v = first; v <= last; v = v + Rational(1)) out.push_back(v);
  if (!c.integral && !hi.is_integer()) out.push_back(hi);
  return out;
}

EvalResult eval_concrete(const Expr& e, const ConcreteEnv& env, ValueMode mode, const VarReader* reader) {
  EvalResult r;
  eval_rec(e, env, mode, reader, r.values, r.errors);
  return r;
}

ConcreteState exec_primitive(const Stmt& s, const ConcreteState& st, ValueMode mode) {
  ConcreteState out;
  out.errors = st.errors;
  out.converged = st.converged;
  switch (s.kind) {
    case Stmt::Kind::Assign:
      for (const auto& env : st.envs) {
        EvalResult r = eval_concrete(*s.expr, env, mode);
        out.errors.insert(r.errors.begin(), r.errors.end());
        for (const auto& v : r.values) {
          ConcreteEnv next = env;
          next[s.var] = v;
          out.envs.insert(std::move(next));
        }
      }
      return out;
    case Stmt::Kind::Guard:
      for (const auto& env : st.envs) {
        EvalResult r = eval_concrete(*s.expr, env, mode);
        out.errors.insert(r.errors.begin(), r.errors.end());
        if (std::any_of(r.values.begin(), r.values.end(), [&](const Rational& v) { return holds(s.cmp, v); })) {
          out.envs.insert(env);
        }
      }
      return out;
    default:
      throw Error(ErrorKind::InvalidArgument, "statement '" + primitive_to_string(s) +
                                                  "' is outside the sequential fragment");
  }
}

namespace {

ConcreteState join(ConcreteState a, const ConcreteState& b) {
  a.envs.insert(b.envs.begin(), b.envs.end());
  a.errors.insert(b.errors.begin(), b.errors.end());
  a.converged = a.converged && b.converged;
  return a;
}

}  // namespace

ConcreteState exec_stmt(const Stmt& s, const ConcreteState& st, const ExecOptions& options) {
  switch (s.kind) {
    case Stmt::Kind::Seq: {
      ConcreteState cur = st;
      for (const auto& c : s.children) cur = exec_stmt(*c, cur, options);
      return cur;
    }
    case Stmt::Kind::If: {
      auto pos = Stmt::make_guard(s.expr, s.cmp, s.id, s.pos);
      auto neg = Stmt::make_guard(s.expr, negate(s.cmp), s.id, s.pos);
      ConcreteState then_branch = exec_stmt(*s.body, exec_primitive(*pos, st, options.mode), options);
      return join(std::move(then_branch), exec_primitive(*neg, st, options.mode));
    }
    case Stmt::Kind::While: {
      auto pos = Stmt::make_guard(s.expr, s.cmp, s.id, s.pos);
      auto neg = Stmt::make_guard(s.expr, negate(s.cmp), s.id, s.pos);
      // Kleene iteration driven by the states discovered in the previous round.
      ConcreteState all = st;
      ConcreteState frontier = st;
      while (!frontier.envs.empty()) {
        ConcreteState step = exec_stmt(*s.body, exec_primitive(*pos, frontier, options.mode), options);
        all.errors.insert(step.errors.begin(), step.errors.end());
        all.converged = all.converged && step.converged;
        frontier.envs.clear();
        frontier.errors = all.errors;
        for (auto& env : step.envs) {
          if (all.envs.insert(env).second) frontier.envs.insert(env);
        }
        if (all.envs.size() > options.max_loop_states) {
          all.converged = false;
          break;
        }
      }
      return exec_primitive(*neg, all, options.mode);
    }
    default:
      return exec_primitive(s, st, options.mode);
  }
}

namespace {

void check_budget(size_t n) {
  if (n > kMaxPaths) throw Error(ErrorKind::Budget, "too many control paths");
}

std::vector<ControlPath> concat(const std::vector<ControlPath>& a, const std::vector<ControlPath>& b) {
  check_budget(a.size() * b.size());
  std::vector<ControlPath> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) {
      ControlPath p = x;
      p.insert(p.end(), y.begin(), y.end());
      out.push_back(std::move(p));
    }
  }
  return out;
}

PathSet paths_rec(const StmtPtr& sp, unsigned unroll) {
  const Stmt& s = *sp;
  PathSet out;
  switch (s.kind) {
    case Stmt::Kind::Seq: {
      out.paths.push_back({});
      for (const auto& c : s.children) {
        PathSet sub = paths_rec(c, unroll);
        out.truncated = out.truncated || sub.truncated;
        out.paths = concat(out.paths, sub.paths);
      }
      return out;
    }
    case Stmt::Kind::If: {
      PathSet body = paths_rec(s.body, unroll);
      out.truncated = body.truncated;
      out.paths = concat({{Stmt::make_guard(s.expr, s.cmp, s.id, s.pos)}}, body.paths);
      out.paths.push_back({Stmt::make_guard(s.expr, negate(s.cmp), s.id, s.pos)});
      return out;
    }
    case Stmt::Kind::While: {
      PathSet body = paths_rec(s.body, unroll);
      std::vector<ControlPath> iteration = concat({{Stmt::make_guard(s.expr, s.cmp, s.id, s.pos)}}, body.paths);
      std::vector<ControlPath> exit = {{Stmt::make_guard(s.expr, negate(s.cmp), s.id, s.pos)}};
      std::vector<ControlPath> prefixes = {{}};
      for (unsigned i = 0; i <= unroll; ++i) {
        std::vector<ControlPath> done = concat(prefixes, exit);
        out.paths.insert(out.paths.end(), done.begin(), done.end());
        check_budget(out.paths.size());
        if (i < unroll) prefixes = concat(prefixes, iteration);
      }
      out.truncated = true;
      return out;
    }
    default:
      out.paths.push_back({sp});
      return out;
  }
}

}  // namespace

PathSet paths(const StmtPtr& s, unsigned unroll) { return paths_rec(s, unroll); }

ConcreteState run_paths(const std::vector<ControlPath>& ps, const ConcreteState& st, ValueMode mode) {
  ConcreteState out;
  out.errors = st.errors;
  out.converged = st.converged;
  for (const auto& p : ps) {
    ConcreteState cur = st;
    for (const auto& s : p) cur = exec_primitive(*s, cur, mode);
    out = join(std::move(out), cur);
  }
  return out;
}

std::set<ConcreteEnv> initial_envs(const Program& p, ValueMode mode) {
  std::vector<ConcreteEnv> acc = {ConcreteEnv{}};
  for (const auto& v : p.variables) {
    ExprPtr c = Expr::make_const(v.lo, v.hi);
    ValueSet vals = const_values(*c, mode);
    std::vector<ConcreteEnv> next;
    for (const auto& env : acc) {
      for (const auto& x : vals) {
        ConcreteEnv e = env;
        e.push_back(x);
        next.push_back(std::move(e));
      }
    }
    if (next.size() > kMaxPaths) throw Error(ErrorKind::Budget, "too many initial environments");
    acc = std::move(next);
  }
  return {acc.begin(), acc.end()};
}

std::string env_json(const Program& p, const ConcreteEnv& env) {
  std::string out = "{";
  bool first = true;
  for (VarId v : p.vars_by_name()) {
    if (!first) out += ",";
    first = false;
    out += "\"" + p.variables[v].name + "\":\"" + env[v].str() + "\"";
  }
  return out + "}";
}

}  // namespace thesee
