#include <algorithm>

#include "iterate.hpp"

namespace thesee {

Interval InterferenceAbs::get(ThreadId t, VarId x) const {
  auto it = entries_.find({t, x});
  return it == entries_.end() ? Interval::bottom() : it->second;
}

void InterferenceAbs::join_at(ThreadId t, VarId x, const Interval& v) {
  if (v.is_bot()) return;
  auto [it, inserted] = entries_.try_emplace({t, x}, v);
  if (!inserted) it->second = ival_join(it->second, v);
}

InterferenceAbs interf_join(const InterferenceAbs& a, const InterferenceAbs& b) {
  InterferenceAbs r = a;
  for (const auto& [k, v] : b.entries()) r.join_at(k.first, k.second, v);
  return r;
}

InterferenceAbs interf_widen(const InterferenceAbs& a, const InterferenceAbs& b, const Thresholds& thresholds) {
  InterferenceAbs r;
  for (const auto& [k, v] : a.entries()) r.join_at(k.first, k.second, ival_widen(v, b.get(k.first, k.second), thresholds));
  for (const auto& [k, v] : b.entries()) {
    if (a.get(k.first, k.second).is_bot()) r.join_at(k.first, k.second, v);
  }
  return r;
}

bool interf_leq(const InterferenceAbs& a, const InterferenceAbs& b) {
  return std::all_of(a.entries().begin(), a.entries().end(),
                     [&](const auto& kv) { return ival_leq(kv.second, b.get(kv.first.first, kv.first.second)); });
}

ExprPtr apply_interference(ThreadId t, const BoxEnv& env, const InterferenceAbs& interf, const ExprPtr& e,
                           bool self) {
  if (interf.empty()) return e;
  return detail::substitute_vars(e, [&](const Expr& v) -> ExprPtr {
    Interval from_others;
    for (const auto& [k, val] : interf.entries()) {
      if (k.second == v.var && (k.first != t || self)) from_others = ival_join(from_others, val);
    }
    if (from_others.is_bot()) return nullptr;
    return as_expr(ival_join(from_others, env.get(v.var)));
  });
}

namespace {

const Interval kBoolean = Interval::of(Bound(0), Bound(1), true);

struct InterferenceDomain {
  using State = AbsStateI;

  const AnalyzerOptions& options;
  ThreadId thread;
  bool self;
  Invariants* invariants;
  std::vector<Diagnostic>* diagnostics;

  State bottom(const State& s) const { return {BoxEnv::bottom(s.env.size()), {}, {}}; }

  State join(const State& a, const State& b) const {
    State r{box_join(a.env, b.env), a.errors, interf_join(a.interf, b.interf)};
    r.errors.insert(b.errors.begin(), b.errors.end());
    return r;
  }

  State widen(const State& a, const State& b) const {
    State r{box_widen(a.env, b.env, options.thresholds), a.errors,
            interf_widen(a.interf, b.interf, options.thresholds)};
    r.errors.insert(b.errors.begin(), b.errors.end());
    return r;
  }

  bool equal(const State& a, const State& b) const {
    return a.env == b.env && a.errors == b.errors && a.interf == b.interf;
  }

  State guard(const Stmt&, const ExprPtr& e, Cmp cmp, const State& s) const {
    State r = s;
    if (s.env.is_bot()) return r;
    ExprPtr applied = apply_interference(thread, s.env, s.interf, e, self);
    r.env = transfer_guard(*applied, cmp, s.env, r.errors);
    return r;
  }

  void record(const Stmt& s, const State& st) const {
    if (invariants != nullptr) (*invariants)[s.id] = st.env;
  }

  State assign(VarId x, const ExprPtr& e, const State& st) const {
    State r = st;
    if (st.env.is_bot()) return r;
    ExprPtr applied = apply_interference(thread, st.env, st.interf, e, self);
    r.env = transfer_assign(x, *applied, st.env, r.errors);
    r.interf.join_at(thread, x, r.env.get(x));
    return r;
  }

  State primitive(const Stmt& s, const State& st) const {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        return assign(s.var, s.expr, st);
      case Stmt::Kind::Guard:
        return guard(s, s.expr, s.cmp, st);
      case Stmt::Kind::IsLocked: {
        note(s);
        State r = st;
        if (st.env.is_bot()) return r;
        r.env.set(s.var, kBoolean);
        r.interf.join_at(thread, s.var, kBoolean);
        return r;
      }
      default:
        note(s);
        return st;
    }
  }

  void note(const Stmt& s) const {
    if (diagnostics != nullptr) {
      diagnostics->push_back({s.pos, "synchronization primitive '" + primitive_to_string(s) +
                                         "' ignored; use the scheduled analyzer to account for it"});
    }
  }
};

}  // namespace

AbsStateI analyze_stmt_I(const Program&, const Stmt& s, ThreadId t, const AbsStateI& st,
                         const AnalyzerOptions& options, Invariants* invariants) {
  InterferenceDomain d{options, t, options.self_interference.count(t) != 0, invariants, nullptr};
  detail::StructuralIterator<InterferenceDomain> it(d, options);
  return it.run(s, st);
}

InterferenceResult analyze_program_I(const Program& p, const AnalyzerOptions& options) {
  InterferenceResult res;
  BoxEnv initial = BoxEnv::initial(p);
  while (true) {
    if (res.rounds >= options.max_rounds) throw Error(ErrorKind::Budget, "interference fixpoint round budget exhausted");
    ++res.rounds;
    InterferenceAbs joined = res.interf;
    LabelSet errors = res.errors;
    std::vector<Diagnostic> diagnostics;
    for (const auto& th : p.threads) {
      Invariants inv;
      InterferenceDomain d{options, th.id, options.self_interference.count(th.id) != 0, &inv, &diagnostics};
      detail::StructuralIterator<InterferenceDomain> it(d, options);
      AbsStateI out = it.run(*th.body, AbsStateI{initial, res.errors, res.interf});
      joined = interf_join(joined, out.interf);
      errors.insert(out.errors.begin(), out.errors.end());
      res.invariants[th.id] = std::move(inv);
      res.final_envs[th.id] = out.env;
    }
    InterferenceAbs next =
        res.rounds <= options.widening_delay ? joined : interf_widen(res.interf, joined, options.thresholds);
    bool stable = next == res.interf && errors == res.errors;
    res.interf = std::move(next);
    res.errors = std::move(errors);
    res.history.push_back(res.interf);
    std::sort(diagnostics.begin(), diagnostics.end());
    diagnostics.erase(std::unique(diagnostics.begin(), diagnostics.end()), diagnostics.end());
    res.diagnostics = std::move(diagnostics);
    if (stable) return res;
  }
}

Interval variable_range(const Program& p, const InterferenceAbs& interf, VarId x) {
  Interval r;
  bool written = false;
  for (const auto& [k, v] : interf.entries()) {
    if (k.second == x) {
      r = ival_join(r, v);
      written = true;
    }
  }
  if (!written) r = Interval::of(p.variables[x].lo, p.variables[x].hi);
  return r;
}

}  // namespace thesee
