#include "iterate.hpp"
#include "thesee/error.hpp"

namespace thesee {

namespace {

const Interval kBoolean = Interval::of(Bound(0), Bound(1), true);

struct SeqDomain {
  using State = AbsState;

  const AnalyzerOptions& options;
  Invariants* invariants;
  std::vector<Diagnostic>* diagnostics;

  State bottom(const State& s) const { return {BoxEnv::bottom(s.env.size()), {}}; }

  State join(const State& a, const State& b) const {
    State r{box_join(a.env, b.env), a.errors};
    r.errors.insert(b.errors.begin(), b.errors.end());
    return r;
  }

  State widen(const State& a, const State& b) const {
    State r{box_widen(a.env, b.env, options.thresholds), a.errors};
    r.errors.insert(b.errors.begin(), b.errors.end());
    return r;
  }

  bool equal(const State& a, const State& b) const { return a.env == b.env && a.errors == b.errors; }

  State guard(const Stmt&, const ExprPtr& e, Cmp cmp, const State& s) const {
    State r = s;
    r.env = transfer_guard(*e, cmp, s.env, r.errors);
    return r;
  }

  void record(const Stmt& s, const State& st) const {
    if (invariants != nullptr) (*invariants)[s.id] = st.env;
  }

  State primitive(const Stmt& s, const State& st) const {
    State r = st;
    switch (s.kind) {
      case Stmt::Kind::Assign:
        r.env = transfer_assign(s.var, *s.expr, st.env, r.errors);
        return r;
      case Stmt::Kind::Guard:
        r.env = transfer_guard(*s.expr, s.cmp, st.env, r.errors);
        return r;
      case Stmt::Kind::IsLocked:
        note(s);
        r.env.set(s.var, kBoolean);
        return r;
      default:
        note(s);
        return r;
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

AbsState analyze_seq(const Stmt& s, const AbsState& st, const AnalyzerOptions& options, Invariants* invariants) {
  SeqDomain d{options, invariants, nullptr};
  detail::StructuralIterator<SeqDomain> it(d, options);
  return it.run(s, st);
}

SeqResult analyze_program_seq(const Program& p, const AnalyzerOptions& options) {
  if (p.threads.size() != 1) {
    throw Error(ErrorKind::MultiThreadInput,
                "sequential analysis needs exactly one thread, got " + std::to_string(p.threads.size()));
  }
  SeqResult res;
  SeqDomain d{options, &res.invariants, &res.diagnostics};
  detail::StructuralIterator<SeqDomain> it(d, options);
  AbsState out = it.run(*p.threads.front().body, AbsState{BoxEnv::initial(p), {}});
  res.errors = out.errors;
  res.final_env = out.env;
  std::sort(res.diagnostics.begin(), res.diagnostics.end());
  res.diagnostics.erase(std::unique(res.diagnostics.begin(), res.diagnostics.end()), res.diagnostics.end());
  return res;
}

}  // namespace thesee
