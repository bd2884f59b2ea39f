#include <algorithm>

#include "iterate.hpp"
#include "thesee/frontend.hpp"

namespace thesee {

Interval SchedInterferenceAbs::get(ThreadId t, const SchedConfig& c, VarId x) const {
  auto it = entries_.find({t, c, x});
  return it == entries_.end() ? Interval::bottom() : it->second;
}

void SchedInterferenceAbs::join_at(ThreadId t, const SchedConfig& c, VarId x, const Interval& v) {
  if (v.is_bot()) return;
  auto [it, inserted] = entries_.try_emplace({t, c, x}, v);
  if (!inserted) it->second = ival_join(it->second, v);
}

SchedInterferenceAbs sched_interf_join(const SchedInterferenceAbs& a, const SchedInterferenceAbs& b) {
  SchedInterferenceAbs r = a;
  for (const auto& [k, v] : b.entries()) r.join_at(std::get<0>(k), std::get<1>(k), std::get<2>(k), v);
  return r;
}

SchedInterferenceAbs sched_interf_widen(const SchedInterferenceAbs& a, const SchedInterferenceAbs& b,
                                        const Thresholds& thresholds) {
  SchedInterferenceAbs r;
  for (const auto& [k, v] : a.entries()) {
    const auto& [t, c, x] = k;
    r.join_at(t, c, x, ival_widen(v, b.get(t, c, x), thresholds));
  }
  for (const auto& [k, v] : b.entries()) {
    const auto& [t, c, x] = k;
    if (a.get(t, c, x).is_bot()) r.join_at(t, c, x, v);
  }
  return r;
}

ExprPtr apply_sched(ThreadId t, const SchedConfig& c, const BoxEnv& env, const SchedInterferenceAbs& interf,
                    const ExprPtr& e, ReadLog* log) {
  return detail::substitute_vars(e, [&](const Expr& v) -> ExprPtr {
    if (log != nullptr) log->insert({t, c, v.var});
    Interval from_others;
    for (const auto& [k, val] : interf.entries()) {
      const auto& [t2, c2, x] = k;
      if (x == v.var && t2 != t && intf(c, c2)) from_others = ival_join(from_others, val);
    }
    if (from_others.is_bot()) return nullptr;
    return as_expr(ival_join(from_others, env.get(v.var)));
  });
}

BoxEnv in_sharp(ThreadId t, uint64_t held, uint64_t free, MutexId m, const BoxEnv& env,
                const SchedInterferenceAbs& interf) {
  BoxEnv r = env;
  if (env.is_bot()) return r;
  for (const auto& [k, val] : interf.entries()) {
    const auto& [t2, c2, x] = k;
    if (t2 == t || c2.tag != static_cast<int>(m)) continue;
    if ((held & c2.held) != 0 || (held & c2.free) != 0 || (c2.held & free) != 0) continue;
    BoxEnv imported = env;
    imported.set(x, val);
    r = box_join(r, imported);
  }
  return r;
}

SchedInterferenceAbs out_sharp(ThreadId t, uint64_t held, uint64_t free, MutexId m, const BoxEnv& env,
                               const SchedInterferenceAbs& interf) {
  SchedInterferenceAbs r;
  if (env.is_bot()) return r;
  uint64_t bit = uint64_t{1} << m;
  SchedConfig target{held, free, static_cast<int>(m)};
  for (const auto& [k, val] : interf.entries()) {
    const auto& [t2, c2, x] = k;
    if (t2 == t && c2.weak() && ((c2.held | c2.free) & bit) != 0) r.join_at(t, target, x, env.get(x));
  }
  return r;
}

namespace {

const Interval kBoolean = Interval::of(Bound(0), Bound(1), true);

struct SchedDomain {
  using State = AbsStateC;

  const Program& program;
  const AnalyzerOptions& options;
  ThreadId thread;
  const std::map<ThreadId, std::set<MutexId>>& lock_sets;
  std::map<StmtId, PartitionedEnv>* invariants;
  ReadLog* reads;
  PartitionStats* stats;

  State bottom(const State&) const { return {}; }

  State join(const State& a, const State& b) const {
    State r = a;
    for (const auto& [c, env] : b.envs) add(r.envs, c, env);
    r.errors.insert(b.errors.begin(), b.errors.end());
    r.interf = sched_interf_join(a.interf, b.interf);
    return r;
  }

  State widen(const State& a, const State& b) const {
    State r;
    for (const auto& [c, env] : a.envs) {
      auto it = b.envs.find(c);
      r.envs[c] = it == b.envs.end() ? env : box_widen(env, it->second, options.thresholds);
    }
    for (const auto& [c, env] : b.envs) r.envs.try_emplace(c, env);
    r.errors = a.errors;
    r.errors.insert(b.errors.begin(), b.errors.end());
    r.interf = sched_interf_widen(a.interf, b.interf, options.thresholds);
    return r;
  }

  bool equal(const State& a, const State& b) const {
    return a.envs == b.envs && a.errors == b.errors && a.interf == b.interf;
  }

  static void add(PartitionedEnv& envs, const SchedConfig& c, const BoxEnv& env) {
    if (env.is_bot()) return;
    auto [it, inserted] = envs.try_emplace(c, env);
    if (!inserted) it->second = box_join(it->second, env);
  }

  State guard(const Stmt&, const ExprPtr& e, Cmp cmp, const State& s) const {
    State r{{}, s.errors, s.interf};
    for (const auto& [c, env] : s.envs) {
      ExprPtr applied = apply_sched(thread, c, env, s.interf, e, reads);
      add(r.envs, c, transfer_guard(*applied, cmp, env, r.errors));
    }
    return r;
  }

  void record(const Stmt& s, const State& st) const {
    if (invariants != nullptr) (*invariants)[s.id] = st.envs;
  }

  State assign(VarId x, const ExprPtr& e, const State& s) const {
    State r{{}, s.errors, s.interf};
    for (const auto& [c, env] : s.envs) {
      ExprPtr applied = apply_sched(thread, c, env, s.interf, e, reads);
      BoxEnv post = transfer_assign(x, *applied, env, r.errors);
      if (post.is_bot()) continue;
      r.interf.join_at(thread, c, x, post.get(x));
      add(r.envs, c, post);
    }
    return r;
  }

  bool higher_thread_locks(MutexId m) const {
    for (const auto& [t, ms] : lock_sets) {
      if (t > thread && ms.count(m) != 0) return true;
    }
    return false;
  }

  static void emit(SchedInterferenceAbs& into, const SchedInterferenceAbs& more) {
    for (const auto& [k, v] : more.entries()) into.join_at(std::get<0>(k), std::get<1>(k), std::get<2>(k), v);
  }

  State sync(const Stmt& s, const State& st) const {
    uint64_t bit = uint64_t{1} << s.mutex;
    State r{{}, st.errors, st.interf};
    switch (s.kind) {
      case Stmt::Kind::Lock:
        for (const auto& [c, env] : st.envs) {
          for (MutexId m = 0; m < program.num_mutexes(); ++m) {
            if ((c.free >> m) & 1U) emit(r.interf, out_sharp(thread, c.held, 0, m, env, st.interf));
          }
          add(r.envs, SchedConfig{c.held | bit, 0, -1}, in_sharp(thread, c.held, 0, s.mutex, env, st.interf));
        }
        return r;
      case Stmt::Kind::Unlock:
        for (const auto& [c, env] : st.envs) {
          emit(r.interf, out_sharp(thread, c.held & ~bit, c.free, s.mutex, env, st.interf));
          add(r.envs, SchedConfig{c.held & ~bit, c.free, -1}, env);
        }
        return r;
      case Stmt::Kind::Yield:
        for (const auto& [c, env] : st.envs) {
          for (MutexId m = 0; m < program.num_mutexes(); ++m) {
            if ((c.free >> m) & 1U) emit(r.interf, out_sharp(thread, c.held, 0, m, env, st.interf));
          }
          add(r.envs, SchedConfig{c.held, 0, -1}, env);
        }
        return r;
      case Stmt::Kind::IsLocked: {
        bool exact = options.mono && !higher_thread_locks(s.mutex);
        for (const auto& [c, env] : st.envs) {
          r.interf.join_at(thread, c, s.var, kBoolean);
          if (!exact) {
            BoxEnv n = env;
            n.set(s.var, kBoolean);
            add(r.envs, c, n);
            continue;
          }
          if ((c.held & bit) == 0) {
            BoxEnv unlocked = in_sharp(thread, c.held, c.free, s.mutex, env, st.interf);
            unlocked.set(s.var, Interval::point(Rational(0)));
            add(r.envs, SchedConfig{c.held, c.free | bit, -1}, unlocked);
          }
          BoxEnv locked = env;
          locked.set(s.var, Interval::point(Rational(1)));
          add(r.envs, SchedConfig{c.held, c.free & ~bit, -1}, locked);
        }
        return r;
      }
      default:
        return st;
    }
  }

  // Merges partitions that share a held set once there are too many of them.
  void coarsen(State& st) const {
    if (st.envs.size() <= options.partition_cap) return;
    std::map<uint64_t, std::vector<std::pair<SchedConfig, BoxEnv>>> groups;
    for (auto& [c, env] : st.envs) groups[c.held].emplace_back(c, env);
    PartitionedEnv merged;
    for (auto& [held, members] : groups) {
      uint64_t common = ~uint64_t{0};
      BoxEnv env = BoxEnv::bottom(program.num_vars());
      for (const auto& [c, e] : members) {
        common &= c.free;
        env = box_join(env, e);
      }
      for (const auto& [c, e] : members) {
        for (MutexId m = 0; m < program.num_mutexes(); ++m) {
          if (((c.free & ~common) >> m) & 1U) emit(st.interf, out_sharp(thread, held, common, m, e, st.interf));
        }
      }
      merged[SchedConfig{held, common, -1}] = env;
    }
    st.envs = std::move(merged);
    if (stats != nullptr) ++stats->coarsenings;
  }

  State primitive(const Stmt& s, const State& st) const {
    State r;
    switch (s.kind) {
      case Stmt::Kind::Assign:
        r = assign(s.var, s.expr, st);
        break;
      case Stmt::Kind::Guard:
        r = guard(s, s.expr, s.cmp, st);
        break;
      default:
        r = sync(s, st);
        break;
    }
    coarsen(r);
    if (stats != nullptr) stats->max_env_partitions = std::max(stats->max_env_partitions, r.envs.size());
    return r;
  }
};

}  // namespace

AbsStateC transfer_C(const Program& p, const Stmt& s, ThreadId t, const AbsStateC& st,
                     const AnalyzerOptions& options) {
  auto locks = collect_lock_sets(p);
  SchedDomain d{p, options, t, locks, nullptr, nullptr, nullptr};
  detail::StructuralIterator<SchedDomain> it(d, options);
  return it.run(s, st);
}

std::vector<Race> extract_races(const Program&, const SchedInterferenceAbs& interf, const ReadLog& reads) {
  std::map<std::tuple<Race::Kind, ThreadId, ThreadId, VarId>, Race> found;
  auto note = [&](Race::Kind kind, ThreadId a, ThreadId b, VarId x, const SchedConfig& ca, const SchedConfig& cb) {
    Race& r = found[{kind, a, b, x}];
    r.kind = kind;
    r.first = a;
    r.second = b;
    r.var = x;
    r.configs.insert({ca, cb});
  };
  for (const auto& [k1, v1] : interf.entries()) {
    const auto& [t1, c1, x1] = k1;
    if (!c1.weak()) continue;
    for (const auto& [k2, v2] : interf.entries()) {
      const auto& [t2, c2, x2] = k2;
      if (x1 == x2 && t1 < t2 && intf(c1, c2)) note(Race::Kind::WriteWrite, t1, t2, x1, c1, c2);
    }
    for (const auto& rd : reads) {
      if (rd.var == x1 && rd.thread != t1 && intf(rd.config, c1)) {
        note(Race::Kind::ReadWrite, rd.thread, t1, x1, rd.config, c1);
      }
    }
  }
  std::vector<Race> out;
  for (auto& [k, r] : found) out.push_back(std::move(r));
  return out;
}

ScheduledResult analyze_program_C(const Program& p, const AnalyzerOptions& options) {
  ScheduledResult res;
  auto locks = collect_lock_sets(p);
  PartitionedEnv initial;
  initial[SchedConfig{}] = BoxEnv::initial(p);
  while (true) {
    if (res.rounds >= options.max_rounds) throw Error(ErrorKind::Budget, "interference fixpoint round budget exhausted");
    ++res.rounds;
    SchedInterferenceAbs joined = res.interf;
    LabelSet errors = res.errors;
    ReadLog reads;
    for (const auto& th : p.threads) {
      std::map<StmtId, PartitionedEnv> inv;
      SchedDomain d{p, options, th.id, locks, &inv, &reads, &res.stats};
      detail::StructuralIterator<SchedDomain> it(d, options);
      AbsStateC out = it.run(*th.body, AbsStateC{initial, res.errors, res.interf});
      joined = sched_interf_join(joined, out.interf);
      errors.insert(out.errors.begin(), out.errors.end());
      res.invariants[th.id] = std::move(inv);
      res.final_envs[th.id] = std::move(out.envs);
    }
    SchedInterferenceAbs next = res.rounds <= options.widening_delay
                                    ? joined
                                    : sched_interf_widen(res.interf, joined, options.thresholds);
    bool stable = next == res.interf && errors == res.errors;
    res.interf = std::move(next);
    res.errors = std::move(errors);
    res.reads = std::move(reads);
    res.history.push_back(res.interf);
    if (stable) break;
  }
  res.stats.interference_entries = res.interf.entries().size();
  res.races = extract_races(p, res.interf, res.reads);
  if (!options.mono) {
    for (const auto& th : p.threads) {
      std::vector<const Stmt*> stack = {th.body.get()};
      while (!stack.empty()) {
        const Stmt* s = stack.back();
        stack.pop_back();
        if (s->kind == Stmt::Kind::IsLocked) {
          res.diagnostics.push_back({s->pos, "islocked treated as [0,1] without mono-processor scheduling"});
        }
        if (s->body) stack.push_back(s->body.get());
        for (const auto& c : s->children) stack.push_back(c.get());
      }
    }
    std::sort(res.diagnostics.begin(), res.diagnostics.end());
  }
  return res;
}

Interval variable_range(const Program& p, const SchedInterferenceAbs& interf, VarId x) {
  Interval r;
  bool written = false;
  for (const auto& [k, v] : interf.entries()) {
    if (std::get<2>(k) == x) {
      r = ival_join(r, v);
      written = true;
    }
  }
  if (!written) r = Interval::of(p.variables[x].lo, p.variables[x].hi);
  return r;
}

}  // namespace thesee
