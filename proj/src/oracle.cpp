#include "thesee/oracle.hpp"

#include <algorithm>
#include <bit>
#include <deque>

#include "thesee/automaton.hpp"
#include "thesee/error.hpp"
#include "thesee/frontend.hpp"

namespace thesee {

namespace {

constexpr uint32_t kNone = UINT32_MAX;
constexpr int64_t kReady = 0;
constexpr int64_t kYield = 1;
constexpr int64_t kWaitBase = 2;

uint64_t hash_words(const int64_t* k, size_t n) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= static_cast<uint64_t>(k[i]);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return h;
}

// Fixed-length keys stored contiguously, deduplicated by an open-addressing index.
class StateStore {
 public:
  explicit StateStore(size_t len) : len_(len) { table_.assign(1024, kNone); }

  std::pair<uint32_t, bool> insert(const int64_t* key) {
    uint64_t h = hash_words(key, len_);
    size_t mask = table_.size() - 1;
    size_t pos = h & mask;
    while (table_[pos] != kNone) {
      uint32_t idx = table_[pos];
      if (hashes_[idx] == h && std::equal(key, key + len_, arena_.begin() + static_cast<ptrdiff_t>(idx * len_))) {
        return {idx, false};
      }
      pos = (pos + 1) & mask;
    }
    auto idx = static_cast<uint32_t>(hashes_.size());
    arena_.insert(arena_.end(), key, key + len_);
    hashes_.push_back(h);
    table_[pos] = idx;
    if (hashes_.size() * 2 > table_.size()) rehash();
    return {idx, true};
  }

  const int64_t* key(uint32_t idx) const { return arena_.data() + idx * len_; }
  size_t size() const { return hashes_.size(); }

 private:
  void rehash() {
    std::vector<uint32_t> t(table_.size() * 2, kNone);
    size_t mask = t.size() - 1;
    for (uint32_t i = 0; i < hashes_.size(); ++i) {
      size_t pos = hashes_[i] & mask;
      while (t[pos] != kNone) pos = (pos + 1) & mask;
      t[pos] = i;
    }
    table_.swap(t);
  }

  size_t len_;
  std::vector<int64_t> arena_;
  std::vector<uint64_t> hashes_;
  std::vector<uint32_t> table_;
};

// Decoded global state.
struct Work {
  std::vector<uint32_t> node;
  std::vector<uint8_t> counters;
  std::vector<int64_t> status;
  std::vector<uint64_t> held;
  ConcreteEnv env;
};

struct Layout {
  size_t threads = 0;
  size_t vars = 0;
  std::vector<size_t> counter_offset;
  size_t counter_bytes = 0;
  size_t counter_words = 0;
  size_t key_len = 0;

  Layout(const std::vector<ThreadAutomaton>& autos, size_t num_vars) : threads(autos.size()), vars(num_vars) {
    for (const auto& a : autos) {
      counter_offset.push_back(counter_bytes);
      counter_bytes += a.num_loops;
    }
    counter_words = (counter_bytes + 7) / 8;
    key_len = threads + counter_words + 2 * threads + 2 * vars;
  }

  void encode(const Work& w, std::vector<int64_t>& key) const {
    key.assign(key_len, 0);
    size_t k = 0;
    for (size_t t = 0; t < threads; ++t) key[k++] = w.node[t];
    for (size_t b = 0; b < counter_bytes; ++b) {
      key[k + b / 8] |= static_cast<int64_t>(static_cast<uint64_t>(w.counters[b]) << (8 * (b % 8)));
    }
    k += counter_words;
    for (size_t t = 0; t < threads; ++t) key[k++] = w.status[t];
    for (size_t t = 0; t < threads; ++t) key[k++] = static_cast<int64_t>(w.held[t]);
    for (size_t v = 0; v < vars; ++v) {
      key[k++] = w.env[v].num();
      key[k++] = w.env[v].den();
    }
  }

  Work decode(const int64_t* key) const {
    Work w;
    size_t k = 0;
    w.node.resize(threads);
    for (size_t t = 0; t < threads; ++t) w.node[t] = static_cast<uint32_t>(key[k++]);
    w.counters.resize(counter_bytes);
    for (size_t b = 0; b < counter_bytes; ++b) {
      w.counters[b] = static_cast<uint8_t>(static_cast<uint64_t>(key[k + b / 8]) >> (8 * (b % 8)));
    }
    k += counter_words;
    w.status.resize(threads);
    for (size_t t = 0; t < threads; ++t) w.status[t] = key[k++];
    w.held.resize(threads);
    for (size_t t = 0; t < threads; ++t) w.held[t] = static_cast<uint64_t>(key[k++]);
    w.env.resize(vars);
    for (size_t v = 0; v < vars; ++v) {
      w.env[v] = Rational::make(key[k], key[k + 1]);
      k += 2;
    }
    return w;
  }
};

std::string mutex_set_str(const Program& p, uint64_t mask) {
  std::string out = "{";
  bool first = true;
  for (MutexId m = 0; m < p.num_mutexes(); ++m) {
    if ((mask >> m) & 1U) {
      if (!first) out += ",";
      first = false;
      out += p.mutexes[m].name;
    }
  }
  return out + "}";
}

std::vector<ThreadAutomaton> build_automata(const Program& p, unsigned unroll,
                                            const std::map<ThreadId, std::vector<ControlPath>>* paths) {
  std::vector<ThreadAutomaton> autos;
  for (const auto& t : p.threads) {
    if (paths != nullptr) {
      auto it = paths->find(t.id);
      if (it != paths->end()) {
        autos.push_back(ThreadAutomaton::from_paths(it->second));
        continue;
      }
    }
    autos.push_back(ThreadAutomaton::from_body(t.body, unroll));
  }
  return autos;
}

class Explorer {
 public:
  Explorer(const Program& p, const OracleOptions& o, bool scheduled)
      : p_(p),
        o_(o),
        scheduled_(scheduled),
        autos_(build_automata(p, o.unroll, o.thread_paths)),
        lay_(autos_, p.num_vars()),
        store_(lay_.key_len) {
    for (const auto& t : p.threads) ids_.push_back(t.id);
  }

  OracleResult run() {
    for (const auto& env : initial_envs(p_, o_.mode)) {
      Work w;
      w.node.resize(autos_.size());
      for (size_t t = 0; t < autos_.size(); ++t) w.node[t] = autos_[t].entry;
      w.counters.assign(lay_.counter_bytes, 0);
      w.status.assign(autos_.size(), kReady);
      w.held.assign(autos_.size(), 0);
      w.env = env;
      add(w, kNone, 0, 0);
    }
    for (uint32_t i = 0; i < store_.size() && !stop_; ++i) {
      if (depth_[i] >= o_.budget.max_depth) {
        truncate("path length budget");
        continue;
      }
      Work w = lay_.decode(store_.key(i));
      if (o_.collect_reachable) res_.reachable_envs.insert(w.env);
      bool any = expand(i, w);
      if (!any) res_.final_envs.insert(w.env);
    }
    res_.states = store_.size();
    if (o_.witnesses) {
      for (const auto& [label, site] : sites_) res_.witnesses[label] = witness(site);
    }
    return std::move(res_);
  }

 private:
  struct Parent {
    uint32_t state;
    uint32_t thread;
    uint32_t edge;
  };

  void truncate(const std::string& why) {
    if (!res_.truncated) res_.truncation_reason = why;
    res_.truncated = true;
  }

  void add(const Work& w, uint32_t parent, uint32_t thread, uint32_t edge) {
    ++res_.transitions;
    lay_.encode(w, key_);
    if (store_.size() >= o_.budget.max_states) {
      truncate("state budget");
      stop_ = true;
      return;
    }
    auto [idx, inserted] = store_.insert(key_.data());
    if (!inserted) return;
    parents_.push_back({parent, thread, edge});
    depth_.push_back(parent == kNone ? 0 : depth_[parent] + 1);
    size_t holders = 0;
    for (MutexId m = 0; m < p_.num_mutexes(); ++m) {
      size_t c = 0;
      for (uint64_t h : w.held) c += (h >> m) & 1U;
      holders = std::max(holders, c);
    }
    res_.max_mutex_holders = std::max(res_.max_mutex_holders, holders);
    (void)idx;
  }

  void record_errors(const LabelSet& errs, uint32_t state, uint32_t thread, uint32_t edge) {
    for (Label l : errs) {
      if (res_.errors.insert(l).second) sites_[l] = {state, thread, edge};
    }
  }

  // Whether any successor was produced.
  bool expand(uint32_t i, const Work& w) {
    bool any = false;
    if (!scheduled_) {
      for (uint32_t t = 0; t < autos_.size(); ++t) any = step_thread(i, w, t) || any;
      return any;
    }
    // Only the highest-priority ready thread may run.
    int best = -1;
    for (uint32_t t = 0; t < autos_.size(); ++t) {
      if (w.status[t] == kReady && (best < 0 || ids_[t] > ids_[static_cast<size_t>(best)])) best = static_cast<int>(t);
    }
    if (best < 0) return false;
    for (uint32_t t = 0; t < autos_.size(); ++t) {
      if (w.status[t] == kReady && ids_[t] > ids_[static_cast<size_t>(best)]) ++res_.priority_violations;
    }
    return step_thread(i, w, static_cast<uint32_t>(best));
  }

  bool step_thread(uint32_t i, const Work& w, uint32_t t) {
    const ThreadAutomaton& a = autos_[t];
    bool any = false;
    const auto& edges = a.out[w.node[t]];
    for (uint32_t ei = 0; ei < edges.size(); ++ei) {
      const auto& e = edges[ei];
      Work base = w;
      if (!a.fire(e, base.counters.data() + lay_.counter_offset[t])) continue;
      base.node[t] = e.target;
      std::vector<Work> outs;
      try {
        apply(*e.stmt, t, std::move(base), outs, i, ei);
      } catch (const OverflowError&) {
        truncate("arithmetic overflow");
        continue;
      }
      for (auto& o : outs) {
        if (scheduled_) {
          for (auto& s : sched(o)) {
            any = true;
            add(s, i, t, ei);
            if (stop_) return any;
          }
        } else {
          any = true;
          add(o, i, t, ei);
          if (stop_) return any;
        }
      }
    }
    return any;
  }

  int holder(const Work& w, MutexId m) const {
    for (size_t t = 0; t < w.held.size(); ++t) {
      if ((w.held[t] >> m) & 1U) return static_cast<int>(t);
    }
    return -1;
  }

  void apply(const Stmt& s, uint32_t t, Work base, std::vector<Work>& outs, uint32_t state, uint32_t edge) {
    uint64_t bit = uint64_t{1} << s.mutex;
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        EvalResult r = eval_concrete(*s.expr, base.env, o_.mode);
        record_errors(r.errors, state, t, edge);
        for (const auto& v : r.values) {
          Work n = base;
          n.env[s.var] = v;
          outs.push_back(std::move(n));
        }
        return;
      }
      case Stmt::Kind::Guard: {
        EvalResult r = eval_concrete(*s.expr, base.env, o_.mode);
        record_errors(r.errors, state, t, edge);
        if (std::any_of(r.values.begin(), r.values.end(), [&](const Rational& v) { return holds(s.cmp, v); })) {
          outs.push_back(std::move(base));
        }
        return;
      }
      case Stmt::Kind::Lock:
        if (scheduled_) {
          base.status[t] = kWaitBase + s.mutex;
        } else {
          int h = holder(base, s.mutex);
          if (h >= 0 && static_cast<uint32_t>(h) != t) return;
          base.held[t] |= bit;
        }
        outs.push_back(std::move(base));
        return;
      case Stmt::Kind::Unlock:
        base.held[t] &= ~bit;
        outs.push_back(std::move(base));
        return;
      case Stmt::Kind::Yield:
        if (scheduled_) base.status[t] = kYield;
        outs.push_back(std::move(base));
        return;
      case Stmt::Kind::IsLocked:
        base.env[s.var] = Rational(holder(base, s.mutex) >= 0 ? 1 : 0);
        outs.push_back(std::move(base));
        return;
      default:
        throw Error(ErrorKind::InvalidArgument, "structured statement on a control edge");
    }
  }

  std::vector<Work> sched(const Work& w) const {
    Work n = w;
    std::vector<uint32_t> yielding;
    for (uint32_t t = 0; t < w.status.size(); ++t) {
      int64_t st = w.status[t];
      if (st >= kWaitBase) {
        auto m = static_cast<MutexId>(st - kWaitBase);
        uint64_t bit = uint64_t{1} << m;
        bool grant = (w.held[t] & bit) != 0;
        if (!grant) {
          bool free = holder(w, m) < 0;
          bool higher_waiter = false;
          for (uint32_t u = 0; u < w.status.size(); ++u) {
            if (ids_[u] > ids_[t] && w.status[u] == st) higher_waiter = true;
          }
          grant = free && !higher_waiter;
        }
        if (grant) {
          n.status[t] = kReady;
          n.held[t] |= bit;
        }
      } else if (st == kYield) {
        yielding.push_back(t);
      }
    }
    std::vector<Work> out;
    size_t combos = size_t{1} << yielding.size();
    for (size_t mask = 0; mask < combos; ++mask) {
      Work c = n;
      for (size_t k = 0; k < yielding.size(); ++k) {
        if ((mask >> k) & 1U) c.status[yielding[k]] = kReady;
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  std::string sched_str(const Work& w) const {
    std::string out;
    for (size_t t = 0; t < w.status.size(); ++t) {
      if (!out.empty()) out += " ";
      out += "t" + std::to_string(ids_[t]) + ":";
      if (scheduled_) {
        int64_t st = w.status[t];
        if (st == kReady) {
          out += "ready";
        } else if (st == kYield) {
          out += "yield";
        } else {
          out += "wait(" + p_.mutexes[static_cast<size_t>(st - kWaitBase)].name + ")";
        }
      }
      out += mutex_set_str(p_, w.held[t]);
    }
    return out;
  }

  Witness witness(const Parent& site) const {
    std::vector<uint32_t> chain;
    for (uint32_t s = site.state; s != kNone; s = parents_[s].state) chain.push_back(s);
    std::reverse(chain.begin(), chain.end());
    Witness out;
    for (size_t k = 1; k < chain.size(); ++k) {
      const Parent& pr = parents_[chain[k]];
      Work pre = lay_.decode(store_.key(chain[k - 1]));
      Work post = lay_.decode(store_.key(chain[k]));
      out.push_back({ids_[pr.thread], primitive_to_string(*autos_[pr.thread].out[pre.node[pr.thread]][pr.edge].stmt),
                     sched_str(pre), sched_str(post)});
    }
    Work last = lay_.decode(store_.key(site.state));
    out.push_back({ids_[site.thread], primitive_to_string(*autos_[site.thread].out[last.node[site.thread]][site.edge].stmt),
                   sched_str(last), "error"});
    return out;
  }

  const Program& p_;
  OracleOptions o_;
  bool scheduled_;
  std::vector<ThreadAutomaton> autos_;
  Layout lay_;
  StateStore store_;
  std::vector<ThreadId> ids_;
  std::vector<Parent> parents_;
  std::vector<uint32_t> depth_;
  std::map<Label, Parent> sites_;
  std::vector<int64_t> key_;
  bool stop_ = false;
  OracleResult res_;
};

}  // namespace

OracleResult run_interleavings(const Program& p, const OracleOptions& options) {
  return Explorer(p, options, false).run();
}

OracleResult run_scheduled(const Program& p, const OracleOptions& options) { return Explorer(p, options, true).run(); }

bool intf(const SchedConfig& a, const SchedConfig& b) {
  return a.weak() && b.weak() && (a.held & b.held) == 0 && (a.free & b.held) == 0 && (b.free & a.held) == 0;
}

std::string config_str(const Program& p, const SchedConfig& c) {
  std::string out = "l=" + mutex_set_str(p, c.held) + " u=" + mutex_set_str(p, c.free);
  if (!c.weak()) out += " s=sync(" + p.mutexes[static_cast<size_t>(c.tag)].name + ")";
  return out;
}

namespace {

// Per-thread exploration for the concrete interference fixpoint.
class InterferenceRound {
 public:
  InterferenceRound(const Program& p, const InterferenceOracleOptions& o, const std::vector<ThreadAutomaton>& autos,
                    const std::map<ThreadId, std::set<MutexId>>& locks, const std::set<ConcreteInterference>& input)
      : p_(p), o_(o), autos_(autos), locks_(locks), input_(input) {}

  void run_thread(size_t ti, std::set<ConcreteInterference>& out_i, LabelSet& out_errors, bool& truncated) {
    ThreadId t = p_.threads[ti].id;
    const ThreadAutomaton& a = autos_[ti];
    // Values of other threads' weak writes, indexed by variable.
    std::vector<std::vector<const ConcreteInterference*>> by_var(p_.num_vars());
    bool self = o_.self_interference.count(t) != 0;
    for (const auto& i : input_) {
      if (i.config.weak() && (i.thread != t || self)) by_var[i.var].push_back(&i);
    }
    size_t vars = p_.num_vars();
    size_t len = 1 + a.num_loops + 2 + 2 * vars;
    StateStore store(len);
    std::deque<uint32_t> queue;
    std::vector<int64_t> key;
    auto encode = [&](uint32_t node, const std::vector<uint8_t>& ctr, uint64_t l, uint64_t u, const ConcreteEnv& env) {
      key.assign(len, 0);
      size_t k = 0;
      key[k++] = node;
      for (uint8_t c : ctr) key[k++] = c;
      key[k++] = static_cast<int64_t>(l);
      key[k++] = static_cast<int64_t>(u);
      for (const auto& v : env) {
        key[k++] = v.num();
        key[k++] = v.den();
      }
    };
    auto push = [&](uint32_t node, const std::vector<uint8_t>& ctr, uint64_t l, uint64_t u, const ConcreteEnv& env) {
      if (store.size() >= o_.max_states_per_thread) {
        truncated = true;
        return;
      }
      encode(node, ctr, l, u, env);
      auto [idx, inserted] = store.insert(key.data());
      if (inserted) queue.push_back(idx);
    };
    std::vector<uint8_t> zero(a.num_loops, 0);
    for (const auto& env : initial_envs(p_, o_.mode)) push(a.entry, zero, 0, 0, env);

    while (!queue.empty()) {
      uint32_t idx = queue.front();
      queue.pop_front();
      const int64_t* k = store.key(idx);
      uint32_t node = static_cast<uint32_t>(k[0]);
      std::vector<uint8_t> ctr(a.num_loops);
      for (size_t c = 0; c < a.num_loops; ++c) ctr[c] = static_cast<uint8_t>(k[1 + c]);
      uint64_t l = static_cast<uint64_t>(k[1 + a.num_loops]);
      uint64_t u = static_cast<uint64_t>(k[2 + a.num_loops]);
      ConcreteEnv env(vars);
      for (size_t v = 0; v < vars; ++v) env[v] = Rational::make(k[3 + a.num_loops + 2 * v], k[4 + a.num_loops + 2 * v]);
      SchedConfig c{l, u, -1};

      VarReader reader = [&](VarId y, const ConcreteEnv& e, ValueSet& out) {
        out.push_back(e[y]);
        for (const ConcreteInterference* i : by_var[y]) {
          if (!o_.scheduled || intf(c, i->config)) out.push_back(i->value);
        }
      };

      for (const auto& edge : a.out[node]) {
        std::vector<uint8_t> nctr = ctr;
        if (!a.fire(edge, nctr.data())) continue;
        const Stmt& s = *edge.stmt;
        try {
          step(s, t, edge.target, nctr, c, env, reader, out_i, out_errors, push, truncated);
        } catch (const OverflowError&) {
          truncated = true;
        }
      }
    }
  }

 private:
  template <class Push>
  void step(const Stmt& s, ThreadId t, uint32_t target, const std::vector<uint8_t>& ctr, const SchedConfig& c,
            const ConcreteEnv& env, const VarReader& reader, std::set<ConcreteInterference>& out_i,
            LabelSet& out_errors, Push& push, bool& truncated) {
    auto write = [&](const SchedConfig& cfg, VarId x, const Rational& v) { out_i.insert({t, cfg, x, v}); };
    uint64_t bit = uint64_t{1} << s.mutex;
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        EvalResult r = eval_concrete(*s.expr, env, o_.mode, &reader);
        out_errors.insert(r.errors.begin(), r.errors.end());
        for (const auto& v : r.values) {
          ConcreteEnv n = env;
          n[s.var] = v;
          write(c, s.var, v);
          push(target, ctr, c.held, c.free, n);
        }
        return;
      }
      case Stmt::Kind::Guard: {
        EvalResult r = eval_concrete(*s.expr, env, o_.mode, &reader);
        out_errors.insert(r.errors.begin(), r.errors.end());
        if (std::any_of(r.values.begin(), r.values.end(), [&](const Rational& v) { return holds(s.cmp, v); })) {
          push(target, ctr, c.held, c.free, env);
        }
        return;
      }
      default:
        break;
    }
    if (!o_.scheduled) {
      if (s.kind == Stmt::Kind::IsLocked) {
        for (int v = 0; v <= 1; ++v) {
          ConcreteEnv n = env;
          n[s.var] = Rational(v);
          write(c, s.var, Rational(v));
          push(target, ctr, 0, 0, n);
        }
      } else {
        push(target, ctr, 0, 0, env);
      }
      return;
    }
    switch (s.kind) {
      case Stmt::Kind::Lock: {
        for (MutexId m = 0; m < p_.num_mutexes(); ++m) {
          if ((c.free >> m) & 1U) emit_out(t, c.held, 0, m, env, out_i);
        }
        for (auto& n : in(t, c.held, 0, s.mutex, env, truncated)) push(target, ctr, c.held | bit, 0, n);
        return;
      }
      case Stmt::Kind::Unlock:
        emit_out(t, c.held & ~bit, c.free, s.mutex, env, out_i);
        push(target, ctr, c.held & ~bit, c.free, env);
        return;
      case Stmt::Kind::Yield:
        for (MutexId m = 0; m < p_.num_mutexes(); ++m) {
          if ((c.free >> m) & 1U) emit_out(t, c.held, 0, m, env, out_i);
        }
        push(target, ctr, c.held, 0, env);
        return;
      case Stmt::Kind::IsLocked: {
        write(c, s.var, Rational(0));
        write(c, s.var, Rational(1));
        if (o_.mono && !higher_locks(t, s.mutex)) {
          for (auto& n : in(t, c.held, c.free, s.mutex, env, truncated)) {
            n[s.var] = Rational(0);
            push(target, ctr, c.held, c.free | bit, n);
          }
          ConcreteEnv n = env;
          n[s.var] = Rational(1);
          push(target, ctr, c.held, c.free & ~bit, n);
        } else {
          for (int v = 0; v <= 1; ++v) {
            ConcreteEnv n = env;
            n[s.var] = Rational(v);
            push(target, ctr, c.held, c.free, n);
          }
        }
        return;
      }
      default:
        return;
    }
  }

  bool higher_locks(ThreadId t, MutexId m) const {
    for (const auto& [tid, ms] : locks_) {
      if (tid > t && ms.count(m) != 0) return true;
    }
    return false;
  }

  // Environments after importing values published on `m` by other threads.
  std::vector<ConcreteEnv> in(ThreadId t, uint64_t l, uint64_t u, MutexId m, const ConcreteEnv& env,
                              bool& truncated) const {
    std::vector<ValueSet> choices(env.size());
    for (size_t x = 0; x < env.size(); ++x) choices[x].push_back(env[x]);
    for (const auto& i : input_) {
      if (i.thread == t || i.config.tag != static_cast<int>(m)) continue;
      if ((l & i.config.held) != 0 || (l & i.config.free) != 0 || (i.config.held & u) != 0) continue;
      choices[i.var].push_back(i.value);
    }
    std::vector<ConcreteEnv> out = {ConcreteEnv{}};
    for (auto& ch : choices) {
      std::sort(ch.begin(), ch.end());
      ch.erase(std::unique(ch.begin(), ch.end()), ch.end());
      std::vector<ConcreteEnv> next;
      for (const auto& e : out) {
        for (const auto& v : ch) {
          ConcreteEnv n = e;
          n.push_back(v);
          next.push_back(std::move(n));
        }
      }
      if (next.size() > 100000) {
        truncated = true;
        next.resize(100000);
      }
      out = std::move(next);
    }
    return out;
  }

  // Publishes the current values of the variables `t` wrote inside a section protected by `m`.
  void emit_out(ThreadId t, uint64_t l, uint64_t u, MutexId m, const ConcreteEnv& env,
                std::set<ConcreteInterference>& out_i) const {
    uint64_t bit = uint64_t{1} << m;
    std::vector<bool> protected_var(env.size(), false);
    auto scan = [&](const std::set<ConcreteInterference>& s) {
      for (const auto& i : s) {
        if (i.thread == t && i.config.weak() && ((i.config.held | i.config.free) & bit) != 0) {
          protected_var[i.var] = true;
        }
      }
    };
    scan(input_);
    scan(out_i);
    for (VarId x = 0; x < env.size(); ++x) {
      if (protected_var[x]) out_i.insert({t, SchedConfig{l, u, static_cast<int>(m)}, x, env[x]});
    }
  }

  const Program& p_;
  const InterferenceOracleOptions& o_;
  const std::vector<ThreadAutomaton>& autos_;
  const std::map<ThreadId, std::set<MutexId>>& locks_;
  const std::set<ConcreteInterference>& input_;
};

}  // namespace

InterferenceOracleResult concrete_interference_fixpoint(const Program& p, const InterferenceOracleOptions& options) {
  InterferenceOracleResult res;
  std::vector<ThreadAutomaton> autos = build_automata(p, options.unroll, nullptr);
  auto locks = collect_lock_sets(p);
  for (size_t round = 0; round < options.max_rounds; ++round) {
    std::map<VarId, std::set<Rational>> values;
    for (const auto& i : res.interferences) values[i.var].insert(i.value);
    for (const auto& [x, vs] : values) {
      if (vs.size() > options.max_values_per_var) res.truncated = true;
    }
    if (res.truncated) break;
    std::set<ConcreteInterference> next = res.interferences;
    LabelSet errors = res.errors;
    InterferenceRound r(p, options, autos, locks, res.interferences);
    for (size_t ti = 0; ti < p.threads.size(); ++ti) r.run_thread(ti, next, errors, res.truncated);
    res.rounds = round + 1;
    bool stable = next == res.interferences && errors == res.errors;
    res.interferences = std::move(next);
    res.errors = std::move(errors);
    if (stable) {
      res.converged = !res.truncated;
      return res;
    }
  }
  res.converged = false;
  return res;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::Inconclusive:
      return "INCONCLUSIVE";
  }
  return "?";
}

SoundnessReport check_soundness_inclusion(const OracleResult& oracle, const LabelSet& analyzer_errors) {
  SoundnessReport r;
  for (Label l : oracle.errors) {
    if (analyzer_errors.count(l) == 0) {
      r.missing.insert(l);
      auto it = oracle.witnesses.find(l);
      if (it != oracle.witnesses.end()) r.witnesses[l] = it->second;
    }
  }
  if (!r.missing.empty()) {
    r.verdict = Verdict::Fail;
  } else if (oracle.truncated) {
    r.verdict = Verdict::Inconclusive;
  }
  return r;
}

}  // namespace thesee
