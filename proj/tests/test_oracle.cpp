#include "doctest.h"
#include "support/random_program.hpp"
#include "support/util.hpp"
#include "thesee/error.hpp"
#include "thesee/oracle.hpp"

using namespace thesee;
using thesee::testing::load_corpus;

TEST_CASE("interleavings of the two-flag protocol never overlap critical sections") {
  Program p = load_corpus("two_flags.conc");
  OracleOptions o;
  o.collect_reachable = true;
  auto r = run_interleavings(p, o);
  CHECK_FALSE(r.truncated);
  CHECK(r.errors.empty());
  VarId c1 = *p.find_var("c1");
  VarId c2 = *p.find_var("c2");
  size_t in_cs = 0;
  for (const auto& env : r.reachable_envs) {
    CHECK_FALSE((env[c1] == Rational(1) && env[c2] == Rational(1)));
    in_cs += env[c1] == Rational(1) || env[c2] == Rational(1);
  }
  CHECK(in_cs > 0);
}

TEST_CASE("parallel incrementation stores 1 or 2") {
  Program p = load_corpus("parallel_increment.conc");
  auto r = run_interleavings(p);
  std::set<Rational> ys;
  for (const auto& env : r.final_envs) ys.insert(env[*p.find_var("y")]);
  CHECK(ys == std::set<Rational>{Rational(1), Rational(2)});
}

TEST_CASE("a single thread has the sequential errors") {
  thesee::testing::GenOptions g;
  g.min_threads = g.max_threads = 1;
  g.loops = false;
  g.sync = false;
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    Program p = parse_program(thesee::testing::ProgramGenerator(seed, g).generate());
    ConcreteState init;
    init.envs = initial_envs(p);
    ConcreteState seq;
    try {
      seq = exec_stmt(*p.threads[0].body, init);
    } catch (const OverflowError&) {
      continue;
    }
    auto r = run_interleavings(p);
    if (r.truncated) continue;
    CHECK(r.errors == seq.errors);
    for (const auto& env : seq.envs) CHECK(r.final_envs.count(env) == 1);
    auto s = run_scheduled(p);
    CHECK(s.errors == seq.errors);
  }
}

TEST_CASE("the scheduler protects the priority critical section") {
  Program p = load_corpus("priority_islocked.conc");
  auto r = run_scheduled(p);
  CHECK_FALSE(r.truncated);
  REQUIRE_FALSE(r.final_envs.empty());
  VarId t = *p.find_var("T");
  for (const auto& env : r.final_envs) CHECK(env[t] == Rational(0));
  auto all = run_interleavings(p);
  std::set<Rational> ts;
  for (const auto& env : all.final_envs) ts.insert(env[t]);
  CHECK(ts.count(Rational(0)) == 1);
}

TEST_CASE("the high thread runs first under the scheduler") {
  Program p = load_corpus("inter_thread_flow.conc");
  auto r = run_scheduled(p);
  CHECK_FALSE(r.truncated);
  CHECK(r.errors.empty());
  CHECK(r.priority_violations == 0);
  auto all = run_interleavings(p);
  CHECK(all.errors == thesee::testing::division_labels(p));
}

TEST_CASE("re-locking an owned mutex is a no-op") {
  Program p = parse_program("mutex m; thread 1 { lock(m); lock(m); unlock(m); x <- 1; }");
  for (auto* run : {&run_scheduled, &run_interleavings}) {
    auto r = run(p, {});
    CHECK_FALSE(r.truncated);
    REQUIRE(r.final_envs.size() == 1);
    CHECK(*r.final_envs.begin() == ConcreteEnv{Rational(1)});
  }
}

TEST_CASE("mutexes are exclusive and priorities respected on random programs") {
  thesee::testing::GenOptions g;
  g.loops = false;
  for (uint64_t seed = 1; seed <= 80; ++seed) {
    Program p = parse_program(thesee::testing::ProgramGenerator(seed, g).generate());
    OracleOptions o;
    o.witnesses = false;
    auto s = run_scheduled(p, o);
    CHECK(s.max_mutex_holders <= 1);
    CHECK(s.priority_violations == 0);
    auto i = run_interleavings(p, o);
    CHECK(i.max_mutex_holders <= 1);
    if (!s.truncated && !i.truncated) {
      for (Label l : s.errors) CHECK(i.errors.count(l) == 1);
    }
  }
}

TEST_CASE("witnesses project to prefixes of thread paths") {
  thesee::testing::GenOptions g;
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    Program p = parse_program(thesee::testing::ProgramGenerator(seed, g).generate());
    OracleOptions o;
    o.unroll = 2;
    auto r = run_interleavings(p, o);
    std::map<ThreadId, std::vector<std::vector<std::string>>> thread_paths;
    for (const auto& t : p.threads) {
      for (const auto& path : paths(t.body, o.unroll).paths) {
        std::vector<std::string> steps;
        for (const auto& s : path) steps.push_back(primitive_to_string(*s));
        thread_paths[t.id].push_back(steps);
      }
    }
    for (const auto& [label, w] : r.witnesses) {
      REQUIRE_FALSE(w.empty());
      CHECK(w.back().post_scheduler == "error");
      std::map<ThreadId, std::vector<std::string>> proj;
      for (const auto& step : w) proj[step.thread].push_back(step.stmt);
      for (const auto& [t, steps] : proj) {
        bool prefix = false;
        for (const auto& full : thread_paths[t]) {
          prefix |= full.size() >= steps.size() && std::equal(steps.begin(), steps.end(), full.begin());
        }
        CHECK_MESSAGE(prefix, "seed " << seed << " thread " << t);
      }
    }
  }
}

TEST_CASE("budgets truncate exploration") {
  Program p = load_corpus("producer_consumer.conc");
  OracleOptions o;
  o.unroll = 50;
  o.budget.max_states = 100;
  auto r = run_scheduled(p, o);
  CHECK(r.truncated);
  CHECK(r.truncation_reason == "state budget");
}

TEST_CASE("concrete interferences of the two-flag protocol") {
  Program p = load_corpus("two_flags.conc");
  auto r = concrete_interference_fixpoint(p);
  CHECK(r.converged);
  VarId f1 = *p.find_var("flag1");
  VarId f2 = *p.find_var("flag2");
  std::set<std::tuple<ThreadId, VarId, Rational>> flags;
  for (const auto& i : r.interferences) {
    if (i.var == f1 || i.var == f2) flags.insert({i.thread, i.var, i.value});
  }
  std::set<std::tuple<ThreadId, VarId, Rational>> expected = {{1, f1, Rational(1)}, {2, f2, Rational(1)}};
  CHECK(flags == expected);
}

TEST_CASE("concrete interferences of parallel incrementation grow without bound") {
  Program p = load_corpus("parallel_increment.conc");
  InterferenceOracleOptions o;
  o.max_rounds = 4;
  auto r = concrete_interference_fixpoint(p, o);
  CHECK_FALSE(r.converged);
  VarId x = *p.find_var("x");
  std::set<Rational> xs;
  for (const auto& i : r.interferences) {
    if (i.var == x) xs.insert(i.value);
  }
  for (int v = 1; v <= 3; ++v) CHECK(xs.count(Rational(v)) == 1);
}

TEST_CASE("concrete interferences of a single thread") {
  Program p = parse_program("thread 1 { x <- [0,1]; y <- 1 / x; }");
  auto r = concrete_interference_fixpoint(p);
  CHECK(r.converged);
  ConcreteState init;
  init.envs = initial_envs(p);
  CHECK(r.errors == exec_stmt(*p.threads[0].body, init).errors);
  for (const auto& i : r.interferences) CHECK(i.thread == 1);
}

TEST_CASE("interference semantics covers the interleavings") {
  thesee::testing::GenOptions g;
  g.loops = false;
  g.sync = false;
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    Program p = parse_program(thesee::testing::ProgramGenerator(seed, g).generate());
    auto inter = run_interleavings(p);
    InterferenceOracleOptions io;
    io.max_rounds = 8;
    io.max_states_per_thread = 20000;
    auto conc = concrete_interference_fixpoint(p, io);
    if (inter.truncated || !conc.converged) continue;
    for (Label l : inter.errors) CHECK(conc.errors.count(l) == 1);
  }
}

TEST_CASE("scheduler configurations") {
  SchedConfig none;
  SchedConfig held_m{1, 0, -1};
  SchedConfig free_m{0, 1, -1};
  CHECK(intf(none, none));
  CHECK_FALSE(intf(held_m, held_m));
  CHECK_FALSE(intf(free_m, held_m));
  Program p = load_corpus("priority_islocked.conc");
  CHECK(config_str(p, held_m) == "l={m} u={}");
  CHECK(config_str(p, SchedConfig{0, 1, 0}) == "l={} u={m} s=sync(m)");
}

TEST_CASE("soundness inclusion verdicts") {
  Program p = load_corpus("parallel_increment.conc");
  auto oracle = run_interleavings(p);
  CHECK(check_soundness_inclusion(oracle, {}).verdict == Verdict::Pass);

  Program empty = parse_program("thread 1 { }");
  CHECK(check_soundness_inclusion(run_interleavings(empty), {}).verdict == Verdict::Pass);

  Program inter_thread_flow = load_corpus("inter_thread_flow.conc");
  auto all = run_interleavings(inter_thread_flow);
  LabelSet mutated = all.errors;
  Label dropped = *mutated.begin();
  mutated.erase(dropped);
  auto rep = check_soundness_inclusion(all, mutated);
  CHECK(rep.verdict == Verdict::Fail);
  CHECK(rep.missing == LabelSet{dropped});
  CHECK(rep.witnesses.count(dropped) == 1);

  OracleResult truncated;
  truncated.truncated = true;
  CHECK(check_soundness_inclusion(truncated, {}).verdict == Verdict::Inconclusive);
  CHECK(std::string(to_string(Verdict::Inconclusive)) == "INCONCLUSIVE");
}
