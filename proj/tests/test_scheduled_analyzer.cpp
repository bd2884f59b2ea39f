#include "doctest.h"
#include "support/random_program.hpp"
#include "support/util.hpp"
#include "thesee/analysis.hpp"

using namespace thesee;
using thesee::testing::find_stmt;
using thesee::testing::load_corpus;

namespace {

constexpr SchedConfig kNone{0, 0, -1};

SchedConfig held(uint64_t l) { return SchedConfig{l, 0, -1}; }

}  // namespace

TEST_CASE("interferences written under a mutex are hidden from a thread that saw it free") {
  Program p = load_corpus("priority_islocked.conc");
  VarId Y = *p.find_var("Y");
  VarId Z = *p.find_var("Z");
  SchedInterferenceAbs I;
  I.join_at(1, held(1), Y, Interval::point(1));
  I.join_at(1, held(1), Z, Interval::point(1));
  BoxEnv env = BoxEnv::initial(p);
  ExprPtr read = Expr::make_var(Y, "Y");

  ReadLog log;
  SchedConfig saw_free{0, 1, -1};
  CHECK(apply_sched(2, saw_free, env, I, read, &log).get() == read.get());
  CHECK(log.count(ReadRecord{2, saw_free, Y}) == 1);

  ExprPtr r = apply_sched(2, kNone, env, I, read);
  REQUIRE(r->kind == Expr::Kind::Const);
  CHECK(r->lo == Bound(0));
  CHECK(r->hi == Bound(1));

  CHECK(apply_sched(2, kNone, env, SchedInterferenceAbs{}, read).get() == read.get());
}

TEST_CASE("locking moves the sole partition") {
  Program p = load_corpus("priority_islocked.conc");
  const Stmt* lock = find_stmt(*p.threads[0].body, Stmt::Kind::Lock);
  AbsStateC st;
  st.envs[kNone] = BoxEnv::initial(p);
  auto out = transfer_C(p, *lock, 1, st);
  REQUIRE(out.envs.size() == 1);
  CHECK(out.envs.begin()->first == held(1));
  CHECK(out.envs.begin()->second == BoxEnv::initial(p));
}

TEST_CASE("unlocking publishes the protected writes") {
  Program p = load_corpus("priority_islocked.conc");
  VarId Y = *p.find_var("Y");
  const Stmt* unlock = find_stmt(*p.threads[0].body, Stmt::Kind::Unlock);
  BoxEnv env = BoxEnv::initial(p);
  env.set(Y, Interval::point(1));
  AbsStateC st;
  st.envs[held(1)] = env;
  st.interf.join_at(1, held(1), Y, Interval::point(1));
  auto out = transfer_C(p, *unlock, 1, st);
  CHECK(out.interf.get(1, SchedConfig{0, 0, 0}, Y) == Interval::point(1));
  REQUIRE(out.envs.size() == 1);
  CHECK(out.envs.begin()->first == kNone);
}

TEST_CASE("acquire and release helpers") {
  Program p = parse_program("var X; mutex m1; mutex m2; thread 1 { X <- 1; } thread 2 { X <- 2; }");
  VarId X = *p.find_var("X");
  BoxEnv env = BoxEnv::initial(p);
  CHECK(in_sharp(2, 0, 0, 0, env, SchedInterferenceAbs{}) == env);

  // Thread 1 published X=5 on m1 while holding m2, and X=7 while holding nothing.
  SchedInterferenceAbs I;
  I.join_at(1, SchedConfig{2, 0, 0}, X, Interval::point(5));
  I.join_at(1, SchedConfig{0, 0, 0}, X, Interval::point(7));
  BoxEnv in = in_sharp(2, 2, 0, 0, env, I);
  CHECK(in.get(X) == Interval::of(Bound(0), Bound(7), true));
  CHECK(in_sharp(2, 0, 0, 0, env, I).get(X) == Interval::of(Bound(0), Bound(7), true));
  BoxEnv own = in_sharp(1, 0, 0, 0, env, I);
  CHECK(own == env);

  CHECK(out_sharp(1, 0, 0, 0, env, SchedInterferenceAbs{}).empty());
  SchedInterferenceAbs weak;
  weak.join_at(1, SchedConfig{1, 0, -1}, X, Interval::point(3));
  env.set(X, Interval::point(4));
  auto pub = out_sharp(1, 0, 0, 0, env, weak);
  CHECK(pub.get(1, SchedConfig{0, 0, 0}, X) == Interval::point(4));
  CHECK(out_sharp(2, 0, 0, 0, env, weak).empty());
}

TEST_CASE("the priority program under the scheduler") {
  Program p = load_corpus("priority_islocked.conc");
  VarId T = *p.find_var("T");
  VarId Y = *p.find_var("Y");
  VarId Z = *p.find_var("Z");
  auto mono = analyze_program_C(p);
  CHECK(variable_range(p, mono.interf, T) == Interval::point(0));
  CHECK(mono.errors.empty());
  for (const auto& race : mono.races) CHECK((race.var != Y && race.var != Z));
  CHECK(mono.diagnostics.empty());

  AnalyzerOptions o;
  o.mono = false;
  auto multi = analyze_program_C(p, o);
  CHECK(variable_range(p, multi.interf, T) == Interval::of(Bound(-1), Bound(1), true));
  CHECK(multi.diagnostics.size() == 1);
}

TEST_CASE("producer and consumer") {
  Program p = load_corpus("producer_consumer.conc");
  AnalyzerOptions o;
  o.thresholds = Thresholds::from({-10000, -1, 0, 1, 10, 10000});
  auto r = analyze_program_C(p, o);
  CHECK(variable_range(p, r.interf, *p.find_var("X")) == Interval::of(Bound(0), Bound(10), true));
  CHECK(variable_range(p, r.interf, *p.find_var("Y")).hi().is_pos_inf());
  CHECK(r.races.empty());
  auto d = analyze_program_C(p);
  CHECK(variable_range(p, d.interf, *p.find_var("X")) == Interval::of(Bound(0), Bound(10000), true));
}

TEST_CASE("flow-insensitive interferences raise both alarms of the ordered program") {
  Program p = load_corpus("inter_thread_flow.conc");
  auto r = analyze_program_C(p);
  CHECK(r.errors == thesee::testing::division_labels(p));
}

TEST_CASE("race detection") {
  Program p = load_corpus("parallel_increment.conc");
  VarId x = *p.find_var("x");
  auto r = analyze_program_C(p);
  bool ww = false;
  bool rw = false;
  for (const auto& race : r.races) {
    ww |= race.kind == Race::Kind::WriteWrite && race.first == 1 && race.second == 2 && race.var == x;
    rw |= race.kind == Race::Kind::ReadWrite && race.first == 1 && race.second == 2 && race.var == x;
    CHECK_FALSE(race.configs.empty());
  }
  CHECK(ww);
  CHECK(rw);

  Program single = parse_program("thread 1 { x <- x + 1; y <- x; }");
  CHECK(analyze_program_C(single).races.empty());

  Program locked = parse_program("mutex m; thread 1 { lock(m); x <- x + 1; unlock(m); } thread 2 { lock(m); x <- 2; unlock(m); }");
  CHECK(analyze_program_C(locked).races.empty());
}

TEST_CASE("partitions stay few on the corpus") {
  for (const char* name : {"two_flags.conc", "parallel_increment.conc", "priority_islocked.conc", "producer_consumer.conc", "inter_thread_flow.conc"}) {
    auto r = analyze_program_C(load_corpus(name));
    CHECK(r.stats.max_env_partitions <= 8);
    CHECK(r.stats.coarsenings == 0);
  }
}

TEST_CASE("coarsening keeps the analysis sound") {
  thesee::testing::GenOptions g;
  g.loops = false;
  for (uint64_t seed = 1; seed <= 80; ++seed) {
    Program p = parse_program(thesee::testing::ProgramGenerator(seed, g).generate());
    OracleOptions o;
    o.witnesses = false;
    auto oracle = run_scheduled(p, o);
    if (oracle.truncated) continue;
    AnalyzerOptions a;
    a.partition_cap = 1;
    auto r = analyze_program_C(p, a);
    CHECK_MESSAGE(check_soundness_inclusion(oracle, r.errors).verdict == Verdict::Pass, "seed " << seed);
  }
}

TEST_CASE("scheduled analysis covers the scheduled and unscheduled oracles") {
  thesee::testing::GenOptions g;
  for (uint64_t seed = 200; seed <= 350; ++seed) {
    Program p = parse_program(thesee::testing::ProgramGenerator(seed, g).generate());
    OracleOptions o;
    o.witnesses = false;
    auto sched = run_scheduled(p, o);
    if (!sched.truncated) {
      auto r = analyze_program_C(p);
      CHECK_MESSAGE(check_soundness_inclusion(sched, r.errors).verdict == Verdict::Pass, "seed " << seed);
    }
    auto all = run_interleavings(p, o);
    if (!all.truncated) {
      AnalyzerOptions multi;
      multi.mono = false;
      auto r = analyze_program_C(p, multi);
      CHECK_MESSAGE(check_soundness_inclusion(all, r.errors).verdict == Verdict::Pass, "seed " << seed);
    }
  }
}

TEST_CASE("scheduled alarms are included in non-scheduled alarms on sync-free programs") {
  thesee::testing::GenOptions g;
  g.sync = false;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    Program p = parse_program(thesee::testing::ProgramGenerator(seed, g).generate());
    auto c = analyze_program_C(p);
    auto i = analyze_program_I(p);
    for (Label l : c.errors) CHECK_MESSAGE(i.errors.count(l) == 1, "seed " << seed);
  }
}
