#include "doctest.h"
#include "support/random_program.hpp"
#include "support/util.hpp"
#include "thesee/analysis.hpp"

using namespace thesee;
using thesee::testing::load_corpus;

TEST_CASE("reads are widened by the other threads' writes") {
  Program p = parse_program("thread 1 { x <- Y; } thread 2 { Y <- 5; }");
  VarId Y = *p.find_var("Y");
  InterferenceAbs I;
  I.join_at(2, Y, Interval::point(5));
  BoxEnv env = BoxEnv::initial(p);
  ExprPtr e = Expr::make_var(Y, "Y");
  ExprPtr r = apply_interference(1, env, I, e, false);
  REQUIRE(r->kind == Expr::Kind::Const);
  CHECK(r->lo == Bound(0));
  CHECK(r->hi == Bound(5));

  CHECK(apply_interference(2, env, I, e, false).get() == e.get());
  CHECK(apply_interference(1, env, InterferenceAbs{}, e, false).get() == e.get());
  ExprPtr self = apply_interference(2, env, I, e, true);
  CHECK(self->kind == Expr::Kind::Const);
  CHECK(self->hi == Bound(5));
}

TEST_CASE("a thread's step records its own writes") {
  Program p = parse_program("thread 1 { x <- x + 1; } thread 2 { x <- 1; }");
  VarId x = *p.find_var("x");
  AbsStateI st{BoxEnv::initial(p), {}, {}};
  st.interf.join_at(2, x, Interval::point(1));
  auto out = analyze_stmt_I(p, *p.threads[0].body, 1, st);
  Interval expected = ival_add(ival_join(Interval::point(0), Interval::point(1)), Interval::point(1));
  CHECK(out.env.get(x) == expected);
  CHECK(out.interf.get(1, x) == expected);
  CHECK(out.interf.get(2, x) == Interval::point(1));
}

TEST_CASE("without interferences a thread is analyzed sequentially") {
  thesee::testing::GenOptions g;
  g.min_threads = g.max_threads = 1;
  g.sync = false;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    Program p = parse_program(thesee::testing::ProgramGenerator(seed, g).generate());
    auto seq = analyze_program_seq(p);
    auto conc = analyze_program_I(p);
    CHECK(conc.errors == seq.errors);
    CHECK(conc.rounds <= 2);
    CHECK(conc.final_envs.at(p.threads[0].id) == seq.final_env);
  }
}

TEST_CASE("the two-flag protocol is not proven exclusive") {
  Program p = load_corpus("two_flags.conc");
  auto r = analyze_program_I(p);
  VarId f1 = *p.find_var("flag1");
  VarId f2 = *p.find_var("flag2");
  CHECK(r.interf.get(1, f1) == Interval::point(1));
  CHECK(r.interf.get(2, f2) == Interval::point(1));
  CHECK(r.interf.get(1, f2).is_bot());
  CHECK(r.interf.get(2, f1).is_bot());
  CHECK(variable_range(p, r.interf, f2) == Interval::point(1));
  // Thread 1 reads flag2 in {0,1}: both outcomes of the test are possible.
  BoxEnv env = BoxEnv::initial(p);
  env.set(f1, Interval::point(1));
  ExprPtr read = apply_interference(1, env, r.interf, Expr::make_var(f2, "flag2"), false);
  LabelSet alarms;
  CHECK_FALSE(transfer_guard(*read, Cmp::Eq, env, alarms).is_bot());
  CHECK_FALSE(transfer_guard(*read, Cmp::Ne, env, alarms).is_bot());
  CHECK(r.errors == thesee::testing::division_labels(p));
}

TEST_CASE("parallel incrementation") {
  Program p = load_corpus("parallel_increment.conc");
  auto r = analyze_program_I(p);
  CHECK(r.errors.empty());
  Interval y = variable_range(p, r.interf, *p.find_var("y"));
  CHECK(y.lo() == Bound(1));
  CHECK(y.hi().is_pos_inf());
}

TEST_CASE("the priority program without the scheduler") {
  Program p = load_corpus("priority_islocked.conc");
  auto r = analyze_program_I(p);
  CHECK(variable_range(p, r.interf, *p.find_var("T")) == Interval::of(Bound(-1), Bound(1), true));
  CHECK(r.diagnostics.size() == 4);
}

TEST_CASE("self-interference lets a thread read its own writes") {
  Program p = parse_program("thread 1 { x <- x + 1; y <- 1 / (x - 2); }");
  CHECK(analyze_program_I(p).errors.empty());
  AnalyzerOptions o;
  o.self_interference = {1};
  auto r = analyze_program_I(p, o);
  CHECK(r.errors == LabelSet{2});
  CHECK(variable_range(p, r.interf, 0).hi().is_pos_inf());
}

TEST_CASE("outer rounds are monotone and the result is a fixpoint") {
  thesee::testing::GenOptions g;
  g.sync = false;
  for (uint64_t seed = 1; seed <= 150; ++seed) {
    Program p = parse_program(thesee::testing::ProgramGenerator(seed, g).generate());
    auto r = analyze_program_I(p);
    REQUIRE(r.history.size() == r.rounds);
    for (size_t k = 1; k < r.history.size(); ++k) CHECK(interf_leq(r.history[k - 1], r.history[k]));
    CHECK(r.history.back() == r.interf);
    for (const auto& t : p.threads) {
      auto again = analyze_stmt_I(p, *t.body, t.id, AbsStateI{BoxEnv::initial(p), r.errors, r.interf});
      CHECK(interf_leq(again.interf, r.interf));
      for (Label l : again.errors) CHECK(r.errors.count(l) == 1);
    }
  }
}

TEST_CASE("interference analysis covers every interleaving") {
  thesee::testing::GenOptions g;
  for (uint64_t seed = 1; seed <= 150; ++seed) {
    Program p = parse_program(thesee::testing::ProgramGenerator(seed, g).generate());
    OracleOptions o;
    o.witnesses = false;
    auto oracle = run_interleavings(p, o);
    if (oracle.truncated) continue;
    auto r = analyze_program_I(p);
    CHECK_MESSAGE(check_soundness_inclusion(oracle, r.errors).verdict == Verdict::Pass, "seed " << seed);
  }
}

TEST_CASE("interference lattice") {
  InterferenceAbs a;
  a.join_at(1, 0, Interval::of(Bound(0), Bound(1)));
  InterferenceAbs b;
  b.join_at(1, 0, Interval::of(Bound(0), Bound(2)));
  b.join_at(2, 0, Interval::point(3));
  CHECK(interf_leq(a, b));
  CHECK_FALSE(interf_leq(b, a));
  CHECK(interf_join(a, b) == b);
  auto w = interf_widen(a, b, Thresholds::none());
  CHECK(w.get(1, 0) == Interval::of(Bound(0), Bound::pos_inf()));
  CHECK(w.get(2, 0) == Interval::point(3));
}
