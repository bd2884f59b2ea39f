#include <algorithm>

#include "doctest.h"
#include "support/random_program.hpp"
#include "support/util.hpp"
#include "thesee/transforms.hpp"

using namespace thesee;
using thesee::testing::load_corpus;
using thesee::testing::path_str;
using thesee::testing::straight_path;

namespace {

ExprPtr expr_of(const std::string& src) {
  Program p = parse_program("thread 1 { r <- " + src + "; }");
  return thesee::testing::find_stmt(*p.threads[0].body, Stmt::Kind::Assign)->expr;
}

std::set<std::string> results(RuleId r, const Program& p, RuleContext ctx, size_t thread = 0) {
  ctx.thread = p.threads[thread].id;
  ctx.vars = classify_vars(p);
  std::set<std::string> out;
  for (const auto& path : apply_rule(r, straight_path(p, thread), ctx).paths) out.insert(path_str(path));
  return out;
}

std::set<std::string> results(RuleId r, const std::string& src) { return results(r, parse_program(src), {}); }

size_t sync_count(const ControlPath& path) {
  return static_cast<size_t>(std::count_if(path.begin(), path.end(), [](const StmtPtr& s) { return s->is_sync(); }));
}

}  // namespace

TEST_CASE("side-condition checks") {
  CHECK(check_noerror(*expr_of("x + 1")));
  CHECK_FALSE(check_noerror(*expr_of("1 / x")));
  CHECK(check_noerror(*expr_of("1 / [1,2]")));
  CHECK_FALSE(check_noerror(*expr_of("1 / [-1,1]")));
  CHECK_FALSE(check_deterministic(*expr_of("[0,1]")));
  CHECK(check_deterministic(*expr_of("x * 2 - y")));
  CHECK_FALSE(check_deterministic(*expr_of("1 / x")));
  CHECK(check_nonblock(*expr_of("1 / [-1,1]")));
  CHECK(check_nonblock(*expr_of("x + y")));
  CHECK_FALSE(check_nonblock(*expr_of("1 / [0,0]")));
  CHECK_FALSE(check_nonblock(*expr_of("1 / x")));
  CHECK(check_nonblock(*expr_of("1 / (2 - 1)")));
}

TEST_CASE("redundant store elimination") {
  CHECK(results(RuleId::RedundantStore, "thread 1 { x <- 1; x <- 2; }") == std::set<std::string>{"x <- 2"});
  CHECK(results(RuleId::RedundantStore, "thread 1 { x <- 1; x <- x; }").empty());
  RuleContext ctx;
  Program p = parse_program("thread 1 { x <- 1 / y; x <- 2; }");
  ctx.vars = classify_vars(p);
  ctx.thread = 1;
  auto r = apply_rule(RuleId::RedundantStore, straight_path(p), ctx);
  CHECK(r.paths.empty());
  CHECK(r.skipped == 1);
}

TEST_CASE("identity store elimination") {
  Program p = parse_program("thread 1 { x <- x; }");
  RuleContext ctx;
  ctx.thread = 1;
  auto r = apply_rule(RuleId::IdentityStore, straight_path(p), ctx);
  REQUIRE(r.paths.size() == 1);
  CHECK(r.paths[0].empty());
}

TEST_CASE("reordering independent assignments") {
  CHECK(results(RuleId::ReorderAssigns, "thread 1 { x <- 1; y <- 2; }") ==
        std::set<std::string>{"y <- 2 . x <- 1"});
  CHECK(results(RuleId::ReorderAssigns, "thread 1 { x <- 1; y <- x; }").empty());
  CHECK(results(RuleId::ReorderAssigns, "thread 1 { x <- y; y <- 2; }").empty());
}

TEST_CASE("reordering guards") {
  Program p = parse_program("thread 1 { if x = 0 then { if y = 0 then { } } }");
  RuleContext ctx;
  ctx.thread = 1;
  ctx.vars = classify_vars(p);
  bool found = false;
  for (const auto& path : paths(p.threads[0].body, 0).paths) {
    if (path.size() != 2) continue;
    auto r = apply_rule(RuleId::ReorderGuards, path, ctx);
    if (path_str(path) == "x = 0? . y = 0?") {
      REQUIRE(r.paths.size() == 1);
      CHECK(path_str(r.paths[0]) == "y = 0? . x = 0?");
      found = true;
    }
  }
  CHECK(found);

  Program q = parse_program("thread 1 { if x = 0 then { if 1 / y = 0 then { } } }");
  ctx.vars = classify_vars(q);
  size_t skipped = 0;
  for (const auto& path : paths(q.threads[0].body, 0).paths) {
    auto r = apply_rule(RuleId::ReorderGuards, path, ctx);
    CHECK(r.paths.empty());
    skipped += r.skipped;
  }
  CHECK(skipped == 2);
}

TEST_CASE("moving guards and assignments across each other") {
  Program p = parse_program("thread 1 { x <- 1; if y = 0 then { } }");
  RuleContext ctx;
  ctx.thread = 1;
  ctx.vars = classify_vars(p);
  for (const auto& path : paths(p.threads[0].body, 0).paths) {
    auto r = apply_rule(RuleId::GuardBeforeAssign, path, ctx);
    REQUIRE(r.paths.size() == 1);
    CHECK(r.paths[0][0]->kind == Stmt::Kind::Guard);
    CHECK(r.paths[0][1]->kind == Stmt::Kind::Assign);
  }

  // The assignment may only move before the guard when its target is thread-local.
  Program local = parse_program("thread 1 { if y = 0 then { x <- 1; } } thread 2 { y <- 1; }");
  Program shared = parse_program("thread 1 { if y = 0 then { x <- 1; } } thread 2 { x <- y; }");
  for (const Program* q : {&local, &shared}) {
    ctx.vars = classify_vars(*q);
    size_t moved = 0;
    for (const auto& path : paths(q->threads[0].body, 0).paths) {
      auto r = apply_rule(RuleId::AssignBeforeGuard, path, ctx);
      for (const auto& out : r.paths) moved += out[0]->kind == Stmt::Kind::Assign;
    }
    CHECK(moved == (q == &local ? 1U : 0U));
  }
}

TEST_CASE("assignment propagation enumerates occurrence subsets") {
  auto got = results(RuleId::AssignPropagation, "thread 1 { x <- 1; y <- x + x; } thread 2 { y <- 0; }");
  std::set<std::string> expected = {"x <- 1 . y <- 1 + x", "x <- 1 . y <- x + 1", "x <- 1 . y <- 1 + 1"};
  CHECK(got == expected);
  CHECK(results(RuleId::AssignPropagation, "thread 1 { x <- [0,1]; y <- x; }").empty());
  CHECK(results(RuleId::AssignPropagation, "thread 1 { x <- 1; y <- x; } thread 2 { x <- 2; }") ==
        std::set<std::string>{"x <- 1 . y <- 1"});
  CHECK(results(RuleId::AssignPropagation, "thread 1 { x <- z; y <- x; } thread 2 { z <- 2; }").empty());
}

TEST_CASE("sub-expression elimination") {
  Program p = parse_program("var t; thread 1 { y <- (a + b) * (a + b); }");
  RuleContext ctx;
  ctx.fresh_var = *p.find_var("t");
  ctx.fresh_name = "t";
  auto got = results(RuleId::SubexprElim, p, ctx);
  CHECK(got.count("t <- a + b . y <- t * t") == 1);
  CHECK(got.count("t <- (a + b) * (a + b) . y <- t") == 1);

  // The temporary must not be used elsewhere.
  Program used = parse_program("var t; thread 1 { y <- (a + b) * (a + b); } thread 2 { t <- 1; }");
  ctx.fresh_var = *used.find_var("t");
  CHECK(results(RuleId::SubexprElim, used, ctx).empty());

  // The window may not overwrite a variable of the eliminated expression.
  Program overwrite = parse_program("var t; thread 1 { a <- a + b; y <- a + b; }");
  ctx.fresh_var = *overwrite.find_var("t");
  auto shared_window = results(RuleId::SubexprElim, overwrite, ctx);
  CHECK(shared_window.count("t <- a + b . a <- t . y <- t") == 0);
  CHECK(shared_window.count("a <- a + b . t <- a + b . y <- t") == 1);
}

TEST_CASE("expression simplification") {
  CHECK(results(RuleId::ExprSimplify, "thread 1 { y <- x + 0; }") == std::set<std::string>{"y <- x"});
  CHECK(results(RuleId::ExprSimplify, "thread 1 { y <- x * 1; }") == std::set<std::string>{"y <- x"});
  CHECK(results(RuleId::ExprSimplify, "thread 1 { y <- -(-(x)); }").count("y <- x") == 1);
  CHECK(results(RuleId::ExprSimplify, "thread 1 { y <- 2 * 3; }") == std::set<std::string>{"y <- 6"});
  CHECK(results(RuleId::ExprSimplify, "thread 1 { y <- 1 / 0; }").empty());
  CHECK(results(RuleId::ExprSimplify, "thread 1 { y <- x + 0; } thread 2 { x <- 1; }").empty());
}

TEST_CASE("synchronization is never crossed nor introduced") {
  Program p = parse_program("var t; mutex m; thread 1 { lock(m); y <- a + b; unlock(m); }");
  RuleContext ctx;
  ctx.thread = 1;
  ctx.vars = classify_vars(p);
  ctx.fresh_var = *p.find_var("t");
  ctx.fresh_name = "t";
  ctx.scheduled = true;
  ControlPath path = straight_path(p);
  auto r = apply_rule(RuleId::SubexprElim, path, ctx);
  for (const auto& out : r.paths) {
    CHECK(out.front()->kind == Stmt::Kind::Lock);
    CHECK(out.back()->kind == Stmt::Kind::Unlock);
  }
  CHECK(r.paths.size() == 1);

  thesee::testing::GenOptions g;
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    Program q = parse_program(thesee::testing::ProgramGenerator(seed, g).generate());
    RuleContext c;
    c.thread = q.threads[0].id;
    c.vars = classify_vars(q);
    c.scheduled = true;
    for (const auto& qp : paths(q.threads[0].body, 1).paths) {
      for (RuleId rule : kAllRules) {
        for (const auto& out : apply_rule(rule, qp, c).paths) CHECK(sync_count(out) == sync_count(qp));
      }
    }
  }
}

TEST_CASE("reordering the two-flag protocol stays covered by the interference analysis") {
  Program p = load_corpus("two_flags.conc");
  std::map<ThreadId, std::vector<ControlPath>> tpaths;
  RuleContext ctx;
  ctx.vars = classify_vars(p);
  for (const auto& t : p.threads) {
    ctx.thread = t.id;
    for (const auto& path : paths(t.body, 0).paths) {
      tpaths[t.id].push_back(path);
      for (const auto& out : apply_rule(RuleId::GuardBeforeAssign, path, ctx).paths) tpaths[t.id].push_back(out);
    }
  }
  auto analysis = analyze_program_I(p);
  auto trial = check_transformed(p, tpaths, analysis.errors, {});
  CHECK_FALSE(trial.oracle_errors.empty());
  CHECK(trial.verdict == Verdict::Pass);

  std::map<ThreadId, std::vector<ControlPath>> identity;
  for (const auto& t : p.threads) identity[t.id] = paths(t.body, 0).paths;
  auto same = check_transformed(p, identity, analysis.errors, {});
  CHECK(same.oracle_errors == run_interleavings(p).errors);
  CHECK(same.verdict == Verdict::Pass);
}

TEST_CASE("the fuzzer finds no violation and is deterministic") {
  for (const char* name : {"two_flags.conc", "parallel_increment.conc", "inter_thread_flow.conc"}) {
    Program p = load_corpus(name);
    FuzzOptions o;
    o.trials = 15;
    auto a = fuzz_weakmem(p, o);
    auto b = fuzz_weakmem(p, o);
    CHECK(a.violations == 0);
    REQUIRE(a.trials.size() == b.trials.size());
    for (size_t i = 0; i < a.trials.size(); ++i) CHECK(a.trials[i].chain == b.trials[i].chain);
    size_t applied = 0;
    for (const auto& [rule, c] : a.rules) applied += c.applied;
    // Every variable of the incrementation program is shared and every expression reads its target.
    CHECK_MESSAGE((applied > 0) == (std::string(name) != "parallel_increment.conc"), std::string(name));
  }
  Program p = load_corpus("priority_islocked.conc");
  FuzzOptions sched;
  sched.scheduled = true;
  sched.trials = 15;
  CHECK(fuzz_weakmem(p, sched).violations == 0);
}

TEST_CASE("negative controls are detected") {
  auto controls = run_negative_controls();
  CHECK(controls.size() >= 3);
  for (const auto& nc : controls) {
    CHECK_MESSAGE(nc.detected, nc.name);
    CHECK(nc.trial.verdict == Verdict::Fail);
    CHECK_FALSE(nc.trial.witnesses.empty());
  }
}
