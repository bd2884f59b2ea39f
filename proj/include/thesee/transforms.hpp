#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "thesee/analysis.hpp"
#include "thesee/ast.hpp"
#include "thesee/frontend.hpp"
#include "thesee/oracle.hpp"

namespace thesee {

enum class RuleId {
  RedundantStore = 1,
  IdentityStore,
  ReorderAssigns,
  ReorderGuards,
  GuardBeforeAssign,
  AssignBeforeGuard,
  AssignPropagation,
  SubexprElim,
  ExprSimplify,
};
inline constexpr RuleId kAllRules[] = {RuleId::RedundantStore,   RuleId::IdentityStore,     RuleId::ReorderAssigns,
                                       RuleId::ReorderGuards,    RuleId::GuardBeforeAssign, RuleId::AssignBeforeGuard,
                                       RuleId::AssignPropagation, RuleId::SubexprElim,      RuleId::ExprSimplify};
const char* rule_name(RuleId r);

// Conservative checks over every environment. A true answer is a proof.
bool check_nonblock(const Expr& e);
bool check_noerror(const Expr& e);
bool check_deterministic(const Expr& e);

// Side conditions that may be switched off to build negative controls.
enum class SideCondition { Nonblock, Noerror, Deterministic, Local, Fresh, Disjoint };
const char* side_condition_name(SideCondition c);

struct RuleContext {
  ThreadId thread = 0;
  VarClasses vars;
  // Variable introduced by sub-expression elimination; must be fresh.
  std::optional<VarId> fresh_var;
  std::string fresh_name;
  // Reject windows containing synchronization primitives.
  bool scheduled = false;
  std::set<SideCondition> unchecked;
  // Occurrence subsets enumerated by assignment propagation are capped at 2^bound.
  unsigned max_occurrences = 4;
};

struct RuleResult {
  std::vector<ControlPath> paths;  // one per single application
  size_t skipped = 0;              // instances whose side conditions could not be verified
};

RuleResult apply_rule(RuleId r, const ControlPath& path, const RuleContext& ctx);

struct FuzzOptions {
  uint64_t seed = 1;
  size_t trials = 20;
  unsigned max_chain = 4;
  unsigned unroll = 2;
  // Validate against the scheduled oracle and analyzer instead of the non-scheduled ones.
  bool scheduled = false;
  OracleBudget budget{200000, 10000};
  AnalyzerOptions analyzer;
};

struct RuleCounts {
  size_t applied = 0;
  size_t skipped = 0;
  size_t violations = 0;
};

struct FuzzTrial {
  uint64_t seed = 0;
  std::vector<std::string> chain;  // "t<id>:<rule>" per application
  LabelSet oracle_errors;
  LabelSet analyzer_errors;
  Verdict verdict = Verdict::Pass;
  std::map<Label, Witness> witnesses;  // for missed errors
};

struct FuzzReport {
  std::map<RuleId, RuleCounts> rules;
  std::vector<FuzzTrial> trials;
  size_t violations = 0;
  size_t inconclusive = 0;
};

FuzzReport fuzz_weakmem(const Program& p, const FuzzOptions& options);

// Weak-memory validation of explicitly transformed thread path sets.
FuzzTrial check_transformed(const Program& transformed, const std::map<ThreadId, std::vector<ControlPath>>& paths,
                            const LabelSet& analyzer_errors, const FuzzOptions& options);

struct NegativeControl {
  std::string name;
  std::string description;
  FuzzTrial trial;
  bool detected = false;
};

// Fixed programs where a transformation with a violated side condition
// exposes an error the original analysis does not report.
std::vector<NegativeControl> run_negative_controls(const FuzzOptions& options = {});

}  // namespace thesee
