#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "thesee/ast.hpp"
#include "thesee/box.hpp"
#include "thesee/concrete.hpp"

namespace thesee {

struct OracleBudget {
  size_t max_states = 1000000;
  size_t max_depth = 10000;
};

struct WitnessStep {
  ThreadId thread = 0;
  std::string stmt;
  std::string pre_scheduler;
  std::string post_scheduler;
};
using Witness = std::vector<WitnessStep>;

struct OracleOptions {
  unsigned unroll = 3;
  OracleBudget budget;
  ValueMode mode = ValueMode::IntegerPoints;
  bool witnesses = true;
  // Also gather the environment of every reachable state.
  bool collect_reachable = false;
  // Explicit per-thread path sets used instead of the thread bodies.
  const std::map<ThreadId, std::vector<ControlPath>>* thread_paths = nullptr;
};

struct OracleResult {
  LabelSet errors;
  bool truncated = false;
  std::string truncation_reason;
  size_t states = 0;
  size_t transitions = 0;
  // Shortest witness reaching each error.
  std::map<Label, Witness> witnesses;
  // Environments of reachable states that have no successor.
  std::set<ConcreteEnv> final_envs;
  std::set<ConcreteEnv> reachable_envs;
  // Largest number of threads simultaneously holding one mutex (at most 1).
  size_t max_mutex_holders = 0;
  // Transitions taken by a thread while a higher-priority thread was ready.
  size_t priority_violations = 0;
};

// All interleavings of the threads' primitive statements. Mutexes are
// exclusive (a lock blocks while another thread holds the mutex), there are
// no priorities, yield does nothing, and islocked reads the mutex state.
OracleResult run_interleavings(const Program& p, const OracleOptions& options = {});

// Executions under the fixed-priority mono-processor scheduler.
OracleResult run_scheduled(const Program& p, const OracleOptions& options = {});

// Scheduler configuration: held mutexes, known-free mutexes and a tag that is
// either weak (-1) or the synchronizing mutex.
struct SchedConfig {
  uint64_t held = 0;
  uint64_t free = 0;
  int tag = -1;

  bool weak() const { return tag < 0; }
  friend bool operator==(const SchedConfig&, const SchedConfig&) = default;
  friend auto operator<=>(const SchedConfig&, const SchedConfig&) = default;
};

bool intf(const SchedConfig& a, const SchedConfig& b);
// "l={m1,m2} u={m3}" with an optional " s=sync(m)" suffix for synchronized tags.
std::string config_str(const Program& p, const SchedConfig& c);

struct ConcreteInterference {
  ThreadId thread = 0;
  SchedConfig config;
  VarId var = 0;
  Rational value;
  friend bool operator==(const ConcreteInterference&, const ConcreteInterference&) = default;
  friend auto operator<=>(const ConcreteInterference&, const ConcreteInterference&) = default;
};

struct InterferenceOracleOptions {
  unsigned unroll = 3;
  size_t max_rounds = 30;
  size_t max_states_per_thread = 200000;
  // Exploration stops (truncated) once some variable has more distinct interference values.
  size_t max_values_per_var = 64;
  ValueMode mode = ValueMode::IntegerPoints;
  std::set<ThreadId> self_interference;
  // Scheduled variant with configuration-partitioned states and interferences.
  bool scheduled = false;
  bool mono = true;
};

struct InterferenceOracleResult {
  LabelSet errors;
  std::set<ConcreteInterference> interferences;
  bool converged = false;
  bool truncated = false;
  size_t rounds = 0;
};

InterferenceOracleResult concrete_interference_fixpoint(const Program& p,
                                                        const InterferenceOracleOptions& options = {});

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct SoundnessReport {
  Verdict verdict = Verdict::Pass;
  LabelSet missing;  // oracle errors the analyzer did not report
  std::map<Label, Witness> witnesses;
};

SoundnessReport check_soundness_inclusion(const OracleResult& oracle, const LabelSet& analyzer_errors);

}  // namespace thesee
