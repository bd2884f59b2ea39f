#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "thesee/ast.hpp"
#include "thesee/box.hpp"
#include "thesee/interval.hpp"
#include "thesee/oracle.hpp"

namespace thesee {

struct AnalyzerOptions {
  Thresholds thresholds = Thresholds::defaults();
  // Outer rounds that join interferences before widening starts.
  unsigned widening_delay = 2;
  // One extra body pass after a loop invariant stabilizes.
  bool decreasing_pass = false;
  // Upper bound on loop iterations per analysis; exceeding it is a Budget error.
  size_t max_loop_steps = 100000;
  size_t max_rounds = 100;
  // Threads that may run as several instances and so read their own writes.
  std::set<ThreadId> self_interference;
  // Mono-processor real-time scheduling; false degrades islocked to [0,1].
  bool mono = true;
  size_t partition_cap = 256;
};

struct Diagnostic {
  SourcePos pos;
  std::string message;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
  friend auto operator<=>(const Diagnostic&, const Diagnostic&) = default;
};

// Environment at the entry of each primitive statement.
using Invariants = std::map<StmtId, BoxEnv>;

// ---- sequential analysis ----

struct AbsState {
  BoxEnv env;
  LabelSet errors;
};

AbsState analyze_seq(const Stmt& s, const AbsState& st, const AnalyzerOptions& options = {},
                     Invariants* invariants = nullptr);

struct SeqResult {
  LabelSet errors;
  BoxEnv final_env;
  Invariants invariants;
  std::vector<Diagnostic> diagnostics;
};

// Throws MultiThreadInput unless the program has exactly one thread.
SeqResult analyze_program_seq(const Program& p, const AnalyzerOptions& options = {});

// ---- non-scheduled interference analysis ----

class InterferenceAbs {
 public:
  using Key = std::pair<ThreadId, VarId>;

  // Bot when absent.
  Interval get(ThreadId t, VarId x) const;
  void join_at(ThreadId t, VarId x, const Interval& v);
  const std::map<Key, Interval>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const InterferenceAbs&, const InterferenceAbs&) = default;

 private:
  std::map<Key, Interval> entries_;
};

InterferenceAbs interf_join(const InterferenceAbs& a, const InterferenceAbs& b);
InterferenceAbs interf_widen(const InterferenceAbs& a, const InterferenceAbs& b, const Thresholds& thresholds);
bool interf_leq(const InterferenceAbs& a, const InterferenceAbs& b);

struct AbsStateI {
  BoxEnv env;
  LabelSet errors;
  InterferenceAbs interf;
};

// Replaces each variable read by the join of its current value and the
// interferences of the other threads (and of `t` itself when `self`).
ExprPtr apply_interference(ThreadId t, const BoxEnv& env, const InterferenceAbs& interf, const ExprPtr& e,
                           bool self);

AbsStateI analyze_stmt_I(const Program& p, const Stmt& s, ThreadId t, const AbsStateI& st,
                         const AnalyzerOptions& options = {}, Invariants* invariants = nullptr);

struct InterferenceResult {
  LabelSet errors;
  InterferenceAbs interf;
  size_t rounds = 0;
  // Interferences at the end of every round.
  std::vector<InterferenceAbs> history;
  std::map<ThreadId, Invariants> invariants;
  std::map<ThreadId, BoxEnv> final_envs;
  std::vector<Diagnostic> diagnostics;
};

InterferenceResult analyze_program_I(const Program& p, const AnalyzerOptions& options = {});

// Values a shared variable may hold: the join of all writes to it, or its
// initial value when no thread writes it.
Interval variable_range(const Program& p, const InterferenceAbs& interf, VarId x);

// ---- scheduled analysis ----

using PartitionedEnv = std::map<SchedConfig, BoxEnv>;

class SchedInterferenceAbs {
 public:
  using Key = std::tuple<ThreadId, SchedConfig, VarId>;

  Interval get(ThreadId t, const SchedConfig& c, VarId x) const;
  void join_at(ThreadId t, const SchedConfig& c, VarId x, const Interval& v);
  const std::map<Key, Interval>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const SchedInterferenceAbs&, const SchedInterferenceAbs&) = default;

 private:
  std::map<Key, Interval> entries_;
};

SchedInterferenceAbs sched_interf_join(const SchedInterferenceAbs& a, const SchedInterferenceAbs& b);
SchedInterferenceAbs sched_interf_widen(const SchedInterferenceAbs& a, const SchedInterferenceAbs& b,
                                        const Thresholds& thresholds);

struct AbsStateC {
  PartitionedEnv envs;
  LabelSet errors;
  SchedInterferenceAbs interf;
};

struct ReadRecord {
  ThreadId thread = 0;
  SchedConfig config;
  VarId var = 0;
  friend bool operator==(const ReadRecord&, const ReadRecord&) = default;
  friend auto operator<=>(const ReadRecord&, const ReadRecord&) = default;
};
using ReadLog = std::set<ReadRecord>;

// apply_interference restricted to weak interferences from configurations
// compatible with `c`. Reads are appended to `log` when given.
ExprPtr apply_sched(ThreadId t, const SchedConfig& c, const BoxEnv& env, const SchedInterferenceAbs& interf,
                    const ExprPtr& e, ReadLog* log = nullptr);

// Environment after acquiring `m`: `env` joined with every value published on
// `m` by another thread under a compatible configuration.
BoxEnv in_sharp(ThreadId t, uint64_t held, uint64_t free, MutexId m, const BoxEnv& env,
                const SchedInterferenceAbs& interf);

// Values published when `t` releases `m`: the current value of every variable
// `t` writes while holding or testing `m`.
SchedInterferenceAbs out_sharp(ThreadId t, uint64_t held, uint64_t free, MutexId m, const BoxEnv& env,
                               const SchedInterferenceAbs& interf);

struct PartitionStats {
  size_t max_env_partitions = 0;
  size_t interference_entries = 0;
  size_t coarsenings = 0;
};

AbsStateC transfer_C(const Program& p, const Stmt& s, ThreadId t, const AbsStateC& st,
                     const AnalyzerOptions& options = {});

struct Race {
  enum class Kind { WriteWrite, ReadWrite };
  Kind kind = Kind::WriteWrite;
  // Write/write: ordered pair of writers. Read/write: reader then writer.
  ThreadId first = 0;
  ThreadId second = 0;
  VarId var = 0;
  std::set<std::pair<SchedConfig, SchedConfig>> configs;
};

std::vector<Race> extract_races(const Program& p, const SchedInterferenceAbs& interf, const ReadLog& reads);

struct ScheduledResult {
  LabelSet errors;
  SchedInterferenceAbs interf;
  std::vector<Race> races;
  size_t rounds = 0;
  std::vector<SchedInterferenceAbs> history;
  std::map<ThreadId, std::map<StmtId, PartitionedEnv>> invariants;
  std::map<ThreadId, PartitionedEnv> final_envs;
  PartitionStats stats;
  ReadLog reads;
  std::vector<Diagnostic> diagnostics;
};

ScheduledResult analyze_program_C(const Program& p, const AnalyzerOptions& options = {});

Interval variable_range(const Program& p, const SchedInterferenceAbs& interf, VarId x);

}  // namespace thesee
