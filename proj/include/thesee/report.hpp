#pragma once

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "thesee/ast.hpp"
#include "thesee/rational.hpp"

namespace thesee {

enum class Mode { Seq, Interference, Scheduled, OracleInterleave, OracleScheduled, OracleInterference, Fuzz };

const char* mode_name(Mode m);
std::optional<Mode> parse_mode(std::string_view s);
bool is_oracle_mode(Mode m);
bool is_analyzer_mode(Mode m);

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  Mode mode = Mode::Interference;
  unsigned unroll = 3;
  unsigned widening_delay = 2;
  std::vector<Rational> thresholds = {Rational(-10000), Rational(-1), Rational(0), Rational(1), Rational(10000)};
  bool mono = true;
  std::set<ThreadId> self_interference;
  size_t budget_states = 1000000;
  size_t budget_depth = 10000;
  uint64_t seed = 1;
  size_t fuzz_trials = 20;
  bool decreasing_pass = false;
  size_t partition_cap = 256;
  std::optional<Mode> check_against;
  // Adds wall-clock timing, which makes the report non-reproducible.
  bool timing = false;
};

// Exit statuses of the command-line tool.
inline constexpr int kExitClean = 0;
inline constexpr int kExitAlarms = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

class AnalysisReport {
 public:
  AnalysisReport() = default;
  explicit AnalysisReport(nlohmann::json data) : data_(std::move(data)) {}

  // Parses a report previously produced by `json()`.
  static AnalysisReport from_json(std::string_view text);

  const nlohmann::json& data() const { return data_; }
  std::string json() const;
  std::string text(bool color = false) const;
  int exit_code() const;

 private:
  nlohmann::json data_;
};

// Runs the configured analysis, oracle or fuzzer on `p`.
AnalysisReport run_analysis(const Program& p, const RunConfig& config);

// Canonical fingerprint of a program, used to match reports.
std::string program_digest(const Program& p);

struct ReportDiff {
  bool alarms_a_in_b = true;
  bool alarms_b_in_a = true;
  bool races_a_in_b = true;
  bool races_b_in_a = true;
  std::vector<std::string> only_in_a;
  std::vector<std::string> only_in_b;

  nlohmann::json to_json() const;
};

// Throws ProgramMismatch when the reports describe different programs.
ReportDiff diff_reports(const AnalysisReport& a, const AnalysisReport& b);

}  // namespace thesee
