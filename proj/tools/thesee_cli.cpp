// thesee-mini: command-line front end over the C interface.
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thesee/thesee.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

int exit_for(int rc) {
  switch (rc) {
    case THESEE_ERROR_PARSE:
    case THESEE_ERROR_DUPLICATE_THREAD_ID:
    case THESEE_ERROR_UNDECLARED_VARIABLE:
    case THESEE_ERROR_UNSUPPORTED_MODE:
    case THESEE_ERROR_MULTI_THREAD_INPUT:
    case THESEE_ERROR_PROGRAM_MISMATCH:
    case THESEE_ERROR_INVALID_ARGUMENT:
      return kExitUsage;
    default:
      return kExitInternal;
  }
}

int fail(int rc) {
  std::string msg = thesee_last_error_message();
  std::cerr << "thesee-mini: " << thesee_error_description(rc);
  if (!msg.empty()) std::cerr << ": " << msg;
  std::cerr << "\n";
  return exit_for(rc);
}

template <class F>
int fetch(F&& call, std::string& out) {
  size_t len = 0;
  int rc = call(nullptr, &len);
  if (rc != THESEE_ERROR_INSUFFICIENT_BUFFER) return rc;
  std::vector<char> buf(len);
  rc = call(buf.data(), &len);
  if (rc == THESEE_OK) out.assign(buf.data());
  return rc;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::stringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool use_color() {
  const char* v = std::getenv("THESEE_MINI_COLOR");
  return v != nullptr && std::string(v) == "1";
}

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out || !(out << text)) {
    std::cerr << "thesee-mini: cannot write " << out_path << "\n";
    return kExitInternal;
  }
  return 0;
}

struct AnalyzeArgs {
  std::string file;
  std::string mode = "interference";
  unsigned unroll = 3;
  unsigned widening_delay = 2;
  std::string thresholds;
  bool thresholds_set = false;
  bool mono = true;
  std::string self_interference;
  uint64_t budget_states = 1000000;
  uint64_t budget_depth = 10000;
  uint64_t seed = 1;
  uint64_t trials = 20;
  uint64_t partition_cap = 256;
  bool decreasing = false;
  bool json = false;
  bool strict = false;
  bool timing = false;
  std::string out;
  std::string check_against;
};

int run_analyze(const AnalyzeArgs& a) {
  std::string text;
  if (!read_file(a.file, text)) {
    std::cerr << "thesee-mini: cannot read " << a.file << "\n";
    return kExitUsage;
  }
  thesee_program_t program = nullptr;
  thesee_config_t config = nullptr;
  thesee_report_t report = nullptr;
  auto cleanup = [&] {
    thesee_report_destroy(report);
    thesee_config_destroy(config);
    thesee_program_destroy(program);
  };
  int rc = thesee_program_parse(&program, text.data(), text.size(), a.strict ? 1 : 0);
  if (rc != THESEE_OK) {
    std::cerr << a.file << ":";
    return fail(rc);
  }
  std::vector<int32_t> selfs;
  {
    std::stringstream ss(a.self_interference);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      if (item[0] == 't') item.erase(0, 1);
      try {
        selfs.push_back(std::stoi(item));
      } catch (const std::exception&) {
        std::cerr << "thesee-mini: bad thread id '" << item << "'\n";
        cleanup();
        return kExitUsage;
      }
    }
  }
  const std::function<int()> steps[] = {
      [&] { return thesee_config_create(&config); },
      [&] { return thesee_config_set_mode(config, a.mode.c_str()); },
      [&] { return thesee_config_set_unroll(config, a.unroll); },
      [&] { return thesee_config_set_widening_delay(config, a.widening_delay); },
      [&] { return a.thresholds_set ? thesee_config_set_thresholds(config, a.thresholds.c_str()) : THESEE_OK; },
      [&] { return thesee_config_set_mono(config, a.mono ? 1 : 0); },
      [&] { return thesee_config_set_self_interference(config, selfs.data(), selfs.size()); },
      [&] { return thesee_config_set_budget_states(config, a.budget_states); },
      [&] { return thesee_config_set_budget_depth(config, a.budget_depth); },
      [&] { return thesee_config_set_seed(config, a.seed); },
      [&] { return thesee_config_set_fuzz_trials(config, a.trials); },
      [&] { return thesee_config_set_partition_cap(config, a.partition_cap); },
      [&] { return thesee_config_set_decreasing_pass(config, a.decreasing ? 1 : 0); },
      [&] {
        return thesee_config_set_check_against(config, a.check_against.empty() ? nullptr : a.check_against.c_str());
      },
      [&] { return thesee_config_set_timing(config, a.timing ? 1 : 0); },
  };
  for (const auto& step : steps) {
    if (int s = step(); s != THESEE_OK) {
      int code = fail(s);
      cleanup();
      return code;
    }
  }
  rc = thesee_analyze(&report, program, config);
  if (rc != THESEE_OK) {
    int code = fail(rc);
    cleanup();
    return code;
  }
  std::string body;
  if (a.json) {
    rc = fetch([&](char* b, size_t* l) { return thesee_report_json(report, b, l); }, body);
  } else {
    bool color = use_color() && a.out.empty();
    rc = fetch([&](char* b, size_t* l) { return thesee_report_text(report, color ? 1 : 0, b, l); }, body);
  }
  int exit_code = kExitInternal;
  if (rc == THESEE_OK) rc = thesee_report_exit_code(report, &exit_code);
  if (rc != THESEE_OK) {
    int code = fail(rc);
    cleanup();
    return code;
  }
  cleanup();
  int w = emit(body, a.out);
  return w != 0 ? w : exit_code;
}

int run_diff(const std::string& pa, const std::string& pb, bool subset) {
  std::string ta;
  std::string tb;
  if (!read_file(pa, ta) || !read_file(pb, tb)) {
    std::cerr << "thesee-mini: cannot read reports\n";
    return kExitUsage;
  }
  thesee_report_t a = nullptr;
  thesee_report_t b = nullptr;
  int rc = thesee_report_load(&a, ta.data(), ta.size());
  if (rc == THESEE_OK) rc = thesee_report_load(&b, tb.data(), tb.size());
  std::string out;
  if (rc == THESEE_OK) rc = fetch([&](char* buf, size_t* l) { return thesee_report_diff(a, b, buf, l); }, out);
  thesee_report_destroy(a);
  thesee_report_destroy(b);
  if (rc != THESEE_OK) return fail(rc);
  std::cout << out;
  bool a_in_b = out.find("\"alarms_a_in_b\": true") != std::string::npos &&
                out.find("\"races_a_in_b\": true") != std::string::npos;
  bool b_in_a = out.find("\"alarms_b_in_a\": true") != std::string::npos &&
                out.find("\"races_b_in_a\": true") != std::string::npos;
  return (subset ? a_in_b : a_in_b && b_in_a) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thread-modular static analyzer for a small concurrent language"};
  app.require_subcommand(1);

  AnalyzeArgs a;
  auto* analyze = app.add_subcommand("analyze", "Analyze a program");
  analyze->add_option("file", a.file, "Program source")->required();
  analyze->add_option("--mode", a.mode,
                      "seq | interference | scheduled | oracle-interleave | oracle-scheduled | "
                      "oracle-interference | fuzz")
      ->capture_default_str();
  analyze->add_option("--unroll", a.unroll, "Loop unrolling bound of the oracles")->capture_default_str();
  analyze->add_option("--widening-delay", a.widening_delay, "Outer rounds joined before widening")
      ->capture_default_str();
  auto* th = analyze->add_option("--thresholds", a.thresholds, "Widening thresholds, comma separated");
  analyze->add_flag("--mono,!--no-mono", a.mono, "Mono-processor real-time scheduling (default on)");
  analyze->add_option("--self-interference", a.self_interference, "Threads running as several instances");
  analyze->add_option("--budget-states", a.budget_states, "Oracle state budget")->capture_default_str();
  analyze->add_option("--budget-depth", a.budget_depth, "Oracle path length budget")->capture_default_str();
  analyze->add_option("--seed", a.seed, "Fuzzer seed")->capture_default_str();
  analyze->add_option("--trials", a.trials, "Fuzzer trials")->capture_default_str();
  analyze->add_option("--partition-cap", a.partition_cap, "Maximum environment partitions")->capture_default_str();
  analyze->add_flag("--decreasing-pass", a.decreasing, "Re-run loop bodies once after stabilization");
  analyze->add_flag("--json", a.json, "Emit the JSON report");
  analyze->add_flag("--strict", a.strict, "Require declarations for variables and mutexes");
  analyze->add_flag("--timing", a.timing, "Include wall-clock timing in the report");
  analyze->add_option("--out", a.out, "Write the report to a file");
  analyze->add_option("--check-against", a.check_against, "Analyzer mode whose alarms must cover the oracle errors");

  std::string diff_a;
  std::string diff_b;
  bool subset = false;
  auto* diff = app.add_subcommand("diff", "Compare the alarms and races of two JSON reports");
  diff->add_option("a", diff_a, "First report")->required();
  diff->add_option("b", diff_b, "Second report")->required();
  diff->add_flag("--subset", subset, "Succeed when the first report is included in the second");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  a.thresholds_set = th->count() > 0;
  if (analyze->parsed()) return run_analyze(a);
  return run_diff(diff_a, diff_b, subset);
}
