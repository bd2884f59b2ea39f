#include <cstring>
#include <memory>
#include <sstream>

#include "thesee/error.hpp"
#include "thesee/frontend.hpp"
#include "thesee/report.hpp"
#include "thesee/thesee.h"

namespace {

constexpr uint32_t kProgramMagic = 0x54505247;
constexpr uint32_t kConfigMagic = 0x54434647;
constexpr uint32_t kReportMagic = 0x54525054;

thread_local std::string last_error;

int code_for(thesee::ErrorKind kind) {
  using thesee::ErrorKind;
  switch (kind) {
    case ErrorKind::Parse:
      return THESEE_ERROR_PARSE;
    case ErrorKind::DuplicateThreadId:
      return THESEE_ERROR_DUPLICATE_THREAD_ID;
    case ErrorKind::UndeclaredVariable:
      return THESEE_ERROR_UNDECLARED_VARIABLE;
    case ErrorKind::UnsupportedMode:
      return THESEE_ERROR_UNSUPPORTED_MODE;
    case ErrorKind::MultiThreadInput:
      return THESEE_ERROR_MULTI_THREAD_INPUT;
    case ErrorKind::ProgramMismatch:
      return THESEE_ERROR_PROGRAM_MISMATCH;
    case ErrorKind::Budget:
      return THESEE_ERROR_BUDGET;
    case ErrorKind::InvalidArgument:
    case ErrorKind::SideConditionUnverifiable:
    case ErrorKind::BotNotRepresentable:
      return THESEE_ERROR_INVALID_ARGUMENT;
    case ErrorKind::Overflow:
      return THESEE_ERROR_OVERFLOW;
    case ErrorKind::Inconclusive:
      return THESEE_ERROR_INCONCLUSIVE;
  }
  return THESEE_ERROR_INTERNAL;
}

template <class F>
int guarded(F&& f) {
  last_error.clear();
  try {
    return f();
  } catch (const thesee::Error& e) {
    last_error = e.what();
    return code_for(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return THESEE_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return THESEE_ERROR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return THESEE_ERROR_INTERNAL;
  }
}

int write_out(const std::string& s, char* buf, size_t* len) {
  if (len == nullptr) return THESEE_ERROR_NULL_POINTER;
  size_t need = s.size() + 1;
  size_t cap = *len;
  *len = need;
  if (buf == nullptr || cap < need) return THESEE_ERROR_INSUFFICIENT_BUFFER;
  std::memcpy(buf, s.c_str(), need);
  return THESEE_OK;
}

}  // namespace

struct thesee_program_struct {
  uint32_t magic = kProgramMagic;
  thesee::Program program;
};

struct thesee_config_struct {
  uint32_t magic = kConfigMagic;
  thesee::RunConfig config;
};

struct thesee_report_struct {
  uint32_t magic = kReportMagic;
  thesee::AnalysisReport report;
};

namespace {

template <class T>
int check(T* obj, uint32_t magic) {
  if (obj == nullptr) return THESEE_ERROR_NULL_POINTER;
  if (obj->magic != magic) return THESEE_ERROR_INVALID_OBJECT;
  return THESEE_OK;
}

template <class T>
int destroy(T* obj, uint32_t magic) {
  if (obj == nullptr) return THESEE_OK;
  if (obj->magic != magic) return THESEE_ERROR_INVALID_OBJECT;
  obj->magic = 0;
  delete obj;
  return THESEE_OK;
}

thesee::Mode mode_arg(const char* s) {
  if (s == nullptr) throw thesee::Error(thesee::ErrorKind::InvalidArgument, "missing mode");
  auto m = thesee::parse_mode(s);
  if (!m) throw thesee::Error(thesee::ErrorKind::InvalidArgument, std::string("unknown mode '") + s + "'");
  return *m;
}

template <class F>
int with_config(thesee_config_t c, F&& f) {
  return guarded([&] {
    if (int rc = check(c, kConfigMagic); rc != THESEE_OK) return rc;
    f(c->config);
    return static_cast<int>(THESEE_OK);
  });
}

}  // namespace

extern "C" {

uint32_t thesee_api_version(void) { return THESEE_API_VERSION; }

const char* thesee_error_description(int code) {
  switch (code) {
    case THESEE_OK:
      return "success";
    case THESEE_ERROR_PARSE:
      return "program text is malformed";
    case THESEE_ERROR_DUPLICATE_THREAD_ID:
      return "two threads share an id";
    case THESEE_ERROR_UNDECLARED_VARIABLE:
      return "variable or mutex used without declaration";
    case THESEE_ERROR_UNSUPPORTED_MODE:
      return "input not supported by the requested mode";
    case THESEE_ERROR_MULTI_THREAD_INPUT:
      return "sequential mode needs a single-thread program";
    case THESEE_ERROR_PROGRAM_MISMATCH:
      return "reports describe different programs";
    case THESEE_ERROR_BUDGET:
      return "resource budget exhausted";
    case THESEE_ERROR_INVALID_ARGUMENT:
      return "invalid argument";
    case THESEE_ERROR_NULL_POINTER:
      return "null pointer argument";
    case THESEE_ERROR_INVALID_OBJECT:
      return "invalid or destroyed handle";
    case THESEE_ERROR_INSUFFICIENT_BUFFER:
      return "output buffer too small";
    case THESEE_ERROR_OVERFLOW:
      return "arithmetic overflow";
    case THESEE_ERROR_INCONCLUSIVE:
      return "result inconclusive";
    case THESEE_ERROR_INTERNAL:
      return "internal error";
    default:
      return "unknown error code";
  }
}

const char* thesee_last_error_message(void) { return last_error.c_str(); }

int thesee_program_parse(thesee_program_t* program, const char* text, size_t len, int strict) {
  return guarded([&] {
    if (program == nullptr || (text == nullptr && len != 0)) return static_cast<int>(THESEE_ERROR_NULL_POINTER);
    *program = nullptr;
    auto p = std::make_unique<thesee_program_struct>();
    p->program = thesee::parse_program(std::string_view(text == nullptr ? "" : text, len),
                                       thesee::ParseOptions{strict != 0});
    *program = p.release();
    return static_cast<int>(THESEE_OK);
  });
}

int thesee_program_destroy(thesee_program_t program) { return destroy(program, kProgramMagic); }

int thesee_config_create(thesee_config_t* config) {
  return guarded([&] {
    if (config == nullptr) return static_cast<int>(THESEE_ERROR_NULL_POINTER);
    *config = new thesee_config_struct();
    return static_cast<int>(THESEE_OK);
  });
}

int thesee_config_destroy(thesee_config_t config) { return destroy(config, kConfigMagic); }

int thesee_config_set_mode(thesee_config_t config, const char* mode) {
  return with_config(config, [&](thesee::RunConfig& c) { c.mode = mode_arg(mode); });
}

int thesee_config_set_unroll(thesee_config_t config, uint32_t unroll) {
  return with_config(config, [&](thesee::RunConfig& c) {
    if (unroll > 64) throw thesee::Error(thesee::ErrorKind::InvalidArgument, "unroll must be at most 64");
    c.unroll = unroll;
  });
}

int thesee_config_set_widening_delay(thesee_config_t config, uint32_t rounds) {
  return with_config(config, [&](thesee::RunConfig& c) { c.widening_delay = rounds; });
}

int thesee_config_set_thresholds(thesee_config_t config, const char* csv) {
  return with_config(config, [&](thesee::RunConfig& c) {
    if (csv == nullptr) throw thesee::Error(thesee::ErrorKind::InvalidArgument, "missing thresholds");
    std::vector<thesee::Rational> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      try {
        values.push_back(thesee::Rational::parse(item));
      } catch (const thesee::Error&) {
        throw thesee::Error(thesee::ErrorKind::InvalidArgument, "bad threshold '" + item + "'");
      }
    }
    c.thresholds = std::move(values);
  });
}

int thesee_config_set_mono(thesee_config_t config, int enabled) {
  return with_config(config, [&](thesee::RunConfig& c) { c.mono = enabled != 0; });
}

int thesee_config_set_self_interference(thesee_config_t config, const int32_t* threads, size_t count) {
  return with_config(config, [&](thesee::RunConfig& c) {
    if (threads == nullptr && count != 0) throw thesee::Error(thesee::ErrorKind::InvalidArgument, "null thread list");
    c.self_interference.clear();
    for (size_t i = 0; i < count; ++i) c.self_interference.insert(threads[i]);
  });
}

int thesee_config_set_budget_states(thesee_config_t config, uint64_t states) {
  return with_config(config, [&](thesee::RunConfig& c) { c.budget_states = states; });
}

int thesee_config_set_budget_depth(thesee_config_t config, uint64_t depth) {
  return with_config(config, [&](thesee::RunConfig& c) { c.budget_depth = depth; });
}

int thesee_config_set_seed(thesee_config_t config, uint64_t seed) {
  return with_config(config, [&](thesee::RunConfig& c) { c.seed = seed; });
}

int thesee_config_set_fuzz_trials(thesee_config_t config, uint64_t trials) {
  return with_config(config, [&](thesee::RunConfig& c) { c.fuzz_trials = trials; });
}

int thesee_config_set_decreasing_pass(thesee_config_t config, int enabled) {
  return with_config(config, [&](thesee::RunConfig& c) { c.decreasing_pass = enabled != 0; });
}

int thesee_config_set_partition_cap(thesee_config_t config, uint64_t cap) {
  return with_config(config, [&](thesee::RunConfig& c) {
    if (cap == 0) throw thesee::Error(thesee::ErrorKind::InvalidArgument, "partition cap must be positive");
    c.partition_cap = cap;
  });
}

int thesee_config_set_check_against(thesee_config_t config, const char* mode) {
  return with_config(config, [&](thesee::RunConfig& c) {
    if (mode == nullptr) {
      c.check_against.reset();
    } else {
      c.check_against = mode_arg(mode);
    }
  });
}

int thesee_config_set_timing(thesee_config_t config, int enabled) {
  return with_config(config, [&](thesee::RunConfig& c) { c.timing = enabled != 0; });
}

int thesee_analyze(thesee_report_t* report, thesee_program_t program, thesee_config_t config) {
  return guarded([&] {
    if (report == nullptr) return static_cast<int>(THESEE_ERROR_NULL_POINTER);
    *report = nullptr;
    if (int rc = check(program, kProgramMagic); rc != THESEE_OK) return rc;
    if (int rc = check(config, kConfigMagic); rc != THESEE_OK) return rc;
    auto r = std::make_unique<thesee_report_struct>();
    r->report = thesee::run_analysis(program->program, config->config);
    *report = r.release();
    return static_cast<int>(THESEE_OK);
  });
}

int thesee_report_load(thesee_report_t* report, const char* json, size_t len) {
  return guarded([&] {
    if (report == nullptr || json == nullptr) return static_cast<int>(THESEE_ERROR_NULL_POINTER);
    *report = nullptr;
    auto r = std::make_unique<thesee_report_struct>();
    r->report = thesee::AnalysisReport::from_json(std::string_view(json, len));
    *report = r.release();
    return static_cast<int>(THESEE_OK);
  });
}

int thesee_report_destroy(thesee_report_t report) { return destroy(report, kReportMagic); }

int thesee_report_json(thesee_report_t report, char* buf, size_t* len) {
  return guarded([&] {
    if (int rc = check(report, kReportMagic); rc != THESEE_OK) return rc;
    return write_out(report->report.json(), buf, len);
  });
}

int thesee_report_text(thesee_report_t report, int color, char* buf, size_t* len) {
  return guarded([&] {
    if (int rc = check(report, kReportMagic); rc != THESEE_OK) return rc;
    return write_out(report->report.text(color != 0), buf, len);
  });
}

int thesee_report_exit_code(thesee_report_t report, int* exit_code) {
  return guarded([&] {
    if (int rc = check(report, kReportMagic); rc != THESEE_OK) return rc;
    if (exit_code == nullptr) return static_cast<int>(THESEE_ERROR_NULL_POINTER);
    *exit_code = report->report.exit_code();
    return static_cast<int>(THESEE_OK);
  });
}

int thesee_report_diff(thesee_report_t a, thesee_report_t b, char* buf, size_t* len) {
  return guarded([&] {
    if (int rc = check(a, kReportMagic); rc != THESEE_OK) return rc;
    if (int rc = check(b, kReportMagic); rc != THESEE_OK) return rc;
    return write_out(thesee::diff_reports(a->report, b->report).to_json().dump(2) + "\n", buf, len);
  });
}

}  // extern "C"
