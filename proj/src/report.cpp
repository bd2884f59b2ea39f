#include "thesee/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "thesee/analysis.hpp"
#include "thesee/concrete.hpp"
#include "thesee/error.hpp"
#include "thesee/oracle.hpp"
#include "thesee/transforms.hpp"

namespace thesee {

using nlohmann::json;

namespace {

struct ModeName {
  Mode mode;
  const char* name;
};

constexpr ModeName kModes[] = {
    {Mode::Seq, "seq"},
    {Mode::Interference, "interference"},
    {Mode::Scheduled, "scheduled"},
    {Mode::OracleInterleave, "oracle-interleave"},
    {Mode::OracleScheduled, "oracle-scheduled"},
    {Mode::OracleInterference, "oracle-interference"},
    {Mode::Fuzz, "fuzz"},
};

}  // namespace

const char* mode_name(Mode m) {
  for (const auto& e : kModes) {
    if (e.mode == m) return e.name;
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
  for (const auto& e : kModes) {
    if (s == e.name) return e.mode;
  }
  return std::nullopt;
}

bool is_oracle_mode(Mode m) {
  return m == Mode::OracleInterleave || m == Mode::OracleScheduled || m == Mode::OracleInterference;
}

bool is_analyzer_mode(Mode m) { return m == Mode::Seq || m == Mode::Interference || m == Mode::Scheduled; }

std::string program_digest(const Program& p) {
  std::string canon = to_string(p);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void label_threads(const Stmt& s, ThreadId t, std::map<Label, ThreadId>& out) {
  auto visit = [&](const Expr& e, auto&& self) -> void {
    if (e.kind == Expr::Kind::Neg || e.kind == Expr::Kind::Bin) out[e.label] = t;
    if (e.lhs) self(*e.lhs, self);
    if (e.rhs) self(*e.rhs, self);
  };
  if (s.expr) visit(*s.expr, visit);
  if (s.body) label_threads(*s.body, t, out);
  for (const auto& c : s.children) label_threads(*c, t, out);
}

void collect_primitives(const Stmt& s, std::vector<const Stmt*>& out) {
  if (s.is_primitive()) out.push_back(&s);
  if (s.body) collect_primitives(*s.body, out);
  for (const auto& c : s.children) collect_primitives(*c, out);
}

class ReportBuilder {
 public:
  ReportBuilder(const Program& p, const RunConfig& c) : p_(p), c_(c) {
    for (const auto& t : p.threads) label_threads(*t.body, t.id, label_thread_);
    for (const auto& t : p.threads) {
      std::vector<const Stmt*> prims;
      collect_primitives(*t.body, prims);
      for (const Stmt* s : prims) stmts_[s->id] = s;
    }
  }

  AnalysisReport build() {
    auto start = std::chrono::steady_clock::now();
    d_["schema_version"] = kSchemaVersion;
    d_["tool"] = "thesee-mini";
    d_["mode"] = mode_name(c_.mode);
    d_["program"] = program_json();
    d_["config"] = config_json();
    d_["alarms"] = json::array();
    d_["races"] = json::array();
    d_["diagnostics"] = json::array();
    switch (c_.mode) {
      case Mode::Seq:
        seq();
        break;
      case Mode::Interference:
        interference();
        break;
      case Mode::Scheduled:
        scheduled();
        break;
      case Mode::OracleInterleave:
      case Mode::OracleScheduled:
      case Mode::OracleInterference:
        oracle();
        break;
      case Mode::Fuzz:
        fuzz();
        break;
    }
    if (!d_.contains("exit_code")) d_["exit_code"] = d_["alarms"].empty() ? kExitClean : kExitAlarms;
    if (c_.timing) {
      auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      d_["timing"] = {{"total_ms", ms}};
    }
    return AnalysisReport(std::move(d_));
  }

 private:
  AnalyzerOptions analyzer_options() const {
    AnalyzerOptions o;
    o.thresholds = Thresholds::from(c_.thresholds);
    o.widening_delay = c_.widening_delay;
    o.decreasing_pass = c_.decreasing_pass;
    o.self_interference = c_.self_interference;
    o.mono = c_.mono;
    o.partition_cap = c_.partition_cap;
    return o;
  }

  json program_json() const {
    json threads = json::array();
    for (const auto& t : p_.threads) threads.push_back(t.id);
    std::sort(threads.begin(), threads.end());
    json vars = json::array();
    for (VarId v : p_.vars_by_name()) vars.push_back(p_.variables[v].name);
    json mutexes = json::array();
    for (const auto& m : p_.mutexes) mutexes.push_back(m.name);
    std::sort(mutexes.begin(), mutexes.end());
    return {{"digest", program_digest(p_)}, {"threads", threads}, {"variables", vars}, {"mutexes", mutexes}};
  }

  json config_json() const {
    json th = json::array();
    for (const auto& t : c_.thresholds) th.push_back(t.str());
    json self = json::array();
    for (ThreadId t : c_.self_interference) self.push_back(t);
    return {{"mode", mode_name(c_.mode)},
            {"unroll", c_.unroll},
            {"widening_delay", c_.widening_delay},
            {"thresholds", th},
            {"mono", c_.mono},
            {"self_interference", self},
            {"budget_states", c_.budget_states},
            {"budget_depth", c_.budget_depth},
            {"seed", c_.seed},
            {"fuzz_trials", c_.fuzz_trials},
            {"decreasing_pass", c_.decreasing_pass},
            {"partition_cap", c_.partition_cap},
            {"check_against", c_.check_against ? json(mode_name(*c_.check_against)) : json(nullptr)}};
  }

  json alarms_json(const LabelSet& labels) const {
    std::vector<std::tuple<SourcePos, Label>> sorted;
    for (Label l : labels) sorted.emplace_back(p_.label_pos.at(l), l);
    std::sort(sorted.begin(), sorted.end());
    json out = json::array();
    for (const auto& [pos, l] : sorted) {
      auto it = label_thread_.find(l);
      out.push_back({{"label", l},
                     {"line", pos.line},
                     {"column", pos.column},
                     {"kind", "div-by-zero"},
                     {"thread", it == label_thread_.end() ? 0 : it->second},
                     {"context", to_string(*p_.label_expr.at(l))}});
    }
    return out;
  }

  json invariants_json(const Invariants& inv) const {
    json out = json::array();
    for (const auto& [id, env] : inv) out.push_back(stmt_json(id, json(env.str(p_))));
    return out;
  }

  json stmt_json(StmtId id, json env) const {
    const Stmt* s = stmts_.at(id);
    return {{"stmt", id},
            {"line", s->pos.line},
            {"column", s->pos.column},
            {"text", primitive_to_string(*s)},
            {"env", std::move(env)}};
  }

  json partitioned_json(const PartitionedEnv& envs) const {
    json out = json::object();
    for (const auto& [c, env] : envs) out[config_str(p_, c)] = env.str(p_);
    return out;
  }

  void diagnostics(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds) {
      d_["diagnostics"].push_back(std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) + ": " + d.message);
    }
  }

  void seq() {
    SeqResult r = analyze_program_seq(p_, analyzer_options());
    d_["alarms"] = alarms_json(r.errors);
    json ranges = json::object();
    for (VarId v = 0; v < p_.num_vars(); ++v) ranges[p_.variables[v].name] = r.final_env.get(v).str();
    d_["ranges"] = ranges;
    d_["iterations"] = 1;
    d_["invariants"] = {{"t" + std::to_string(p_.threads.front().id), invariants_json(r.invariants)}};
    d_["final"] = {{"t" + std::to_string(p_.threads.front().id), r.final_env.str(p_)}};
    diagnostics(r.diagnostics);
  }

  void interference() {
    InterferenceResult r = analyze_program_I(p_, analyzer_options());
    d_["alarms"] = alarms_json(r.errors);
    json interf = json::object();
    for (const auto& [k, v] : r.interf.entries()) {
      interf[std::to_string(k.first) + "/" + p_.variables[k.second].name] = v.str();
    }
    d_["interferences"] = interf;
    json ranges = json::object();
    for (VarId v = 0; v < p_.num_vars(); ++v) ranges[p_.variables[v].name] = variable_range(p_, r.interf, v).str();
    d_["ranges"] = ranges;
    d_["iterations"] = r.rounds;
    json inv = json::object();
    json fin = json::object();
    for (const auto& [t, i] : r.invariants) inv["t" + std::to_string(t)] = invariants_json(i);
    for (const auto& [t, e] : r.final_envs) fin["t" + std::to_string(t)] = e.str(p_);
    d_["invariants"] = inv;
    d_["final"] = fin;
    diagnostics(r.diagnostics);
  }

  void scheduled() {
    ScheduledResult r = analyze_program_C(p_, analyzer_options());
    d_["alarms"] = alarms_json(r.errors);
    json interf = json::object();
    for (const auto& [k, v] : r.interf.entries()) {
      const auto& [t, c, x] = k;
      interf[std::to_string(t) + "/" + config_str(p_, c) + "/" + p_.variables[x].name] = v.str();
    }
    d_["interferences"] = interf;
    json ranges = json::object();
    for (VarId v = 0; v < p_.num_vars(); ++v) ranges[p_.variables[v].name] = variable_range(p_, r.interf, v).str();
    d_["ranges"] = ranges;
    d_["iterations"] = r.rounds;
    json races = json::array();
    for (const auto& race : r.races) {
      json configs = json::array();
      for (const auto& [a, b] : race.configs) configs.push_back(config_str(p_, a) + " | " + config_str(p_, b));
      races.push_back({{"kind", race.kind == Race::Kind::WriteWrite ? "ww" : "rw"},
                       {"threads", {race.first, race.second}},
                       {"var", p_.variables[race.var].name},
                       {"configs", configs}});
    }
    d_["races"] = races;
    json inv = json::object();
    json fin = json::object();
    for (const auto& [t, per_stmt] : r.invariants) {
      json list = json::array();
      for (const auto& [id, envs] : per_stmt) list.push_back(stmt_json(id, partitioned_json(envs)));
      inv["t" + std::to_string(t)] = list;
    }
    for (const auto& [t, envs] : r.final_envs) fin["t" + std::to_string(t)] = partitioned_json(envs);
    d_["invariants"] = inv;
    d_["final"] = fin;
    d_["partition_stats"] = {{"max_env_partitions", r.stats.max_env_partitions},
                             {"interference_entries", r.stats.interference_entries},
                             {"coarsenings", r.stats.coarsenings}};
    diagnostics(r.diagnostics);
  }

  LabelSet analyzer_errors(Mode m) const {
    switch (m) {
      case Mode::Seq:
        return analyze_program_seq(p_, analyzer_options()).errors;
      case Mode::Interference:
        return analyze_program_I(p_, analyzer_options()).errors;
      case Mode::Scheduled:
        return analyze_program_C(p_, analyzer_options()).errors;
      default:
        throw Error(ErrorKind::InvalidArgument, std::string("cannot check against mode ") + mode_name(m));
    }
  }

  static json witness_json(const Witness& w) {
    json out = json::array();
    for (const auto& s : w) {
      out.push_back({{"thread", s.thread},
                     {"stmt", s.stmt},
                     {"pre_scheduler", s.pre_scheduler},
                     {"post_scheduler", s.post_scheduler}});
    }
    return out;
  }

  void oracle() {
    OracleResult r;
    json info;
    if (c_.mode == Mode::OracleInterference) {
      InterferenceOracleOptions o;
      o.unroll = c_.unroll;
      o.self_interference = c_.self_interference;
      o.mono = c_.mono;
      o.max_states_per_thread = c_.budget_states;
      InterferenceOracleResult ir = concrete_interference_fixpoint(p_, o);
      r.errors = ir.errors;
      r.truncated = ir.truncated || !ir.converged;
      if (r.truncated) r.truncation_reason = ir.truncated ? "state budget" : "round budget";
      info["rounds"] = ir.rounds;
      info["interferences"] = ir.interferences.size();
    } else {
      OracleOptions o;
      o.unroll = c_.unroll;
      o.budget = {c_.budget_states, c_.budget_depth};
      r = c_.mode == Mode::OracleScheduled ? run_scheduled(p_, o) : run_interleavings(p_, o);
      info["states"] = r.states;
      info["transitions"] = r.transitions;
      info["final_env_count"] = r.final_envs.size();
      json finals = json::array();
      for (const auto& env : r.final_envs) {
        if (finals.size() >= 100) break;
        json e = json::object();
        for (VarId v = 0; v < p_.num_vars(); ++v) e[p_.variables[v].name] = env[v].str();
        finals.push_back(e);
      }
      info["final_envs"] = finals;
      json wit = json::object();
      for (const auto& [l, w] : r.witnesses) wit[std::to_string(l)] = witness_json(w);
      info["witnesses"] = wit;
    }
    json errs = json::array();
    for (Label l : r.errors) errs.push_back(l);
    info["errors"] = errs;
    info["truncated"] = r.truncated;
    info["truncation_reason"] = r.truncation_reason;
    d_["oracle"] = info;
    d_["alarms"] = alarms_json(r.errors);
    if (c_.check_against) {
      SoundnessReport rep = check_soundness_inclusion(r, analyzer_errors(*c_.check_against));
      json missing = json::array();
      for (Label l : rep.missing) missing.push_back(l);
      d_["check"] = {{"against", mode_name(*c_.check_against)}, {"verdict", to_string(rep.verdict)}, {"missing", missing}};
      d_["exit_code"] = rep.verdict == Verdict::Fail ? kExitAlarms
                        : rep.verdict == Verdict::Inconclusive ? kExitInternal
                                                               : kExitClean;
    } else if (r.truncated) {
      d_["exit_code"] = kExitInternal;
    }
  }

  void fuzz() {
    FuzzOptions o;
    o.seed = c_.seed;
    o.trials = c_.fuzz_trials;
    o.unroll = c_.unroll;
    o.budget = {c_.budget_states, c_.budget_depth};
    o.scheduled = c_.check_against == Mode::Scheduled;
    o.analyzer = analyzer_options();
    FuzzReport r = fuzz_weakmem(p_, o);
    json rules = json::object();
    for (const auto& [id, cnt] : r.rules) {
      rules[rule_name(id)] = {{"applied", cnt.applied}, {"skipped", cnt.skipped}, {"violations", cnt.violations}};
    }
    json trials = json::array();
    for (const auto& t : r.trials) {
      json missing = json::array();
      json wit = json::object();
      for (const auto& [l, w] : t.witnesses) {
        missing.push_back(l);
        wit[std::to_string(l)] = witness_json(w);
      }
      trials.push_back({{"seed", std::to_string(t.seed)},
                        {"chain", t.chain},
                        {"verdict", to_string(t.verdict)},
                        {"missing", missing},
                        {"witnesses", wit}});
    }
    d_["fuzz"] = {{"against", o.scheduled ? "scheduled" : "interference"},
                  {"rules", rules},
                  {"trials", trials},
                  {"violations", r.violations},
                  {"inconclusive", r.inconclusive}};
    d_["exit_code"] = r.violations > 0 ? kExitAlarms : kExitClean;
  }

  const Program& p_;
  const RunConfig& c_;
  std::map<Label, ThreadId> label_thread_;
  std::map<StmtId, const Stmt*> stmts_;
  json d_;
};

}  // namespace

AnalysisReport run_analysis(const Program& p, const RunConfig& config) {
  if (config.check_against && !is_oracle_mode(config.mode) && config.mode != Mode::Fuzz) {
    throw Error(ErrorKind::InvalidArgument, "--check-against applies to oracle and fuzz modes only");
  }
  if (config.check_against && !is_analyzer_mode(*config.check_against)) {
    throw Error(ErrorKind::InvalidArgument, "--check-against expects seq, interference or scheduled");
  }
  return ReportBuilder(p, config).build();
}

AnalysisReport AnalysisReport::from_json(std::string_view text) {
  try {
    nlohmann::json d = nlohmann::json::parse(text);
    if (!d.is_object() || !d.contains("schema_version") || !d.contains("program")) {
      throw Error(ErrorKind::InvalidArgument, "not an analysis report");
    }
    return AnalysisReport(std::move(d));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed report: ") + e.what());
  }
}

std::string AnalysisReport::json() const { return data_.dump(2) + "\n"; }

int AnalysisReport::exit_code() const { return data_.value("exit_code", kExitInternal); }

namespace {

std::string paint(const std::string& s, const char* code, bool color) {
  return color ? std::string("\033[") + code + "m" + s + "\033[0m" : s;
}

}  // namespace

std::string AnalysisReport::text(bool color) const {
  std::ostringstream out;
  const auto& d = data_;
  out << "mode: " << d["mode"].get<std::string>() << "\n";
  out << "program: " << d["program"]["digest"].get<std::string>() << "\n";
  if (d["alarms"].empty()) {
    out << "alarms: " << paint("none", "32", color) << "\n";
  } else {
    out << "alarms: " << paint(std::to_string(d["alarms"].size()), "31", color) << "\n";
    for (const auto& a : d["alarms"]) {
      out << "  " << a["line"].get<int>() << ":" << a["column"].get<int>() << " [l" << a["label"].get<Label>()
          << "] division by zero in " << a["context"].get<std::string>() << " (thread " << a["thread"].get<int>()
          << ")\n";
    }
  }
  if (d.contains("ranges")) {
    out << "ranges:\n";
    for (const auto& [name, v] : d["ranges"].items()) out << "  " << name << " ∈ " << v.get<std::string>() << "\n";
  }
  if (d.contains("iterations")) out << "iterations: " << d["iterations"].get<size_t>() << "\n";
  if (!d["races"].empty()) {
    out << "races:\n";
    for (const auto& r : d["races"]) {
      out << "  " << r["kind"].get<std::string>() << " " << r["var"].get<std::string>() << " between threads "
          << r["threads"][0].get<int>() << " and " << r["threads"][1].get<int>() << "\n";
    }
  }
  if (d.contains("partition_stats")) {
    const auto& s = d["partition_stats"];
    out << "partitions: max " << s["max_env_partitions"].get<size_t>() << " env, "
        << s["interference_entries"].get<size_t>() << " interference entries\n";
  }
  if (d.contains("oracle")) {
    const auto& o = d["oracle"];
    if (o.contains("states")) out << "oracle states: " << o["states"].get<size_t>() << "\n";
    if (o["truncated"].get<bool>()) {
      out << paint("oracle truncated: " + o["truncation_reason"].get<std::string>(), "33", color) << "\n";
    }
  }
  if (d.contains("check")) {
    const auto& c = d["check"];
    std::string verdict = c["verdict"].get<std::string>();
    out << "check against " << c["against"].get<std::string>() << ": "
        << paint(verdict, verdict == "PASS" ? "32" : verdict == "FAIL" ? "31" : "33", color) << "\n";
  }
  if (d.contains("fuzz")) {
    const auto& f = d["fuzz"];
    out << "fuzz against " << f["against"].get<std::string>() << ": " << f["trials"].size() << " trials, "
        << f["violations"].get<size_t>() << " violations, " << f["inconclusive"].get<size_t>() << " inconclusive\n";
    for (const auto& [rule, c] : f["rules"].items()) {
      out << "  " << rule << ": applied " << c["applied"].get<size_t>() << ", skipped " << c["skipped"].get<size_t>()
          << ", violations " << c["violations"].get<size_t>() << "\n";
    }
  }
  for (const auto& diag : d["diagnostics"]) out << "note: " << diag.get<std::string>() << "\n";
  if (d.contains("timing")) out << "time: " << d["timing"]["total_ms"].get<double>() << " ms\n";
  return out.str();
}

nlohmann::json ReportDiff::to_json() const {
  return {{"alarms_a_in_b", alarms_a_in_b},
          {"alarms_b_in_a", alarms_b_in_a},
          {"races_a_in_b", races_a_in_b},
          {"races_b_in_a", races_b_in_a},
          {"only_in_a", only_in_a},
          {"only_in_b", only_in_b}};
}

namespace {

std::set<std::string> alarm_keys(const nlohmann::json& d) {
  std::set<std::string> out;
  for (const auto& a : d["alarms"]) out.insert("alarm l" + std::to_string(a["label"].get<Label>()));
  return out;
}

std::set<std::string> race_keys(const nlohmann::json& d) {
  std::set<std::string> out;
  for (const auto& r : d["races"]) {
    out.insert("race " + r["kind"].get<std::string>() + " " + r["var"].get<std::string>() + " " +
               std::to_string(r["threads"][0].get<int>()) + "," + std::to_string(r["threads"][1].get<int>()));
  }
  return out;
}

bool subset_into(const std::set<std::string>& a, const std::set<std::string>& b, std::vector<std::string>& missing) {
  bool ok = true;
  for (const auto& k : a) {
    if (b.count(k) == 0) {
      missing.push_back(k);
      ok = false;
    }
  }
  return ok;
}

}  // namespace

ReportDiff diff_reports(const AnalysisReport& a, const AnalysisReport& b) {
  const auto& da = a.data();
  const auto& db = b.data();
  if (da["program"]["digest"] != db["program"]["digest"]) {
    throw Error(ErrorKind::ProgramMismatch, "reports describe different programs");
  }
  ReportDiff r;
  r.alarms_a_in_b = subset_into(alarm_keys(da), alarm_keys(db), r.only_in_a);
  r.alarms_b_in_a = subset_into(alarm_keys(db), alarm_keys(da), r.only_in_b);
  r.races_a_in_b = subset_into(race_keys(da), race_keys(db), r.only_in_a);
  r.races_b_in_a = subset_into(race_keys(db), race_keys(da), r.only_in_b);
  return r;
}

}  // namespace thesee
