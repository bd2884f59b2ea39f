#pragma once

#include <functional>
#include <set>
#include <vector>

#include "thesee/ast.hpp"
#include "thesee/box.hpp"

namespace thesee {

using ConcreteEnv = std::vector<Rational>;  // indexed by VarId
using ValueSet = std::vector<Rational>;     // sorted, unique

// IntegerPoints enumerates the integers of a finite constant interval together
// with its two endpoints; unbounded constants are rejected.
enum class ValueMode { IntegerPoints };

// Maximum number of points a single constant may enumerate.
inline constexpr size_t kMaxConstantPoints = 4096;

ValueSet const_values(const Expr& c, ValueMode mode);

// Supplies the possible values of one read of a variable.
using VarReader = std::function<void(VarId, const ConcreteEnv&, ValueSet&)>;

struct EvalResult {
  ValueSet values;
  LabelSet errors;
};

EvalResult eval_concrete(const Expr& e, const ConcreteEnv& env, ValueMode mode = ValueMode::IntegerPoints,
                         const VarReader* reader = nullptr);

struct ConcreteState {
  std::set<ConcreteEnv> envs;
  LabelSet errors;
  bool converged = true;

  friend bool operator==(const ConcreteState& a, const ConcreteState& b) {
    return a.envs == b.envs && a.errors == b.errors;
  }
};

struct ExecOptions {
  ValueMode mode = ValueMode::IntegerPoints;
  // Loop fixpoints stop (non-converged) once this many states have been joined.
  size_t max_loop_states = 10000;
};

// Structured semantics of the sequential fragment (no synchronization primitives).
ConcreteState exec_stmt(const Stmt& s, const ConcreteState& st, const ExecOptions& options = {});

// Applies one assignment or guard to every environment.
ConcreteState exec_primitive(const Stmt& s, const ConcreteState& st, ValueMode mode = ValueMode::IntegerPoints);

struct PathSet {
  std::vector<ControlPath> paths;
  bool truncated = false;  // some loop admits more than the allowed unrollings
};

// Maximum number of paths `paths` may produce before failing with a budget error.
inline constexpr size_t kMaxPaths = 200000;

PathSet paths(const StmtPtr& s, unsigned unroll);
ConcreteState run_paths(const std::vector<ControlPath>& paths, const ConcreteState& st,
                        ValueMode mode = ValueMode::IntegerPoints);

// Initial environments (the product of every variable's initial values).
std::set<ConcreteEnv> initial_envs(const Program& p, ValueMode mode = ValueMode::IntegerPoints);

// Sorted JSON object {"var": value, ...} (values as exact rational strings).
std::string env_json(const Program& p, const ConcreteEnv& env);

}  // namespace thesee
