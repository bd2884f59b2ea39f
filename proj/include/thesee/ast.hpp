#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thesee/rational.hpp"

namespace thesee {

using Label = uint32_t;
using VarId = uint32_t;
using MutexId = uint32_t;
using ThreadId = int;
using StmtId = uint32_t;

inline constexpr size_t kMaxMutexes = 64;

struct SourcePos {
  int line = 0;
  int column = 0;
  friend bool operator==(const SourcePos&, const SourcePos&) = default;
  friend auto operator<=>(const SourcePos&, const SourcePos&) = default;
};

enum class BinOp : uint8_t { Add, Sub, Mul, Div };
enum class Cmp : uint8_t { Eq, Ne, Lt, Gt, Le, Ge };

Cmp negate(Cmp c);
const char* to_string(BinOp op);
const char* to_string(Cmp c);
// Whether `v cmp 0` holds.
bool holds(Cmp c, const Rational& v);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind : uint8_t { Var, Const, Neg, Bin };

  Kind kind = Kind::Const;
  // Var
  VarId var = 0;
  std::string name;
  // Const: lo <= hi. An integral constant denotes only the integers of [lo,hi];
  // it is never produced by the parser, only by value-to-expression conversion.
  Bound lo;
  Bound hi;
  bool integral = false;
  // Neg / Bin
  BinOp op = BinOp::Add;
  Label label = 0;
  SourcePos pos;
  ExprPtr lhs;  // operand of Neg
  ExprPtr rhs;

  static ExprPtr make_var(VarId id, std::string name);
  static ExprPtr make_const(Bound lo, Bound hi, bool integral = false);
  static ExprPtr make_neg(Label label, ExprPtr sub, SourcePos pos = {});
  static ExprPtr make_bin(BinOp op, Label label, ExprPtr lhs, ExprPtr rhs, SourcePos pos = {});
};

// Structural equality. With `labels` false, operator labels and positions are ignored.
bool expr_equal(const Expr& a, const Expr& b, bool labels = true);
std::string to_string(const Expr& e);
// Collects the variables read by `e` (with repetition, left to right).
void expr_vars(const Expr& e, std::vector<VarId>& out);
bool expr_mentions(const Expr& e, VarId v);
size_t operator_count(const Expr& e);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  enum class Kind : uint8_t { Assign, Guard, If, While, Seq, Lock, Unlock, Yield, IsLocked };

  Kind kind = Kind::Seq;
  StmtId id = 0;
  SourcePos pos;
  VarId var = 0;  // Assign / IsLocked target
  std::string var_name;
  ExprPtr expr;  // Assign / Guard / If / While
  Cmp cmp = Cmp::Eq;
  MutexId mutex = 0;  // Lock / Unlock / IsLocked
  std::string mutex_name;
  StmtPtr body;                  // If / While
  std::vector<StmtPtr> children;  // Seq

  bool is_primitive() const { return kind != Kind::If && kind != Kind::While && kind != Kind::Seq; }
  bool is_sync() const {
    return kind == Kind::Lock || kind == Kind::Unlock || kind == Kind::Yield || kind == Kind::IsLocked;
  }

  static StmtPtr make_assign(VarId var, std::string name, ExprPtr e, StmtId id = 0, SourcePos pos = {});
  static StmtPtr make_guard(ExprPtr e, Cmp cmp, StmtId id = 0, SourcePos pos = {});
  static StmtPtr make_if(ExprPtr e, Cmp cmp, StmtPtr body, StmtId id = 0, SourcePos pos = {});
  static StmtPtr make_while(ExprPtr e, Cmp cmp, StmtPtr body, StmtId id = 0, SourcePos pos = {});
  static StmtPtr make_seq(std::vector<StmtPtr> children, StmtId id = 0, SourcePos pos = {});
  static StmtPtr make_lock(MutexId m, std::string name, StmtId id = 0, SourcePos pos = {});
  static StmtPtr make_unlock(MutexId m, std::string name, StmtId id = 0, SourcePos pos = {});
  static StmtPtr make_yield(StmtId id = 0, SourcePos pos = {});
  static StmtPtr make_islocked(VarId var, std::string name, MutexId m, std::string mutex_name, StmtId id = 0,
                               SourcePos pos = {});
};

bool stmt_equal(const Stmt& a, const Stmt& b, bool labels = true);
// Single-line rendering of a primitive statement (guards render as "e cmp 0?").
std::string primitive_to_string(const Stmt& s);
bool stmt_has_loop(const Stmt& s);
bool stmt_has_sync(const Stmt& s);

// A finite sequence of primitive statements.
using ControlPath = std::vector<StmtPtr>;

struct Thread {
  ThreadId id = 0;
  StmtPtr body;
  SourcePos pos;
};

struct VarDecl {
  std::string name;
  Bound lo = Bound(0);
  Bound hi = Bound(0);
  bool declared = false;     // appeared in a `var` declaration
  bool initialized = false;  // the declaration carried an initial interval
};

struct MutexDecl {
  std::string name;
  bool declared = false;
};

struct Program {
  std::vector<VarDecl> variables;   // indexed by VarId
  std::vector<MutexDecl> mutexes;   // indexed by MutexId
  std::vector<Thread> threads;      // source order
  std::vector<SourcePos> label_pos;  // indexed by Label; entry 0 unused
  std::vector<ExprPtr> label_expr;   // operator node carrying each label
  StmtId stmt_count = 0;

  size_t num_vars() const { return variables.size(); }
  size_t num_mutexes() const { return mutexes.size(); }
  size_t num_labels() const { return label_pos.empty() ? 0 : label_pos.size() - 1; }
  std::optional<VarId> find_var(const std::string& name) const;
  std::optional<MutexId> find_mutex(const std::string& name) const;
  const Thread* thread_by_id(ThreadId id) const;
  ThreadId max_thread_id() const;
  // Position in `threads` of the thread with the given id.
  size_t thread_index(ThreadId id) const;
  // Variable ids sorted by name, for deterministic output.
  std::vector<VarId> vars_by_name() const;
};

// Renders a program in the concrete syntax accepted by parse_program.
std::string to_string(const Program& p);
std::string to_string(const Stmt& s, int indent = 0);

}  // namespace thesee
