#include "thesee/ast.hpp"

#include <algorithm>
#include <numeric>

namespace thesee {

Cmp negate(Cmp c) {
  switch (c) {
    case Cmp::Eq:
      return Cmp::Ne;
    case Cmp::Ne:
      return Cmp::Eq;
    case Cmp::Lt:
      return Cmp::Ge;
    case Cmp::Gt:
      return Cmp::Le;
    case Cmp::Le:
      return Cmp::Gt;
    case Cmp::Ge:
      return Cmp::Lt;
  }
  return c;
}

const char* to_string(BinOp op) {
  switch (op) {
    case BinOp::Add:
      return "+";
    case BinOp::Sub:
      return "-";
    case BinOp::Mul:
      return "*";
    case BinOp::Div:
      return "/";
  }
  return "?";
}

const char* to_string(Cmp c) {
  switch (c) {
    case Cmp::Eq:
      return "=";
    case Cmp::Ne:
      return "!=";
    case Cmp::Lt:
      return "<";
    case Cmp::Gt:
      return ">";
    case Cmp::Le:
      return "<=";
    case Cmp::Ge:
      return ">=";
  }
  return "?";
}

bool holds(Cmp c, const Rational& v) {
  int s = v.sign();
  switch (c) {
    case Cmp::Eq:
      return s == 0;
    case Cmp::Ne:
      return s != 0;
    case Cmp::Lt:
      return s < 0;
    case Cmp::Gt:
      return s > 0;
    case Cmp::Le:
      return s <= 0;
    case Cmp::Ge:
      return s >= 0;
  }
  return false;
}

ExprPtr Expr::make_var(VarId id, std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->var = id;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::make_const(Bound lo, Bound hi, bool integral) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Const;
  e->lo = lo;
  e->hi = hi;
  e->integral = integral;
  return e;
}

ExprPtr Expr::make_neg(Label label, ExprPtr sub, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Neg;
  e->label = label;
  e->lhs = std::move(sub);
  e->pos = pos;
  return e;
}

ExprPtr Expr::make_bin(BinOp op, Label label, ExprPtr lhs, ExprPtr rhs, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Bin;
  e->op = op;
  e->label = label;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  e->pos = pos;
  return e;
}

bool expr_equal(const Expr& a, const Expr& b, bool labels) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Var:
      return a.var == b.var;
    case Expr::Kind::Const:
      return a.lo == b.lo && a.hi == b.hi && a.integral == b.integral;
    case Expr::Kind::Neg:
      if (labels && a.label != b.label) return false;
      return expr_equal(*a.lhs, *b.lhs, labels);
    case Expr::Kind::Bin:
      if (a.op != b.op) return false;
      if (labels && a.label != b.label) return false;
      return expr_equal(*a.lhs, *b.lhs, labels) && expr_equal(*a.rhs, *b.rhs, labels);
  }
  return false;
}

namespace {

int precedence(BinOp op) { return (op == BinOp::Add || op == BinOp::Sub) ? 1 : 2; }

std::string const_to_string(const Expr& e) {
  if (e.integral) return "int[" + e.lo.str() + "," + e.hi.str() + "]";
  if (e.lo == e.hi && e.lo.is_finite() && e.lo.value().is_integer() && e.lo.value().sign() >= 0) {
    return e.lo.str();
  }
  return "[" + e.lo.str() + "," + e.hi.str() + "]";
}

void print_expr(const Expr& e, int ctx, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::Var:
      out += e.name;
      return;
    case Expr::Kind::Const:
      out += const_to_string(e);
      return;
    case Expr::Kind::Neg:
      out += '-';
      print_expr(*e.lhs, 3, out);
      return;
    case Expr::Kind::Bin: {
      int p = precedence(e.op);
      bool paren = p < ctx;
      if (paren) out += '(';
      print_expr(*e.lhs, p, out);
      out += ' ';
      out += to_string(e.op);
      out += ' ';
      print_expr(*e.rhs, p + 1, out);
      if (paren) out += ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_expr(e, 0, out);
  return out;
}

void expr_vars(const Expr& e, std::vector<VarId>& out) {
  switch (e.kind) {
    case Expr::Kind::Var:
      out.push_back(e.var);
      return;
    case Expr::Kind::Const:
      return;
    case Expr::Kind::Neg:
      expr_vars(*e.lhs, out);
      return;
    case Expr::Kind::Bin:
      expr_vars(*e.lhs, out);
      expr_vars(*e.rhs, out);
      return;
  }
}

bool expr_mentions(const Expr& e, VarId v) {
  switch (e.kind) {
    case Expr::Kind::Var:
      return e.var == v;
    case Expr::Kind::Const:
      return false;
    case Expr::Kind::Neg:
      return expr_mentions(*e.lhs, v);
    case Expr::Kind::Bin:
      return expr_mentions(*e.lhs, v) || expr_mentions(*e.rhs, v);
  }
  return false;
}

size_t operator_count(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Var:
    case Expr::Kind::Const:
      return 0;
    case Expr::Kind::Neg:
      return 1 + operator_count(*e.lhs);
    case Expr::Kind::Bin:
      return 1 + operator_count(*e.lhs) + operator_count(*e.rhs);
  }
  return 0;
}

namespace {

std::shared_ptr<Stmt> new_stmt(Stmt::Kind kind, StmtId id, SourcePos pos) {
  auto s = std::make_shared<Stmt>();
  s->kind = kind;
  s->id = id;
  s->pos = pos;
  return s;
}

}  // namespace

StmtPtr Stmt::make_assign(VarId var, std::string name, ExprPtr e, StmtId id, SourcePos pos) {
  auto s = new_stmt(Kind::Assign, id, pos);
  s->var = var;
  s->var_name = std::move(name);
  s->expr = std::move(e);
  return s;
}

StmtPtr Stmt::make_guard(ExprPtr e, Cmp cmp, StmtId id, SourcePos pos) {
  auto s = new_stmt(Kind::Guard, id, pos);
  s->expr = std::move(e);
  s->cmp = cmp;
  return s;
}

StmtPtr Stmt::make_if(ExprPtr e, Cmp cmp, StmtPtr body, StmtId id, SourcePos pos) {
  auto s = new_stmt(Kind::If, id, pos);
  s->expr = std::move(e);
  s->cmp = cmp;
  s->body = std::move(body);
  return s;
}

StmtPtr Stmt::make_while(ExprPtr e, Cmp cmp, StmtPtr body, StmtId id, SourcePos pos) {
  auto s = new_stmt(Kind::While, id, pos);
  s->expr = std::move(e);
  s->cmp = cmp;
  s->body = std::move(body);
  return s;
}

StmtPtr Stmt::make_seq(std::vector<StmtPtr> children, StmtId id, SourcePos pos) {
  auto s = new_stmt(Kind::Seq, id, pos);
  s->children = std::move(children);
  return s;
}

StmtPtr Stmt::make_lock(MutexId m, std::string name, StmtId id, SourcePos pos) {
  auto s = new_stmt(Kind::Lock, id, pos);
  s->mutex = m;
  s->mutex_name = std::move(name);
  return s;
}

StmtPtr Stmt::make_unlock(MutexId m, std::string name, StmtId id, SourcePos pos) {
  auto s = new_stmt(Kind::Unlock, id, pos);
  s->mutex = m;
  s->mutex_name = std::move(name);
  return s;
}

StmtPtr Stmt::make_yield(StmtId id, SourcePos pos) { return new_stmt(Kind::Yield, id, pos); }

StmtPtr Stmt::make_islocked(VarId var, std::string name, MutexId m, std::string mutex_name, StmtId id,
                            SourcePos pos) {
  auto s = new_stmt(Kind::IsLocked, id, pos);
  s->var = var;
  s->var_name = std::move(name);
  s->mutex = m;
  s->mutex_name = std::move(mutex_name);
  return s;
}

bool stmt_equal(const Stmt& a, const Stmt& b, bool labels) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Stmt::Kind::Assign:
      return a.var == b.var && expr_equal(*a.expr, *b.expr, labels);
    case Stmt::Kind::Guard:
      return a.cmp == b.cmp && expr_equal(*a.expr, *b.expr, labels);
    case Stmt::Kind::If:
    case Stmt::Kind::While:
      return a.cmp == b.cmp && expr_equal(*a.expr, *b.expr, labels) && stmt_equal(*a.body, *b.body, labels);
    case Stmt::Kind::Seq:
      if (a.children.size() != b.children.size()) return false;
      for (size_t i = 0; i < a.children.size(); ++i) {
        if (!stmt_equal(*a.children[i], *b.children[i], labels)) return false;
      }
      return true;
    case Stmt::Kind::Lock:
    case Stmt::Kind::Unlock:
      return a.mutex == b.mutex;
    case Stmt::Kind::Yield:
      return true;
    case Stmt::Kind::IsLocked:
      return a.var == b.var && a.mutex == b.mutex;
  }
  return false;
}

std::string primitive_to_string(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Assign:
      return s.var_name + " <- " + to_string(*s.expr);
    case Stmt::Kind::Guard:
      return to_string(*s.expr) + " " + to_string(s.cmp) + " 0?";
    case Stmt::Kind::Lock:
      return "lock(" + s.mutex_name + ")";
    case Stmt::Kind::Unlock:
      return "unlock(" + s.mutex_name + ")";
    case Stmt::Kind::Yield:
      return "yield";
    case Stmt::Kind::IsLocked:
      return s.var_name + " <- islocked(" + s.mutex_name + ")";
    case Stmt::Kind::If:
      return "if " + to_string(*s.expr) + " " + to_string(s.cmp) + " 0 then ...";
    case Stmt::Kind::While:
      return "while " + to_string(*s.expr) + " " + to_string(s.cmp) + " 0 do ...";
    case Stmt::Kind::Seq:
      return "{...}";
  }
  return "";
}

bool stmt_has_loop(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::While:
      return true;
    case Stmt::Kind::If:
      return stmt_has_loop(*s.body);
    case Stmt::Kind::Seq:
      return std::any_of(s.children.begin(), s.children.end(), [](const StmtPtr& c) { return stmt_has_loop(*c); });
    default:
      return false;
  }
}

bool stmt_has_sync(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::If:
    case Stmt::Kind::While:
      return stmt_has_sync(*s.body);
    case Stmt::Kind::Seq:
      return std::any_of(s.children.begin(), s.children.end(), [](const StmtPtr& c) { return stmt_has_sync(*c); });
    default:
      return s.is_sync();
  }
}

std::optional<VarId> Program::find_var(const std::string& name) const {
  for (VarId i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<MutexId> Program::find_mutex(const std::string& name) const {
  for (MutexId i = 0; i < mutexes.size(); ++i) {
    if (mutexes[i].name == name) return i;
  }
  return std::nullopt;
}

const Thread* Program::thread_by_id(ThreadId id) const {
  for (const auto& t : threads) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

ThreadId Program::max_thread_id() const {
  ThreadId m = 0;
  for (const auto& t : threads) m = std::max(m, t.id);
  return m;
}

size_t Program::thread_index(ThreadId id) const {
  for (size_t i = 0; i < threads.size(); ++i) {
    if (threads[i].id == id) return i;
  }
  return threads.size();
}

std::vector<VarId> Program::vars_by_name() const {
  std::vector<VarId> ids(variables.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::sort(ids.begin(), ids.end(), [&](VarId a, VarId b) { return variables[a].name < variables[b].name; });
  return ids;
}

namespace {

void print_block(const Stmt& seq, int indent, std::string& out);

void print_stmt(const Stmt& s, int indent, std::string& out) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case Stmt::Kind::If:
    case Stmt::Kind::While:
      out += pad + (s.kind == Stmt::Kind::If ? "if " : "while ") + to_string(*s.expr) + " " + to_string(s.cmp) +
             " 0" + (s.kind == Stmt::Kind::If ? " then " : " do ");
      print_block(*s.body, indent, out);
      out += "\n";
      return;
    case Stmt::Kind::Seq:
      out += pad;
      print_block(s, indent, out);
      out += "\n";
      return;
    default:
      out += pad + primitive_to_string(s) + ";\n";
      return;
  }
}

void print_block(const Stmt& seq, int indent, std::string& out) {
  out += "{\n";
  if (seq.kind == Stmt::Kind::Seq) {
    for (const auto& c : seq.children) print_stmt(*c, indent + 1, out);
  } else {
    print_stmt(seq, indent + 1, out);
  }
  out += std::string(static_cast<size_t>(indent) * 2, ' ') + "}";
}

std::string interval_literal(const Bound& lo, const Bound& hi) {
  if (lo == hi && lo.is_finite() && lo.value().is_integer() && lo.value().sign() >= 0) return lo.str();
  return "[" + lo.str() + "," + hi.str() + "]";
}

}  // namespace

std::string to_string(const Stmt& s, int indent) {
  std::string out;
  print_stmt(s, indent, out);
  return out;
}

std::string to_string(const Program& p) {
  std::string out;
  for (const auto& v : p.variables) {
    if (!v.declared) continue;
    out += "var " + v.name;
    if (v.initialized) out += " = " + interval_literal(v.lo, v.hi);
    out += ";\n";
  }
  for (const auto& m : p.mutexes) {
    if (m.declared) out += "mutex " + m.name + ";\n";
  }
  for (const auto& t : p.threads) {
    out += "thread " + std::to_string(t.id) + " ";
    print_block(*t.body, 0, out);
    out += "\n";
  }
  return out;
}

}  // namespace thesee
