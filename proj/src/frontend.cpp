#include "thesee/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "thesee/error.hpp"

namespace thesee {

namespace {

enum class Tok {
  Ident,
  Number,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Comma,
  Semi,
  Arrow,
  Plus,
  Minus,
  Star,
  Slash,
  Eq,
  Ne,
  Lt,
  Gt,
  Le,
  Ge,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident:
      return "identifier";
    case Tok::Number:
      return "number";
    case Tok::LBracket:
      return "'['";
    case Tok::RBracket:
      return "']'";
    case Tok::LBrace:
      return "'{'";
    case Tok::RBrace:
      return "'}'";
    case Tok::LParen:
      return "'('";
    case Tok::RParen:
      return "')'";
    case Tok::Comma:
      return "','";
    case Tok::Semi:
      return "';'";
    case Tok::Arrow:
      return "'<-'";
    case Tok::Plus:
      return "'+'";
    case Tok::Minus:
      return "'-'";
    case Tok::Star:
      return "'*'";
    case Tok::Slash:
      return "'/'";
    case Tok::Eq:
      return "'='";
    case Tok::Ne:
      return "'!='";
    case Tok::Lt:
      return "'<'";
    case Tok::Gt:
      return "'>'";
    case Tok::Le:
      return "'<='";
    case Tok::Ge:
      return "'>='";
    case Tok::End:
      return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourcePos pos{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < src.size() && src[i + 1] == b; };
    Tok kind;
    size_t len = 1;
    if (two('<', '-')) {
      kind = Tok::Arrow;
      len = 2;
    } else if (two('<', '=')) {
      kind = Tok::Le;
      len = 2;
    } else if (two('>', '=')) {
      kind = Tok::Ge;
      len = 2;
    } else if (two('!', '=')) {
      kind = Tok::Ne;
      len = 2;
    } else {
      switch (c) {
        case '[':
          kind = Tok::LBracket;
          break;
        case ']':
          kind = Tok::RBracket;
          break;
        case '{':
          kind = Tok::LBrace;
          break;
        case '}':
          kind = Tok::RBrace;
          break;
        case '(':
          kind = Tok::LParen;
          break;
        case ')':
          kind = Tok::RParen;
          break;
        case ',':
          kind = Tok::Comma;
          break;
        case ';':
          kind = Tok::Semi;
          break;
        case '+':
          kind = Tok::Plus;
          break;
        case '-':
          kind = Tok::Minus;
          break;
        case '*':
          kind = Tok::Star;
          break;
        case '/':
          kind = Tok::Slash;
          break;
        case '=':
          kind = Tok::Eq;
          break;
        case '<':
          kind = Tok::Lt;
          break;
        case '>':
          kind = Tok::Gt;
          break;
        default:
          throw ParseError(line, col, std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back({kind, std::string(src.substr(i, len)), pos});
    advance(len);
  }
  out.push_back({Tok::End, "", SourcePos{line, col}});
  return out;
}

bool is_keyword(const std::string& s) {
  static const char* const kw[] = {"var",    "mutex", "thread", "if",       "then", "while",
                                   "do",     "lock",  "unlock", "yield",    "islocked", "inf"};
  return std::any_of(std::begin(kw), std::end(kw), [&](const char* k) { return s == k; });
}

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& opts) : toks_(lex(text)), opts_(opts) {
    prog_.label_pos.emplace_back();
    prog_.label_expr.emplace_back();
  }

  Program run() {
    while (peek_ident("var") || peek_ident("mutex")) parse_decl();
    if (!peek_ident("thread")) fail(peek(), "expected 'thread'");
    while (peek_ident("thread")) parse_thread();
    if (peek().kind != Tok::End) fail(peek(), "expected 'thread' or end of input");
    validate_thread_ids();
    return std::move(prog_);
  }

 private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool peek_ident(const char* word) const { return peek().kind == Tok::Ident && peek().text == word; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.pos.line, t.pos.column,
                     msg + (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'"));
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + tok_name(kind));
    return next();
  }

  void expect_word(const char* word) {
    if (!peek_ident(word)) fail(peek(), std::string("expected '") + word + "'");
    next();
  }

  const Token& expect_name() {
    const Token& t = expect(Tok::Ident);
    if (is_keyword(t.text)) fail(t, "keyword used as a name");
    return t;
  }

  void parse_decl() {
    bool is_var = peek_ident("var");
    next();
    const Token& name = expect_name();
    if (is_var) {
      if (prog_.find_var(name.text)) fail(name, "variable declared twice");
      VarDecl d;
      d.name = name.text;
      d.declared = true;
      if (peek().kind == Tok::Eq) {
        next();
        auto [lo, hi] = parse_interval_literal();
        d.lo = lo;
        d.hi = hi;
        d.initialized = true;
      }
      prog_.variables.push_back(d);
    } else {
      if (prog_.find_mutex(name.text)) fail(name, "mutex declared twice");
      prog_.mutexes.push_back({name.text, true});
    }
    expect(Tok::Semi);
  }

  void parse_thread() {
    const Token& kw = next();
    const Token& id = expect(Tok::Number);
    int value = 0;
    try {
      Rational r = Rational::parse(id.text);
      if (!r.is_integer() || r.num() <= 0 || r.num() > 1000000) fail(id, "thread id must be a positive integer");
      value = static_cast<int>(r.num());
    } catch (const OverflowError&) {
      fail(id, "thread id out of range");
    }
    if (prog_.thread_by_id(value) != nullptr) {
      throw Error(ErrorKind::DuplicateThreadId, std::to_string(id.pos.line) + ":" + std::to_string(id.pos.column) +
                                                    ": duplicate thread id " + std::to_string(value));
    }
    SourcePos pos = kw.pos;
    StmtPtr body = parse_block();
    prog_.threads.push_back({value, body, pos});
  }

  void validate_thread_ids() {
    std::vector<int> ids;
    for (const auto& t : prog_.threads) ids.push_back(t.id);
    std::sort(ids.begin(), ids.end());
    for (size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] != static_cast<int>(i + 1)) {
        const Thread* t = prog_.thread_by_id(ids[i]);
        throw ParseError(t->pos.line, t->pos.column, "thread ids must be exactly 1.." + std::to_string(ids.size()));
      }
    }
  }

  StmtPtr parse_block() {
    const Token& open = expect(Tok::LBrace);
    StmtId id = prog_.stmt_count++;
    std::vector<StmtPtr> children;
    while (peek().kind != Tok::RBrace) {
      if (peek().kind == Tok::End) fail(peek(), "unterminated block");
      children.push_back(parse_stmt());
    }
    next();
    return Stmt::make_seq(std::move(children), id, open.pos);
  }

  StmtPtr parse_stmt() {
    const Token& t = peek();
    if (t.kind == Tok::LBrace) return parse_block();
    if (t.kind != Tok::Ident) fail(t, "expected a statement");
    SourcePos pos = t.pos;
    if (t.text == "if" || t.text == "while") {
      bool is_if = t.text == "if";
      next();
      StmtId id = prog_.stmt_count++;
      ExprPtr e = parse_expr();
      Cmp cmp = parse_cmp();
      const Token& zero = expect(Tok::Number);
      if (Rational::parse(zero.text) != Rational(0)) fail(zero, "conditions compare against 0");
      expect_word(is_if ? "then" : "do");
      StmtPtr body = parse_block();
      return is_if ? Stmt::make_if(e, cmp, body, id, pos) : Stmt::make_while(e, cmp, body, id, pos);
    }
    if (t.text == "lock" || t.text == "unlock") {
      bool is_lock = t.text == "lock";
      next();
      StmtId id = prog_.stmt_count++;
      expect(Tok::LParen);
      const Token& m = expect_name();
      MutexId mid = mutex_ref(m);
      expect(Tok::RParen);
      expect(Tok::Semi);
      return is_lock ? Stmt::make_lock(mid, m.text, id, pos) : Stmt::make_unlock(mid, m.text, id, pos);
    }
    if (t.text == "yield") {
      next();
      StmtId id = prog_.stmt_count++;
      expect(Tok::Semi);
      return Stmt::make_yield(id, pos);
    }
    const Token& target = expect_name();
    VarId vid = var_ref(target);
    expect(Tok::Arrow);
    StmtId id = prog_.stmt_count++;
    if (peek_ident("islocked")) {
      next();
      expect(Tok::LParen);
      const Token& m = expect_name();
      MutexId mid = mutex_ref(m);
      expect(Tok::RParen);
      expect(Tok::Semi);
      return Stmt::make_islocked(vid, target.text, mid, m.text, id, pos);
    }
    ExprPtr e = parse_expr();
    expect(Tok::Semi);
    return Stmt::make_assign(vid, target.text, e, id, pos);
  }

  Cmp parse_cmp() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Eq:
        next();
        return Cmp::Eq;
      case Tok::Ne:
        next();
        return Cmp::Ne;
      case Tok::Lt:
        next();
        return Cmp::Lt;
      case Tok::Gt:
        next();
        return Cmp::Gt;
      case Tok::Le:
        next();
        return Cmp::Le;
      case Tok::Ge:
        next();
        return Cmp::Ge;
      case Tok::Arrow:
        // `x<-1` in a condition reads as `x < -1`.
        toks_[pos_].kind = Tok::Minus;
        toks_[pos_].text = "-";
        toks_[pos_].pos.column += 1;
        return Cmp::Lt;
      default:
        fail(t, "expected a comparison operator");
    }
  }

  Label new_label(const SourcePos& pos) {
    prog_.label_pos.push_back(pos);
    prog_.label_expr.emplace_back();
    return static_cast<Label>(prog_.label_pos.size() - 1);
  }

  ExprPtr record(ExprPtr e) {
    prog_.label_expr[e->label] = e;
    return e;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Token& op = next();
      Label l = new_label(op.pos);
      ExprPtr rhs = parse_term();
      lhs = record(Expr::make_bin(op.kind == Tok::Plus ? BinOp::Add : BinOp::Sub, l, lhs, rhs, op.pos));
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Token& op = next();
      Label l = new_label(op.pos);
      ExprPtr rhs = parse_unary();
      lhs = record(Expr::make_bin(op.kind == Tok::Star ? BinOp::Mul : BinOp::Div, l, lhs, rhs, op.pos));
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (peek().kind == Tok::Minus) {
      const Token& op = next();
      Label l = new_label(op.pos);
      ExprPtr sub = parse_unary();
      return record(Expr::make_neg(l, sub, op.pos));
    }
    return parse_atom();
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::LParen: {
        next();
        ExprPtr e = parse_expr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::LBracket:
      case Tok::Number: {
        auto [lo, hi] = parse_interval_literal();
        return Expr::make_const(lo, hi);
      }
      case Tok::Ident: {
        const Token& name = expect_name();
        VarId v = var_ref(name);
        return Expr::make_var(v, name.text);
      }
      default:
        fail(t, "expected an expression");
    }
  }

  std::pair<Bound, Bound> parse_interval_literal() {
    if (peek().kind == Tok::Number) {
      const Token& n = next();
      Rational r = number(n);
      return {Bound(r), Bound(r)};
    }
    const Token& open = expect(Tok::LBracket);
    Bound lo = parse_bound();
    expect(Tok::Comma);
    Bound hi = parse_bound();
    expect(Tok::RBracket);
    if (lo > hi || lo.is_pos_inf() || hi.is_neg_inf()) fail(open, "empty interval");
    return {lo, hi};
  }

  Bound parse_bound() {
    bool neg = false;
    if (peek().kind == Tok::Minus) {
      next();
      neg = true;
    } else if (peek().kind == Tok::Plus) {
      next();
    }
    if (peek_ident("inf")) {
      next();
      return neg ? Bound::neg_inf() : Bound::pos_inf();
    }
    const Token& n = expect(Tok::Number);
    Rational r = number(n);
    if (peek().kind == Tok::Slash) {
      next();
      const Token& d = expect(Tok::Number);
      Rational den = number(d);
      if (den.is_zero()) fail(d, "zero denominator");
      r = r / den;
    }
    return Bound(neg ? -r : r);
  }

  Rational number(const Token& t) {
    try {
      return Rational::parse(t.text);
    } catch (const Error&) {
      fail(t, "number out of range");
    }
  }

  VarId var_ref(const Token& t) {
    if (auto id = prog_.find_var(t.text)) return *id;
    if (prog_.find_mutex(t.text)) fail(t, "mutex used as a variable");
    if (opts_.strict) {
      throw Error(ErrorKind::UndeclaredVariable, std::to_string(t.pos.line) + ":" + std::to_string(t.pos.column) +
                                                     ": undeclared variable '" + t.text + "'");
    }
    VarDecl d;
    d.name = t.text;
    prog_.variables.push_back(d);
    return static_cast<VarId>(prog_.variables.size() - 1);
  }

  MutexId mutex_ref(const Token& t) {
    if (auto id = prog_.find_mutex(t.text)) return *id;
    if (prog_.find_var(t.text)) fail(t, "variable used as a mutex");
    if (opts_.strict) {
      throw Error(ErrorKind::UndeclaredVariable, std::to_string(t.pos.line) + ":" + std::to_string(t.pos.column) +
                                                     ": undeclared mutex '" + t.text + "'");
    }
    if (prog_.mutexes.size() >= kMaxMutexes) fail(t, "too many mutexes");
    prog_.mutexes.push_back({t.text, false});
    return static_cast<MutexId>(prog_.mutexes.size() - 1);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  ParseOptions opts_;
  Program prog_;
};

void collect_locks(const Stmt& s, std::set<MutexId>& out) {
  switch (s.kind) {
    case Stmt::Kind::Lock:
      out.insert(s.mutex);
      return;
    case Stmt::Kind::If:
    case Stmt::Kind::While:
      collect_locks(*s.body, out);
      return;
    case Stmt::Kind::Seq:
      for (const auto& c : s.children) collect_locks(*c, out);
      return;
    default:
      return;
  }
}

}  // namespace

Program parse_program(std::string_view text, const ParseOptions& options) { return Parser(text, options).run(); }

std::map<ThreadId, std::set<MutexId>> collect_lock_sets(const Program& p) {
  std::map<ThreadId, std::set<MutexId>> out;
  for (const auto& t : p.threads) collect_locks(*t.body, out[t.id]);
  return out;
}

void stmt_vars(const Stmt& s, std::set<VarId>& out) {
  std::vector<VarId> vs;
  switch (s.kind) {
    case Stmt::Kind::Assign:
    case Stmt::Kind::IsLocked:
      out.insert(s.var);
      break;
    case Stmt::Kind::Seq:
      for (const auto& c : s.children) stmt_vars(*c, out);
      return;
    default:
      break;
  }
  if (s.expr) expr_vars(*s.expr, vs);
  out.insert(vs.begin(), vs.end());
  if (s.body) stmt_vars(*s.body, out);
}

VarClasses classify_vars(const Program& p, const std::map<ThreadId, std::vector<ControlPath>>* paths) {
  std::map<ThreadId, std::set<VarId>> used;
  for (const auto& t : p.threads) {
    auto& u = used[t.id];
    const std::vector<ControlPath>* tp = nullptr;
    if (paths != nullptr) {
      auto it = paths->find(t.id);
      if (it != paths->end()) tp = &it->second;
    }
    if (tp != nullptr) {
      for (const auto& path : *tp) {
        for (const auto& s : path) stmt_vars(*s, u);
      }
    } else {
      stmt_vars(*t.body, u);
    }
  }
  VarClasses out;
  for (VarId v = 0; v < p.num_vars(); ++v) {
    std::vector<ThreadId> users;
    for (const auto& [tid, u] : used) {
      if (u.count(v) != 0) users.push_back(tid);
    }
    if (users.empty()) {
      out.fresh.insert(v);
    } else if (users.size() == 1) {
      out.local[users[0]].insert(v);
    }
  }
  for (const auto& t : p.threads) out.local[t.id];
  return out;
}

}  // namespace thesee
