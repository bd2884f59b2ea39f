#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "thesee/ast.hpp"
#include "thesee/concrete.hpp"
#include "thesee/frontend.hpp"

namespace thesee::testing {

inline Program load_corpus(const std::string& name) {
  std::ifstream in(std::string(THESEE_CORPUS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

// First primitive statement of kind `k` (depth-first), or null.
inline const Stmt* find_stmt(const Stmt& s, Stmt::Kind k) {
  if (s.kind == k) return &s;
  if (s.body) {
    if (const Stmt* r = find_stmt(*s.body, k)) return r;
  }
  for (const auto& c : s.children) {
    if (const Stmt* r = find_stmt(*c, k)) return r;
  }
  return nullptr;
}

// The single control path of a loop-free, branch-free thread body.
inline ControlPath straight_path(const Program& p, size_t thread = 0) {
  return paths(p.threads.at(thread).body, 0).paths.at(0);
}

inline std::string path_str(const ControlPath& path) {
  std::string out;
  for (const auto& s : path) out += (out.empty() ? "" : " . ") + primitive_to_string(*s);
  return out;
}

inline LabelSet division_labels(const Program& p) {
  LabelSet out;
  for (Label l = 1; l <= p.num_labels(); ++l) {
    const Expr& e = *p.label_expr[l];
    if (e.kind == Expr::Kind::Bin && e.op == BinOp::Div) out.insert(l);
  }
  return out;
}

}  // namespace thesee::testing
