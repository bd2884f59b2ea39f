#pragma once

#include <map>
#include <set>
#include <string_view>

#include "thesee/ast.hpp"

namespace thesee {

struct ParseOptions {
  // Reject variables and mutexes that are not declared before use.
  bool strict = false;
};

Program parse_program(std::string_view text, const ParseOptions& options = {});

// Mutexes syntactically locked by each thread.
std::map<ThreadId, std::set<MutexId>> collect_lock_sets(const Program& p);

struct VarClasses {
  std::set<VarId> fresh;                      // declared but used by no thread
  std::map<ThreadId, std::set<VarId>> local;  // used by exactly one thread
};

// Thread code is read from the bodies, or from `paths` for threads it lists.
VarClasses classify_vars(const Program& p, const std::map<ThreadId, std::vector<ControlPath>>* paths = nullptr);

// Variables occurring (read or written) in a statement or path.
void stmt_vars(const Stmt& s, std::set<VarId>& out);

}  // namespace thesee
