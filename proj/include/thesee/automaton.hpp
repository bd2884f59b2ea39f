#pragma once

#include <cstdint>
#include <vector>

#include "thesee/ast.hpp"

namespace thesee {

// Control-flow graph of one thread whose edges are primitive statements.
// Loop entries are bounded by per-loop iteration counters; the language of
// edge sequences from the entry is exactly the prefix closure of the
// thread's control paths with at most `unroll` iterations per loop visit.
struct ThreadAutomaton {
  enum class LoopOp : uint8_t { None, Enter, Exit };

  struct Edge {
    StmtPtr stmt;
    uint32_t target = 0;
    LoopOp loop_op = LoopOp::None;
    uint32_t loop = 0;
  };

  std::vector<std::vector<Edge>> out;  // outgoing edges per node
  uint32_t entry = 0;
  uint32_t num_loops = 0;
  unsigned unroll = 0;

  static ThreadAutomaton from_body(const StmtPtr& body, unsigned unroll);
  // Prefix tree of an explicit path set.
  static ThreadAutomaton from_paths(const std::vector<ControlPath>& paths);

  size_t num_nodes() const { return out.size(); }

  // Whether `e` may fire given the loop counters, updating them if so.
  bool fire(const Edge& e, uint8_t* counters) const {
    switch (e.loop_op) {
      case LoopOp::None:
        return true;
      case LoopOp::Enter:
        if (counters[e.loop] >= unroll) return false;
        ++counters[e.loop];
        return true;
      case LoopOp::Exit:
        counters[e.loop] = 0;
        return true;
    }
    return true;
  }
};

}  // namespace thesee
