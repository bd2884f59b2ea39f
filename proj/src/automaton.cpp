#include "thesee/automaton.hpp"

#include <numeric>

#include "thesee/error.hpp"

namespace thesee {

namespace {

class Builder {
 public:
  uint32_t new_node() {
    parent_.push_back(static_cast<uint32_t>(parent_.size()));
    return parent_.back();
  }

  uint32_t find(uint32_t n) {
    while (parent_[n] != n) {
      parent_[n] = parent_[parent_[n]];
      n = parent_[n];
    }
    return n;
  }

  void unite(uint32_t a, uint32_t b) { parent_[find(a)] = find(b); }

  void edge(uint32_t from, uint32_t to, StmtPtr s, ThreadAutomaton::LoopOp op = ThreadAutomaton::LoopOp::None,
            uint32_t loop = 0) {
    raw_.push_back({from, {std::move(s), to, op, loop}});
  }

  // Adds the statement after `entry`, returning its exit node.
  uint32_t build(const StmtPtr& sp, uint32_t entry) {
    const Stmt& s = *sp;
    switch (s.kind) {
      case Stmt::Kind::Seq: {
        uint32_t cur = entry;
        for (const auto& c : s.children) cur = build(c, cur);
        return cur;
      }
      case Stmt::Kind::If: {
        uint32_t mid = new_node();
        edge(entry, mid, Stmt::make_guard(s.expr, s.cmp, s.id, s.pos));
        uint32_t end = build(s.body, mid);
        edge(entry, end, Stmt::make_guard(s.expr, negate(s.cmp), s.id, s.pos));
        return end;
      }
      case Stmt::Kind::While: {
        uint32_t loop = loops_++;
        uint32_t mid = new_node();
        edge(entry, mid, Stmt::make_guard(s.expr, s.cmp, s.id, s.pos), ThreadAutomaton::LoopOp::Enter, loop);
        uint32_t end = build(s.body, mid);
        unite(end, entry);
        uint32_t exit = new_node();
        edge(entry, exit, Stmt::make_guard(s.expr, negate(s.cmp), s.id, s.pos), ThreadAutomaton::LoopOp::Exit,
             loop);
        return exit;
      }
      default: {
        uint32_t next = new_node();
        edge(entry, next, sp);
        return next;
      }
    }
  }

  ThreadAutomaton finish(uint32_t entry, unsigned unroll) {
    std::vector<uint32_t> index(parent_.size(), UINT32_MAX);
    uint32_t count = 0;
    auto id_of = [&](uint32_t n) {
      uint32_t r = find(n);
      if (index[r] == UINT32_MAX) index[r] = count++;
      return index[r];
    };
    ThreadAutomaton a;
    a.entry = id_of(entry);
    for (auto& [from, e] : raw_) {
      uint32_t f = id_of(from);
      e.target = id_of(e.target);
      if (a.out.size() < count) a.out.resize(count);
      a.out[f].push_back(e);
    }
    a.out.resize(count);
    a.num_loops = loops_;
    a.unroll = unroll;
    if (loops_ > 0 && unroll > 255) throw Error(ErrorKind::InvalidArgument, "unroll bound above 255");
    return a;
  }

 private:
  std::vector<uint32_t> parent_;
  std::vector<std::pair<uint32_t, ThreadAutomaton::Edge>> raw_;
  uint32_t loops_ = 0;
};

}  // namespace

ThreadAutomaton ThreadAutomaton::from_body(const StmtPtr& body, unsigned unroll) {
  Builder b;
  uint32_t entry = b.new_node();
  b.build(body, entry);
  return b.finish(entry, unroll);
}

ThreadAutomaton ThreadAutomaton::from_paths(const std::vector<ControlPath>& paths) {
  ThreadAutomaton a;
  a.out.emplace_back();
  for (const auto& p : paths) {
    uint32_t node = 0;
    for (const auto& s : p) {
      uint32_t next = UINT32_MAX;
      for (const auto& e : a.out[node]) {
        if (e.stmt == s || stmt_equal(*e.stmt, *s)) {
          next = e.target;
          break;
        }
      }
      if (next == UINT32_MAX) {
        next = static_cast<uint32_t>(a.out.size());
        a.out.emplace_back();
        a.out[node].push_back({s, next, LoopOp::None, 0});
      }
      node = next;
    }
  }
  return a;
}

}  // namespace thesee
