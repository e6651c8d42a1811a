#pragma once

#include <string>
#include <vector>

#include "cg/engine/redex.hpp"
#include "cg/engine/run.hpp"
#include "cg/runtime/config.hpp"
#include "cg/syntax/ast.hpp"
#include "cg/syntax/parser.hpp"

namespace cg::test {

inline Key K(const std::string& name) { return Key::literal(name); }

inline ExprPtr KL(const std::vector<std::string>& names) {
  std::vector<Key> keys;
  for (const auto& n : names) keys.push_back(K(n));
  return key_list_of(keys);
}

inline ExprPtr N(const std::string& key, std::int64_t payload,
                 const std::vector<std::string>& adjacency = {}) {
  return node(key_lit(K(key)), int_lit(payload), KL(adjacency));
}

inline ExprPtr E(const std::string& source) { return parse_expression(source); }

inline Operation map_op(ExprPtr f, ExprPtr target) { return Operation{OpKind::Map, {f, target}}; }

inline Operation fold_op(ExprPtr f, ExprPtr base, ExprPtr target) {
  return Operation{OpKind::Fold, {f, base, target}};
}

inline Operation add_op(ExprPtr n) { return Operation{OpKind::Add, {n}}; }

// \x:node. \y:node. <pi1 y; pi2 x + pi2 y; pi3 y>
inline ExprPtr sum_fold() {
  return E("commutative \\x:node. \\y:node. <pi1 y; pi2 x + pi2 y; pi3 y>");
}

inline StreamUnit unit_of(std::uint64_t label, Operation op) {
  return StreamUnit{LabeledOp{Label{label}, std::move(op)}};
}

// Two stations k1 (payload 1) and k2 (payload 2); a summing fold over both
// sits at the first station with base <#k0; 0; []>. The frontend waits for it.
inline Configuration incremental_folding() {
  Configuration c;
  c.backend.push_back(make_station(N("k1", 1)));
  c.backend.push_back(make_station(N("k2", 2)));
  c.backend[0].streamlet.push_back(unit_of(1, fold_op(sum_fold(), N("k0", 0), KL({"k1", "k2"}))));
  c.frontend = claim(label_lit(Label{1}));
  c.next_label = 2;
  return c;
}

inline RunResult run_with(const Configuration& c, Scheduler& s, bool trace = false) {
  RunOptions o;
  o.record_trace = trace;
  return run(c, s, o);
}

inline std::int64_t payload_of(const ExprPtr& node_value) { return node_value->kids[1]->number; }

inline std::size_t count_rule(const std::vector<Redex>& rs, Rule rule) {
  std::size_t n = 0;
  for (const auto& r : rs) n += r.rule == rule;
  return n;
}


// Drives `c` to the end under `s`, calling `check(before, redex, after)` on
// every step. Returns the number of steps taken.
template <typename Check>
std::size_t walk(Configuration c, Scheduler& s, Check check, std::size_t fuel = 200'000) {
  const EngineOptions options = s.engine_options();
  std::size_t steps = 0;
  for (; steps < fuel; ++steps) {
    auto redexes = enumerate_redexes(c, options);
    if (redexes.empty()) break;
    const Redex r = redexes[s.choose(c, redexes)];
    Configuration before = c;
    apply_in_place(c, r);
    check(before, r, c);
  }
  return steps;
}

}  // namespace cg::test
