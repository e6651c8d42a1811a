#include "cg/runtime/config.hpp"

#include <algorithm>

#include "cg/types/typecheck.hpp"

namespace cg {

Station make_station(ExprPtr node) {
  if (!node || node->kind != ExprKind::Node) throw RuntimeError("a station must hold a node");
  return Station{std::move(node), {}};
}

Configuration init(ExprPtr program, Backend backend) {
  Configuration c;
  c.backend = std::move(backend);
  c.frontend = std::move(program);
  type_of_config(TypingEnv{}, c);
  return c;
}

std::optional<std::vector<Key>> target(const Operation& op) {
  if (op.kind == OpKind::Add) return std::nullopt;
  if (!is_key_list_value(*op.target())) return std::nullopt;
  return key_list_keys(*op.target());
}

namespace {

void require_fresh(const Configuration& c, const StreamUnit& unit) {
  auto existing = all_labels(c);
  for (const auto& lo : unit)
    if (std::find(existing.begin(), existing.end(), lo.label) != existing.end())
      throw RuntimeError("label " + lo.label.spelling() + " already in use");
}

}  // namespace

void append_top(Configuration& c, StreamUnit unit) {
  require_fresh(c, unit);
  c.top.push_back(std::move(unit));
}

void append_station_tail(Backend& b, StreamUnit unit) {
  if (b.empty()) throw RuntimeError("cannot append to an empty backend");
  b.front().streamlet.push_back(std::move(unit));
}

void merge_results(Configuration& c, const std::vector<ResultEntry>& results) {
  for (const auto& r : results)
    if (!c.store.emplace(r.label, r).second)
      throw RuntimeError("result " + r.label.spelling() + " already stored");
}

ResultEntry finalize(Label label, const Operation& op) {
  switch (op.kind) {
    case OpKind::Add:
      throw RuntimeError("add results are written by the Add rule, not finalized");
    case OpKind::Map:
      return ResultEntry{label, key_list_keys(*op.target()), int_lit(0)};
    case OpKind::Fold:
      if (!is_value(*op.base())) throw RuntimeError("finalizing a fold whose base is not a value");
      return ResultEntry{label, key_list_keys(*op.target()), op.base()};
  }
  throw RuntimeError("unknown operation");
}

bool station_load_free(const Station& s) {
  if (!is_node_value(*s.node)) return false;
  for (const auto& unit : s.streamlet)
    if (unit.size() == 1 && unit[0].op.kind == OpKind::Fold && !is_value(*unit[0].op.base()))
      return false;
  return true;
}

bool is_dry(const Backend& b) {
  return std::all_of(b.begin(), b.end(), [](const Station& s) {
    return s.streamlet.empty() && is_node_value(*s.node);
  });
}

bool is_load_free(const Backend& b) { return std::all_of(b.begin(), b.end(), station_load_free); }

bool is_terminal(const Configuration& c) {
  return is_dry(c.backend) && c.top.empty() && is_value(*c.frontend);
}

std::vector<Label> labels_of(const OperationStream& s) {
  std::vector<Label> out;
  for (const auto& unit : s)
    for (const auto& lo : unit) out.push_back(lo.label);
  return out;
}

std::vector<Label> all_labels(const Configuration& c) {
  std::vector<Label> out = labels_of(c.top);
  for (const auto& s : c.backend) {
    auto ls = labels_of(s.streamlet);
    out.insert(out.end(), ls.begin(), ls.end());
  }
  for (const auto& [l, entry] : c.store) out.push_back(l);
  return out;
}

}  // namespace cg
