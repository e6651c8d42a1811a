#include "cg/engine/redex.hpp"

#include <algorithm>
#include <stdexcept>

namespace cg {

namespace {

constexpr const char* kRuleNames[] = {"Emit", "Claim",    "Beta", "Node", "KSA",   "KSS", "Arith",
                                      "Cond", "Len",      "Fix",  "Map",  "Fold",  "Prop",
                                      "Complete", "Last", "Opt",  "Load", "Empty", "First",
                                      "Add"};

std::string path_string(const Path& p) {
  if (p.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(p[i]);
  }
  return s;
}

ClaimLookup store_lookup(const ResultStore& store) {
  return [&store](Label l) -> ExprPtr {
    auto it = store.find(l);
    return it == store.end() ? nullptr : it->second.value;
  };
}

bool contains(const std::vector<Key>& ks, const Key& k) {
  return std::find(ks.begin(), ks.end(), k) != ks.end();
}

// A unit's operations carry value arguments (fold bases included).
bool unit_settled(const StreamUnit& u) {
  return std::all_of(u.begin(), u.end(), [](const LabeledOp& lo) {
    return is_emittable(lo.op) && (lo.op.kind != OpKind::Fold || is_value(*lo.op.base()));
  });
}

bool finalizable(const Operation& op) {
  return op.kind != OpKind::Fold || is_value(*op.base());
}

void task_redexes(const Configuration& c, std::size_t i, std::vector<Redex>& out) {
  const auto& s = c.backend[i];
  if (s.streamlet.empty()) return;
  const auto& head = s.streamlet.front();
  const bool last = i + 1 == c.backend.size();
  const bool key_known = s.key()->kind == ExprKind::Key;
  auto add = [&](Rule r) {
    Redex x;
    x.rule = r;
    x.site = SiteKind::Station;
    x.station = i;
    out.push_back(std::move(x));
  };

  if (head.size() == 1) {
    const auto& op = head[0].op;
    auto ks = target(op);
    if (!ks) return;
    if (ks->empty()) {
      if (finalizable(op)) add(Rule::Complete);
      return;
    }
    if (!key_known) return;
    const Key& k = s.key()->key;
    if (contains(*ks, k)) {
      if (is_node_value(*s.node)) add(op.kind == OpKind::Map ? Rule::Map : Rule::Fold);
    } else if (last) {
      if (finalizable(op)) add(Rule::Last);
    } else {
      add(Rule::Prop);
    }
    return;
  }

  if (last || !key_known) return;
  const Key& k = s.key()->key;
  for (const auto& lo : head) {
    auto ks = target(lo.op);
    if (!ks || contains(*ks, k)) return;
  }
  add(Rule::Prop);
}

}  // namespace

const char* to_string(Rule rule) { return kRuleNames[static_cast<std::size_t>(rule)]; }

std::optional<Rule> rule_from_string(const std::string& name) {
  for (std::size_t i = 0; i < sizeof kRuleNames / sizeof kRuleNames[0]; ++i)
    if (name == kRuleNames[i]) return static_cast<Rule>(i);
  return std::nullopt;
}

Rule rule_of(ExprRule r) {
  switch (r) {
    case ExprRule::Emit:
      return Rule::Emit;
    case ExprRule::Claim:
      return Rule::Claim;
    case ExprRule::Beta:
      return Rule::Beta;
    case ExprRule::Node:
      return Rule::Node;
    case ExprRule::KSA:
      return Rule::KSA;
    case ExprRule::KSS:
      return Rule::KSS;
    case ExprRule::Arith:
      return Rule::Arith;
    case ExprRule::Cond:
      return Rule::Cond;
    case ExprRule::Len:
      return Rule::Len;
    case ExprRule::Fix:
      return Rule::Fix;
  }
  return Rule::Beta;
}

std::string Redex::site_string() const {
  switch (site) {
    case SiteKind::Frontend:
      return "frontend/" + path_string(path);
    case SiteKind::ToGraph:
      return "tograph";
    case SiteKind::Station:
      return "station/" + std::to_string(station);
    case SiteKind::Load:
      return "load/" + std::to_string(station) +
             (slot == LoadSlot::Node ? std::string("/node/")
                                     : "/unit" + std::to_string(unit) + "/") +
             path_string(path) + "/" + cg::to_string(inner);
    case SiteKind::Opt:
      return "opt/" + std::to_string(station) + "/" + rewrite.describe();
  }
  return "?";
}

std::vector<Redex> enumerate_redexes(const Configuration& c, const EngineOptions& options,
                                     EnumerationStats* stats) {
  std::vector<Redex> out;
  auto lookup = store_lookup(c.store);

  if (auto r = find_redex(c.frontend, lookup)) {
    Redex x;
    x.rule = rule_of(r->rule);
    x.site = SiteKind::Frontend;
    x.path = std::move(r->path);
    out.push_back(std::move(x));
  }

  if (!c.top.empty()) {
    const auto& op = c.top.front().front().op;
    Redex x;
    x.site = SiteKind::ToGraph;
    x.rule = op.kind == OpKind::Add ? Rule::Add : c.backend.empty() ? Rule::Empty : Rule::First;
    out.push_back(std::move(x));
  }

  auto load = [&](std::size_t station, LoadSlot slot, std::size_t unit, const ExprPtr& e) {
    auto r = find_redex(e, lookup);
    if (!r) return;
    if (r->rule == ExprRule::Emit) {
      // A load may only take emit-free steps; typing rules this out.
      if (stats) ++stats->emits_inside_loads;
      return;
    }
    Redex x;
    x.rule = Rule::Load;
    x.site = SiteKind::Load;
    x.station = station;
    x.slot = slot;
    x.unit = unit;
    x.path = std::move(r->path);
    x.inner = r->rule;
    out.push_back(std::move(x));
  };

  for (std::size_t i = 0; i < c.backend.size(); ++i) {
    const auto& s = c.backend[i];
    if (!is_node_value(*s.node)) load(i, LoadSlot::Node, 0, s.node);
    for (std::size_t u = 0; u < s.streamlet.size(); ++u) {
      const auto& unit = s.streamlet[u];
      if (unit.size() == 1 && unit[0].op.kind == OpKind::Fold && !is_value(*unit[0].op.base()))
        load(i, LoadSlot::FoldBase, u, unit[0].op.base());
    }
    task_redexes(c, i, out);
    if (options.tlo) {
      for (auto& cand : candidates(s.streamlet, i, options.tlo_rules)) {
        Redex x;
        x.rule = Rule::Opt;
        x.site = SiteKind::Opt;
        x.station = i;
        x.rewrite = cand;
        out.push_back(std::move(x));
      }
    }
  }
  return out;
}

bool is_eager_redex(const Configuration& c, const Redex& r) {
  auto others_dry = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = 0; j < c.backend.size(); ++j) {
      if (j >= lo && j <= hi) continue;
      const auto& s = c.backend[j];
      if (!s.streamlet.empty() || !is_node_value(*s.node)) return false;
    }
    return true;
  };
  switch (r.site) {
    case SiteKind::Opt:
      return false;
    case SiteKind::ToGraph:
      return true;
    case SiteKind::Frontend:
      return c.top.empty() && is_dry(c.backend);
    case SiteKind::Station: {
      if (!c.top.empty()) return false;
      const auto& s = c.backend[r.station];
      bool neighborhood_free = is_node_value(*s.node) && unit_settled(s.streamlet.front());
      std::size_t hi = r.rule == Rule::Prop ? r.station + 1 : r.station;
      return neighborhood_free && others_dry(r.station, hi);
    }
    case SiteKind::Load: {
      if (!c.top.empty() || !others_dry(r.station, r.station)) return false;
      if (r.slot == LoadSlot::Node) return true;
      const auto& s = c.backend[r.station];
      return is_node_value(*s.node) && s.streamlet.size() == 1 && s.streamlet[0].size() == 1;
    }
  }
  return false;
}

std::vector<Redex> eager_enumerate(const Configuration& c) {
  auto all = enumerate_redexes(c);
  std::vector<Redex> out;
  for (auto& r : all)
    if (is_eager_redex(c, r)) out.push_back(std::move(r));
  return out;
}

StepEffects apply_in_place(Configuration& c, const Redex& r) {
  StepEffects fx;
  auto lookup = store_lookup(c.store);

  switch (r.site) {
    case SiteKind::Frontend: {
      const auto& sub = subterm_at(c.frontend, r.path);
      if (r.rule == Rule::Emit) {
        Label l{c.next_label++};
        LabeledOp lo{l, operation_of(*sub)};
        c.frontend = replace_at(c.frontend, r.path, label_lit(l, sub->loc));
        c.top.push_back(StreamUnit{lo});
        fx.labels.push_back(l);
        fx.emitted = std::move(lo);
        return fx;
      }
      ExprRule inner = ExprRule::Beta;
      switch (r.rule) {
        case Rule::Claim: {
          inner = ExprRule::Claim;
          Label l = sub->kids[0]->label;
          fx.labels.push_back(l);
          auto it = c.store.find(l);
          if (it != c.store.end() && !it->second.residual.empty()) fx.claimed_with_residual = true;
          break;
        }
        case Rule::Beta: inner = ExprRule::Beta; break;
        case Rule::Node: inner = ExprRule::Node; break;
        case Rule::KSA: inner = ExprRule::KSA; break;
        case Rule::KSS: inner = ExprRule::KSS; break;
        case Rule::Arith: inner = ExprRule::Arith; break;
        case Rule::Cond: inner = ExprRule::Cond; break;
        case Rule::Len: inner = ExprRule::Len; break;
        case Rule::Fix: inner = ExprRule::Fix; break;
        default:
          throw std::logic_error("not a frontend rule");
      }
      c.frontend = replace_at(c.frontend, r.path, contract(sub, inner, lookup));
      return fx;
    }

    case SiteKind::ToGraph: {
      StreamUnit unit = std::move(c.top.front());
      c.top.erase(c.top.begin());
      const auto& lo = unit.front();
      fx.labels.push_back(lo.label);
      if (r.rule == Rule::Add) {
        Key k = Key::generated(c.next_key++);
        c.backend.insert(c.backend.begin(),
                         make_station(node(key_lit(k), lo.op.add_arg(), key_list({}))));
        c.store.emplace(lo.label, ResultEntry{lo.label, {}, key_lit(k)});
      } else if (r.rule == Rule::Empty) {
        c.store.emplace(lo.label, finalize(lo.label, lo.op));
      } else {
        append_station_tail(c.backend, std::move(unit));
      }
      return fx;
    }

    case SiteKind::Station: {
      auto& s = c.backend.at(r.station);
      auto& head = s.streamlet.front();
      for (const auto& lo : head) fx.labels.push_back(lo.label);
      switch (r.rule) {
        case Rule::Map: {
          auto& op = head[0].op;
          auto fn = app(op.function(), s.node);
          s.node = node(s.key(), proj(2, fn), proj(3, fn), s.node->loc);
          op.args[1] = key_list_of(kl_subtract(key_list_keys(*op.target()), {s.key()->key}));
          break;
        }
        case Rule::Fold: {
          auto& op = head[0].op;
          op.args[1] = app(app(op.function(), s.node), op.base());
          op.args[2] = key_list_of(kl_subtract(key_list_keys(*op.target()), {s.key()->key}));
          break;
        }
        case Rule::Prop: {
          StreamUnit unit = std::move(head);
          s.streamlet.erase(s.streamlet.begin());
          c.backend.at(r.station + 1).streamlet.push_back(std::move(unit));
          break;
        }
        case Rule::Complete:
        case Rule::Last: {
          LabeledOp lo = std::move(head[0]);
          s.streamlet.erase(s.streamlet.begin());
          c.store.emplace(lo.label, finalize(lo.label, lo.op));
          break;
        }
        default:
          throw std::logic_error("not a station rule");
      }
      return fx;
    }

    case SiteKind::Load: {
      auto& s = c.backend.at(r.station);
      ExprPtr* target_expr = &s.node;
      if (r.slot == LoadSlot::FoldBase) {
        auto& lo = s.streamlet.at(r.unit).at(0);
        fx.labels.push_back(lo.label);
        target_expr = &lo.op.args[1];
      }
      const auto& sub = subterm_at(*target_expr, r.path);
      if (r.inner == ExprRule::Claim) fx.labels.push_back(sub->kids[0]->label);
      *target_expr = replace_at(*target_expr, r.path, contract(sub, r.inner, lookup));
      return fx;
    }

    case SiteKind::Opt: {
      auto& s = c.backend.at(r.station);
      auto result = apply_rewrite(s.streamlet, r.rewrite);
      for (std::size_t u = r.rewrite.position;
           u < std::min(s.streamlet.size(), r.rewrite.position + 2); ++u)
        for (const auto& lo : s.streamlet[u]) fx.labels.push_back(lo.label);
      s.streamlet = std::move(result.stream);
      merge_results(c, result.results);
      return fx;
    }
  }
  return fx;
}

Configuration apply(const Configuration& c, const Redex& r) {
  Configuration next = c;
  apply_in_place(next, r);
  return next;
}

}  // namespace cg
