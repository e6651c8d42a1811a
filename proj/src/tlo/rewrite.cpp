#include "cg/tlo/rewrite.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cg/syntax/terms.hpp"

namespace cg {

namespace {

constexpr const char* kRuleNames[kTloRuleCount] = {"batch",     "unbatch",   "reorderd",
                                                    "reorderrr", "reorderrw", "fusem",
                                                    "fusemid",   "reuse"};

bool single(const StreamUnit& u) { return u.size() == 1; }

bool is_map(const StreamUnit& u) { return single(u) && u[0].op.kind == OpKind::Map; }
bool is_fold(const StreamUnit& u) { return single(u) && u[0].op.kind == OpKind::Fold; }

std::set<Key> target_set(const Operation& op) {
  auto t = target(op);
  return t ? std::set<Key>(t->begin(), t->end()) : std::set<Key>{};
}

bool disjoint(const std::set<Key>& a, const std::set<Key>& b) {
  return std::none_of(a.begin(), a.end(), [&](const Key& k) { return b.count(k) != 0; });
}

bool subset(const std::set<Key>& a, const std::set<Key>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// The second operation may not overtake or absorb an operation whose result it
// waits on.
bool independent(const LabeledOp& first, const LabeledOp& second) {
  return !mentions_label(second.op, first.label);
}

}  // namespace

const char* to_string(TloRule rule) { return kRuleNames[static_cast<std::size_t>(rule)]; }

std::optional<TloRule> tlo_rule_from_string(const std::string& name) {
  std::string lower;
  for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (std::size_t i = 0; i < kTloRuleCount; ++i)
    if (lower == kRuleNames[i]) return static_cast<TloRule>(i);
  return std::nullopt;
}

TloOptions TloOptions::parse(const std::string& rules) {
  TloOptions out = none();
  std::stringstream ss(rules);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               item.end());
    if (item.empty()) continue;
    auto r = tlo_rule_from_string(item);
    if (!r) throw std::invalid_argument("unknown rewrite rule '" + item + "'");
    out.set(*r, true);
  }
  return out;
}

std::string RewriteCandidate::describe() const {
  std::string s = std::string(to_string(rule)) + "@" + std::to_string(station) + ":" +
                  std::to_string(position);
  if (rule == TloRule::Unbatch) s += "/" + std::to_string(split);
  return s;
}

const char* to_string(EquivalenceVerdict::Kind kind) {
  switch (kind) {
    case EquivalenceVerdict::Kind::Proved:
      return "proved";
    case EquivalenceVerdict::Kind::Refuted:
      return "refuted";
    case EquivalenceVerdict::Kind::Unknown:
      return "unknown";
  }
  return "?";
}

std::vector<RewriteCandidate> candidates(const OperationStream& stream, std::size_t station,
                                         const TloOptions& options) {
  std::vector<RewriteCandidate> out;
  auto offer = [&](TloRule r, std::size_t pos, std::size_t split = 0) {
    if (options.allows(r)) out.push_back(RewriteCandidate{r, station, pos, split});
  };

  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto& u = stream[i];
    for (std::size_t s = 1; s < u.size(); ++s) offer(TloRule::Unbatch, i, s);
    if (i + 1 >= stream.size()) continue;
    const auto& v = stream[i + 1];
    offer(TloRule::Batch, i);
    if (!single(u) || !single(v)) continue;

    const auto& a = u[0];
    const auto& b = v[0];
    if (!independent(a, b)) continue;

    if (disjoint(target_set(a.op), target_set(b.op))) offer(TloRule::ReorderD, i);
    if (is_fold(u) && is_fold(v)) offer(TloRule::ReorderRR, i);
    if (is_map(u) && is_fold(v)) offer(TloRule::ReorderRW, i);

    if (is_map(u) && is_map(v) && alpha_equal(*a.op.target(), *b.op.target()) &&
        (options.allows(TloRule::FuseM) || options.allows(TloRule::FuseMId))) {
      auto verdict = prove_identity(compose(b.op.function(), a.op.function()),
                                    options.assume_set_adjacency);
      offer(verdict.proved() ? TloRule::FuseMId : TloRule::FuseM, i);
    }

    if (is_fold(u) && is_fold(v) && options.allows(TloRule::Reuse) &&
        alpha_equal(*a.op.function(), *b.op.function()) &&
        alpha_equal(*a.op.base(), *b.op.base()) &&
        subset(target_set(a.op), target_set(b.op)) &&
        prove_commutative(a.op.function()).proved() &&
        prove_commutative(b.op.function()).proved())
      offer(TloRule::Reuse, i);
  }
  return out;
}

RewriteResult apply_rewrite(const OperationStream& stream, const RewriteCandidate& cand) {
  const std::size_t i = cand.position;
  auto need = [&](std::size_t count) {
    if (i + count > stream.size()) throw std::invalid_argument("rewrite position out of range");
  };
  RewriteResult r;
  r.stream = stream;
  auto& s = r.stream;

  switch (cand.rule) {
    case TloRule::Batch: {
      need(2);
      s[i].insert(s[i].end(), s[i + 1].begin(), s[i + 1].end());
      s.erase(s.begin() + static_cast<long>(i) + 1);
      break;
    }
    case TloRule::Unbatch: {
      need(1);
      if (cand.split == 0 || cand.split >= s[i].size())
        throw std::invalid_argument("unbatch split must leave both halves nonempty");
      StreamUnit tail(s[i].begin() + static_cast<long>(cand.split), s[i].end());
      s[i].resize(cand.split);
      s.insert(s.begin() + static_cast<long>(i) + 1, std::move(tail));
      break;
    }
    case TloRule::ReorderD:
    case TloRule::ReorderRR:
      need(2);
      std::swap(s[i], s[i + 1]);
      break;
    case TloRule::ReorderRW: {
      need(2);
      const auto& map_op = stream[i][0].op;
      auto fold_op = stream[i + 1][0].op;
      fold_op.args[0] = dcomp(fold_op.function(), key_list_keys(*map_op.target()),
                              map_op.function());
      s[i] = StreamUnit{{stream[i + 1][0].label, fold_op}};
      s[i + 1] = stream[i];
      break;
    }
    case TloRule::FuseM: {
      need(2);
      auto fused = stream[i][0].op;
      fused.args[0] = compose(stream[i + 1][0].op.function(), fused.function());
      s[i] = StreamUnit{{stream[i][0].label, fused}};
      r.results.push_back(ResultEntry{stream[i + 1][0].label, {}, int_lit(0)});
      s.erase(s.begin() + static_cast<long>(i) + 1);
      break;
    }
    case TloRule::FuseMId: {
      need(2);
      r.results.push_back(ResultEntry{stream[i][0].label, {}, int_lit(0)});
      r.results.push_back(ResultEntry{stream[i + 1][0].label, {}, int_lit(0)});
      s.erase(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(i) + 2);
      break;
    }
    case TloRule::Reuse: {
      need(2);
      const auto& first = stream[i][0];
      auto second = stream[i + 1][0].op;
      auto remaining = kl_subtract(key_list_keys(*second.target()),
                                   key_list_keys(*first.op.target()));
      second.args[1] = claim(label_lit(first.label));
      second.args[2] = key_list_of(remaining);
      s[i + 1] = StreamUnit{{stream[i + 1][0].label, second}};
      break;
    }
  }
  return r;
}

ExprPtr dcomp(const ExprPtr& f, const std::vector<Key>& ks, const ExprPtr& g) {
  std::set<std::string> avoid;
  all_names(*f, avoid);
  all_names(*g, avoid);
  const std::string x = fresh_name("$z", avoid);
  avoid.insert(x);
  const std::string y = fresh_name("$z", avoid);
  auto node_t = Type::node_type();
  // len(KL[π1 x] ⊖ KL[ks]) is zero exactly when π1 x ∈ ks.
  auto member = len(subtract(key_list({proj(1, var(x))}), key_list_of(ks)));
  auto chosen = cond(member, app(g, var(x)), var(x));
  return lambda(x, node_t, lambda(y, node_t, app(app(f, chosen), var(y))));
}

}  // namespace cg
