#include "cg/harness/canonical.hpp"

#include <set>

#include "cg/syntax/normalize.hpp"
#include "cg/syntax/printer.hpp"
#include "cg/syntax/terms.hpp"

namespace cg {

namespace {

constexpr std::size_t kFrontendFuel = 20000;

struct Ids {
  std::set<std::uint64_t> keys;
  std::set<std::uint64_t> labels;
};

void collect(const Expr& e, Ids& ids) {
  if (e.kind == ExprKind::Key && e.key.is_generated()) ids.keys.insert(e.key.id());
  if (e.kind == ExprKind::Label) ids.labels.insert(e.label.id);
  for (const auto& k : e.kids) collect(*k, ids);
}

std::map<std::uint64_t, std::uint64_t> ranks(const std::set<std::uint64_t>& ids) {
  std::map<std::uint64_t, std::uint64_t> out;
  std::uint64_t next = 1;
  for (auto id : ids) out.emplace(id, next++);
  return out;
}

class Renamer {
 public:
  Renamer(const Ids& ids) : keys_(ranks(ids.keys)), labels_(ranks(ids.labels)) {}

  Key key(const Key& k) const {
    return k.is_generated() ? Key::generated(keys_.at(k.id())) : k;
  }
  std::uint64_t label(std::uint64_t id) const { return labels_.at(id); }

  ExprPtr expr(const ExprPtr& e) const {
    if (e->kind == ExprKind::Key && e->key.is_generated()) return key_lit(key(e->key), e->loc);
    if (e->kind == ExprKind::Label) return label_lit(Label{label(e->label.id)}, e->loc);
    ExprPtr out = e;
    for (std::size_t i = 0; i < e->kids.size(); ++i) {
      auto kid = expr(e->kids[i]);
      if (kid != e->kids[i]) out = with_kid(out, i, kid);
    }
    return out;
  }

 private:
  std::map<std::uint64_t, std::uint64_t> keys_;
  std::map<std::uint64_t, std::uint64_t> labels_;
};

}  // namespace

CanonicalTerminal canonicalize(const Configuration& c) {
  Ids ids;
  for (const auto& s : c.backend) collect(*s.node, ids);
  for (const auto& [label, entry] : c.store) {
    ids.labels.insert(label.id);
    collect(*entry.value, ids);
    for (const auto& k : entry.residual)
      if (k.is_generated()) ids.keys.insert(k.id());
  }
  collect(*c.frontend, ids);

  Renamer r(ids);
  CanonicalTerminal out;
  for (const auto& s : c.backend) out.backend.push_back(r.expr(s.node));
  for (const auto& [label, entry] : c.store) {
    CanonicalTerminal::Entry e;
    for (const auto& k : entry.residual) e.residual.push_back(r.key(k));
    e.value = r.expr(entry.value);
    out.store.emplace(r.label(label.id), std::move(e));
  }
  out.frontend = r.expr(c.frontend);
  return out;
}

Json CanonicalTerminal::to_json(bool with_residuals) const {
  Json j;
  Json nodes = Json::array();
  for (const auto& n : backend) nodes.push_back(to_sexpr(*n));
  j["backend"] = std::move(nodes);
  Json entries = Json::array();
  for (const auto& [label, entry] : store) {
    Json e;
    e["label"] = Label{label}.spelling();
    if (with_residuals) {
      Json res = Json::array();
      for (const auto& k : entry.residual) res.push_back(k.spelling());
      e["residual"] = std::move(res);
    }
    e["value"] = to_sexpr(*entry.value);
    entries.push_back(std::move(e));
  }
  j["store"] = std::move(entries);
  j["frontend"] = to_sexpr(*frontend);
  return j;
}

std::string CanonicalTerminal::digest(bool with_residuals) const {
  return hex_digest(fnv1a(to_json(with_residuals).dump()));
}

std::optional<std::string> compare_terminals(const CanonicalTerminal& a,
                                             const CanonicalTerminal& b, bool strict_residuals) {
  if (a.backend.size() != b.backend.size())
    return "backends have " + std::to_string(a.backend.size()) + " and " +
           std::to_string(b.backend.size()) + " stations";
  for (std::size_t i = 0; i < a.backend.size(); ++i)
    if (!alpha_equal(*a.backend[i], *b.backend[i]))
      return "station " + std::to_string(i) + ": " + to_sexpr(*a.backend[i]) + " vs " +
             to_sexpr(*b.backend[i]);

  for (const auto& [label, ea] : a.store) {
    auto it = b.store.find(label);
    std::string name = Label{label}.spelling();
    if (it == b.store.end()) return "store entry " + name + " missing on one side";
    if (!alpha_equal(*ea.value, *it->second.value))
      return "store entry " + name + ": " + to_sexpr(*ea.value) + " vs " +
             to_sexpr(*it->second.value);
    if (strict_residuals && ea.residual != it->second.residual)
      return "store entry " + name + ": residual targets differ";
  }
  for (const auto& [label, eb] : b.store)
    if (!a.store.count(label)) return "store entry " + Label{label}.spelling() + " missing on one side";

  if (!alpha_equal(*a.frontend, *b.frontend)) {
    auto eq = term_equiv(a.frontend, b.frontend, kFrontendFuel);
    if (eq != Equivalence::Equal)
      return std::string("frontend values ") + to_string(eq) + ": " + to_sexpr(*a.frontend) +
             " vs " + to_sexpr(*b.frontend);
  }
  return std::nullopt;
}

}  // namespace cg
