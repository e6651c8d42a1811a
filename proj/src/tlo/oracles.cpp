#include <map>
#include <mutex>
#include <random>
#include <set>

#include "cg/runtime/serialize.hpp"
#include "cg/syntax/eval.hpp"
#include "cg/syntax/normalize.hpp"
#include "cg/syntax/printer.hpp"
#include "cg/syntax/terms.hpp"
#include "cg/tlo/rewrite.hpp"

namespace cg {

namespace {

constexpr std::size_t kNormalizeFuel = 4000;
constexpr std::size_t kEvalFuel = 20000;
constexpr int kRandomProbes = 24;

// Probing never sees a result store, so claims inside a function block and
// that probe is skipped.
ExprPtr no_results(Label) { return nullptr; }

void collect_keys(const Expr& e, std::set<Key>& out) {
  if (e.kind == ExprKind::Key) out.insert(e.key);
  for (const auto& k : e.kids) collect_keys(*k, out);
}

class ProbeSource {
 public:
  explicit ProbeSource(const ExprPtr& f) : rng_(fnv1a(to_sexpr(*f))) {
    std::set<Key> keys;
    collect_keys(*f, keys);
    pool_.assign(keys.begin(), keys.end());
    pool_.push_back(Key::literal("probe0"));
    pool_.push_back(Key::literal("probe1"));
  }

  // Fixed small probes first so witnesses are easy to read, then random ones.
  ExprPtr node_probe(int index) {
    static const std::int64_t fixed_payloads[] = {0, 1, -1, 2, 3, 7, -5, 100};
    constexpr int fixed = static_cast<int>(sizeof fixed_payloads / sizeof fixed_payloads[0]);
    if (index < fixed) {
      const Key& k = pool_[static_cast<std::size_t>(index) % pool_.size()];
      std::vector<Key> adj;
      if (index % 2 == 1) adj = pool_;
      return node(key_lit(k), int_lit(fixed_payloads[index]), key_list_of(adj));
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool_.size() - 1);
    std::uniform_int_distribution<std::int64_t> payload(-50, 50);
    std::uniform_int_distribution<int> adj_len(0, 3);
    std::vector<Key> adj;
    for (int n = adj_len(rng_); n > 0; --n) adj.push_back(pool_[pick(rng_)]);
    return node(key_lit(pool_[pick(rng_)]), int_lit(payload(rng_)), key_list_of(adj));
  }

  int probe_count() const { return 8 + kRandomProbes; }

 private:
  std::mt19937_64 rng_;
  std::vector<Key> pool_;
};

std::optional<ExprPtr> run_probe(const ExprPtr& e) { return evaluate(e, no_results, kEvalFuel); }

bool is_identity_lambda(const Expr& e) {
  return e.kind == ExprKind::Lambda && e.kids[0]->kind == ExprKind::Var &&
         e.kids[0]->name == e.name;
}

EquivalenceVerdict identity_uncached(const ExprPtr& f, bool assume_set_adjacency) {
  if (f->kind != ExprKind::Lambda) return {};
  auto nf = normalize(f, NormalizeOptions{kNormalizeFuel, assume_set_adjacency});
  if (nf.complete && is_identity_lambda(*nf.term))
    return {EquivalenceVerdict::Kind::Proved, {}};

  ProbeSource probes(f);
  for (int i = 0; i < probes.probe_count(); ++i) {
    auto n = probes.node_probe(i);
    auto out = run_probe(app(f, n));
    if (!out) continue;
    if (!alpha_equal(**out, *n)) return {EquivalenceVerdict::Kind::Refuted, {n}};
  }
  return {};
}

EquivalenceVerdict commutative_uncached(const ExprPtr& f) {
  if (f->kind != ExprKind::Lambda || !f->commutative) return {};
  ProbeSource probes(f);
  int evaluated = 0;
  const int count = probes.probe_count();
  for (int i = 0; i < count; ++i) {
    auto n = probes.node_probe(i);
    auto n2 = probes.node_probe((i + 1) % count);
    auto acc = probes.node_probe((i + 3) % count);
    auto lhs = run_probe(app(app(f, n), app(app(f, n2), acc)));
    auto rhs = run_probe(app(app(f, n2), app(app(f, n), acc)));
    if (!lhs || !rhs) continue;
    ++evaluated;
    if (!alpha_equal(**lhs, **rhs)) return {EquivalenceVerdict::Kind::Refuted, {n, n2, acc}};
  }
  if (evaluated == 0) return {};
  return {EquivalenceVerdict::Kind::Proved, {}};
}

// Verdicts are pure functions of the term, so memoizing them is safe across
// threads and runs.
class VerdictCache {
 public:
  template <typename Compute>
  EquivalenceVerdict get(const std::string& key, Compute compute) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    auto v = compute();
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(key, v);
    return v;
  }

 private:
  std::mutex mu_;
  std::map<std::string, EquivalenceVerdict> cache_;
};

VerdictCache& cache() {
  static VerdictCache c;
  return c;
}

}  // namespace

EquivalenceVerdict prove_identity(const ExprPtr& f, bool assume_set_adjacency) {
  std::string key = std::string(assume_set_adjacency ? "id+set:" : "id:") + to_sexpr(*f);
  return cache().get(key, [&] { return identity_uncached(f, assume_set_adjacency); });
}

EquivalenceVerdict prove_commutative(const ExprPtr& f) {
  return cache().get("comm:" + to_sexpr(*f), [&] { return commutative_uncached(f); });
}

}  // namespace cg
