#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cg/runtime/config.hpp"

namespace cg {

enum class TloRule : std::uint8_t { Batch, Unbatch, ReorderD, ReorderRR, ReorderRW, FuseM, FuseMId, Reuse };

constexpr std::size_t kTloRuleCount = 8;

const char* to_string(TloRule rule);
std::optional<TloRule> tlo_rule_from_string(const std::string& name);  // case-insensitive

struct TloOptions {
  std::uint32_t enabled = (1u << kTloRuleCount) - 1;
  bool assume_set_adjacency = false;

  bool allows(TloRule r) const { return (enabled >> static_cast<unsigned>(r)) & 1u; }
  void set(TloRule r, bool on) {
    auto bit = 1u << static_cast<unsigned>(r);
    enabled = on ? (enabled | bit) : (enabled & ~bit);
  }
  static TloOptions none() { return TloOptions{0, false}; }
  // Parses a comma-separated rule list such as "batch,unbatch,reuse".
  static TloOptions parse(const std::string& rules);
};

struct RewriteCandidate {
  TloRule rule = TloRule::Batch;
  std::size_t station = 0;
  std::size_t position = 0;  // first unit of the adjacent pair, or the unit to split
  std::size_t split = 0;     // Unbatch: operations kept in the first half

  bool operator==(const RewriteCandidate&) const = default;
  std::string describe() const;
};

struct RewriteResult {
  OperationStream stream;
  std::vector<ResultEntry> results;
};

struct EquivalenceVerdict {
  enum class Kind { Proved, Refuted, Unknown };
  Kind kind = Kind::Unknown;
  std::vector<ExprPtr> witness;  // probe inputs that told the sides apart

  bool proved() const { return kind == Kind::Proved; }
  bool refuted() const { return kind == Kind::Refuted; }
};

const char* to_string(EquivalenceVerdict::Kind kind);

// Every applicable rewrite of a single streamlet. `station` is copied into the
// candidates; the station key is not consulted by any rule.
std::vector<RewriteCandidate> candidates(const OperationStream& stream, std::size_t station,
                                         const TloOptions& options);

RewriteResult apply_rewrite(const OperationStream& stream, const RewriteCandidate& cand);

// λx.λy. f (if π1 x ∈ ks then g x else x) y
ExprPtr dcomp(const ExprPtr& f, const std::vector<Key>& ks, const ExprPtr& g);

EquivalenceVerdict prove_identity(const ExprPtr& f, bool assume_set_adjacency = false);
EquivalenceVerdict prove_commutative(const ExprPtr& f);

}  // namespace cg
