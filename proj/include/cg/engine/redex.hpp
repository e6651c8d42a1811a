#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cg/runtime/config.hpp"
#include "cg/syntax/eval.hpp"
#include "cg/tlo/rewrite.hpp"

namespace cg {

enum class Rule : std::uint8_t {
  Emit,
  Claim,
  Beta,
  Node,
  KSA,
  KSS,
  Arith,
  Cond,
  Len,
  Fix,
  Map,
  Fold,
  Prop,
  Complete,
  Last,
  Opt,
  Load,
  Empty,
  First,
  Add,
};

const char* to_string(Rule rule);
std::optional<Rule> rule_from_string(const std::string& name);
Rule rule_of(ExprRule r);

enum class SiteKind : std::uint8_t { Frontend, ToGraph, Station, Load, Opt };
enum class LoadSlot : std::uint8_t { Node, FoldBase };

struct Redex {
  Rule rule = Rule::Beta;
  SiteKind site = SiteKind::Frontend;
  std::size_t station = 0;
  LoadSlot slot = LoadSlot::Node;
  std::size_t unit = 0;               // fold-base loads: streamlet unit index
  Path path;                          // frontend or load-relative expression path
  ExprRule inner = ExprRule::Beta;    // the step a Load performs
  RewriteCandidate rewrite;           // Opt only

  bool is_opt() const { return rule == Rule::Opt; }
  // Stable, human-readable site name, e.g. "frontend/0.1", "station/2",
  // "load/1/node/1.0", "opt/0/batch@0:1".
  std::string site_string() const;
  bool operator==(const Redex&) const = default;
};

struct EngineOptions {
  bool tlo = false;
  TloOptions tlo_rules;
};

struct EnumerationStats {
  std::size_t emits_inside_loads = 0;
};

// Every enabled redex in a fixed order: frontend, to-graph, then per station
// loads, task rules and rewrite candidates.
std::vector<Redex> enumerate_redexes(const Configuration& c, const EngineOptions& options = {},
                                     EnumerationStats* stats = nullptr);

// Whether `r` sits in one of the eager (one-operation-at-a-time) contexts.
bool is_eager_redex(const Configuration& c, const Redex& r);

// The eager subset of the general enumeration, without rewrites.
std::vector<Redex> eager_enumerate(const Configuration& c);

struct StepEffects {
  std::vector<Label> labels;            // labels created, moved, finalized or claimed
  std::optional<LabeledOp> emitted;     // set by Emit
  bool claimed_with_residual = false;   // Claim of a result whose target was not exhausted
};

StepEffects apply_in_place(Configuration& c, const Redex& r);
Configuration apply(const Configuration& c, const Redex& r);

}  // namespace cg
