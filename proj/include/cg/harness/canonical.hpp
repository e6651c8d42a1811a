#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cg/runtime/config.hpp"
#include "cg/runtime/serialize.hpp"

namespace cg {

// A terminal configuration with generated keys and labels renumbered by
// creation order, so runs that differ only in which fresh ids they drew
// compare equal.
struct CanonicalTerminal {
  struct Entry {
    std::vector<Key> residual;
    ExprPtr value;
  };

  std::vector<ExprPtr> backend;      // node values in traversal order
  std::map<std::uint64_t, Entry> store;
  ExprPtr frontend;

  Json to_json(bool with_residuals = false) const;
  std::string digest(bool with_residuals = false) const;
};

CanonicalTerminal canonicalize(const Configuration& c);

// First difference between two canonical terminals, described for a report.
// Store values and backends compare syntactically; frontends compare by
// bounded term equivalence.
std::optional<std::string> compare_terminals(const CanonicalTerminal& a,
                                             const CanonicalTerminal& b,
                                             bool strict_residuals = false);

}  // namespace cg
