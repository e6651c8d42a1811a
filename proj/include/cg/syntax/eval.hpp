#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cg/syntax/ast.hpp"

namespace cg {

// Expression-level rules. The first ten share their names with the rule ids
// the engine reports.
enum class ExprRule : std::uint8_t { Emit, Claim, Beta, Node, KSA, KSS, Arith, Cond, Len, Fix };

const char* to_string(ExprRule rule);

using Path = std::vector<std::uint32_t>;

struct ExprRedex {
  ExprRule rule;
  Path path;  // child indices from the root to the redex
};

// Looks up a claimed label; returns null when the result is not available yet.
using ClaimLookup = std::function<ExprPtr(Label)>;

std::int64_t apply_arith(ArithOp op, std::int64_t a, std::int64_t b);

// The unique call-by-value, left-to-right redex of `e`, if any. Claims of
// absent labels are not redexes: evaluation simply blocks there.
std::optional<ExprRedex> find_redex(const ExprPtr& e, const ClaimLookup& lookup);

const ExprPtr& subterm_at(const ExprPtr& e, const Path& path);
ExprPtr replace_at(const ExprPtr& e, const Path& path, std::size_t depth, ExprPtr replacement);
inline ExprPtr replace_at(const ExprPtr& e, const Path& path, ExprPtr replacement) {
  return replace_at(e, path, 0, std::move(replacement));
}

// Contracts a redex found by find_redex. Emit is handled by the caller since
// it needs a fresh label and a stream to append to.
ExprPtr contract(const ExprPtr& redex, ExprRule rule, const ClaimLookup& lookup);

// Runs a closed, emit-free expression to a value. Returns nothing when the
// expression emits, blocks, gets stuck, or exceeds `fuel` steps.
std::optional<ExprPtr> evaluate(const ExprPtr& e, const ClaimLookup& lookup, std::size_t fuel);

}  // namespace cg
