#pragma once

#include <cstddef>

#include "cg/syntax/ast.hpp"

namespace cg {

struct NormalizeOptions {
  std::size_t fuel = 10000;
  // Treat adjacency lists as sets, which licenses (X ++ K) -- K => X.
  // Unsound when X may already contain a key of K.
  bool assume_set_adjacency = false;
};

struct NormalForm {
  ExprPtr term;
  bool complete = true;  // false when fuel ran out
};

// Bounded normalization under binders. Beta, projection and primitive steps
// only fire when nothing with an observable effect (emit, claim, fix, or an
// unevaluated application) would be discarded, duplicated or reordered.
NormalForm normalize(const ExprPtr& e, const NormalizeOptions& options = {});

enum class Equivalence { Equal, Distinct, Unknown };

const char* to_string(Equivalence eq);

Equivalence term_equiv(const ExprPtr& a, const ExprPtr& b, std::size_t fuel,
                       bool assume_set_adjacency = false);

// Effect-free and unable to get stuck under well-typed use: variables,
// values and primitive forms over such subterms.
bool is_pure(const Expr& e);

}  // namespace cg
