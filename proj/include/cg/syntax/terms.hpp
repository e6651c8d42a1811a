#pragma once

#include <set>
#include <string>

#include "cg/syntax/ast.hpp"

namespace cg {

std::set<std::string> free_vars(const Expr& e);
bool is_closed(const Expr& e);

// Every variable name occurring in `e`, bound or free.
void all_names(const Expr& e, std::set<std::string>& out);

// `stem` followed by the smallest natural number not in `avoid`.
std::string fresh_name(const std::string& stem, const std::set<std::string>& avoid);

// Capture-avoiding e[v/x].
ExprPtr substitute(const ExprPtr& e, const ExprPtr& v, const std::string& x);

// Structural equality up to renaming of bound variables. Lambda parameter
// types must agree; the commutativity annotation is ignored.
bool alpha_equal(const Expr& a, const Expr& b);
bool alpha_equal(const ExprPtr& a, const ExprPtr& b);

// f ∘ g = λz. f (g z), with z drawn from the reserved `$z` namespace.
ExprPtr compose(const ExprPtr& f, const ExprPtr& g);

}  // namespace cg
