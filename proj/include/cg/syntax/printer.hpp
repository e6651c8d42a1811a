#pragma once

#include <string>

#include "cg/syntax/ast.hpp"

namespace cg {

// Compact s-expression rendering used in traces, JSON and digests.
std::string to_sexpr(const Expr& e);
std::string to_sexpr(const ExprPtr& e);
std::string to_sexpr(const Operation& op);
std::string type_sexpr(const Type& t);

// Surface-syntax rendering that the parser reads back to an alpha-equivalent
// term. Reserved `$` binders are renamed to ordinary identifiers.
std::string to_source(const Expr& e);
std::string type_source(const Type& t);

}  // namespace cg
