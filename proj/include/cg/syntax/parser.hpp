#pragma once

#include <stdexcept>
#include <string>

#include "cg/runtime/config.hpp"
#include "cg/syntax/ast.hpp"

namespace cg {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string file, SourceLoc loc, const std::string& message);

  const std::string& file() const { return file_; }
  SourceLoc loc() const { return loc_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string file_;
  SourceLoc loc_;
  std::string detail_;
};

struct Program {
  Backend graph;  // from the optional `graph [...]` header
  ExprPtr expr;
};

// Parses and elaborates a source file into a closed core expression. Sugar
// (let, `;`, foreach, comprehensions, node patterns, the derived graph
// operations) is gone from the result. Let-bound types are synthesized with
// the type checker, so this may also throw TypeError.
Program parse_program(const std::string& text, const std::string& file = "<input>");

// A single expression with no graph header.
ExprPtr parse_expression(const std::string& text);

TypePtr parse_type(const std::string& text);

}  // namespace cg
