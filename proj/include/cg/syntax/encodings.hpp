#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cg/syntax/ast.hpp"

namespace cg {

class DesugarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The six derived graph operations:
//   addRelationship e e'    map (\x. <pi1 x; pi2 x; pi3 x ++ [e']>) [e]
//   deleteRelationship e e' map (\x. <pi1 x; pi2 x; pi3 x -- [e']>) [e]
//   updatePayload e e'      map (\x. <pi1 x; pi2 e'; pi3 x>) [e]
//   queryNode e             fold (\x.\y. x) <#_; 0; []> [e]
//   mapVal e e'             map (\x. <pi1 x; e x; pi3 x>) e'
//   foldVal e e' e''        fold (\x.\y. <pi1 y; e x (pi2 y); pi3 y>) <#_; e'; []> e''
// `commutative` marks the resulting fold function (foldVal only).
Operation desugar_graph_op(const std::string& name, const std::vector<ExprPtr>& args,
                           bool commutative = false, SourceLoc loc = {});

bool is_graph_op_name(const std::string& name);
std::size_t graph_op_arity(const std::string& name);

}  // namespace cg
