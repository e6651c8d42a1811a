#include "cg/syntax/encodings.hpp"

#include <map>
#include <set>

#include "cg/syntax/terms.hpp"

namespace cg {

namespace {

const std::map<std::string, std::size_t>& arities() {
  static const std::map<std::string, std::size_t> table = {
      {"addRelationship", 2}, {"deleteRelationship", 2}, {"updatePayload", 2},
      {"queryNode", 1},       {"mapVal", 2},             {"foldVal", 3},
  };
  return table;
}

}  // namespace

bool is_graph_op_name(const std::string& name) { return arities().count(name) != 0; }

std::size_t graph_op_arity(const std::string& name) {
  auto it = arities().find(name);
  if (it == arities().end()) throw DesugarError("unknown graph operation '" + name + "'");
  return it->second;
}

Operation desugar_graph_op(const std::string& name, const std::vector<ExprPtr>& args,
                           bool commutative, SourceLoc loc) {
  std::size_t arity = graph_op_arity(name);
  if (args.size() != arity)
    throw DesugarError(name + " expects " + std::to_string(arity) + " argument(s), got " +
                       std::to_string(args.size()));
  if (commutative && name != "foldVal")
    throw DesugarError("only folds can be marked commutative");

  std::set<std::string> avoid;
  for (const auto& a : args) all_names(*a, avoid);
  const std::string x = fresh_name("$x", avoid);
  const std::string y = fresh_name("$y", avoid);
  auto node_t = Type::node_type();
  auto X = [&] { return var(x, loc); };
  auto Y = [&] { return var(y, loc); };
  auto single = [&](const ExprPtr& e) { return key_list({e}, loc); };
  auto blank_key = [&] { return key_lit(Key::literal("_"), loc); };

  if (name == "addRelationship" || name == "deleteRelationship") {
    auto adj = name == "addRelationship" ? concat(proj(3, X(), loc), single(args[1]), loc)
                                         : subtract(proj(3, X(), loc), single(args[1]), loc);
    auto f = lambda(x, node_t, node(proj(1, X(), loc), proj(2, X(), loc), adj, loc), false, loc);
    return Operation{OpKind::Map, {f, single(args[0])}};
  }
  if (name == "updatePayload") {
    auto f = lambda(x, node_t,
                    node(proj(1, X(), loc), proj(2, args[1], loc), proj(3, X(), loc), loc), false,
                    loc);
    return Operation{OpKind::Map, {f, single(args[0])}};
  }
  if (name == "queryNode") {
    auto f = lambda(x, node_t, lambda(y, node_t, X(), false, loc), false, loc);
    auto base = node(blank_key(), int_lit(0, loc), key_list({}, loc), loc);
    return Operation{OpKind::Fold, {f, base, single(args[0])}};
  }
  if (name == "mapVal") {
    auto f = lambda(x, node_t,
                    node(proj(1, X(), loc), app(args[0], X(), loc), proj(3, X(), loc), loc), false,
                    loc);
    return Operation{OpKind::Map, {f, args[1]}};
  }
  // foldVal
  auto inner = node(proj(1, Y(), loc), app(app(args[0], X(), loc), proj(2, Y(), loc), loc),
                    proj(3, Y(), loc), loc);
  auto f = lambda(x, node_t, lambda(y, node_t, inner, false, loc), commutative, loc);
  auto base = node(blank_key(), args[1], key_list({}, loc), loc);
  return Operation{OpKind::Fold, {f, base, args[2]}};
}

}  // namespace cg
