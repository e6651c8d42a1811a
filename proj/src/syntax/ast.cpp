#include "cg/syntax/ast.hpp"

#include <algorithm>
#include <stdexcept>

namespace cg {

Key Key::literal(std::string name) {
  Key k;
  k.name_ = std::move(name);
  return k;
}

Key Key::generated(std::uint64_t id) {
  Key k;
  k.generated_ = true;
  k.id_ = id;
  return k;
}

std::string Key::spelling() const {
  return generated_ ? "#$" + std::to_string(id_) : "#" + name_;
}

// ---------------------------------------------------------------------------

namespace {

TypePtr make_base(TypeKind kind) {
  auto t = std::make_shared<Type>();
  t->kind = kind;
  return t;
}

}  // namespace

TypePtr Type::int_type() {
  static const TypePtr t = make_base(TypeKind::Int);
  return t;
}
TypePtr Type::key_type() {
  static const TypePtr t = make_base(TypeKind::Key);
  return t;
}
TypePtr Type::key_list_type() {
  static const TypePtr t = make_base(TypeKind::KeyList);
  return t;
}
TypePtr Type::node_type() {
  static const TypePtr t = make_base(TypeKind::Node);
  return t;
}

TypePtr Type::future(TypePtr inner) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Future;
  t->result = std::move(inner);
  return t;
}

TypePtr Type::arrow(TypePtr from, Emittability eff, TypePtr to, SourceLoc site) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Arrow;
  t->param = std::move(from);
  t->result = std::move(to);
  t->effect = eff;
  t->emit_site = site;
  return t;
}

bool operator==(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TypeKind::Future:
      return *a.result == *b.result;
    case TypeKind::Arrow:
      return a.effect == b.effect && *a.param == *b.param && *a.result == *b.result;
    default:
      return true;
  }
}

bool same_type(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return a == b;
  return *a == *b;
}

std::string to_string(const Type& t) {
  switch (t.kind) {
    case TypeKind::Int:
      return "int";
    case TypeKind::Key:
      return "key";
    case TypeKind::KeyList:
      return "kl";
    case TypeKind::Node:
      return "node";
    case TypeKind::Future:
      return "future[" + to_string(*t.result) + "]";
    case TypeKind::Arrow: {
      std::string lhs = to_string(*t.param);
      if (t.param->kind == TypeKind::Arrow) lhs = "(" + lhs + ")";
      return lhs + (t.effect == Emittability::T ? " ~> " : " -> ") + to_string(*t.result);
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------

std::size_t operation_arity(OpKind kind) {
  switch (kind) {
    case OpKind::Add:
      return 1;
    case OpKind::Map:
      return 2;
    case OpKind::Fold:
      return 3;
  }
  return 0;
}

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::Add:
      return "add";
    case OpKind::Map:
      return "map";
    case OpKind::Fold:
      return "fold";
  }
  return "?";
}

namespace {

std::shared_ptr<Expr> fresh(ExprKind kind, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->loc = loc;
  return e;
}

}  // namespace

ExprPtr int_lit(std::int64_t n, SourceLoc loc) {
  auto e = fresh(ExprKind::Int, loc);
  e->number = n;
  return e;
}

ExprPtr key_lit(Key k, SourceLoc loc) {
  auto e = fresh(ExprKind::Key, loc);
  e->key = std::move(k);
  return e;
}

ExprPtr label_lit(Label l, SourceLoc loc) {
  auto e = fresh(ExprKind::Label, loc);
  e->label = l;
  return e;
}

ExprPtr var(std::string name, SourceLoc loc) {
  auto e = fresh(ExprKind::Var, loc);
  e->name = std::move(name);
  return e;
}

ExprPtr lambda(std::string param, TypePtr type, ExprPtr body, bool commutative, SourceLoc loc) {
  auto e = fresh(ExprKind::Lambda, loc);
  e->name = std::move(param);
  e->param_type = std::move(type);
  e->commutative = commutative;
  e->kids = {std::move(body)};
  return e;
}

ExprPtr app(ExprPtr fn, ExprPtr arg, SourceLoc loc) {
  auto e = fresh(ExprKind::App, loc);
  e->kids = {std::move(fn), std::move(arg)};
  return e;
}

ExprPtr fix(ExprPtr body, SourceLoc loc) {
  auto e = fresh(ExprKind::Fix, loc);
  e->kids = {std::move(body)};
  return e;
}

ExprPtr key_list(std::vector<ExprPtr> elems, SourceLoc loc) {
  auto e = fresh(ExprKind::KeyList, loc);
  e->kids = std::move(elems);
  return e;
}

ExprPtr key_list_of(const std::vector<Key>& keys) {
  std::vector<ExprPtr> elems;
  elems.reserve(keys.size());
  for (const auto& k : keys) elems.push_back(key_lit(k));
  return key_list(std::move(elems));
}

ExprPtr node(ExprPtr key, ExprPtr payload, ExprPtr adjacency, SourceLoc loc) {
  auto e = fresh(ExprKind::Node, loc);
  e->kids = {std::move(key), std::move(payload), std::move(adjacency)};
  return e;
}

ExprPtr proj(int index, ExprPtr inner, SourceLoc loc) {
  if (index < 1 || index > 3) throw std::invalid_argument("projection index must be 1, 2 or 3");
  auto e = fresh(ExprKind::Proj, loc);
  e->number = index;
  e->kids = {std::move(inner)};
  return e;
}

ExprPtr concat(ExprPtr a, ExprPtr b, SourceLoc loc) {
  auto e = fresh(ExprKind::Concat, loc);
  e->kids = {std::move(a), std::move(b)};
  return e;
}

ExprPtr subtract(ExprPtr a, ExprPtr b, SourceLoc loc) {
  auto e = fresh(ExprKind::Subtract, loc);
  e->kids = {std::move(a), std::move(b)};
  return e;
}

ExprPtr emit(const Operation& op, SourceLoc loc) {
  if (op.args.size() != operation_arity(op.kind))
    throw std::invalid_argument(std::string("wrong arity for ") + op_name(op.kind));
  auto e = fresh(ExprKind::Emit, loc);
  e->op = op.kind;
  e->kids = op.args;
  return e;
}

ExprPtr claim(ExprPtr inner, SourceLoc loc) {
  auto e = fresh(ExprKind::Claim, loc);
  e->kids = {std::move(inner)};
  return e;
}

ExprPtr arith(ArithOp op, ExprPtr a, ExprPtr b, SourceLoc loc) {
  auto e = fresh(ExprKind::Arith, loc);
  e->arith = op;
  e->kids = {std::move(a), std::move(b)};
  return e;
}

ExprPtr cond(ExprPtr scrutinee, ExprPtr if_zero, ExprPtr otherwise, SourceLoc loc) {
  auto e = fresh(ExprKind::Cond, loc);
  e->kids = {std::move(scrutinee), std::move(if_zero), std::move(otherwise)};
  return e;
}

ExprPtr len(ExprPtr inner, SourceLoc loc) {
  auto e = fresh(ExprKind::Len, loc);
  e->kids = {std::move(inner)};
  return e;
}

ExprPtr with_kid(const ExprPtr& e, std::size_t index, ExprPtr kid) {
  auto copy = std::make_shared<Expr>(*e);
  copy->kids.at(index) = std::move(kid);
  return copy;
}

Operation operation_of(const Expr& emit_expr) {
  if (emit_expr.kind != ExprKind::Emit) throw std::invalid_argument("not an emit expression");
  return Operation{emit_expr.op, emit_expr.kids};
}

// ---------------------------------------------------------------------------

bool is_key_list_value(const Expr& e) {
  if (e.kind != ExprKind::KeyList) return false;
  return std::all_of(e.kids.begin(), e.kids.end(),
                     [](const ExprPtr& k) { return k->kind == ExprKind::Key; });
}

bool is_node_value(const Expr& e) {
  return e.kind == ExprKind::Node && e.kids[0]->kind == ExprKind::Key &&
         e.kids[1]->kind == ExprKind::Int && is_key_list_value(*e.kids[2]);
}

bool is_value(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Int:
    case ExprKind::Key:
    case ExprKind::Label:
    case ExprKind::Lambda:
      return true;
    case ExprKind::KeyList:
      return is_key_list_value(e);
    case ExprKind::Node:
      return is_node_value(e);
    default:
      return false;
  }
}

bool is_emittable(const Operation& op) {
  switch (op.kind) {
    case OpKind::Add:
      return is_value(*op.add_arg());
    case OpKind::Map:
      return op.function()->kind == ExprKind::Lambda && is_key_list_value(*op.target());
    case OpKind::Fold:
      return op.function()->kind == ExprKind::Lambda && is_value(*op.base()) &&
             is_key_list_value(*op.target());
  }
  return false;
}

std::vector<Key> key_list_keys(const Expr& e) {
  if (!is_key_list_value(e)) throw std::invalid_argument("not a key-list value");
  std::vector<Key> out;
  out.reserve(e.kids.size());
  for (const auto& k : e.kids) out.push_back(k->key);
  return out;
}

std::vector<Key> kl_subtract(const std::vector<Key>& ks, const std::vector<Key>& remove) {
  std::vector<Key> out;
  for (const auto& k : ks)
    if (std::find(remove.begin(), remove.end(), k) == remove.end()) out.push_back(k);
  return out;
}

bool mentions_label(const Expr& e, Label l) {
  if (e.kind == ExprKind::Label) return e.label == l;
  return std::any_of(e.kids.begin(), e.kids.end(),
                     [&](const ExprPtr& k) { return mentions_label(*k, l); });
}

bool mentions_label(const Operation& op, Label l) {
  return std::any_of(op.args.begin(), op.args.end(),
                     [&](const ExprPtr& a) { return mentions_label(*a, l); });
}

}  // namespace cg
