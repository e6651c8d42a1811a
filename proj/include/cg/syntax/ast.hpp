#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cg {

struct SourceLoc {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
  bool operator==(const SourceLoc&) const = default;
};

// A node key. Literal keys are written by the programmer (`#amy`); generated
// keys come from the Add rule and are numbered by the configuration.
class Key {
 public:
  Key() = default;
  static Key literal(std::string name);
  static Key generated(std::uint64_t id);

  bool is_generated() const { return generated_; }
  const std::string& name() const { return name_; }
  std::uint64_t id() const { return id_; }

  // Surface spelling: `#name` or `#$id`.
  std::string spelling() const;

  auto operator<=>(const Key&) const = default;

 private:
  bool generated_ = false;
  std::uint64_t id_ = 0;
  std::string name_;
};

struct Label {
  std::uint64_t id = 0;
  auto operator<=>(const Label&) const = default;
  std::string spelling() const { return "@" + std::to_string(id); }
};

struct LabelHash {
  std::size_t operator()(const Label& l) const noexcept { return std::hash<std::uint64_t>{}(l.id); }
};

// ---------------------------------------------------------------------------
// Types

enum class Emittability : bool { F = false, T = true };

inline Emittability operator|(Emittability a, Emittability b) {
  return static_cast<Emittability>(static_cast<bool>(a) || static_cast<bool>(b));
}

enum class TypeKind : std::uint8_t { Int, Key, KeyList, Node, Future, Arrow };

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  TypeKind kind = TypeKind::Int;
  TypePtr param;   // Arrow domain
  TypePtr result;  // Arrow codomain, Future payload
  Emittability effect = Emittability::F;
  // For arrows with effect T: where the latent emission was found. Carried for
  // diagnostics only and ignored by equality.
  SourceLoc emit_site;

  static TypePtr int_type();
  static TypePtr key_type();
  static TypePtr key_list_type();
  static TypePtr node_type();
  static TypePtr future(TypePtr inner);
  static TypePtr arrow(TypePtr from, Emittability eff, TypePtr to, SourceLoc site = {});
};

bool operator==(const Type& a, const Type& b);
bool same_type(const TypePtr& a, const TypePtr& b);
std::string to_string(const Type& t);

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind : std::uint8_t {
  Int,
  Key,
  Label,
  Lambda,
  Var,
  App,
  Fix,
  KeyList,
  Node,
  Proj,
  Concat,
  Subtract,
  Emit,
  Claim,
  Arith,
  Cond,
  Len,
};

enum class OpKind : std::uint8_t { Add, Map, Fold };
enum class ArithOp : std::uint8_t { Add, Sub, Mul, Div };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// One flat node type for the whole term language; `kind` selects which
// fields are meaningful. Children live in `kids` in source order:
//   App {fn, arg}        Fix {body}           KeyList {elems...}
//   Node {key, payload, adjacency}            Proj {e} (number = 1..3)
//   Concat/Subtract {lhs, rhs}                Emit {operation args}
//   Claim {e}            Arith {lhs, rhs}     Cond {scrutinee, zero, nonzero}
//   Len {e}              Lambda {body}
struct Expr {
  ExprKind kind = ExprKind::Int;
  SourceLoc loc;
  std::int64_t number = 0;
  Key key;
  Label label;
  std::string name;
  TypePtr param_type;
  bool commutative = false;
  OpKind op = OpKind::Add;
  ArithOp arith = ArithOp::Add;
  std::vector<ExprPtr> kids;
};

struct Operation {
  OpKind kind = OpKind::Add;
  std::vector<ExprPtr> args;  // add {n}; map {f, K}; fold {f, base, K}

  const ExprPtr& add_arg() const { return args.at(0); }
  const ExprPtr& function() const { return args.at(0); }
  const ExprPtr& base() const { return args.at(1); }
  const ExprPtr& target() const { return args.back(); }
};

std::size_t operation_arity(OpKind kind);
const char* op_name(OpKind kind);

// Constructors. Locations default to unknown.
ExprPtr int_lit(std::int64_t n, SourceLoc loc = {});
ExprPtr key_lit(Key k, SourceLoc loc = {});
ExprPtr label_lit(Label l, SourceLoc loc = {});
ExprPtr var(std::string name, SourceLoc loc = {});
ExprPtr lambda(std::string param, TypePtr type, ExprPtr body, bool commutative = false,
               SourceLoc loc = {});
ExprPtr app(ExprPtr fn, ExprPtr arg, SourceLoc loc = {});
ExprPtr fix(ExprPtr body, SourceLoc loc = {});
ExprPtr key_list(std::vector<ExprPtr> elems, SourceLoc loc = {});
ExprPtr key_list_of(const std::vector<Key>& keys);
ExprPtr node(ExprPtr key, ExprPtr payload, ExprPtr adjacency, SourceLoc loc = {});
ExprPtr proj(int index, ExprPtr e, SourceLoc loc = {});
ExprPtr concat(ExprPtr a, ExprPtr b, SourceLoc loc = {});
ExprPtr subtract(ExprPtr a, ExprPtr b, SourceLoc loc = {});
ExprPtr emit(const Operation& op, SourceLoc loc = {});
ExprPtr claim(ExprPtr e, SourceLoc loc = {});
ExprPtr arith(ArithOp op, ExprPtr a, ExprPtr b, SourceLoc loc = {});
ExprPtr cond(ExprPtr scrutinee, ExprPtr if_zero, ExprPtr otherwise, SourceLoc loc = {});
ExprPtr len(ExprPtr e, SourceLoc loc = {});

// Copy of `e` with one child replaced.
ExprPtr with_kid(const ExprPtr& e, std::size_t index, ExprPtr kid);

Operation operation_of(const Expr& emit_expr);

// Value forms.
bool is_value(const Expr& e);
bool is_key_list_value(const Expr& e);
bool is_node_value(const Expr& e);
bool is_emittable(const Operation& op);

// Keys of a key-list value, in order.
std::vector<Key> key_list_keys(const Expr& e);

// Every occurrence of every element of `remove` is dropped from `ks`.
std::vector<Key> kl_subtract(const std::vector<Key>& ks, const std::vector<Key>& remove);

// Whether `e` mentions label `l` anywhere.
bool mentions_label(const Expr& e, Label l);
bool mentions_label(const Operation& op, Label l);

}  // namespace cg
