#include "cg/types/typecheck.hpp"

#include <set>

#include "cg/runtime/config.hpp"
#include "cg/syntax/printer.hpp"

namespace cg {

TypeError::TypeError(std::string rule, SourceLoc loc, const std::string& message,
                     bool phase_distinction)
    : std::runtime_error(rule + ": " + message),
      rule_(std::move(rule)),
      loc_(loc),
      detail_(message),
      phase_distinction_(phase_distinction) {}

void TypingEnv::bind(const std::string& name, TypePtr type) {
  names_.emplace_back(name, std::move(type));
}

void TypingEnv::unbind_name() { names_.pop_back(); }

void TypingEnv::bind(Label label, TypePtr type) { labels_[label] = std::move(type); }

TypePtr TypingEnv::lookup(const std::string& name) const {
  for (auto it = names_.rbegin(); it != names_.rend(); ++it)
    if (it->first == name) return it->second;
  return nullptr;
}

TypePtr TypingEnv::lookup(Label label) const {
  auto it = labels_.find(label);
  return it == labels_.end() ? nullptr : it->second;
}

TypePtr operation_result_type(OpKind kind) {
  switch (kind) {
    case OpKind::Add:
      return Type::key_type();
    case OpKind::Map:
      return Type::int_type();
    case OpKind::Fold:
      return Type::node_type();
  }
  return nullptr;
}

namespace {

std::string show(const TypePtr& t) { return to_string(*t); }

class Checker {
 public:
  explicit Checker(const TypingEnv& env) : env_(env) {}

  TypePtr lookup(const std::string& name) const {
    for (auto it = locals_.rbegin(); it != locals_.rend(); ++it)
      if (it->first == name) return it->second;
    return env_.lookup(name);
  }

  Typed check(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::Int:
        return {Type::int_type()};
      case ExprKind::Key:
        return {Type::key_type()};
      case ExprKind::Label: {
        auto t = env_.lookup(e->label);
        if (!t) throw TypeError("T-Label", e->loc, "unbound label " + e->label.spelling());
        return {t};
      }
      case ExprKind::Var: {
        auto t = lookup(e->name);
        if (!t) throw TypeError("T-Var", e->loc, "unbound name '" + e->name + "'");
        return {t};
      }
      case ExprKind::Lambda: {
        locals_.emplace_back(e->name, e->param_type);
        Typed body;
        try {
          body = check(e->kids[0]);
        } catch (...) {
          locals_.pop_back();
          throw;
        }
        locals_.pop_back();
        return {Type::arrow(e->param_type, body.effect, body.type, body.emit_site)};
      }
      case ExprKind::App:
        return check_app(e);
      case ExprKind::Fix: {
        auto f = check(e->kids[0]);
        if (f.type->kind != TypeKind::Arrow || !same_type(f.type->param, f.type->result))
          throw TypeError("T-Fix", e->loc, "fix expects a function of type t -> t, got " +
                                               show(f.type));
        Typed out{f.type->result, f.effect | f.type->effect, f.emit_site};
        if (!out.emit_site.known()) out.emit_site = f.type->emit_site;
        return out;
      }
      case ExprKind::KeyList: {
        Typed out{Type::key_list_type()};
        for (const auto& k : e->kids) join(out, expect(k, Type::key_type(), "T-KL"));
        return out;
      }
      case ExprKind::Node: {
        Typed out{Type::node_type()};
        join(out, expect(e->kids[0], Type::key_type(), "T-Node"));
        join(out, expect(e->kids[1], Type::int_type(), "T-Node"));
        join(out, expect(e->kids[2], Type::key_list_type(), "T-Node"));
        return out;
      }
      case ExprKind::Proj: {
        auto inner = expect(e->kids[0], Type::node_type(), "T-ENode");
        static const TypePtr results[] = {Type::key_type(), Type::int_type(),
                                          Type::key_list_type()};
        inner.type = results[e->number - 1];
        return inner;
      }
      case ExprKind::Concat:
      case ExprKind::Subtract: {
        const char* rule = e->kind == ExprKind::Concat ? "T-KSA" : "T-KSS";
        Typed out{Type::key_list_type()};
        join(out, expect(e->kids[0], Type::key_list_type(), rule));
        join(out, expect(e->kids[1], Type::key_list_type(), rule));
        return out;
      }
      case ExprKind::Emit: {
        auto result = check_operation(operation_of(*e), e->loc, false);
        Typed out{result, Emittability::T, e->loc};
        return out;
      }
      case ExprKind::Claim: {
        auto inner = check(e->kids[0]);
        if (inner.type->kind != TypeKind::Future)
          throw TypeError("T-Claim", e->loc, "claim expects a future, got " + show(inner.type));
        inner.type = inner.type->result;
        return inner;
      }
      case ExprKind::Arith: {
        Typed out{Type::int_type()};
        join(out, expect(e->kids[0], Type::int_type(), "T-Arith"));
        join(out, expect(e->kids[1], Type::int_type(), "T-Arith"));
        return out;
      }
      case ExprKind::Cond: {
        auto out = expect(e->kids[0], Type::int_type(), "T-Cond");
        auto a = check(e->kids[1]);
        auto b = check(e->kids[2]);
        if (!same_type(a.type, b.type))
          throw TypeError("T-Cond", e->loc, "branches disagree: " + show(a.type) + " vs " +
                                                show(b.type));
        out.type = a.type;
        join(out, a);
        join(out, b);
        return out;
      }
      case ExprKind::Len: {
        auto out = expect(e->kids[0], Type::key_list_type(), "T-Len");
        out.type = Type::int_type();
        return out;
      }
    }
    throw TypeError("T-?", e->loc, "unknown expression form");
  }

  // Types the arguments of an operation. With `at_f`, every argument must be
  // free of emissions (operations already in a stream).
  TypePtr check_operation(const Operation& op, SourceLoc loc, bool at_f) {
    auto node_t = Type::node_type();
    auto arg = [&](std::size_t i, const TypePtr& want, const char* rule) {
      auto t = expect(op.args[i], want, rule);
      if (at_f && t.effect == Emittability::T)
        throw TypeError(rule, t.emit_site.known() ? t.emit_site : loc,
                        "operation argument may emit", true);
      return t;
    };
    switch (op.kind) {
      case OpKind::Add:
        arg(0, Type::int_type(), "T-Add");
        break;
      case OpKind::Map: {
        auto f = check_function(op.args[0], 1, "T-Map", loc);
        if (at_f && f.effect == Emittability::T)
          throw TypeError("T-Map", loc, "operation argument may emit", true);
        arg(1, Type::key_list_type(), "T-Map");
        break;
      }
      case OpKind::Fold: {
        auto f = check_function(op.args[0], 2, "T-Fold", loc);
        if (at_f && f.effect == Emittability::T)
          throw TypeError("T-Fold", loc, "operation argument may emit", true);
        arg(1, node_t, "T-Fold");
        arg(2, Type::key_list_type(), "T-Fold");
        break;
      }
    }
    return Type::future(operation_result_type(op.kind));
  }

 private:
  // node ->F node (arity 1) or node ->F node ->F node (arity 2). A latent
  // emission in the function is a phase-distinction violation.
  Typed check_function(const ExprPtr& f, int arity, const char* rule, SourceLoc op_loc) {
    auto t = check(f);
    const char* what = arity == 1 ? "mapping" : "folding";
    std::string expected = arity == 1 ? "node -> node" : "node -> node -> node";
    TypePtr cur = t.type;
    for (int i = 0; i < arity; ++i) {
      if (cur->kind != TypeKind::Arrow || cur->param->kind != TypeKind::Node)
        throw TypeError(rule, f->loc, std::string(what) + " function must have type " + expected +
                                          ", got " + show(t.type));
      if (cur->effect == Emittability::T) {
        SourceLoc site = cur->emit_site.known() ? cur->emit_site : op_loc;
        throw TypeError(rule, site,
                        std::string("phase distinction violated: the ") + what +
                            " function may emit an operation at the backend (" +
                            std::string(op_name(arity == 1 ? OpKind::Map : OpKind::Fold)) +
                            " at " + std::to_string(op_loc.line) + ":" +
                            std::to_string(op_loc.column) + ")",
                        true);
      }
      cur = cur->result;
    }
    if (cur->kind != TypeKind::Node)
      throw TypeError(rule, f->loc, std::string(what) + " function must have type " + expected +
                                        ", got " + show(t.type));
    return t;
  }

  Typed check_app(const ExprPtr& e) {
    auto f = check(e->kids[0]);
    auto a = check(e->kids[1]);
    if (f.type->kind != TypeKind::Arrow)
      throw TypeError("T-App", e->loc, "applying a non-function of type " + show(f.type));
    if (!same_type(f.type->param, a.type))
      throw TypeError("T-App", e->kids[1]->loc,
                      "argument has type " + show(a.type) + " but the function expects " +
                          show(f.type->param));
    Typed out{f.type->result};
    join(out, f);
    join(out, a);
    if (f.type->effect == Emittability::T) {
      if (!out.emit_site.known()) out.emit_site = f.type->emit_site.known() ? f.type->emit_site
                                                                             : e->loc;
      out.effect = Emittability::T;
    }
    return out;
  }

  Typed expect(const ExprPtr& e, const TypePtr& want, const char* rule) {
    auto t = check(e);
    if (!same_type(t.type, want))
      throw TypeError(rule, e->loc, "expected " + show(want) + ", got " + show(t.type));
    return t;
  }

  static void join(Typed& into, const Typed& other) {
    if (other.effect == Emittability::T && into.effect == Emittability::F)
      into.emit_site = other.emit_site;
    into.effect = into.effect | other.effect;
  }

  const TypingEnv& env_;
  std::vector<std::pair<std::string, TypePtr>> locals_;
};

}  // namespace

Typed type_of_expr(const TypingEnv& env, const ExprPtr& e) { return Checker(env).check(e); }

TypePtr type_of_stream_operation(const TypingEnv& env, const Operation& op) {
  return Checker(env).check_operation(op, op.args.front()->loc, true);
}

TypingEnv cached_env_insert(TypingEnv cache, Label label, const Operation& op) {
  auto t = type_of_stream_operation(cache, op);
  cache.bind(label, t);
  return cache;
}

namespace {

void type_stream(TypingEnv& env, const OperationStream& stream) {
  for (const auto& unit : stream)
    for (const auto& lo : unit) env.bind(lo.label, type_of_stream_operation(env, lo.op));
}

}  // namespace

Typed type_of_config(const TypingEnv& base, const Configuration& config) {
  TypingEnv env = base;

  std::set<Key> keys;
  for (const auto& s : config.backend) {
    if (s.node->kind != ExprKind::Node)
      throw TypeError("RT-Station", s.node->loc, "station holds a non-node expression");
    if (s.key()->kind == ExprKind::Key && !keys.insert(s.key()->key).second)
      throw TypeError("RT-Configuration", s.key()->loc,
                      "duplicate key " + s.key()->key.spelling() + " in the graph");
  }

  std::set<Label> labels;
  auto claim_label = [&](Label l) {
    if (!labels.insert(l).second)
      throw TypeError("RT-Configuration", {}, "duplicate label " + l.spelling());
  };
  for (const auto& [l, entry] : config.store) claim_label(l);
  for (const auto& unit : config.top)
    for (const auto& lo : unit) claim_label(lo.label);
  for (const auto& s : config.backend)
    for (const auto& unit : s.streamlet)
      for (const auto& lo : unit) claim_label(lo.label);

  for (const auto& [l, entry] : config.store) {
    if (!is_value(*entry.value))
      throw TypeError("RT-Store", entry.value->loc, "store entry " + l.spelling() +
                                                        " holds a non-value");
    auto t = type_of_expr(TypingEnv{}, entry.value);
    env.bind(l, Type::future(t.type));
  }

  // Relay order: the last station holds the oldest operations.
  for (auto it = config.backend.rbegin(); it != config.backend.rend(); ++it) {
    auto t = type_of_expr(env, it->node);
    if (t.effect == Emittability::T)
      throw TypeError("RT-Station", t.emit_site, "station load may emit", true);
    type_stream(env, it->streamlet);
  }
  type_stream(env, config.top);
  return type_of_expr(env, config.frontend);
}

}  // namespace cg
