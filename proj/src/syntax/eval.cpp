#include "cg/syntax/eval.hpp"

#include <limits>
#include <set>
#include <stdexcept>

#include "cg/syntax/terms.hpp"

namespace cg {

const char* to_string(ExprRule rule) {
  switch (rule) {
    case ExprRule::Emit:
      return "Emit";
    case ExprRule::Claim:
      return "Claim";
    case ExprRule::Beta:
      return "Beta";
    case ExprRule::Node:
      return "Node";
    case ExprRule::KSA:
      return "KSA";
    case ExprRule::KSS:
      return "KSS";
    case ExprRule::Arith:
      return "Arith";
    case ExprRule::Cond:
      return "Cond";
    case ExprRule::Len:
      return "Len";
    case ExprRule::Fix:
      return "Fix";
  }
  return "?";
}

std::int64_t apply_arith(ArithOp op, std::int64_t a, std::int64_t b) {
  // Wrap on overflow instead of invoking undefined behaviour.
  auto ua = static_cast<std::uint64_t>(a);
  auto ub = static_cast<std::uint64_t>(b);
  switch (op) {
    case ArithOp::Add:
      return static_cast<std::int64_t>(ua + ub);
    case ArithOp::Sub:
      return static_cast<std::int64_t>(ua - ub);
    case ArithOp::Mul:
      return static_cast<std::int64_t>(ua * ub);
    case ArithOp::Div:
      if (b == 0) return 0;
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return a;
      return a / b;
  }
  return 0;
}

namespace {

class RedexFinder {
 public:
  RedexFinder(const ClaimLookup& lookup, Path& path) : lookup_(lookup), path_(path) {}

  std::optional<ExprRule> visit(const Expr& e) {
    if (is_value(e)) return std::nullopt;
    const auto& k = e.kids;
    switch (e.kind) {
      case ExprKind::App:
        if (!is_value(*k[0])) return into(e, 0);
        if (!is_value(*k[1])) return into(e, 1);
        if (k[0]->kind == ExprKind::Lambda) return ExprRule::Beta;
        return std::nullopt;
      case ExprKind::Fix:
        if (!is_value(*k[0])) return into(e, 0);
        if (k[0]->kind == ExprKind::Lambda) return ExprRule::Fix;
        return std::nullopt;
      case ExprKind::KeyList:
        for (std::size_t i = 0; i < k.size(); ++i) {
          if (k[i]->kind == ExprKind::Key) continue;
          if (is_value(*k[i])) return std::nullopt;
          return into(e, i);
        }
        return std::nullopt;
      case ExprKind::Node:
        if (!is_value(*k[0])) return into(e, 0);
        if (k[0]->kind != ExprKind::Key) return std::nullopt;
        if (!is_value(*k[1])) return into(e, 1);
        if (k[1]->kind != ExprKind::Int) return std::nullopt;
        if (!is_value(*k[2])) return into(e, 2);
        return std::nullopt;
      case ExprKind::Proj:
        if (!is_value(*k[0])) return into(e, 0);
        if (is_node_value(*k[0])) return ExprRule::Node;
        return std::nullopt;
      case ExprKind::Concat:
      case ExprKind::Subtract:
        if (!is_value(*k[0])) return into(e, 0);
        if (!is_key_list_value(*k[0])) return std::nullopt;
        if (!is_value(*k[1])) return into(e, 1);
        if (!is_key_list_value(*k[1])) return std::nullopt;
        return e.kind == ExprKind::Concat ? ExprRule::KSA : ExprRule::KSS;
      case ExprKind::Emit:
        return visit_emit(e);
      case ExprKind::Claim:
        if (!is_value(*k[0])) return into(e, 0);
        if (k[0]->kind == ExprKind::Label && lookup_(k[0]->label)) return ExprRule::Claim;
        return std::nullopt;
      case ExprKind::Arith:
        if (!is_value(*k[0])) return into(e, 0);
        if (k[0]->kind != ExprKind::Int) return std::nullopt;
        if (!is_value(*k[1])) return into(e, 1);
        if (k[1]->kind != ExprKind::Int) return std::nullopt;
        return ExprRule::Arith;
      case ExprKind::Cond:
        if (!is_value(*k[0])) return into(e, 0);
        if (k[0]->kind == ExprKind::Int) return ExprRule::Cond;
        return std::nullopt;
      case ExprKind::Len:
        if (!is_value(*k[0])) return into(e, 0);
        if (is_key_list_value(*k[0])) return ExprRule::Len;
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

 private:
  std::optional<ExprRule> visit_emit(const Expr& e) {
    const auto& k = e.kids;
    if (e.op == OpKind::Add) {
      if (!is_value(*k[0])) return into(e, 0);
      return ExprRule::Emit;
    }
    if (!is_value(*k[0])) return into(e, 0);
    if (k[0]->kind != ExprKind::Lambda) return std::nullopt;
    for (std::size_t i = 1; i < k.size(); ++i)
      if (!is_value(*k[i])) return into(e, i);
    if (!is_key_list_value(*k.back())) return std::nullopt;
    return ExprRule::Emit;
  }

  std::optional<ExprRule> into(const Expr& e, std::size_t i) {
    path_.push_back(static_cast<std::uint32_t>(i));
    auto r = visit(*e.kids[i]);
    if (!r) path_.pop_back();
    return r;
  }

  const ClaimLookup& lookup_;
  Path& path_;
};

}  // namespace

std::optional<ExprRedex> find_redex(const ExprPtr& e, const ClaimLookup& lookup) {
  Path path;
  RedexFinder finder(lookup, path);
  auto rule = finder.visit(*e);
  if (!rule) return std::nullopt;
  return ExprRedex{*rule, std::move(path)};
}

const ExprPtr& subterm_at(const ExprPtr& e, const Path& path) {
  const ExprPtr* cur = &e;
  for (auto i : path) cur = &(*cur)->kids.at(i);
  return *cur;
}

ExprPtr replace_at(const ExprPtr& e, const Path& path, std::size_t depth, ExprPtr replacement) {
  if (depth == path.size()) return replacement;
  auto i = path[depth];
  return with_kid(e, i, replace_at(e->kids.at(i), path, depth + 1, std::move(replacement)));
}

ExprPtr contract(const ExprPtr& redex, ExprRule rule, const ClaimLookup& lookup) {
  const auto& k = redex->kids;
  switch (rule) {
    case ExprRule::Beta:
      return substitute(k[0]->kids[0], k[1], k[0]->name);
    case ExprRule::Fix: {
      const auto& fn = k[0];
      const auto& type = fn->param_type;
      if (type->kind == TypeKind::Arrow) {
        // Unfold once behind a lambda so the recursive reference is a value.
        std::set<std::string> avoid;
        all_names(*fn, avoid);
        std::string y = fresh_name("$y", avoid);
        auto unfolded = lambda(y, type->param, app(redex, var(y)));
        return substitute(fn->kids[0], unfolded, fn->name);
      }
      return substitute(fn->kids[0], redex, fn->name);
    }
    case ExprRule::Node:
      return k[0]->kids.at(static_cast<std::size_t>(redex->number - 1));
    case ExprRule::KSA: {
      auto elems = k[0]->kids;
      elems.insert(elems.end(), k[1]->kids.begin(), k[1]->kids.end());
      return key_list(std::move(elems));
    }
    case ExprRule::KSS:
      return key_list_of(kl_subtract(key_list_keys(*k[0]), key_list_keys(*k[1])));
    case ExprRule::Arith:
      return int_lit(apply_arith(redex->arith, k[0]->number, k[1]->number));
    case ExprRule::Cond:
      return k[0]->number == 0 ? k[1] : k[2];
    case ExprRule::Len:
      return int_lit(static_cast<std::int64_t>(k[0]->kids.size()));
    case ExprRule::Claim: {
      auto v = lookup(k[0]->label);
      if (!v) throw std::logic_error("claim contracted before its result exists");
      return v;
    }
    case ExprRule::Emit:
      break;
  }
  throw std::logic_error("contract called on an emit redex");
}

std::optional<ExprPtr> evaluate(const ExprPtr& e, const ClaimLookup& lookup, std::size_t fuel) {
  ExprPtr cur = e;
  for (std::size_t step = 0; step <= fuel; ++step) {
    if (is_value(*cur)) return cur;
    auto r = find_redex(cur, lookup);
    if (!r || r->rule == ExprRule::Emit) return std::nullopt;
    cur = replace_at(cur, r->path, contract(subterm_at(cur, r->path), r->rule, lookup));
  }
  return std::nullopt;
}

}  // namespace cg
