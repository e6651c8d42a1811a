#include "cg/syntax/normalize.hpp"

#include <algorithm>
#include <optional>

#include "cg/syntax/eval.hpp"
#include "cg/syntax/terms.hpp"

namespace cg {

bool is_pure(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Var:
    case ExprKind::Int:
    case ExprKind::Key:
    case ExprKind::Label:
    case ExprKind::Lambda:
      return true;
    case ExprKind::App:
    case ExprKind::Fix:
    case ExprKind::Emit:
    case ExprKind::Claim:
      return false;
    default:
      return std::all_of(e.kids.begin(), e.kids.end(),
                         [](const ExprPtr& k) { return is_pure(*k); });
  }
}

namespace {

bool all_pure(const std::vector<ExprPtr>& xs) {
  return std::all_of(xs.begin(), xs.end(), [](const ExprPtr& k) { return is_pure(*k); });
}

class Normalizer {
 public:
  explicit Normalizer(const NormalizeOptions& options) : options_(options), fuel_(options.fuel) {}

  ExprPtr run(const ExprPtr& e) { return norm(e); }
  bool complete() const { return complete_; }

 private:
  ExprPtr norm(const ExprPtr& e) {
    if (!complete_) return e;
    ExprPtr cur = e;
    std::shared_ptr<Expr> copy;
    for (std::size_t i = 0; i < e->kids.size(); ++i) {
      auto kid = norm(e->kids[i]);
      if (kid != e->kids[i]) {
        if (!copy) copy = std::make_shared<Expr>(*e);
        copy->kids[i] = std::move(kid);
      }
    }
    if (copy) cur = copy;
    auto next = head_step(cur);
    if (!next) return cur;
    if (fuel_ == 0) {
      complete_ = false;
      return cur;
    }
    --fuel_;
    return norm(*next);
  }

  std::optional<ExprPtr> head_step(const ExprPtr& e) const {
    const auto& k = e->kids;
    switch (e->kind) {
      case ExprKind::App:
        if (k[0]->kind == ExprKind::Lambda && is_pure(*k[1]))
          return substitute(k[0]->kids[0], k[1], k[0]->name);
        return std::nullopt;
      case ExprKind::Proj: {
        const auto& n = k[0];
        if (n->kind != ExprKind::Node) return std::nullopt;
        std::size_t keep = static_cast<std::size_t>(e->number - 1);
        for (std::size_t i = 0; i < 3; ++i)
          if (i != keep && !is_pure(*n->kids[i])) return std::nullopt;
        return n->kids[keep];
      }
      case ExprKind::Concat:
        if (k[0]->kind == ExprKind::KeyList && k[1]->kind == ExprKind::KeyList &&
            all_pure(k[0]->kids) && all_pure(k[1]->kids)) {
          auto elems = k[0]->kids;
          elems.insert(elems.end(), k[1]->kids.begin(), k[1]->kids.end());
          return key_list(std::move(elems));
        }
        return std::nullopt;
      case ExprKind::Subtract:
        if (is_key_list_value(*k[0]) && is_key_list_value(*k[1]))
          return key_list_of(kl_subtract(key_list_keys(*k[0]), key_list_keys(*k[1])));
        if (options_.assume_set_adjacency && k[0]->kind == ExprKind::Concat &&
            is_pure(*k[0]) && is_pure(*k[1]) && alpha_equal(*k[0]->kids[1], *k[1]))
          return k[0]->kids[0];
        return std::nullopt;
      case ExprKind::Arith:
        if (k[0]->kind == ExprKind::Int && k[1]->kind == ExprKind::Int)
          return int_lit(apply_arith(e->arith, k[0]->number, k[1]->number));
        return std::nullopt;
      case ExprKind::Cond:
        if (k[0]->kind == ExprKind::Int) return k[0]->number == 0 ? k[1] : k[2];
        return std::nullopt;
      case ExprKind::Len:
        if (k[0]->kind == ExprKind::KeyList && all_pure(k[0]->kids))
          return int_lit(static_cast<std::int64_t>(k[0]->kids.size()));
        return std::nullopt;
      case ExprKind::Node: {
        // N<pi1 e; pi2 e; pi3 e> is e itself.
        for (std::size_t i = 0; i < 3; ++i)
          if (k[i]->kind != ExprKind::Proj || k[i]->number != static_cast<std::int64_t>(i + 1))
            return std::nullopt;
        const auto& inner = k[0]->kids[0];
        if (!is_pure(*inner) || !alpha_equal(*inner, *k[1]->kids[0]) ||
            !alpha_equal(*inner, *k[2]->kids[0]))
          return std::nullopt;
        return inner;
      }
      case ExprKind::Lambda: {
        // Eta: \x. g x => g when g is a value not mentioning x.
        const auto& body = k[0];
        if (body->kind != ExprKind::App) return std::nullopt;
        const auto& fn = body->kids[0];
        const auto& arg = body->kids[1];
        if (arg->kind != ExprKind::Var || arg->name != e->name) return std::nullopt;
        if (fn->kind != ExprKind::Var && fn->kind != ExprKind::Lambda) return std::nullopt;
        if (free_vars(*fn).count(e->name)) return std::nullopt;
        return fn;
      }
      default:
        return std::nullopt;
    }
  }

  NormalizeOptions options_;
  std::size_t fuel_;
  bool complete_ = true;
};

}  // namespace

NormalForm normalize(const ExprPtr& e, const NormalizeOptions& options) {
  Normalizer n(options);
  auto term = n.run(e);
  return {term, n.complete()};
}

const char* to_string(Equivalence eq) {
  switch (eq) {
    case Equivalence::Equal:
      return "equal";
    case Equivalence::Distinct:
      return "distinct";
    case Equivalence::Unknown:
      return "unknown";
  }
  return "?";
}

Equivalence term_equiv(const ExprPtr& a, const ExprPtr& b, std::size_t fuel,
                       bool assume_set_adjacency) {
  NormalizeOptions options{fuel, assume_set_adjacency};
  auto na = normalize(a, options);
  auto nb = normalize(b, options);
  if (!na.complete || !nb.complete) return Equivalence::Unknown;
  return alpha_equal(*na.term, *nb.term) ? Equivalence::Equal : Equivalence::Distinct;
}

}  // namespace cg
