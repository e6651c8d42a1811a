#include "cg/syntax/terms.hpp"

#include <stdexcept>
#include <vector>

namespace cg {

namespace {

void free_vars_into(const Expr& e, std::vector<std::string>& bound, std::set<std::string>& out) {
  if (e.kind == ExprKind::Var) {
    for (auto it = bound.rbegin(); it != bound.rend(); ++it)
      if (*it == e.name) return;
    out.insert(e.name);
    return;
  }
  if (e.kind == ExprKind::Lambda) {
    bound.push_back(e.name);
    free_vars_into(*e.kids[0], bound, out);
    bound.pop_back();
    return;
  }
  for (const auto& k : e.kids) free_vars_into(*k, bound, out);
}

bool occurs_free(const Expr& e, const std::string& x) {
  if (e.kind == ExprKind::Var) return e.name == x;
  if (e.kind == ExprKind::Lambda) return e.name != x && occurs_free(*e.kids[0], x);
  for (const auto& k : e.kids)
    if (occurs_free(*k, x)) return true;
  return false;
}

ExprPtr rename_bound(const ExprPtr& lam, const std::string& to) {
  auto body = substitute(lam->kids[0], var(to, lam->loc), lam->name);
  return lambda(to, lam->param_type, body, lam->commutative, lam->loc);
}

ExprPtr subst(const ExprPtr& e, const ExprPtr& v, const std::string& x,
              const std::set<std::string>& v_free) {
  switch (e->kind) {
    case ExprKind::Var:
      return e->name == x ? v : e;
    case ExprKind::Int:
    case ExprKind::Key:
    case ExprKind::Label:
      return e;
    case ExprKind::Lambda: {
      if (e->name == x || !occurs_free(*e->kids[0], x)) return e;
      ExprPtr lam = e;
      if (v_free.count(e->name)) {
        std::set<std::string> avoid = v_free;
        all_names(*e, avoid);
        avoid.insert(x);
        lam = rename_bound(e, fresh_name(e->name + "_", avoid));
      }
      auto body = subst(lam->kids[0], v, x, v_free);
      if (body == lam->kids[0]) return lam;
      return with_kid(lam, 0, body);
    }
    default:
      break;
  }
  std::shared_ptr<Expr> copy;
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    auto kid = subst(e->kids[i], v, x, v_free);
    if (kid != e->kids[i]) {
      if (!copy) copy = std::make_shared<Expr>(*e);
      copy->kids[i] = std::move(kid);
    }
  }
  return copy ? ExprPtr(copy) : e;
}

struct AlphaScope {
  std::vector<std::string> left;
  std::vector<std::string> right;
};

// Index of the innermost binder for `name`, or -1 when free.
long binder_index(const std::vector<std::string>& binders, const std::string& name) {
  for (long i = static_cast<long>(binders.size()) - 1; i >= 0; --i)
    if (binders[static_cast<std::size_t>(i)] == name) return i;
  return -1;
}

bool alpha(const Expr& a, const Expr& b, AlphaScope& scope) {
  if (&a == &b && scope.left == scope.right) return true;
  if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
  switch (a.kind) {
    case ExprKind::Int:
      return a.number == b.number;
    case ExprKind::Key:
      return a.key == b.key;
    case ExprKind::Label:
      return a.label == b.label;
    case ExprKind::Var: {
      long ia = binder_index(scope.left, a.name);
      long ib = binder_index(scope.right, b.name);
      if (ia < 0 && ib < 0) return a.name == b.name;
      return ia == ib;
    }
    case ExprKind::Lambda: {
      if (!same_type(a.param_type, b.param_type)) return false;
      scope.left.push_back(a.name);
      scope.right.push_back(b.name);
      bool eq = alpha(*a.kids[0], *b.kids[0], scope);
      scope.left.pop_back();
      scope.right.pop_back();
      return eq;
    }
    case ExprKind::Proj:
      if (a.number != b.number) return false;
      break;
    case ExprKind::Emit:
      if (a.op != b.op) return false;
      break;
    case ExprKind::Arith:
      if (a.arith != b.arith) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!alpha(*a.kids[i], *b.kids[i], scope)) return false;
  return true;
}

}  // namespace

std::set<std::string> free_vars(const Expr& e) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  free_vars_into(e, bound, out);
  return out;
}

bool is_closed(const Expr& e) { return free_vars(e).empty(); }

void all_names(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Var || e.kind == ExprKind::Lambda) out.insert(e.name);
  for (const auto& k : e.kids) all_names(*k, out);
}

std::string fresh_name(const std::string& stem, const std::set<std::string>& avoid) {
  for (std::size_t n = 0;; ++n) {
    std::string candidate = stem + std::to_string(n);
    if (!avoid.count(candidate)) return candidate;
  }
}

ExprPtr substitute(const ExprPtr& e, const ExprPtr& v, const std::string& x) {
  return subst(e, v, x, free_vars(*v));
}

bool alpha_equal(const Expr& a, const Expr& b) {
  AlphaScope scope;
  return alpha(a, b, scope);
}

bool alpha_equal(const ExprPtr& a, const ExprPtr& b) { return alpha_equal(*a, *b); }

ExprPtr compose(const ExprPtr& f, const ExprPtr& g) {
  if (f->kind != ExprKind::Lambda || g->kind != ExprKind::Lambda)
    throw std::invalid_argument("compose expects two function values");
  std::set<std::string> avoid;
  all_names(*f, avoid);
  all_names(*g, avoid);
  std::string z = fresh_name("$z", avoid);
  return lambda(z, g->param_type, app(f, app(g, var(z))));
}

}  // namespace cg
