#include "cg/syntax/printer.hpp"

#include <cctype>
#include <map>
#include <set>

namespace cg {

namespace {

const char* arith_symbol(ArithOp op) {
  switch (op) {
    case ArithOp::Add:
      return "+";
    case ArithOp::Sub:
      return "-";
    case ArithOp::Mul:
      return "*";
    case ArithOp::Div:
      return "/";
  }
  return "?";
}

void sexpr(const Expr& e, std::string& out);

void sexpr_list(const char* head, const Expr& e, std::string& out) {
  out += '(';
  out += head;
  for (const auto& k : e.kids) {
    out += ' ';
    sexpr(*k, out);
  }
  out += ')';
}

void sexpr(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::Int:
      out += std::to_string(e.number);
      return;
    case ExprKind::Key:
      out += e.key.spelling();
      return;
    case ExprKind::Label:
      out += e.label.spelling();
      return;
    case ExprKind::Var:
      out += e.name;
      return;
    case ExprKind::Lambda:
      out += e.commutative ? "(lam* " : "(lam ";
      out += e.name;
      out += ' ';
      out += type_sexpr(*e.param_type);
      out += ' ';
      sexpr(*e.kids[0], out);
      out += ')';
      return;
    case ExprKind::App:
      sexpr_list("app", e, out);
      return;
    case ExprKind::Fix:
      sexpr_list("fix", e, out);
      return;
    case ExprKind::KeyList:
      sexpr_list("kl", e, out);
      return;
    case ExprKind::Node:
      sexpr_list("node", e, out);
      return;
    case ExprKind::Proj: {
      std::string head = "pi" + std::to_string(e.number);
      sexpr_list(head.c_str(), e, out);
      return;
    }
    case ExprKind::Concat:
      sexpr_list("++", e, out);
      return;
    case ExprKind::Subtract:
      sexpr_list("--", e, out);
      return;
    case ExprKind::Emit: {
      std::string head = std::string("emit ") + op_name(e.op);
      sexpr_list(head.c_str(), e, out);
      return;
    }
    case ExprKind::Claim:
      sexpr_list("claim", e, out);
      return;
    case ExprKind::Arith:
      sexpr_list(arith_symbol(e.arith), e, out);
      return;
    case ExprKind::Cond:
      sexpr_list("ifz", e, out);
      return;
    case ExprKind::Len:
      sexpr_list("len", e, out);
      return;
  }
}

// --- surface printer -------------------------------------------------------

void collect_names(const Expr& e, std::set<std::string>& names) {
  if (e.kind == ExprKind::Var || e.kind == ExprKind::Lambda) names.insert(e.name);
  for (const auto& k : e.kids) collect_names(*k, names);
}

class SourcePrinter {
 public:
  explicit SourcePrinter(const Expr& root) { collect_names(root, used_); }

  void print(const Expr& e, std::string& out) {
    switch (e.kind) {
      case ExprKind::Int:
        if (e.number < 0)
          out += "(" + std::to_string(e.number) + ")";
        else
          out += std::to_string(e.number);
        return;
      case ExprKind::Key:
        out += e.key.spelling();
        return;
      case ExprKind::Label:
        out += e.label.spelling();
        return;
      case ExprKind::Var:
        out += display(e.name);
        return;
      case ExprKind::Lambda: {
        out += e.commutative ? "(commutative \\" : "(\\";
        out += display(e.name);
        out += ':';
        out += type_source(*e.param_type);
        out += ". ";
        print(*e.kids[0], out);
        out += ')';
        return;
      }
      case ExprKind::App:
        out += '(';
        print(*e.kids[0], out);
        out += ' ';
        print(*e.kids[1], out);
        out += ')';
        return;
      case ExprKind::Fix:
        prefix("fix", e, out);
        return;
      case ExprKind::KeyList:
        out += '[';
        for (std::size_t i = 0; i < e.kids.size(); ++i) {
          if (i) out += ", ";
          print(*e.kids[i], out);
        }
        out += ']';
        return;
      case ExprKind::Node:
        out += '<';
        for (std::size_t i = 0; i < 3; ++i) {
          if (i) out += "; ";
          print(*e.kids[i], out);
        }
        out += '>';
        return;
      case ExprKind::Proj:
        prefix(("pi" + std::to_string(e.number)).c_str(), e, out);
        return;
      case ExprKind::Concat:
        infix("++", e, out);
        return;
      case ExprKind::Subtract:
        infix("--", e, out);
        return;
      case ExprKind::Emit:
        out += "(emit ";
        out += op_name(e.op);
        for (const auto& k : e.kids) {
          out += ' ';
          print(*k, out);
        }
        out += ')';
        return;
      case ExprKind::Claim:
        prefix("claim", e, out);
        return;
      case ExprKind::Arith:
        infix(arith_symbol(e.arith), e, out);
        return;
      case ExprKind::Cond:
        out += "(ifz ";
        print(*e.kids[0], out);
        out += " then ";
        print(*e.kids[1], out);
        out += " else ";
        print(*e.kids[2], out);
        out += ')';
        return;
      case ExprKind::Len:
        prefix("len", e, out);
        return;
    }
  }

 private:
  void prefix(const char* word, const Expr& e, std::string& out) {
    out += '(';
    out += word;
    out += ' ';
    print(*e.kids[0], out);
    out += ')';
  }

  void infix(const char* op, const Expr& e, std::string& out) {
    out += '(';
    print(*e.kids[0], out);
    out += ' ';
    out += op;
    out += ' ';
    print(*e.kids[1], out);
    out += ')';
  }

  // Reserved names are mapped consistently to identifiers unused elsewhere.
  const std::string& display(const std::string& name) {
    if (name.empty() || name[0] != '$') return name;
    auto it = renamed_.find(name);
    if (it != renamed_.end()) return it->second;
    std::string stem;
    for (char c : name.substr(1))
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') stem += c;
    if (stem.empty() || std::isdigit(static_cast<unsigned char>(stem[0]))) stem = "v" + stem;
    std::string candidate = stem;
    for (int n = 0; used_.count(candidate); ++n) candidate = stem + "_" + std::to_string(n);
    used_.insert(candidate);
    return renamed_.emplace(name, candidate).first->second;
  }

  std::set<std::string> used_;
  std::map<std::string, std::string> renamed_;
};

}  // namespace

std::string to_sexpr(const Expr& e) {
  std::string out;
  sexpr(e, out);
  return out;
}

std::string to_sexpr(const ExprPtr& e) { return to_sexpr(*e); }

std::string to_sexpr(const Operation& op) { return to_sexpr(*emit(op)); }

std::string type_sexpr(const Type& t) {
  switch (t.kind) {
    case TypeKind::Future:
      return "(future " + type_sexpr(*t.result) + ")";
    case TypeKind::Arrow:
      return std::string(t.effect == Emittability::T ? "(~> " : "(-> ") + type_sexpr(*t.param) +
             " " + type_sexpr(*t.result) + ")";
    default:
      return to_string(t);
  }
}

std::string type_source(const Type& t) {
  switch (t.kind) {
    case TypeKind::Future:
      return "future[" + type_source(*t.result) + "]";
    case TypeKind::Arrow:
      return "(" + type_source(*t.param) + (t.effect == Emittability::T ? " ~> " : " -> ") +
             type_source(*t.result) + ")";
    default:
      return to_string(t);
  }
}

std::string to_source(const Expr& e) {
  SourcePrinter printer(e);
  std::string out;
  printer.print(e, out);
  return out;
}

}  // namespace cg
