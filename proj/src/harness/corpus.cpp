#include "cg/harness/corpus.hpp"

#include <stdexcept>

#include "cg/syntax/printer.hpp"

namespace cg {

// Generated from corpus/*.cg at configure time.
const std::vector<std::pair<std::string, std::string>>& embedded_corpus_sources();

namespace {

using Check = std::function<std::optional<std::string>(const RunResult&)>;

std::optional<std::int64_t> int_value(const ExprPtr& e) {
  if (e && e->kind == ExprKind::Int) return e->number;
  return std::nullopt;
}

std::optional<std::string> expect_frontend(const RunResult& r, std::int64_t want) {
  auto got = int_value(r.final.frontend);
  if (got != want)
    return "frontend is " + to_source(*r.final.frontend) + ", expected " + std::to_string(want);
  return std::nullopt;
}

std::optional<std::string> expect_payload(const RunResult& r, const Key& k, std::int64_t want) {
  for (const auto& s : r.final.backend) {
    if (s.key()->kind != ExprKind::Key || s.key()->key != k) continue;
    auto got = int_value(s.payload());
    if (got != want)
      return "payload of " + k.spelling() + " is " + to_source(*s.payload()) + ", expected " +
             std::to_string(want);
    return std::nullopt;
  }
  return "no station " + k.spelling();
}

Check check_coresocial() {
  return [](const RunResult& r) -> std::optional<std::string> {
    if (auto e = expect_frontend(r, 2)) return e;
    if (r.emitted.size() != 16) return "expected 16 emitted operations";
    // amy took bob's payload; fred's edge from bob was added and removed.
    if (auto e = expect_payload(r, Key::generated(1), 2)) return e;
    for (const auto& s : r.final.backend)
      if (s.key()->key == Key::generated(2) && !s.adjacency()->kids.empty())
        return "bob still has out-edges: " + to_source(*s.adjacency());
    return std::nullopt;
  };
}

Check check_corepr() {
  return [](const RunResult& r) -> std::optional<std::string> {
    static const char* expected[] = {
        "mapVal [#k1, #k2]", "foldVal [#k1, #k2]", "foldVal [#k1, #k2]", "mapVal [#k1]",
        "mapVal [#k2]",      "foldVal [#k1, #k2]", "foldVal [#k1, #k2]", "mapVal [#k1]",
        "mapVal [#k2]"};
    if (r.emitted.size() != 9)
      return "expected 9 emitted operations, got " + std::to_string(r.emitted.size());
    for (std::size_t i = 0; i < 9; ++i) {
      auto got = emission_signature(r.emitted[i].op);
      if (got != expected[i])
        return "emission " + std::to_string(i) + " is " + got + ", expected " + expected[i];
    }
    if (auto e = expect_payload(r, Key::literal("k1"), 5000)) return e;
    return expect_payload(r, Key::literal("k2"), 5000);
  };
}

Check check_chronological() {
  return [](const RunResult& r) -> std::optional<std::string> {
    if (auto e = expect_frontend(r, 12)) return e;
    return expect_payload(r, Key::generated(1), 12);
  };
}

Check check_frontend(std::int64_t want) {
  return [want](const RunResult& r) { return expect_frontend(r, want); };
}

Check expectation_for(const std::string& name) {
  if (name == "coresocial") return check_coresocial();
  if (name == "corepr") return check_corepr();
  if (name == "chronological") return check_chronological();
  if (name == "fold") return check_frontend(3);
  if (name == "reuse_counterexample") return check_frontend(1);
  return nullptr;
}

std::string keys_spelling(const Expr& kl) {
  std::string out = "[";
  for (std::size_t i = 0; i < kl.kids.size(); ++i) {
    if (i) out += ", ";
    out += to_source(*kl.kids[i]);
  }
  return out + "]";
}

bool is_proj_of(const Expr& e, int index, const std::string& name) {
  return e.kind == ExprKind::Proj && e.number == index && e.kids[0]->kind == ExprKind::Var &&
         e.kids[0]->name == name;
}

bool is_blank_base(const Expr& e) {
  return e.kind == ExprKind::Node && e.kids[0]->kind == ExprKind::Key &&
         e.kids[0]->key == Key::literal("_");
}

std::string map_name(const Expr& f) {
  if (f.kind != ExprKind::Lambda) return "map";
  const Expr& body = *f.kids[0];
  const std::string& x = f.name;
  if (body.kind != ExprKind::Node || !is_proj_of(*body.kids[0], 1, x)) return "map";
  const Expr& payload = *body.kids[1];
  const Expr& adj = *body.kids[2];
  if (is_proj_of(payload, 2, x) && (adj.kind == ExprKind::Concat || adj.kind == ExprKind::Subtract) &&
      is_proj_of(*adj.kids[0], 3, x))
    return adj.kind == ExprKind::Concat ? "addRelationship" : "deleteRelationship";
  if (!is_proj_of(adj, 3, x)) return "map";
  if (payload.kind == ExprKind::App && payload.kids[1]->kind == ExprKind::Var &&
      payload.kids[1]->name == x)
    return "mapVal";
  if (payload.kind == ExprKind::Proj && payload.number == 2) return "updatePayload";
  return "map";
}

std::string fold_name(const Expr& f, const Expr& base) {
  if (f.kind != ExprKind::Lambda || f.kids[0]->kind != ExprKind::Lambda || !is_blank_base(base))
    return "fold";
  const Expr& inner = *f.kids[0];
  const Expr& body = *inner.kids[0];
  if (body.kind == ExprKind::Var && body.name == f.name) return "queryNode";
  if (body.kind == ExprKind::Node && is_proj_of(*body.kids[0], 1, inner.name) &&
      is_proj_of(*body.kids[2], 3, inner.name))
    return "foldVal";
  return "fold";
}

}  // namespace

std::string emission_signature(const Operation& op) {
  switch (op.kind) {
    case OpKind::Add:
      return "add";
    case OpKind::Map:
      return map_name(*op.function()) + " " + keys_spelling(*op.target());
    case OpKind::Fold:
      return fold_name(*op.function(), *op.base()) + " " + keys_spelling(*op.target());
  }
  return "?";
}

Program CorpusProgram::parse() const { return parse_program(source, name + ".cg"); }

Configuration CorpusProgram::initial() const {
  auto p = parse();
  return init(p.expr, p.graph);
}

const std::vector<CorpusProgram>& corpus() {
  static const std::vector<CorpusProgram> programs = [] {
    std::vector<CorpusProgram> out;
    for (const auto& [name, source] : embedded_corpus_sources()) {
      CorpusProgram p;
      p.name = name;
      p.source = source;
      p.well_typed = name != "backend_emission";
      p.expect = expectation_for(name);
      out.push_back(std::move(p));
    }
    return out;
  }();
  return programs;
}

const CorpusProgram& corpus_program(const std::string& name) {
  for (const auto& p : corpus())
    if (p.name == name) return p;
  throw std::out_of_range("no corpus program '" + name + "'");
}

std::vector<const CorpusProgram*> runnable_corpus() {
  std::vector<const CorpusProgram*> out;
  for (const auto& p : corpus())
    if (p.well_typed) out.push_back(&p);
  return out;
}

}  // namespace cg
