#include <doctest.h>

#include <algorithm>
#include <random>

#include "cg/syntax/encodings.hpp"
#include "cg/syntax/eval.hpp"
#include "cg/syntax/normalize.hpp"
#include "cg/syntax/printer.hpp"
#include "cg/syntax/terms.hpp"
#include "support.hpp"

using namespace cg;
using namespace cg::test;

namespace {

TypePtr node_t() { return Type::node_type(); }
TypePtr int_t() { return Type::int_type(); }

bool same(const ExprPtr& a, const ExprPtr& b) { return alpha_equal(a, b); }

// Random well-scoped terms over the whole constructor set. They need not be
// well typed: printing and parsing are purely syntactic.
class TermGen {
 public:
  explicit TermGen(std::uint64_t seed) : rng_(seed) {}

  ExprPtr term(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(16)) {
      case 0:
        return leaf();
      case 1: {
        std::string x = fresh();
        scope_.push_back(x);
        auto body = term(depth - 1);
        scope_.pop_back();
        return lambda(x, type(2), body, pick(4) == 0);
      }
      case 2:
        return app(term(depth - 1), term(depth - 1));
      case 3:
        return fix(term(depth - 1));
      case 4: {
        std::vector<ExprPtr> elems;
        for (int i = pick(3); i > 0; --i) elems.push_back(term(depth - 1));
        return key_list(elems);
      }
      case 5:
        return node(term(depth - 1), term(depth - 1), term(depth - 1));
      case 6:
        return proj(1 + pick(3), term(depth - 1));
      case 7:
        return concat(term(depth - 1), term(depth - 1));
      case 8:
        return subtract(term(depth - 1), term(depth - 1));
      case 9:
        return emit(operation(depth - 1));
      case 10:
        return claim(term(depth - 1));
      case 11:
        return arith(static_cast<ArithOp>(pick(4)), term(depth - 1), term(depth - 1));
      case 12:
        return cond(term(depth - 1), term(depth - 1), term(depth - 1));
      case 13:
        return len(term(depth - 1));
      default:
        return app(term(depth - 1), leaf());
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  std::string fresh() {
    static const char* names[] = {"x", "y", "z", "acc", "n2"};
    return names[pick(5)];
  }

  ExprPtr leaf() {
    switch (pick(5)) {
      case 0:
        return int_lit(pick(41) - 20);
      case 1:
        return key_lit(pick(2) ? Key::literal("k" + std::to_string(pick(3))) : Key::generated(1 + pick(3)));
      case 2:
        return label_lit(Label{static_cast<std::uint64_t>(1 + pick(5))});
      default:
        if (scope_.empty()) return int_lit(pick(10));
        return var(scope_[pick(static_cast<int>(scope_.size()))]);
    }
  }

  TypePtr type(int depth) {
    int choice = pick(depth > 0 ? 6 : 4);
    switch (choice) {
      case 0:
        return Type::int_type();
      case 1:
        return Type::key_type();
      case 2:
        return Type::key_list_type();
      case 3:
        return Type::node_type();
      case 4:
        return Type::future(type(depth - 1));
      default:
        return Type::arrow(type(depth - 1), pick(2) ? Emittability::T : Emittability::F, type(depth - 1));
    }
  }

  Operation operation(int depth) {
    switch (pick(3)) {
      case 0:
        return add_op(term(depth));
      case 1:
        return map_op(term(depth), term(depth));
      default:
        return fold_op(term(depth), term(depth), term(depth));
    }
  }

  std::mt19937_64 rng_;
  std::vector<std::string> scope_;
};

}  // namespace

TEST_CASE("let desugars to an immediately applied lambda") {
  auto e = E("let x = 1 in x");
  CHECK(same(e, app(lambda("x", int_t(), var("x")), int_lit(1))));
}

TEST_CASE("emit forms build emit expressions") {
  auto expected = emit(add_op(int_lit(5)));
  CHECK(same(E("emit add 5"), expected));
  CHECK(same(E("\xE2\x87\x91 add 5"), expected));
  CHECK(same(E("add 5"), expected));
}

TEST_CASE("parser reports positions of syntax errors") {
  try {
    parse_program("let x = in x", "t.cg");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.file() == "t.cg");
    CHECK(e.loc().line == 1);
    CHECK(e.loc().column == 9);
  }
  CHECK_THROWS_AS(E("$x"), SyntaxError);
  CHECK_THROWS(E("y + 1"));
}

TEST_CASE("surface programs desugar to the explicit core form") {
  // Claims stay explicit; operations emit where they are written.
  auto p = parse_program(
      "let a = add 1 in\n"
      "let b = add 2 in\n"
      "addRelationship (claim a) (claim b);\n"
      "pi2 (claim (queryNode (claim b)))\n");
  auto body = p.expr;
  REQUIRE(body->kind == ExprKind::App);
  CHECK(body->kids[0]->kind == ExprKind::Lambda);
  CHECK(same(body->kids[1], emit(add_op(int_lit(1)))));
  CHECK(is_closed(*body));
}

TEST_CASE("graph operation encodings") {
  auto a = key_lit(K("a"));
  auto b = key_lit(K("b"));
  auto nb = var("nb");

  SUBCASE("updatePayload") {
    auto op = desugar_graph_op("updatePayload", {a, nb});
    auto f = lambda("x", node_t(), node(proj(1, var("x")), proj(2, nb), proj(3, var("x"))));
    CHECK(op.kind == OpKind::Map);
    CHECK(same(op.function(), f));
    CHECK(same(op.target(), key_list({a})));
  }
  SUBCASE("queryNode") {
    auto op = desugar_graph_op("queryNode", {b});
    auto f = lambda("x", node_t(), lambda("y", node_t(), var("x")));
    CHECK(op.kind == OpKind::Fold);
    CHECK(same(op.function(), f));
    CHECK(same(op.base(), node(key_lit(K("_")), int_lit(0), key_list({}))));
    CHECK(same(op.target(), key_list({b})));
  }
  SUBCASE("mapVal") {
    auto g = var("g");
    auto ks = var("ks");
    auto op = desugar_graph_op("mapVal", {g, ks});
    auto f = lambda("x", node_t(), node(proj(1, var("x")), app(g, var("x")), proj(3, var("x"))));
    CHECK(same(op.function(), f));
    CHECK(same(op.target(), ks));
  }
  SUBCASE("addRelationship and deleteRelationship") {
    auto add = desugar_graph_op("addRelationship", {a, b});
    auto del = desugar_graph_op("deleteRelationship", {a, b});
    auto x = var("x");
    CHECK(same(add.function(),
               lambda("x", node_t(), node(proj(1, x), proj(2, x), concat(proj(3, x), key_list({b}))))));
    CHECK(same(del.function(),
               lambda("x", node_t(), node(proj(1, x), proj(2, x), subtract(proj(3, x), key_list({b}))))));
  }
  SUBCASE("foldVal carries the commutative mark") {
    auto op = desugar_graph_op("foldVal", {var("g"), int_lit(0), var("ks")}, true);
    CHECK(op.function()->commutative);
    CHECK(same(op.base(), node(key_lit(K("_")), int_lit(0), key_list({}))));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(desugar_graph_op("dropNode", {a}), DesugarError);
    CHECK_THROWS_AS(desugar_graph_op("queryNode", {a, b}), DesugarError);
    CHECK_THROWS_AS(desugar_graph_op("mapVal", {a, b}, true), DesugarError);
  }
}

TEST_CASE("desugared binders avoid the argument's names") {
  // The payload argument mentions x, so the encoding's binder must not be x.
  auto op = desugar_graph_op("updatePayload", {key_lit(K("a")), var("x")});
  CHECK(op.function()->name != "x");
  CHECK(free_vars(*op.function()) == std::set<std::string>{"x"});
}

TEST_CASE("substitution") {
  auto five = int_lit(5);
  CHECK(same(substitute(var("x"), five, "x"), five));
  auto shadow = lambda("x", int_t(), var("x"));
  CHECK(same(substitute(shadow, five, "x"), shadow));
  auto id_z = lambda("z", int_t(), var("z"));
  auto body = lambda("y", int_t(), app(var("x"), var("y")));
  CHECK(same(substitute(body, id_z, "x"), lambda("y", int_t(), app(id_z, var("y")))));

  SUBCASE("capture is avoided") {
    auto e = lambda("y", int_t(), app(var("x"), var("y")));
    auto r = substitute(e, var("y"), "x");
    REQUIRE(r->kind == ExprKind::Lambda);
    CHECK(r->name != "y");
    CHECK(free_vars(*r) == std::set<std::string>{"y"});
  }
}

TEST_CASE("substitution preserves closedness") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    TermGen gen(seed);
    auto body = gen.term(4);
    auto e = lambda("x", int_t(), body);
    if (!is_closed(*e)) continue;
    auto v = TermGen(seed + 1000).term(2);
    if (!is_closed(*v)) continue;
    CHECK(is_closed(*substitute(body, v, "x")));
  }
}

TEST_CASE("term equivalence") {
  CHECK(term_equiv(E("(\\x:int. x) 5"), int_lit(5), 100) == Equivalence::Equal);
  CHECK(term_equiv(E("\\x:int. x"), E("\\y:int. y"), 100) == Equivalence::Equal);
  CHECK(term_equiv(int_lit(1), int_lit(2), 100) == Equivalence::Distinct);
  CHECK(term_equiv(E("(\\x:int. x x) (\\x:int. x x)"), int_lit(0), 50) == Equivalence::Unknown);

  SUBCASE("add then remove a relationship on a node without it") {
    auto addk = E("\\x:node. <pi1 x; pi2 x; pi3 x ++ [#k]>");
    auto delk = E("\\x:node. <pi1 x; pi2 x; pi3 x -- [#k]>");
    auto n = N("a", 4, {"b"});
    CHECK(term_equiv(app(compose(delk, addk), n), n, 1000) == Equivalence::Equal);
  }
}

TEST_CASE("term equivalence is reflexive, symmetric and stable under more fuel") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto a = TermGen(seed).term(3);
    auto b = TermGen(seed + 7).term(3);
    CHECK(term_equiv(a, a, 500) == Equivalence::Equal);
    auto ab = term_equiv(a, b, 500);
    CHECK(ab == term_equiv(b, a, 500));
    if (ab == Equivalence::Equal) CHECK(term_equiv(a, b, 5000) == Equivalence::Equal);
  }
}

TEST_CASE("key list subtraction") {
  CHECK(kl_subtract({K("k1"), K("k2")}, {K("k2")}) == std::vector<Key>{K("k1")});
  CHECK(kl_subtract({K("k1"), K("k2"), K("k1")}, {K("k1")}) == std::vector<Key>{K("k2")});
  CHECK(kl_subtract({}, {K("k1")}).empty());
}

TEST_CASE("key list subtraction against a filter oracle") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(0, 6), key(0, 4);
  for (int i = 0; i < 500; ++i) {
    std::vector<Key> ks, rm;
    for (int n = len(rng); n > 0; --n) ks.push_back(K("k" + std::to_string(key(rng))));
    for (int n = len(rng) / 2; n > 0; --n) rm.push_back(K("k" + std::to_string(key(rng))));
    std::vector<Key> expected;
    std::copy_if(ks.begin(), ks.end(), std::back_inserter(expected),
                 [&](const Key& k) { return std::find(rm.begin(), rm.end(), k) == rm.end(); });
    auto got = kl_subtract(ks, rm);
    CHECK(got == expected);
    CHECK(got.size() <= ks.size());
  }
}

TEST_CASE("function composition") {
  auto id = E("\\x:node. x");
  auto c = compose(id, id);
  REQUIRE(c->kind == ExprKind::Lambda);
  CHECK(c->name.rfind("$z", 0) == 0);
  CHECK(same(c->kids[0], app(id, app(id, var(c->name)))));
  CHECK(term_equiv(c, id, 1000) == Equivalence::Equal);

  auto second = compose(E("\\x:node. pi2 x"), id);
  CHECK(term_equiv(app(second, N("k", 7)), int_lit(7), 1000) == Equivalence::Equal);
}

TEST_CASE("call-by-value evaluation") {
  auto none = [](Label) -> ExprPtr { return nullptr; };
  auto v = evaluate(E("(\\x:int. x * 2 + 1) (3 - 1)"), none, 100);
  REQUIRE(v);
  CHECK((*v)->number == 5);
  CHECK(apply_arith(ArithOp::Div, 7, 0) == 0);
  CHECK(apply_arith(ArithOp::Div, -7, 2) == -3);
  CHECK_FALSE(evaluate(E("claim @1"), none, 100));
  CHECK_FALSE(evaluate(E("add 1"), none, 100));

  auto r = find_redex(E("pi2 <#k; 7; []>"), none);
  REQUIRE(r);
  CHECK(r->rule == ExprRule::Node);
}

TEST_CASE("printing and parsing round-trip") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 600; ++seed) {
    auto e = TermGen(seed).term(4);
    if (!is_closed(*e)) continue;
    std::string text = to_source(*e);
    ExprPtr back;
    try {
      back = E(text);
    } catch (const std::exception& ex) {
      FAIL_CHECK("seed " << seed << ": " << ex.what() << "\n" << text);
      continue;
    }
    CHECK_MESSAGE(alpha_equal(e, back), "seed " << seed << ": " << text);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("printing renames reserved binders") {
  auto c = compose(E("\\x:node. x"), E("\\x:node. x"));
  auto text = to_source(*c);
  CHECK(text.find('$') == std::string::npos);
  CHECK(alpha_equal(E(text), c));
}
