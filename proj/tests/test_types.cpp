#include <doctest.h>

#include "cg/harness/corpus.hpp"
#include "cg/types/typecheck.hpp"
#include "support.hpp"

using namespace cg;
using namespace cg::test;

namespace {

Typed type_of(const std::string& source) { return type_of_expr(TypingEnv{}, E(source)); }

TypePtr T(const std::string& source) { return parse_type(source); }

}  // namespace

TEST_CASE("emitting an add has a future key type and emittability T") {
  auto t = type_of("emit add 5");
  CHECK(same_type(t.type, Type::future(Type::key_type())));
  CHECK(t.effect == Emittability::T);
}

TEST_CASE("abstraction internalizes the body's emittability") {
  auto pure = type_of("\\x:node. pi2 x");
  CHECK(same_type(pure.type, Type::arrow(Type::node_type(), Emittability::F, Type::int_type())));
  CHECK(pure.effect == Emittability::F);

  auto emitting = type_of("\\x:int. add x");
  CHECK(same_type(emitting.type, T("int ~> future[key]")));
  CHECK(emitting.effect == Emittability::F);

  CHECK(type_of("(\\x:int. add x) 1").effect == Emittability::T);
}

TEST_CASE("literal and primitive typing") {
  CHECK(same_type(type_of("3 * 4").type, Type::int_type()));
  CHECK(same_type(type_of("[#a] ++ [#b]").type, Type::key_list_type()));
  CHECK(same_type(type_of("len [#a]").type, Type::int_type()));
  CHECK(same_type(type_of("pi3 <#a; 1; []>").type, Type::key_list_type()));
  CHECK(same_type(type_of("map (\\x:node. x) [#a]").type, T("future[int]")));
  CHECK(same_type(type_of("claim (fold (\\x:node. \\y:node. x) <#a; 0; []> [#a])").type,
                  Type::node_type()));
  CHECK(type_of("1").effect == Emittability::F);
}

TEST_CASE("type errors") {
  auto throws_rule = [](ExprPtr e, const std::string& rule) {
    try {
      type_of_expr(TypingEnv{}, e);
      return false;
    } catch (const TypeError& err) {
      return err.rule() == rule || rule.empty();
    }
  };
  CHECK(throws_rule(var("nowhere"), ""));
  CHECK(throws_rule(E("1 + #a"), ""));
  CHECK(throws_rule(E("pi1 5"), ""));
  CHECK(throws_rule(E("(\\x:int. x) #a"), ""));
  CHECK(throws_rule(E("ifz 0 then 1 else #a"), ""));
  CHECK(throws_rule(E("claim 3"), ""));
}

TEST_CASE("phase distinction rejects emitting map and fold functions") {
  auto is_phase = [](const ExprPtr& e) {
    try {
      type_of_expr(TypingEnv{}, e);
      return false;
    } catch (const TypeError& err) {
      return err.is_phase_distinction();
    }
  };
  CHECK(is_phase(E("map (\\x:node. (add 1; x)) [#a]")));
  CHECK(is_phase(E("fold (\\x:node. \\y:node. (add 1; x)) <#a; 0; []> [#a]")));
  CHECK_FALSE(is_phase(E("map (\\x:node. x) [#a]")));
}

TEST_CASE("the backend emission program is rejected at the inner emit") {
  const auto& p = corpus_program("backend_emission");
  CHECK_FALSE(p.well_typed);
  try {
    auto prog = p.parse();
    type_of_config(TypingEnv{}, init(prog.expr, prog.graph));
    FAIL("expected a type error");
  } catch (const TypeError& e) {
    CHECK(e.is_phase_distinction());
    CHECK(e.rule() == "T-Map");
    CHECK(e.loc().line == 6);
    CHECK(e.loc().column == 28);
  }
}

TEST_CASE("configuration typing") {
  SUBCASE("agrees with expression typing on a fresh program") {
    for (const auto* p : runnable_corpus()) {
      auto prog = p->parse();
      if (!prog.graph.empty()) continue;
      auto te = type_of_expr(TypingEnv{}, prog.expr);
      auto tc = type_of_config(TypingEnv{}, init(prog.expr));
      CHECK(same_type(te.type, tc.type));
      CHECK(te.effect == tc.effect);
    }
  }
  SUBCASE("the incremental folding configuration is well typed") {
    auto t = type_of_config(TypingEnv{}, incremental_folding());
    CHECK(same_type(t.type, Type::node_type()));
  }
  SUBCASE("duplicate keys") {
    Configuration c;
    c.backend.push_back(make_station(N("k", 1)));
    c.backend.push_back(make_station(N("k", 2)));
    c.frontend = int_lit(0);
    CHECK_THROWS_AS(type_of_config(TypingEnv{}, c), TypeError);
    CHECK_THROWS(init(int_lit(0), c.backend));
  }
  SUBCASE("duplicate labels") {
    auto c = incremental_folding();
    c.top.push_back(unit_of(1, add_op(int_lit(4))));
    CHECK_THROWS_AS(type_of_config(TypingEnv{}, c), TypeError);
  }
  SUBCASE("store values are typed and claimable") {
    Configuration c;
    c.store.emplace(Label{3}, ResultEntry{Label{3}, {}, key_lit(K("a"))});
    c.frontend = claim(label_lit(Label{3}));
    auto t = type_of_config(TypingEnv{}, c);
    CHECK(same_type(t.type, Type::key_type()));
  }
  SUBCASE("an unknown label is an error") {
    Configuration c;
    c.frontend = claim(label_lit(Label{9}));
    CHECK_THROWS_AS(type_of_config(TypingEnv{}, c), TypeError);
  }
  SUBCASE("stations are typed before the top-level stream") {
    // A station operation may not wait on a label still in the top stream.
    Configuration c;
    c.backend.push_back(make_station(N("k", 1)));
    c.top.push_back(unit_of(1, add_op(int_lit(4))));
    auto dependent = map_op(E("\\x:node. x"), key_list({claim(label_lit(Label{1}))}));
    c.backend[0].streamlet.push_back(unit_of(2, dependent));
    c.frontend = int_lit(0);
    CHECK_THROWS_AS(type_of_config(TypingEnv{}, c), TypeError);

    // The other way round is fine.
    Configuration d;
    d.backend.push_back(make_station(N("k", 1)));
    d.backend[0].streamlet.push_back(unit_of(1, add_op(int_lit(4))));
    d.top.push_back(unit_of(2, dependent));
    d.frontend = int_lit(0);
    CHECK_NOTHROW(type_of_config(TypingEnv{}, d));
  }
  SUBCASE("later stations are typed before earlier ones") {
    Configuration c;
    c.backend.push_back(make_station(N("k1", 1)));
    c.backend.push_back(make_station(N("k2", 1)));
    c.backend[1].streamlet.push_back(unit_of(1, add_op(int_lit(4))));
    c.backend[0].streamlet.push_back(
        unit_of(2, map_op(E("\\x:node. x"), key_list({claim(label_lit(Label{1}))}))));
    c.frontend = int_lit(0);
    CHECK_NOTHROW(type_of_config(TypingEnv{}, c));
  }
}

TEST_CASE("cached environment insertion") {
  auto env = cached_env_insert(TypingEnv{}, Label{1}, add_op(int_lit(5)));
  CHECK(same_type(env.lookup(Label{1}), T("future[key]")));

  env = cached_env_insert(env, Label{2}, map_op(E("\\x:node. x"), KL({"a"})));
  CHECK(same_type(env.lookup(Label{2}), T("future[int]")));

  auto f = E("\\x:node. \\y:node. x");
  env = cached_env_insert(TypingEnv{}, Label{1}, fold_op(f, N("a", 0), KL({"a"})));
  env = cached_env_insert(env, Label{2}, fold_op(f, claim(label_lit(Label{1})), KL({"a"})));
  CHECK(same_type(env.lookup(Label{2}), T("future[node]")));
  CHECK(env.label_count() == 2);

  CHECK_THROWS_AS(cached_env_insert(TypingEnv{}, Label{3}, fold_op(f, claim(label_lit(Label{9})), KL({"a"}))),
                  TypeError);
}

TEST_CASE("type syntax round-trips through printing") {
  for (const char* text : {"int", "node -> int", "node ~> future[key]", "(int -> int) -> kl",
                           "future[future[node]]"}) {
    auto t = T(text);
    CHECK(same_type(T(to_string(*t)), t));
  }
  CHECK(same_type(T("int -> int -> int"), T("int -> (int -> int)")));
}
