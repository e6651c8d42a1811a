#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cg/harness/canonical.hpp"
#include "cg/harness/corpus.hpp"
#include "cg/harness/metatheory.hpp"
#include "cg/syntax/encodings.hpp"
#include "cg/syntax/eval.hpp"
#include "cg/syntax/normalize.hpp"
#include "cg/syntax/printer.hpp"
#include "cg/syntax/terms.hpp"
#include "cg/tlo/rewrite.hpp"
#include "support.hpp"

using namespace cg;
using namespace cg::test;

namespace {

Operation graph_op(const std::string& name, std::vector<ExprPtr> args) {
  return desugar_graph_op(name, args);
}

ExprPtr key(const std::string& k) { return key_lit(K(k)); }

OperationStream stream_of(std::vector<Operation> ops) {
  OperationStream s;
  std::uint64_t label = 1;
  for (auto& op : ops) s.push_back(unit_of(label++, std::move(op)));
  return s;
}

bool offers(const std::vector<RewriteCandidate>& cs, TloRule rule, std::size_t position = 0) {
  return std::any_of(cs.begin(), cs.end(), [&](const RewriteCandidate& c) {
    return c.rule == rule && c.position == position;
  });
}

RewriteCandidate find(const std::vector<RewriteCandidate>& cs, TloRule rule) {
  auto it = std::find_if(cs.begin(), cs.end(), [&](const RewriteCandidate& c) { return c.rule == rule; });
  REQUIRE(it != cs.end());
  return *it;
}

std::multiset<std::uint64_t> labels(const OperationStream& s, const std::vector<ResultEntry>& rs = {}) {
  std::multiset<std::uint64_t> out;
  for (const auto& l : labels_of(s)) out.insert(l.id);
  for (const auto& r : rs) out.insert(r.label.id);
  return out;
}

ExprPtr subtraction_fold() {
  return E("commutative \\x:node. \\y:node. <pi1 y; pi2 x - pi2 y; pi3 y>");
}

ExprPtr doubler() { return E("\\x:node. <pi1 x; pi2 x * 2; pi3 x>"); }
ExprPtr halver() { return E("\\x:node. <pi1 x; pi2 x / 2; pi3 x>"); }

std::optional<ExprPtr> eval(const ExprPtr& e) {
  return evaluate(e, [](Label) -> ExprPtr { return nullptr; }, 10000);
}

}  // namespace

TEST_CASE("batching and unbatching") {
  auto s = stream_of({graph_op("addRelationship", {key("eve"), key("bob")}),
                      graph_op("addRelationship", {key("eve"), key("cam")})});
  auto cs = candidates(s, 0, {});
  REQUIRE(offers(cs, TloRule::Batch));
  auto batched = apply_rewrite(s, find(cs, TloRule::Batch));
  REQUIRE(batched.stream.size() == 1);
  CHECK(batched.stream[0].size() == 2);
  CHECK(batched.results.empty());

  auto back = candidates(batched.stream, 0, {});
  auto split = find(back, TloRule::Unbatch);
  CHECK(split.split == 1);
  auto restored = apply_rewrite(batched.stream, split);
  REQUIRE(restored.stream.size() == 2);
  CHECK(labels_of(restored.stream) == labels_of(s));
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(alpha_equal(*emit(restored.stream[i][0].op), *emit(s[i][0].op)));
}

TEST_CASE("reordering") {
  SUBCASE("disjoint targets") {
    auto s = stream_of({graph_op("updatePayload", {key("a"), int_lit(3)}),
                        graph_op("queryNode", {key("b")})});
    auto cs = candidates(s, 0, {});
    CHECK(offers(cs, TloRule::ReorderD));
    auto r = apply_rewrite(s, find(cs, TloRule::ReorderD));
    CHECK(r.stream[0][0].label == Label{2});
    CHECK(r.stream[1][0].label == Label{1});
    CHECK(r.results.empty());
  }
  SUBCASE("overlapping maps stay in order") {
    auto s = stream_of({graph_op("updatePayload", {key("a"), int_lit(3)}),
                        graph_op("updatePayload", {key("a"), int_lit(4)})});
    auto cs = candidates(s, 0, {});
    CHECK_FALSE(offers(cs, TloRule::ReorderD));
    CHECK_FALSE(offers(cs, TloRule::ReorderRR));
    CHECK_FALSE(offers(cs, TloRule::ReorderRW));
  }
  SUBCASE("two folds") {
    auto s = stream_of({graph_op("queryNode", {key("a")}), graph_op("queryNode", {key("a")})});
    CHECK(offers(candidates(s, 0, {}), TloRule::ReorderRR));
  }
  SUBCASE("a fold skips ahead of a map through the composed function") {
    auto s = stream_of({map_op(doubler(), KL({"k1"})), fold_op(sum_fold(), N("k0", 0), KL({"k1", "k2"}))});
    auto cs = candidates(s, 0, {});
    auto r = apply_rewrite(s, find(cs, TloRule::ReorderRW));
    CHECK(r.stream[0][0].label == Label{2});
    CHECK(r.stream[1][0].label == Label{1});
    CHECK(alpha_equal(r.stream[0][0].op.function(), dcomp(sum_fold(), {K("k1")}, doubler())));
  }
  SUBCASE("operations that claim each other's results are never swapped") {
    auto s = stream_of({graph_op("queryNode", {key("a")}),
                        graph_op("updatePayload", {key("b"), proj(2, claim(label_lit(Label{1})))})});
    auto cs = candidates(s, 0, {});
    CHECK_FALSE(offers(cs, TloRule::ReorderD));
    CHECK(offers(cs, TloRule::Batch));
  }
}

TEST_CASE("map fusion") {
  auto add_rel = graph_op("addRelationship", {key("b"), key("f")});
  auto del_rel = graph_op("deleteRelationship", {key("b"), key("f")});
  auto s = stream_of({add_rel, del_rel});

  SUBCASE("with set adjacency the pair cancels") {
    TloOptions opts;
    opts.assume_set_adjacency = true;
    auto cs = candidates(s, 0, opts);
    CHECK_FALSE(offers(cs, TloRule::FuseM));
    auto r = apply_rewrite(s, find(cs, TloRule::FuseMId));
    CHECK(r.stream.empty());
    REQUIRE(r.results.size() == 2);
    for (const auto& e : r.results) {
      CHECK(alpha_equal(e.value, int_lit(0)));
      CHECK(e.residual.empty());
    }
    CHECK(labels(s) == labels(r.stream, r.results));
  }
  SUBCASE("without it the maps are only composed") {
    auto cs = candidates(s, 0, {});
    CHECK_FALSE(offers(cs, TloRule::FuseMId));
    auto r = apply_rewrite(s, find(cs, TloRule::FuseM));
    REQUIRE(r.stream.size() == 1);
    CHECK(r.stream[0][0].label == Label{1});
    CHECK(alpha_equal(r.stream[0][0].op.function(), compose(del_rel.function(), add_rel.function())));
    REQUIRE(r.results.size() == 1);
    CHECK(r.results[0].label == Label{2});
    CHECK(labels(s) == labels(r.stream, r.results));
  }
  SUBCASE("different target lists are not fused") {
    auto t = stream_of({graph_op("updatePayload", {key("a"), int_lit(1)}),
                        graph_op("updatePayload", {key("b"), int_lit(1)})});
    auto cs = candidates(t, 0, {});
    CHECK_FALSE(offers(cs, TloRule::FuseM));
    CHECK_FALSE(offers(cs, TloRule::FuseMId));
  }
}

TEST_CASE("reuse") {
  SUBCASE("the non-commutative subtraction pair is never reused") {
    auto f = subtraction_fold();
    auto s = stream_of({fold_op(f, N("k0", 0), KL({"k2"})), fold_op(f, N("k0", 0), KL({"k1", "k2", "k3"}))});
    CHECK_FALSE(offers(candidates(s, 0, {}), TloRule::Reuse));
  }
  SUBCASE("query folds are not known to commute") {
    auto s = stream_of({graph_op("queryNode", {key("b")}), graph_op("queryNode", {key("b")})});
    CHECK_FALSE(offers(candidates(s, 0, {}), TloRule::Reuse));
  }
  SUBCASE("a commutative fold over a superset reuses the first result") {
    auto f = sum_fold();
    auto s = stream_of({fold_op(f, N("k0", 0), KL({"b"})), fold_op(f, N("k0", 0), KL({"b"}))});
    auto cs = candidates(s, 0, {});
    auto r = apply_rewrite(s, find(cs, TloRule::Reuse));
    const auto& second = r.stream[1][0].op;
    CHECK(alpha_equal(second.base(), claim(label_lit(Label{1}))));
    CHECK(alpha_equal(second.target(), KL({})));
    CHECK(alpha_equal(second.function(), f));

    auto wider = stream_of({fold_op(f, N("k0", 0), KL({"a"})), fold_op(f, N("k0", 0), KL({"a", "b"}))});
    auto r2 = apply_rewrite(wider, find(candidates(wider, 0, {}), TloRule::Reuse));
    CHECK(alpha_equal(r2.stream[1][0].op.target(), KL({"b"})));
  }
  SUBCASE("different bases block reuse") {
    auto f = sum_fold();
    auto s = stream_of({fold_op(f, N("k0", 0), KL({"b"})), fold_op(f, N("k0", 1), KL({"b"}))});
    CHECK_FALSE(offers(candidates(s, 0, {}), TloRule::Reuse));
  }
}

TEST_CASE("rule subsets") {
  auto s = stream_of({graph_op("queryNode", {key("a")}), graph_op("queryNode", {key("b")})});
  auto only_batch = TloOptions::parse("batch");
  auto cs = candidates(s, 0, only_batch);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].rule == TloRule::Batch);
  CHECK(candidates(s, 0, TloOptions::none()).empty());
  CHECK(TloOptions::parse("ReorderD,reuse").allows(TloRule::Reuse));
  CHECK_THROWS(TloOptions::parse("teleport"));
  for (std::size_t i = 0; i < kTloRuleCount; ++i) {
    auto rule = static_cast<TloRule>(i);
    CHECK(tlo_rule_from_string(to_string(rule)) == rule);
  }
}

TEST_CASE("composition under a key set") {
  auto f = sum_fold();
  auto g = doubler();
  SUBCASE("an empty key set leaves the fold alone") {
    auto d = dcomp(f, {}, g);
    auto n = N("k1", 3);
    auto a = N("k0", 4);
    auto lhs = eval(app(app(d, n), a));
    auto rhs = eval(app(app(f, n), a));
    REQUIRE(lhs);
    REQUIRE(rhs);
    CHECK(alpha_equal(*lhs, *rhs));
  }
  SUBCASE("a member key sees the mapped node") {
    auto d = dcomp(f, {K("k1")}, g);
    auto out = eval(app(app(d, N("k1", 3)), N("k0", 0)));
    REQUIRE(out);
    CHECK(payload_of(*out) == 6);
    auto other = eval(app(app(d, N("k2", 3)), N("k0", 0)));
    REQUIRE(other);
    CHECK(payload_of(*other) == 3);
  }
  SUBCASE("moving a fold ahead of a map does not change the outcome") {
    Configuration c;
    c.backend.push_back(make_station(N("k1", 3)));
    c.backend.push_back(make_station(N("k2", 5)));
    c.backend[0].streamlet = stream_of({map_op(g, KL({"k1", "k2"})), fold_op(f, N("k0", 0), KL({"k1", "k2"}))});
    c.frontend = proj(2, claim(label_lit(Label{2})));
    c.next_label = 3;

    auto plain = eager_complete(c);
    auto rw = c;
    auto r = apply_rewrite(rw.backend[0].streamlet, find(candidates(rw.backend[0].streamlet, 0, {}), TloRule::ReorderRW));
    rw.backend[0].streamlet = r.stream;
    auto moved = eager_complete(rw);
    REQUIRE(plain.status == RunStatus::Terminal);
    REQUIRE(moved.status == RunStatus::Terminal);
    CHECK(alpha_equal(plain.final.frontend, int_lit(16)));
    CHECK_FALSE(compare_terminals(canonicalize(plain.final), canonicalize(moved.final)));
  }
}

TEST_CASE("identity oracle") {
  auto id = E("\\x:node. x");
  CHECK(prove_identity(compose(id, id)).proved());
  CHECK(prove_identity(id).proved());

  auto halve_then_double = prove_identity(compose(doubler(), halver()));
  REQUIRE(halve_then_double.refuted());
  REQUIRE_FALSE(halve_then_double.witness.empty());
  auto w = halve_then_double.witness[0];
  auto out = eval(app(compose(doubler(), halver()), w));
  REQUIRE(out);
  CHECK_FALSE(alpha_equal(*out, w));
  CHECK(payload_of(w) % 2 != 0);

  auto addf = graph_op("addRelationship", {key("b"), key("f")}).function();
  auto delf = graph_op("deleteRelationship", {key("b"), key("f")}).function();
  CHECK(prove_identity(compose(delf, addf), true).proved());
  CHECK_FALSE(prove_identity(compose(delf, addf), false).proved());
  CHECK_FALSE(prove_identity(compose(addf, delf), true).proved());
}

TEST_CASE("commutativity oracle") {
  CHECK(prove_commutative(sum_fold()).proved());
  auto sub = prove_commutative(subtraction_fold());
  CHECK(sub.refuted());
  CHECK(sub.witness.size() >= 2);
  CHECK(prove_commutative(graph_op("queryNode", {key("b")}).function()).kind ==
        EquivalenceVerdict::Kind::Unknown);
  auto unmarked = E("\\x:node. \\y:node. <pi1 y; pi2 x + pi2 y; pi3 y>");
  CHECK(prove_commutative(unmarked).kind == EquivalenceVerdict::Kind::Unknown);
}

TEST_CASE("the identity oracle is never fooled by a refutable function") {
  // Small family of node transformers; a Proved verdict must survive
  // evaluation on random nodes.
  const std::vector<std::string> parts = {
      "\\x:node. x",
      "\\x:node. <pi1 x; pi2 x + 1; pi3 x>",
      "\\x:node. <pi1 x; pi2 x - 1; pi3 x>",
      "\\x:node. <pi1 x; pi2 x * 2; pi3 x>",
      "\\x:node. <pi1 x; pi2 x / 2; pi3 x>",
      "\\x:node. <pi1 x; pi2 x; pi3 x ++ [#q]>",
      "\\x:node. <pi1 x; pi2 x; pi3 x -- [#q]>",
      "\\x:node. <pi1 x; 0; pi3 x>",
  };
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1);
  std::uniform_int_distribution<int> payload(-50, 50);
  int proved = 0;
  for (int i = 0; i < 60; ++i) {
    auto f = compose(E(parts[pick(rng)]), E(parts[pick(rng)]));
    auto v = prove_identity(f);
    if (!v.proved()) continue;
    ++proved;
    for (int j = 0; j < 20; ++j) {
      std::vector<std::string> adj;
      if (j % 3 == 0) adj.push_back("q");
      if (j % 2 == 0) adj.push_back("r");
      auto n = N("p", payload(rng), adj);
      auto out = eval(app(f, n));
      REQUIRE(out);
      CHECK(alpha_equal(*out, n));
    }
  }
  CHECK(proved > 0);
}

TEST_CASE("rewrites conserve labels and reorderings keep operations") {
  std::size_t seen = 0;
  for (const auto* p : runnable_corpus()) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      TloRandomScheduler sched(seed);
      walk(p->initial(), sched, [&](const Configuration& before, const Redex& r, const Configuration& after) {
        if (!r.is_opt()) return;
        ++seen;
        const auto& was = before.backend[r.station].streamlet;
        auto res = apply_rewrite(was, r.rewrite);
        CHECK(labels(was) == labels(res.stream, res.results));
        CHECK(labels_of(res.stream) == labels_of(after.backend[r.station].streamlet));
        if (r.rewrite.rule == TloRule::ReorderD || r.rewrite.rule == TloRule::ReorderRR) {
          std::multiset<std::string> ops_before, ops_after;
          for (const auto& u : was)
            for (const auto& lo : u) ops_before.insert(lo.label.spelling() + to_sexpr(lo.op));
          for (const auto& u : res.stream)
            for (const auto& lo : u) ops_after.insert(lo.label.spelling() + to_sexpr(lo.op));
          CHECK(ops_before == ops_after);
        }
      });
    }
  }
  CHECK(seen > 50);
}

TEST_CASE("single rewrites preserve eager outcomes") {
  for (const auto* p : runnable_corpus()) {
    CAPTURE(p->name);
    auto rep = check_tlo_soundness(p->name, p->initial(), 3, 20);
    CHECK(rep.failures.empty());
    for (const auto& f : rep.failures) MESSAGE(f.to_json().dump());
  }
}
