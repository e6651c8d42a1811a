#include <doctest.h>

#include <sstream>

#include "cg/harness/canonical.hpp"
#include "cg/harness/corpus.hpp"
#include "cg/harness/determinism.hpp"
#include "cg/harness/metatheory.hpp"
#include "cg/harness/trace.hpp"
#include "cg/syntax/terms.hpp"
#include "cg/types/typecheck.hpp"
#include "support.hpp"

using namespace cg;
using namespace cg::test;

namespace {

RunResult eager_run(const std::string& name) {
  EagerScheduler eager;
  return run_with(corpus_program(name).initial(), eager, true);
}

// Shifts every generated key and label id by a monotone map.
ExprPtr shift_ids(const ExprPtr& e) {
  if (e->kind == ExprKind::Key && e->key.is_generated()) return key_lit(Key::generated(e->key.id() * 7 + 3));
  if (e->kind == ExprKind::Label) return label_lit(Label{e->label.id * 5 + 2});
  ExprPtr out = e;
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    auto kid = shift_ids(e->kids[i]);
    if (kid != e->kids[i]) out = with_kid(out, i, kid);
  }
  return out;
}

Configuration shifted(const Configuration& c) {
  Configuration d;
  for (const auto& s : c.backend) d.backend.push_back(make_station(shift_ids(s.node)));
  for (const auto& [label, entry] : c.store) {
    ResultEntry e{Label{label.id * 5 + 2}, {}, shift_ids(entry.value)};
    for (const auto& k : entry.residual)
      e.residual.push_back(k.is_generated() ? Key::generated(k.id() * 7 + 3) : k);
    d.store.emplace(e.label, e);
  }
  d.frontend = shift_ids(c.frontend);
  return d;
}

}  // namespace

TEST_CASE("the corpus") {
  std::vector<std::string> names;
  for (const auto& p : corpus()) names.push_back(p.name);
  CHECK(names.size() == 6);
  for (const char* n : {"coresocial", "corepr", "chronological", "fold", "backend_emission",
                        "reuse_counterexample"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK(runnable_corpus().size() == 5);
  CHECK_THROWS(corpus_program("missing"));
  CHECK_THROWS_AS(corpus_program("backend_emission").initial(), TypeError);

  for (const auto* p : runnable_corpus()) {
    CAPTURE(p->name);
    auto r = eager_run(p->name);
    REQUIRE(r.status == RunStatus::Terminal);
    auto complaint = p->expect(r);
    CHECK_MESSAGE(!complaint, complaint.value_or(""));
  }
}

TEST_CASE("expectations reject wrong terminals") {
  auto r = eager_run("chronological");
  r.final.frontend = int_lit(22);
  CHECK(corpus_program("chronological").expect(r));
}

TEST_CASE("the pagerank program emits in superstep order") {
  auto r = eager_run("corepr");
  REQUIRE(r.emitted.size() == 9);
  std::vector<std::string> sig;
  for (const auto& e : r.emitted) sig.push_back(emission_signature(e.op));
  const std::vector<std::string> expected = {
      "mapVal [#k1, #k2]", "foldVal [#k1, #k2]", "foldVal [#k1, #k2]", "mapVal [#k1]", "mapVal [#k2]",
      "foldVal [#k1, #k2]", "foldVal [#k1, #k2]", "mapVal [#k1]", "mapVal [#k2]"};
  CHECK(sig == expected);
}

TEST_CASE("canonical terminals") {
  auto r = eager_run("coresocial");
  auto canon = canonicalize(r.final);

  SUBCASE("idempotent") {
    Configuration again;
    for (const auto& n : canon.backend) again.backend.push_back(make_station(n));
    for (const auto& [id, e] : canon.store) again.store.emplace(Label{id}, ResultEntry{Label{id}, e.residual, e.value});
    again.frontend = canon.frontend;
    CHECK(canonicalize(again).digest(true) == canon.digest(true));
  }
  SUBCASE("invariant under monotone renaming of fresh ids") {
    auto moved = canonicalize(shifted(r.final));
    CHECK(moved.digest(true) == canon.digest(true));
    CHECK_FALSE(compare_terminals(canon, moved, true));
  }
  SUBCASE("differences are reported") {
    auto other = r.final;
    other.frontend = int_lit(99);
    auto diff = compare_terminals(canon, canonicalize(other), false);
    REQUIRE(diff);
    CHECK(diff->find("frontend") != std::string::npos);

    auto store_diff = r.final;
    auto& entry = store_diff.store.begin()->second;
    entry.value = int_lit(-1);
    CHECK(compare_terminals(canon, canonicalize(store_diff), false));
  }
  SUBCASE("residuals count only when asked") {
    auto other = r.final;
    other.store.begin()->second.residual.push_back(K("ghost"));
    CHECK_FALSE(compare_terminals(canon, canonicalize(other), false));
    CHECK(compare_terminals(canon, canonicalize(other), true));
  }
  SUBCASE("frontends are compared up to term equivalence") {
    auto a = r.final, b = r.final;
    a.frontend = E("\\x:int. x");
    b.frontend = E("\\y:int. (\\z:int. z) y");
    CHECK_FALSE(compare_terminals(canonicalize(a), canonicalize(b), false));
  }
}

TEST_CASE("determinism checks") {
  DeterminismOptions o;
  o.runs = 12;
  o.seed = 4;

  SUBCASE("all schedules agree") {
    auto rep = check_determinism("coresocial", corpus_program("coresocial").initial(), o);
    CHECK(rep.verdict == DeterminismReport::Verdict::AllEqual);
    REQUIRE(rep.outcomes.size() == 12);
    CHECK(rep.outcomes[0].scheduler == "eager");
    CHECK_FALSE(rep.outcomes[0].seed);
    CHECK(rep.outcomes[1].seed == 4u);
    CHECK(rep.outcomes[11].seed == 14u);
    for (const auto& out : rep.outcomes) CHECK(out.digest == rep.outcomes[0].digest);
  }
  SUBCASE("reports are reproducible whatever the thread count") {
    auto c = corpus_program("corepr").initial();
    o.threads = 1;
    auto a = check_determinism("corepr", c, o).to_json().dump();
    o.threads = 4;
    auto b = check_determinism("corepr", c, o).to_json().dump();
    CHECK(a == b);
  }
  SUBCASE("divergent runs make the verdict inconclusive") {
    o.fuel = 300;
    auto rep = check_determinism("loop", init(E("fix (\\f:int -> int. \\x:int. f x) 0")), o);
    CHECK(rep.verdict == DeterminismReport::Verdict::Inconclusive);
    CHECK_FALSE(rep.witness_pair);
  }
  SUBCASE("a single run is refused") {
    o.runs = 1;
    CHECK_THROWS_AS(check_determinism("x", init(int_lit(1)), o), std::invalid_argument);
  }
  SUBCASE("json shape") {
    auto j = check_determinism("fold", corpus_program("fold").initial(), o).to_json();
    CHECK(j["verdict"] == "all-equal");
    CHECK(j["runs"] == 12);
    CHECK(j["schedules"].size() == 12);
    CHECK(j["witness"].is_null());
  }
}

TEST_CASE("preservation and progress walks") {
  SUBCASE("coresocial") {
    auto rep = check_preservation_progress("coresocial", corpus_program("coresocial").initial(), 0, 2000);
    CHECK(rep.steps == 2000);
    CHECK(rep.type_checks == 2000);
    CHECK(rep.passed());
    CHECK(rep.tau_changes == 0);
    CHECK(rep.effect_flips == 0);
    CHECK(rep.stuck == 0);
  }
  SUBCASE("a terminal configuration passes vacuously") {
    auto rep = check_preservation_progress("const", init(int_lit(7)), 0, 100);
    CHECK(rep.steps == 0);
    CHECK(rep.passed());
  }
  SUBCASE("a corrupted configuration fails to type") {
    auto c = incremental_folding();
    c.store.emplace(Label{1}, ResultEntry{Label{1}, {}, N("k0", 0)});
    CHECK_THROWS_AS(type_of_config(TypingEnv{}, c), TypeError);
  }
}

TEST_CASE("eager determinism and rewrite soundness reports") {
  auto c = corpus_program("fold").initial();
  auto eager = check_eager_determinism("fold", c);
  CHECK(eager.passed());
  CHECK(eager.max_enabled == 1);
  CHECK(eager.steps > 0);

  auto sound = check_tlo_soundness("coresocial", corpus_program("coresocial").initial(), 1, 30);
  CHECK(sound.samples == 30);
  CHECK(sound.passed());
  auto j = sound.to_json();
  CHECK(j["samples"] == 30);
}

TEST_CASE("traces") {
  TloRandomScheduler sched(2);
  auto r = run_with(corpus_program("chronological").initial(), sched, true);
  REQUIRE_FALSE(r.trace.empty());

  std::stringstream buf;
  write_trace(buf, r.trace);
  auto lines = read_trace(buf);
  REQUIRE(lines.size() == r.trace.size());
  for (std::size_t i = 0; i < lines.size(); ++i) CHECK(lines[i] == trace_line(r.trace[i]));
  CHECK(lines.back().digest == r.trace.back().digest);

  auto same = diff_traces(lines, lines);
  CHECK(same.identical());
  CHECK(same.to_json(lines, lines)["first_divergence"].is_null());

  RandomScheduler other(9);
  auto r2 = run_with(corpus_program("chronological").initial(), other, true);
  std::vector<TraceLine> lines2;
  for (const auto& s : r2.trace) lines2.push_back(trace_line(s));
  auto d = diff_traces(lines, lines2);
  CHECK_FALSE(d.identical());
  REQUIRE(d.first_divergence);
  CHECK(d.to_json(lines, lines2)["first_divergence"]["step"] == *d.first_divergence);

  auto prefix = std::vector<TraceLine>(lines.begin(), lines.begin() + 3);
  auto pd = diff_traces(prefix, lines);
  REQUIRE(pd.first_divergence);
  CHECK(*pd.first_divergence == 3);

  std::stringstream bad("{\"step\": 0}\n");
  CHECK_THROWS(read_trace(bad));
}
