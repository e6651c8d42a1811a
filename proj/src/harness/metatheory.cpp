#include "cg/harness/metatheory.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "cg/harness/canonical.hpp"
#include "cg/syntax/printer.hpp"
#include "cg/types/typecheck.hpp"

namespace cg {

namespace {

constexpr std::size_t kMaxFailures = 20;

void add_failure(std::vector<PropertyFailure>& out, PropertyFailure f) {
  if (out.size() < kMaxFailures) out.push_back(std::move(f));
}

PropertyFailure failure_at(const char* property, const std::string& program, std::uint64_t seed,
                           std::size_t step, const Redex* r, std::string message) {
  PropertyFailure f;
  f.property = property;
  f.program = program;
  f.seed = seed;
  f.step = step;
  if (r) {
    f.rule = to_string(r->rule);
    f.site = r->site_string();
  }
  f.message = std::move(message);
  return f;
}

Json failures_json(const std::vector<PropertyFailure>& fs) {
  Json a = Json::array();
  for (const auto& f : fs) a.push_back(f.to_json());
  return a;
}

std::multiset<std::uint64_t> label_ids(const OperationStream& s) {
  std::multiset<std::uint64_t> out;
  for (const auto& l : labels_of(s)) out.insert(l.id);
  return out;
}

}  // namespace

Json PropertyFailure::to_json() const {
  Json j;
  j["property"] = property;
  j["program"] = program;
  j["seed"] = seed;
  j["step"] = step;
  j["rule"] = rule;
  j["site"] = site;
  j["message"] = message;
  return j;
}

Json WalkReport::to_json() const {
  Json j;
  j["steps"] = steps;
  j["restarts"] = restarts;
  j["type_checks"] = type_checks;
  j["tau_changes"] = tau_changes;
  j["effect_flips"] = effect_flips;
  j["stuck"] = stuck;
  j["emits_inside_loads"] = emits_inside_loads;
  j["failures"] = failures_json(failures);
  return j;
}

Json EagerReport::to_json() const {
  Json j;
  j["steps"] = steps;
  j["max_enabled"] = max_enabled;
  j["failures"] = failures_json(failures);
  return j;
}

Json SoundnessReport::to_json() const {
  Json j;
  j["samples"] = samples;
  Json rules;
  for (const auto& [rule, n] : per_rule) rules[rule] = n;
  j["per_rule"] = per_rule.empty() ? Json::object() : rules;
  j["inconclusive"] = inconclusive;
  j["failures"] = failures_json(failures);
  return j;
}

void merge_into(SoundnessReport& into, const SoundnessReport& from) {
  into.samples += from.samples;
  for (const auto& [rule, n] : from.per_rule) into.per_rule[rule] += n;
  into.inconclusive += from.inconclusive;
  for (const auto& f : from.failures) add_failure(into.failures, f);
}

void merge_into(WalkReport& into, const WalkReport& from) {
  into.steps += from.steps;
  into.restarts += from.restarts;
  into.type_checks += from.type_checks;
  into.tau_changes += from.tau_changes;
  into.effect_flips += from.effect_flips;
  into.stuck += from.stuck;
  into.emits_inside_loads += from.emits_inside_loads;
  for (const auto& f : from.failures) add_failure(into.failures, f);
}

WalkReport check_preservation_progress(const std::string& program, const Configuration& initial,
                                       std::uint64_t seed, std::size_t steps) {
  WalkReport rep;
  const TypingEnv empty;
  const Typed base = type_of_config(empty, initial);

  std::uint64_t walk_seed = seed;
  Configuration c = initial;
  TloRandomScheduler sched(walk_seed);
  const EngineOptions engine = sched.engine_options();
  Typed current = base;
  std::size_t walk_steps = 0;

  auto restart = [&] {
    ++rep.restarts;
    ++walk_seed;
    c = initial;
    sched = TloRandomScheduler(walk_seed);
    current = base;
    walk_steps = 0;
  };

  while (rep.steps < steps) {
    EnumerationStats stats;
    auto redexes = enumerate_redexes(c, engine, &stats);
    if (stats.emits_inside_loads) {
      rep.emits_inside_loads += stats.emits_inside_loads;
      add_failure(rep.failures, failure_at("phase-distinction", program, walk_seed, walk_steps,
                                           nullptr, "an emit reached redex position inside a load"));
    }
    if (redexes.empty()) {
      if (!is_terminal(c)) {
        ++rep.stuck;
        add_failure(rep.failures, failure_at("progress", program, walk_seed, walk_steps, nullptr,
                                             "well-typed configuration with no redex"));
      }
      // A program that is terminal from the start gives a vacuous pass.
      if (walk_steps == 0) break;
      restart();
      continue;
    }

    const Redex r = redexes[sched.choose(c, redexes)];
    apply_in_place(c, r);
    ++rep.steps;
    ++walk_steps;

    try {
      Typed t = type_of_config(empty, c);
      ++rep.type_checks;
      if (!same_type(t.type, base.type)) {
        ++rep.tau_changes;
        add_failure(rep.failures,
                    failure_at("preservation", program, walk_seed, walk_steps, &r,
                               "type changed from " + to_string(*base.type) + " to " +
                                   to_string(*t.type)));
      }
      if (current.effect == Emittability::F && t.effect == Emittability::T) {
        ++rep.effect_flips;
        add_failure(rep.failures, failure_at("preservation", program, walk_seed, walk_steps, &r,
                                             "emittability went from F to T"));
      }
      current = t;
    } catch (const TypeError& e) {
      add_failure(rep.failures,
                  failure_at("preservation", program, walk_seed, walk_steps, &r,
                             "ill-typed after step: " + e.rule() + ": " + e.detail()));
      restart();
    }
  }
  return rep;
}

EagerReport check_eager_determinism(const std::string& program, const Configuration& initial,
                                    std::size_t fuel) {
  EagerReport rep;
  EagerScheduler sched;
  RunOptions ro;
  ro.fuel = fuel;
  std::size_t step = 0;
  ro.observer = [&](const Configuration& c, const std::vector<Redex>& redexes) {
    auto eager = eager_enumerate(c);
    rep.max_enabled = std::max(rep.max_enabled, eager.size());
    if (eager.size() > 1) {
      std::string sites;
      for (const auto& r : eager) sites += " " + std::string(to_string(r.rule)) + "@" + r.site_string();
      add_failure(rep.failures, failure_at("eager-determinism", program, 0, step, nullptr,
                                           std::to_string(eager.size()) + " eager redexes:" + sites));
    }
    bool any_task = std::any_of(redexes.begin(), redexes.end(),
                                [](const Redex& r) { return !r.is_opt(); });
    if (eager.empty() && any_task)
      add_failure(rep.failures, failure_at("eager-determinism", program, 0, step, nullptr,
                                           "eager run left the eager fragment"));
    ++step;
  };
  auto r = run(initial, sched, ro);
  rep.steps = r.steps;
  if (r.status != RunStatus::Terminal)
    add_failure(rep.failures, failure_at("eager-determinism", program, 0, r.steps, nullptr,
                                         std::string("eager run ended ") + to_string(r.status)));
  return rep;
}

RunResult eager_complete(Configuration c, std::size_t fuel) {
  EagerScheduler sched;
  RunOptions ro;
  ro.fuel = fuel;
  return run(std::move(c), sched, ro);
}

namespace {

// Compares the eager completions of `c` and of `c` after rewrite `r`.
void compare_rewrite(const std::string& program, std::uint64_t seed, std::size_t step,
                     const Configuration& c, const Redex& r, SoundnessReport& rep) {
  Configuration rewritten = apply(c, r);
  ++rep.samples;
  ++rep.per_rule[to_string(r.rewrite.rule)];

  // Labels move between the streamlet and the store but are never lost.
  auto before = label_ids(c.backend[r.station].streamlet);
  auto after = label_ids(rewritten.backend[r.station].streamlet);
  for (const auto& [label, entry] : rewritten.store)
    if (!c.store.count(label)) after.insert(label.id);
  if (before != after)
    add_failure(rep.failures, failure_at("tlo-label-conservation", program, seed, step, &r,
                                         "labels changed across the rewrite"));

  auto plain = eager_complete(c);
  auto opt = eager_complete(rewritten);
  if (plain.status == RunStatus::Stuck || opt.status == RunStatus::Stuck) {
    add_failure(rep.failures, failure_at("tlo-soundness", program, seed, step, &r,
                                         "eager completion got stuck"));
    return;
  }
  if (plain.status != RunStatus::Terminal || opt.status != RunStatus::Terminal) {
    ++rep.inconclusive;
    return;
  }
  if (auto diff = compare_terminals(canonicalize(plain.final), canonicalize(opt.final)))
    add_failure(rep.failures, failure_at("tlo-soundness", program, seed, step, &r, *diff));
}

}  // namespace

SoundnessReport check_tlo_soundness(const std::string& program, const Configuration& initial,
                                    std::uint64_t seed, std::size_t samples,
                                    const TloOptions& rules) {
  SoundnessReport rep;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution take(0.1);
  constexpr std::size_t kFuel = 1'000'000;

  // Programs that rarely offer a rewrite must not loop forever.
  const std::size_t max_walks = std::max<std::size_t>(samples, 1) * 4;
  for (std::size_t walk = 0; walk < max_walks && rep.samples < samples; ++walk) {
    const std::uint64_t walk_seed = seed + walk;
    TloRandomScheduler sched(walk_seed, rules);
    const EngineOptions engine = sched.engine_options();
    Configuration c = initial;
    for (std::size_t step = 0; step < kFuel && rep.samples < samples; ++step) {
      auto redexes = enumerate_redexes(c, engine);
      if (redexes.empty()) break;
      std::vector<std::size_t> opts;
      for (std::size_t i = 0; i < redexes.size(); ++i)
        if (redexes[i].is_opt()) opts.push_back(i);
      if (!opts.empty() && take(rng)) {
        std::uniform_int_distribution<std::size_t> pick(0, opts.size() - 1);
        compare_rewrite(program, walk_seed, step, c, redexes[opts[pick(rng)]], rep);
      }
      apply_in_place(c, redexes[sched.choose(c, redexes)]);
    }
  }
  return rep;
}

}  // namespace cg
