#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cg/engine/run.hpp"
#include "cg/runtime/serialize.hpp"

namespace cg {

struct PropertyFailure {
  std::string property;
  std::string program;
  std::uint64_t seed = 0;
  std::size_t step = 0;
  std::string rule;
  std::string site;
  std::string message;

  Json to_json() const;
};

struct WalkReport {
  std::size_t steps = 0;       // reduction steps taken in total
  std::size_t restarts = 0;    // walks that reached a terminal configuration
  std::size_t type_checks = 0;
  std::size_t tau_changes = 0;
  std::size_t effect_flips = 0;  // F at C but T at C'
  std::size_t stuck = 0;
  std::size_t emits_inside_loads = 0;
  std::vector<PropertyFailure> failures;

  bool passed() const { return failures.empty(); }
  Json to_json() const;
};

// Random walk under the rewriting scheduler, re-typing every configuration.
// A walk that terminates restarts from `initial` with the next seed.
WalkReport check_preservation_progress(const std::string& program, const Configuration& initial,
                                       std::uint64_t seed, std::size_t steps);

struct EagerReport {
  std::size_t steps = 0;
  std::size_t max_enabled = 0;
  std::vector<PropertyFailure> failures;

  bool passed() const { return failures.empty(); }
  Json to_json() const;
};

// Drives the eager scheduler and checks that at most one eager redex is
// enabled at every configuration along the way.
EagerReport check_eager_determinism(const std::string& program, const Configuration& initial,
                                    std::size_t fuel = 1'000'000);

struct SoundnessReport {
  std::size_t samples = 0;
  std::map<std::string, std::size_t> per_rule;
  std::size_t inconclusive = 0;  // eager completion diverged on one side
  std::vector<PropertyFailure> failures;

  bool passed() const { return failures.empty(); }
  Json to_json() const;
};

// Eager completion of an arbitrary configuration: eager redexes first, then
// any non-rewrite redex, then Unbatch.
RunResult eager_complete(Configuration c, std::size_t fuel = 1'000'000);

// Runs `initial` under tlo-random schedules and, at randomly chosen
// configurations that offer rewrites, applies one rewrite and compares the
// eager completions of both sides. Stops after `samples` comparisons.
SoundnessReport check_tlo_soundness(const std::string& program, const Configuration& initial,
                                    std::uint64_t seed, std::size_t samples,
                                    const TloOptions& rules = {});

void merge_into(SoundnessReport& into, const SoundnessReport& from);
void merge_into(WalkReport& into, const WalkReport& from);

}  // namespace cg
