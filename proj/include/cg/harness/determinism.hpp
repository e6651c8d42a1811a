#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cg/engine/run.hpp"
#include "cg/runtime/serialize.hpp"

namespace cg {

struct ScheduleOutcome {
  std::size_t index = 0;
  std::string scheduler;
  std::optional<std::uint64_t> seed;  // none for eager
  RunStatus status = RunStatus::Terminal;
  std::size_t steps = 0;
  std::size_t opt_steps = 0;
  std::string digest;  // canonical terminal digest, empty unless terminal
};

struct DeterminismReport {
  enum class Verdict { AllEqual, Divergence, Inconclusive };

  std::string program;
  std::uint64_t seed = 0;
  bool strict_residuals = false;
  std::vector<ScheduleOutcome> outcomes;
  Verdict verdict = Verdict::AllEqual;
  // Divergence: the two schedules and the first difference between them.
  std::optional<std::pair<std::size_t, std::size_t>> witness_pair;
  std::string witness;

  Json to_json() const;
};

const char* to_string(DeterminismReport::Verdict v);

struct DeterminismOptions {
  std::size_t runs = 50;
  std::uint64_t seed = 0;
  bool strict_residuals = false;
  std::size_t fuel = 1'000'000;
  TloOptions tlo_rules;
  std::size_t threads = 0;  // 0: hardware concurrency
};

// Schedule 0 is eager; schedules 1..runs-1 are tlo-random with seeds
// seed, seed+1, ... The report does not depend on thread interleaving.
DeterminismReport check_determinism(const std::string& program_name, const Configuration& initial,
                                    const DeterminismOptions& options = {});

// Traces of the two schedules named by a divergence witness, as {"a", "b"}
// arrays of trace lines. Null when the report has no witness.
Json divergence_traces(const Configuration& initial, const DeterminismReport& report,
                       const DeterminismOptions& options = {});

}  // namespace cg
