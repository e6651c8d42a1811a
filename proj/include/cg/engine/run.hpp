#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cg/engine/redex.hpp"

namespace cg {

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string name() const = 0;
  // Options the run loop should enumerate with.
  virtual EngineOptions engine_options() const { return {}; }
  // Index into `redexes` (nonempty) of the step to take.
  virtual std::size_t choose(const Configuration& c, const std::vector<Redex>& redexes) = 0;
};

// One operation at a time. When the configuration was not reached eagerly
// (more than one operation in flight) it falls back to the first non-rewrite
// redex, then to an Unbatch, so any configuration can be driven to the end.
class EagerScheduler : public Scheduler {
 public:
  std::string name() const override { return "eager"; }
  EngineOptions engine_options() const override;
  std::size_t choose(const Configuration& c, const std::vector<Redex>& redexes) override;
};

// Uniform over the non-rewrite redexes.
class RandomScheduler : public Scheduler {
 public:
  explicit RandomScheduler(std::uint64_t seed) : rng_(seed) {}
  std::string name() const override { return "random"; }
  std::size_t choose(const Configuration& c, const std::vector<Redex>& redexes) override;

 private:
  std::mt19937_64 rng_;
};

// Random with rewrites: a rewrite is taken with probability `opt_weight`
// whenever one is offered, never undoing the rewrite taken on the previous
// step at the same place.
class TloRandomScheduler : public Scheduler {
 public:
  TloRandomScheduler(std::uint64_t seed, TloOptions rules = {}, double opt_weight = 0.2);
  std::string name() const override { return "tlo-random"; }
  EngineOptions engine_options() const override;
  std::size_t choose(const Configuration& c, const std::vector<Redex>& redexes) override;

 private:
  bool undoes_previous(const Configuration& c, const Redex& r) const;

  std::mt19937_64 rng_;
  TloOptions rules_;
  double opt_weight_;
  std::optional<RewriteCandidate> previous_;
  std::size_t previous_first_unit_size_ = 0;
};

// Re-takes recorded (rule, site) choices in order.
class ReplayScheduler : public Scheduler {
 public:
  struct Choice {
    std::string rule;
    std::string site;
  };
  ReplayScheduler(std::vector<Choice> choices, EngineOptions options);
  std::string name() const override { return "replay"; }
  EngineOptions engine_options() const override { return options_; }
  std::size_t choose(const Configuration& c, const std::vector<Redex>& redexes) override;
  bool exhausted() const { return next_ >= choices_.size(); }

 private:
  std::vector<Choice> choices_;
  EngineOptions options_;
  std::size_t next_ = 0;
};

std::unique_ptr<Scheduler> make_scheduler(const std::string& name, std::uint64_t seed,
                                          const TloOptions& rules = {});

struct StepRecord {
  std::size_t step = 0;
  Redex redex;
  std::vector<Label> labels;
  std::string digest;  // post-step configuration digest
};

enum class RunStatus { Terminal, Diverged, Stuck };

const char* to_string(RunStatus s);

struct RunOptions {
  std::size_t fuel = 1'000'000;
  bool record_trace = false;
  // Called before each step with the enumeration; lets property checks
  // observe every configuration without copying it.
  std::function<void(const Configuration&, const std::vector<Redex>&)> observer;
};

struct RunResult {
  RunStatus status = RunStatus::Terminal;
  Configuration final;
  std::size_t steps = 0;
  std::vector<StepRecord> trace;
  std::vector<LabeledOp> emitted;  // in emission order
  std::size_t opt_steps = 0;
  std::size_t residual_claims = 0;
  std::size_t emits_inside_loads = 0;
};

RunResult run(Configuration c, Scheduler& scheduler, const RunOptions& options = {});

}  // namespace cg
