#include "cg/engine/run.hpp"

#include <stdexcept>

#include "cg/runtime/serialize.hpp"

namespace cg {

namespace {

std::vector<std::size_t> indices_where(const std::vector<Redex>& rs, bool opt) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (rs[i].is_opt() == opt) out.push_back(i);
  return out;
}

template <typename Rng>
std::size_t pick(Rng& rng, const std::vector<std::size_t>& from) {
  std::uniform_int_distribution<std::size_t> d(0, from.size() - 1);
  return from[d(rng)];
}

}  // namespace

EngineOptions EagerScheduler::engine_options() const {
  EngineOptions o;
  o.tlo = true;
  o.tlo_rules = TloOptions::none();
  o.tlo_rules.set(TloRule::Unbatch, true);
  return o;
}

std::size_t EagerScheduler::choose(const Configuration& c, const std::vector<Redex>& redexes) {
  for (std::size_t i = 0; i < redexes.size(); ++i)
    if (is_eager_redex(c, redexes[i])) return i;
  for (std::size_t i = 0; i < redexes.size(); ++i)
    if (!redexes[i].is_opt()) return i;
  return 0;
}

std::size_t RandomScheduler::choose(const Configuration&, const std::vector<Redex>& redexes) {
  auto plain = indices_where(redexes, false);
  if (plain.empty()) return pick(rng_, indices_where(redexes, true));
  return pick(rng_, plain);
}

TloRandomScheduler::TloRandomScheduler(std::uint64_t seed, TloOptions rules, double opt_weight)
    : rng_(seed), rules_(rules), opt_weight_(opt_weight) {
  // Batch is only offered together with its inverse so a batched unit can
  // always be split again.
  if (rules_.allows(TloRule::Batch)) rules_.set(TloRule::Unbatch, true);
}

EngineOptions TloRandomScheduler::engine_options() const {
  EngineOptions o;
  o.tlo = true;
  o.tlo_rules = rules_;
  return o;
}

bool TloRandomScheduler::undoes_previous(const Configuration& c, const Redex& r) const {
  (void)c;
  if (!previous_ || !r.is_opt()) return false;
  const auto& p = *previous_;
  const auto& q = r.rewrite;
  if (p.station != q.station || p.position != q.position) return false;
  switch (p.rule) {
    case TloRule::Batch:
      return q.rule == TloRule::Unbatch && q.split == previous_first_unit_size_;
    case TloRule::Unbatch:
      return q.rule == TloRule::Batch;
    case TloRule::ReorderD:
    case TloRule::ReorderRR:
      return q.rule == TloRule::ReorderD || q.rule == TloRule::ReorderRR;
    default:
      return false;
  }
}

std::size_t TloRandomScheduler::choose(const Configuration& c, const std::vector<Redex>& redexes) {
  auto plain = indices_where(redexes, false);
  std::vector<std::size_t> opts;
  for (std::size_t i = 0; i < redexes.size(); ++i)
    if (redexes[i].is_opt() && !undoes_previous(c, redexes[i])) opts.push_back(i);

  std::bernoulli_distribution take_opt(opt_weight_);
  std::size_t chosen;
  if (!opts.empty() && (plain.empty() || take_opt(rng_)))
    chosen = pick(rng_, opts);
  else if (!plain.empty())
    chosen = pick(rng_, plain);
  else
    chosen = pick(rng_, indices_where(redexes, true));

  const auto& r = redexes[chosen];
  if (r.is_opt()) {
    previous_ = r.rewrite;
    previous_first_unit_size_ = c.backend[r.station].streamlet[r.rewrite.position].size();
  } else {
    previous_.reset();
  }
  return chosen;
}

ReplayScheduler::ReplayScheduler(std::vector<Choice> choices, EngineOptions options)
    : choices_(std::move(choices)), options_(options) {}

std::size_t ReplayScheduler::choose(const Configuration&, const std::vector<Redex>& redexes) {
  if (next_ >= choices_.size()) throw std::runtime_error("replay trace exhausted");
  const auto& want = choices_[next_];
  for (std::size_t i = 0; i < redexes.size(); ++i) {
    if (to_string(redexes[i].rule) == want.rule && redexes[i].site_string() == want.site) {
      ++next_;
      return i;
    }
  }
  throw std::runtime_error("replay step " + std::to_string(next_) + " (" + want.rule + " at " +
                           want.site + ") is not enabled");
}

std::unique_ptr<Scheduler> make_scheduler(const std::string& name, std::uint64_t seed,
                                          const TloOptions& rules) {
  if (name == "eager") return std::make_unique<EagerScheduler>();
  if (name == "random") return std::make_unique<RandomScheduler>(seed);
  if (name == "tlo-random") return std::make_unique<TloRandomScheduler>(seed, rules);
  throw std::invalid_argument("unknown scheduler '" + name + "'");
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Terminal:
      return "terminal";
    case RunStatus::Diverged:
      return "diverged";
    case RunStatus::Stuck:
      return "stuck";
  }
  return "?";
}

RunResult run(Configuration c, Scheduler& scheduler, const RunOptions& options) {
  RunResult result;
  const EngineOptions engine = scheduler.engine_options();
  for (;;) {
    EnumerationStats stats;
    auto redexes = enumerate_redexes(c, engine, &stats);
    result.emits_inside_loads += stats.emits_inside_loads;
    if (options.observer) options.observer(c, redexes);
    if (redexes.empty()) {
      result.status = is_terminal(c) ? RunStatus::Terminal : RunStatus::Stuck;
      break;
    }
    if (result.steps >= options.fuel) {
      result.status = RunStatus::Diverged;
      break;
    }
    std::size_t idx = scheduler.choose(c, redexes);
    const Redex& r = redexes.at(idx);
    auto fx = apply_in_place(c, r);
    if (fx.emitted) result.emitted.push_back(*fx.emitted);
    if (fx.claimed_with_residual) ++result.residual_claims;
    if (r.is_opt()) ++result.opt_steps;
    if (options.record_trace)
      result.trace.push_back(StepRecord{result.steps, r, std::move(fx.labels), digest(c)});
    ++result.steps;
  }
  result.final = std::move(c);
  return result;
}

}  // namespace cg
