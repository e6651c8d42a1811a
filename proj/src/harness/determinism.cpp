#include "cg/harness/determinism.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "cg/harness/canonical.hpp"
#include "cg/harness/trace.hpp"

namespace cg {

const char* to_string(DeterminismReport::Verdict v) {
  switch (v) {
    case DeterminismReport::Verdict::AllEqual:
      return "all-equal";
    case DeterminismReport::Verdict::Divergence:
      return "divergence";
    case DeterminismReport::Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

std::unique_ptr<Scheduler> schedule_for(std::size_t index, const DeterminismOptions& o) {
  if (index == 0) return std::make_unique<EagerScheduler>();
  return std::make_unique<TloRandomScheduler>(o.seed + index - 1, o.tlo_rules);
}

Json trace_json(const Configuration& initial, std::size_t index, const DeterminismOptions& o) {
  auto sched = schedule_for(index, o);
  RunOptions ro;
  ro.fuel = o.fuel;
  ro.record_trace = true;
  auto r = run(initial, *sched, ro);
  Json lines = Json::array();
  for (const auto& rec : r.trace) lines.push_back(to_json(trace_line(rec)));
  return lines;
}

}  // namespace

Json DeterminismReport::to_json() const {
  Json j;
  j["program"] = program;
  j["seed"] = seed;
  j["runs"] = outcomes.size();
  j["strict_residuals"] = strict_residuals;
  j["verdict"] = to_string(verdict);
  Json runs = Json::array();
  for (const auto& o : outcomes) {
    Json r;
    r["index"] = o.index;
    r["scheduler"] = o.scheduler;
    r["seed"] = o.seed ? Json(*o.seed) : Json(nullptr);
    r["status"] = to_string(o.status);
    r["steps"] = o.steps;
    r["opt_steps"] = o.opt_steps;
    r["digest"] = o.digest;
    runs.push_back(std::move(r));
  }
  j["schedules"] = std::move(runs);
  if (witness_pair) {
    Json w;
    w["schedules"] = Json::array({witness_pair->first, witness_pair->second});
    w["difference"] = witness;
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

DeterminismReport check_determinism(const std::string& program_name, const Configuration& initial,
                                    const DeterminismOptions& options) {
  if (options.runs < 2) throw std::invalid_argument("check_determinism needs at least two runs");
  const std::size_t n = options.runs;

  std::vector<ScheduleOutcome> outcomes(n);
  std::vector<std::optional<CanonicalTerminal>> terminals(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      auto sched = schedule_for(i, options);
      RunOptions ro;
      ro.fuel = options.fuel;
      auto r = run(initial, *sched, ro);
      ScheduleOutcome& o = outcomes[i];
      o.index = i;
      o.scheduler = sched->name();
      if (i > 0) o.seed = options.seed + i - 1;
      o.status = r.status;
      o.steps = r.steps;
      o.opt_steps = r.opt_steps;
      if (r.status == RunStatus::Terminal) {
        terminals[i] = canonicalize(r.final);
        o.digest = terminals[i]->digest(options.strict_residuals);
      }
    }
  };

  std::size_t threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, n);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  DeterminismReport report;
  report.program = program_name;
  report.seed = options.seed;
  report.strict_residuals = options.strict_residuals;
  report.outcomes = std::move(outcomes);

  bool diverged = false;
  for (std::size_t i = 0; i < n && !report.witness_pair; ++i) {
    const auto& o = report.outcomes[i];
    if (o.status == RunStatus::Stuck) {
      report.witness_pair = {0, i};
      report.witness = "schedule " + std::to_string(i) + " got stuck before terminating";
    } else if (o.status == RunStatus::Diverged) {
      diverged = true;
    } else if (i > 0 && terminals[0]) {
      if (auto diff = compare_terminals(*terminals[0], *terminals[i], options.strict_residuals)) {
        report.witness_pair = {0, i};
        report.witness = *diff;
      }
    }
  }

  if (report.witness_pair) {
    report.verdict = DeterminismReport::Verdict::Divergence;
  } else if (diverged) {
    report.verdict = DeterminismReport::Verdict::Inconclusive;
  } else {
    report.verdict = DeterminismReport::Verdict::AllEqual;
  }
  return report;
}

// Kept separate so callers that want the offending schedules can fetch them
// without paying for traces on every run.
Json divergence_traces(const Configuration& initial, const DeterminismReport& report,
                       const DeterminismOptions& options) {
  Json j;
  if (!report.witness_pair) return j;
  j["a"] = trace_json(initial, report.witness_pair->first, options);
  j["b"] = trace_json(initial, report.witness_pair->second, options);
  return j;
}

}  // namespace cg
