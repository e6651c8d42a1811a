#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cg/engine/run.hpp"
#include "cg/harness/corpus.hpp"
#include "cg/harness/determinism.hpp"
#include "cg/harness/metatheory.hpp"
#include "cg/harness/trace.hpp"
#include "cg/runtime/serialize.hpp"
#include "cg/syntax/parser.hpp"
#include "cg/syntax/printer.hpp"
#include "cg/types/typecheck.hpp"

namespace {

enum Exit { kPass = 0, kFailure = 1, kUsage = 2, kInconclusive = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Loaded {
  std::string name;
  std::string file;
  cg::Program program;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A path to a .cg file, or the name of a built-in corpus program.
Loaded load(const std::string& where) {
  Loaded l;
  if (std::filesystem::exists(where)) {
    l.file = where;
    l.name = std::filesystem::path(where).stem().string();
    l.program = cg::parse_program(read_file(where), where);
    return l;
  }
  for (const auto& p : cg::corpus()) {
    if (p.name == where) {
      l.file = p.name + ".cg";
      l.name = p.name;
      l.program = p.parse();
      return l;
    }
  }
  throw UsageError("no such file or corpus program: " + where);
}

cg::Configuration initial_of(const Loaded& l) { return cg::init(l.program.expr, l.program.graph); }

void report_type_error(const std::string& file, const cg::TypeError& e) {
  std::cerr << file << ':' << e.loc().line << ':' << e.loc().column << ": " << e.rule() << ": "
            << e.detail() << '\n';
}

void report_syntax_error(const cg::SyntaxError& e) {
  std::cerr << e.file() << ':' << e.loc().line << ':' << e.loc().column << ": syntax: "
            << e.detail() << '\n';
}

cg::TloOptions tlo_options(const std::string& tlo, const std::string& rules, bool set_adjacency) {
  cg::TloOptions o;
  if (tlo == "off") {
    o = cg::TloOptions::none();
  } else if (!rules.empty()) {
    try {
      o = cg::TloOptions::parse(rules);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  o.assume_set_adjacency = set_adjacency;
  return o;
}

int cmd_typecheck(const std::string& path) {
  std::string file = std::filesystem::exists(path) ? path : path + ".cg";
  try {
    auto l = load(path);
    file = l.file;
    auto c = initial_of(l);
    auto t = cg::type_of_config(cg::TypingEnv{}, c);
    std::cout << cg::to_string(*t.type) << " with emittability "
              << (t.effect == cg::Emittability::T ? "T" : "F") << '\n';
    return kPass;
  } catch (const cg::SyntaxError& e) {
    report_syntax_error(e);
  } catch (const cg::TypeError& e) {
    report_type_error(file, e);
  }
  return kFailure;
}

struct RunFlags {
  std::string file;
  std::string scheduler = "eager";
  std::uint64_t seed = 0;
  std::size_t fuel = 1'000'000;
  std::string trace;
  std::string replay;
  std::string tlo = "on";
  std::string tlo_rules;
  bool set_adjacency = false;
};

int cmd_run(const RunFlags& f) {
  auto l = load(f.file);
  auto c = initial_of(l);
  auto rules = tlo_options(f.tlo, f.tlo_rules, f.set_adjacency);

  std::unique_ptr<cg::Scheduler> sched;
  std::vector<cg::TraceLine> replayed;
  if (!f.replay.empty()) {
    std::ifstream in(f.replay);
    if (!in) throw UsageError("cannot read " + f.replay);
    replayed = cg::read_trace(in);
    cg::EngineOptions eo;
    eo.tlo = true;
    eo.tlo_rules = rules;
    sched = std::make_unique<cg::ReplayScheduler>(cg::replay_choices(replayed), eo);
  } else {
    try {
      sched = cg::make_scheduler(f.scheduler, f.seed, rules);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  cg::RunOptions ro;
  ro.fuel = f.fuel;
  ro.record_trace = !f.trace.empty() || !f.replay.empty();
  auto r = cg::run(c, *sched, ro);

  if (!f.trace.empty()) {
    std::ofstream out(f.trace);
    if (!out) throw UsageError("cannot write " + f.trace);
    cg::write_trace(out, r.trace);
  }

  cg::Json j;
  j["program"] = l.name;
  j["scheduler"] = sched->name();
  j["seed"] = f.seed;
  j["status"] = cg::to_string(r.status);
  j["steps"] = r.steps;
  j["opt_steps"] = r.opt_steps;
  j["emitted"] = r.emitted.size();
  j["residual_claims"] = r.residual_claims;
  j["digest"] = cg::digest(r.final);
  j["final"] = cg::to_json(r.final);
  std::cout << j.dump(2) << '\n';

  std::cerr << l.name << ": " << cg::to_string(r.status) << " after " << r.steps << " steps ("
            << r.opt_steps << " rewrites), frontend " << cg::to_source(*r.final.frontend) << '\n';
  if (r.residual_claims)
    std::cerr << "warning: " << r.residual_claims
              << " claim(s) read a result whose target was not fully reached\n";

  if (!f.replay.empty()) {
    bool same = !replayed.empty() && !r.trace.empty() && replayed.back().digest == r.trace.back().digest &&
                replayed.size() == r.trace.size();
    if (replayed.empty() && r.trace.empty()) same = true;
    std::cerr << "replay: " << (same ? "reproduced the recorded run" : "final digest differs") << '\n';
    if (!same) return kFailure;
  }
  switch (r.status) {
    case cg::RunStatus::Terminal:
      return kPass;
    case cg::RunStatus::Stuck:
      return kFailure;
    case cg::RunStatus::Diverged:
      return kInconclusive;
  }
  return kFailure;
}

struct DeterminismFlags {
  std::string file;
  std::size_t runs = 50;
  std::uint64_t seed = 0;
  std::size_t fuel = 1'000'000;
  bool strict = false;
  std::string tlo_rules;
  bool set_adjacency = false;
};

int cmd_determinism(const DeterminismFlags& f) {
  auto l = load(f.file);
  auto c = initial_of(l);
  if (f.runs < 2) throw UsageError("--runs must be at least 2");
  cg::DeterminismOptions o;
  o.runs = f.runs;
  o.seed = f.seed;
  o.fuel = f.fuel;
  o.strict_residuals = f.strict;
  o.tlo_rules = tlo_options("on", f.tlo_rules, f.set_adjacency);
  auto report = cg::check_determinism(l.name, c, o);
  auto j = report.to_json();
  if (report.witness_pair) j["witness"]["traces"] = cg::divergence_traces(c, report, o);
  std::cout << j.dump(2) << '\n';
  std::cerr << l.name << ": " << cg::to_string(report.verdict) << " over " << f.runs
            << " schedules";
  if (report.witness_pair) std::cerr << " (" << report.witness << ")";
  std::cerr << '\n';
  switch (report.verdict) {
    case cg::DeterminismReport::Verdict::AllEqual:
      return kPass;
    case cg::DeterminismReport::Verdict::Divergence:
      return kFailure;
    case cg::DeterminismReport::Verdict::Inconclusive:
      return kInconclusive;
  }
  return kFailure;
}

struct MetatheoryFlags {
  std::string file;
  std::uint64_t seed = 0;
  std::size_t steps = 2000;
  std::size_t samples = 50;
};

int cmd_metatheory(const MetatheoryFlags& f) {
  auto l = load(f.file);
  auto c = initial_of(l);
  auto walk = cg::check_preservation_progress(l.name, c, f.seed, f.steps);
  auto eager = cg::check_eager_determinism(l.name, c);
  auto sound = cg::check_tlo_soundness(l.name, c, f.seed, f.samples);
  bool pass = walk.passed() && eager.passed() && sound.passed();

  cg::Json j;
  j["program"] = l.name;
  j["seed"] = f.seed;
  j["passed"] = pass;
  j["preservation_progress"] = walk.to_json();
  j["eager_determinism"] = eager.to_json();
  j["tlo_soundness"] = sound.to_json();
  std::cout << j.dump(2) << '\n';
  std::cerr << l.name << ": preservation/progress " << (walk.passed() ? "ok" : "FAILED") << " ("
            << walk.steps << " steps), eager determinism " << (eager.passed() ? "ok" : "FAILED")
            << ", rewrite soundness " << (sound.passed() ? "ok" : "FAILED") << " (" << sound.samples
            << " samples)\n";
  return pass ? kPass : kFailure;
}

int cmd_trace_diff(const std::string& a_path, const std::string& b_path) {
  std::ifstream a_in(a_path), b_in(b_path);
  if (!a_in) throw UsageError("cannot read " + a_path);
  if (!b_in) throw UsageError("cannot read " + b_path);
  auto a = cg::read_trace(a_in);
  auto b = cg::read_trace(b_in);
  auto d = cg::diff_traces(a, b);
  std::cout << d.to_json(a, b).dump(2) << '\n';
  if (d.identical()) {
    std::cerr << "traces are identical (" << a.size() << " steps)\n";
    return kPass;
  }
  std::cerr << "traces differ from step " << *d.first_divergence << "; final digests "
            << (d.final_digest_a == d.final_digest_b ? "agree" : "differ") << '\n';
  return kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpreter and property harness for continuous graph processing programs"};
  app.require_subcommand(1);

  std::string typecheck_file;
  auto* typecheck = app.add_subcommand("typecheck", "Type-check a program");
  typecheck->add_option("file", typecheck_file, "Program file or corpus name")->required();

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run a program to completion");
  run->add_option("file", run_flags.file, "Program file or corpus name")->required();
  run->add_option("--scheduler", run_flags.scheduler, "eager, random or tlo-random")
      ->check(CLI::IsMember({"eager", "random", "tlo-random"}));
  run->add_option("--seed", run_flags.seed, "Seed for random schedulers");
  run->add_option("--fuel", run_flags.fuel, "Step limit");
  run->add_option("--trace", run_flags.trace, "Write a JSON Lines trace here");
  run->add_option("--replay", run_flags.replay, "Re-take the choices of a recorded trace");
  run->add_option("--tlo", run_flags.tlo, "Stream rewriting on or off")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_option("--tlo-rules", run_flags.tlo_rules, "Comma-separated rewrite rules");
  run->add_flag("--assume-set-adjacency", run_flags.set_adjacency,
                "Treat adjacency lists as sets when proving identities");

  DeterminismFlags det_flags;
  auto* det = app.add_subcommand("check-determinism", "Compare terminals across schedules");
  det->add_option("file", det_flags.file, "Program file or corpus name")->required();
  det->add_option("--runs", det_flags.runs, "Schedules including the eager one");
  det->add_option("--seed", det_flags.seed, "Seed of the first random schedule");
  det->add_option("--fuel", det_flags.fuel, "Step limit per run");
  det->add_flag("--strict-residuals", det_flags.strict, "Also compare residual targets");
  det->add_option("--tlo-rules", det_flags.tlo_rules, "Comma-separated rewrite rules");
  det->add_flag("--assume-set-adjacency", det_flags.set_adjacency,
                "Treat adjacency lists as sets when proving identities");

  MetatheoryFlags meta_flags;
  auto* meta = app.add_subcommand("check-metatheory",
                                  "Preservation, progress, eager determinism, rewrite soundness");
  meta->add_option("file", meta_flags.file, "Program file or corpus name")->required();
  meta->add_option("--seed", meta_flags.seed, "Seed");
  meta->add_option("--steps", meta_flags.steps, "Random-walk steps");
  meta->add_option("--samples", meta_flags.samples, "Rewrite samples");

  std::string diff_a, diff_b;
  auto* diff = app.add_subcommand("trace-diff", "Compare two traces");
  diff->add_option("a", diff_a, "First trace")->required();
  diff->add_option("b", diff_b, "Second trace")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*typecheck) return cmd_typecheck(typecheck_file);
    if (*run) return cmd_run(run_flags);
    if (*det) return cmd_determinism(det_flags);
    if (*meta) return cmd_metatheory(meta_flags);
    if (*diff) return cmd_trace_diff(diff_a, diff_b);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const cg::SyntaxError& e) {
    report_syntax_error(e);
    return kUsage;
  } catch (const cg::TypeError& e) {
    std::cerr << "type error: " << e.rule() << ": " << e.detail() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
