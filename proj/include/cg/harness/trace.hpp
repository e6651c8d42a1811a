#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cg/engine/run.hpp"
#include "cg/runtime/serialize.hpp"

namespace cg {

// One line of a JSON Lines trace.
struct TraceLine {
  std::size_t step = 0;
  std::string rule;
  std::string site;
  std::vector<std::uint64_t> labels;
  std::string digest;

  bool operator==(const TraceLine&) const = default;
};

TraceLine trace_line(const StepRecord& record);
Json to_json(const TraceLine& line);
TraceLine trace_line_from_json(const Json& j);

void write_trace(std::ostream& out, const std::vector<StepRecord>& trace);
std::vector<TraceLine> read_trace(std::istream& in);

std::vector<ReplayScheduler::Choice> replay_choices(const std::vector<TraceLine>& trace);

struct TraceDiff {
  std::size_t length_a = 0;
  std::size_t length_b = 0;
  std::optional<std::size_t> first_divergence;  // first step whose line differs
  std::string final_digest_a;
  std::string final_digest_b;

  bool identical() const { return !first_divergence && length_a == length_b; }
  Json to_json(const std::vector<TraceLine>& a, const std::vector<TraceLine>& b) const;
};

TraceDiff diff_traces(const std::vector<TraceLine>& a, const std::vector<TraceLine>& b);

}  // namespace cg
