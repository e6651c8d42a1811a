#include "cg/harness/trace.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace cg {

TraceLine trace_line(const StepRecord& record) {
  TraceLine line;
  line.step = record.step;
  line.rule = to_string(record.redex.rule);
  line.site = record.redex.site_string();
  for (const auto& l : record.labels) line.labels.push_back(l.id);
  line.digest = record.digest;
  return line;
}

Json to_json(const TraceLine& line) {
  Json j;
  j["step"] = line.step;
  j["rule"] = line.rule;
  j["site"] = line.site;
  j["labels"] = line.labels;
  j["digest"] = line.digest;
  return j;
}

TraceLine trace_line_from_json(const Json& j) {
  TraceLine line;
  line.step = j.at("step").get<std::size_t>();
  line.rule = j.at("rule").get<std::string>();
  line.site = j.at("site").get<std::string>();
  line.labels = j.at("labels").get<std::vector<std::uint64_t>>();
  line.digest = j.at("digest").get<std::string>();
  return line;
}

void write_trace(std::ostream& out, const std::vector<StepRecord>& trace) {
  for (const auto& rec : trace) out << to_json(trace_line(rec)).dump() << '\n';
}

std::vector<TraceLine> read_trace(std::istream& in) {
  std::vector<TraceLine> out;
  std::string text;
  for (std::size_t n = 1; std::getline(in, text); ++n) {
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(trace_line_from_json(Json::parse(text)));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ReplayScheduler::Choice> replay_choices(const std::vector<TraceLine>& trace) {
  std::vector<ReplayScheduler::Choice> out;
  out.reserve(trace.size());
  for (const auto& line : trace) out.push_back({line.rule, line.site});
  return out;
}

TraceDiff diff_traces(const std::vector<TraceLine>& a, const std::vector<TraceLine>& b) {
  TraceDiff d;
  d.length_a = a.size();
  d.length_b = b.size();
  if (!a.empty()) d.final_digest_a = a.back().digest;
  if (!b.empty()) d.final_digest_b = b.back().digest;
  std::size_t common = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (!(a[i] == b[i])) {
      d.first_divergence = i;
      return d;
    }
  }
  if (a.size() != b.size()) d.first_divergence = common;
  return d;
}

Json TraceDiff::to_json(const std::vector<TraceLine>& a, const std::vector<TraceLine>& b) const {
  Json j;
  j["identical"] = identical();
  j["length_a"] = length_a;
  j["length_b"] = length_b;
  j["final_digest_a"] = final_digest_a;
  j["final_digest_b"] = final_digest_b;
  j["same_final_digest"] = final_digest_a == final_digest_b;
  if (first_divergence) {
    std::size_t i = *first_divergence;
    Json at;
    at["step"] = i;
    at["a"] = i < a.size() ? cg::to_json(a[i]) : Json(nullptr);
    at["b"] = i < b.size() ? cg::to_json(b[i]) : Json(nullptr);
    j["first_divergence"] = std::move(at);
  } else {
    j["first_divergence"] = nullptr;
  }
  return j;
}

}  // namespace cg
