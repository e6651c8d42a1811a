#include "cg/runtime/serialize.hpp"

#include <algorithm>
#include <cstdio>

#include "cg/syntax/printer.hpp"

namespace cg {

Json to_json(const Operation& op) {
  Json j;
  j["op"] = op_name(op.kind);
  Json args = Json::array();
  for (const auto& a : op.args) args.push_back(to_sexpr(*a));
  j["args"] = std::move(args);
  return j;
}

Json to_json(const StreamUnit& unit) {
  Json j = Json::array();
  for (const auto& lo : unit) {
    Json entry;
    entry["label"] = lo.label.spelling();
    entry["operation"] = to_json(lo.op);
    j.push_back(std::move(entry));
  }
  return j;
}

Json to_json(const OperationStream& stream) {
  Json j = Json::array();
  for (const auto& unit : stream) j.push_back(to_json(unit));
  return j;
}

Json to_json(const ResultEntry& entry) {
  Json j;
  j["label"] = entry.label.spelling();
  Json residual = Json::array();
  for (const auto& k : entry.residual) residual.push_back(k.spelling());
  j["residual"] = std::move(residual);
  j["value"] = to_sexpr(*entry.value);
  return j;
}

Json to_json(const Configuration& c) {
  Json j;
  Json backend = Json::array();
  for (const auto& s : c.backend) {
    Json station;
    station["key"] = to_sexpr(*s.key());
    station["payload"] = to_sexpr(*s.payload());
    station["adjacency"] = to_sexpr(*s.adjacency());
    station["streamlet"] = to_json(s.streamlet);
    backend.push_back(std::move(station));
  }
  j["backend"] = std::move(backend);
  j["top"] = to_json(c.top);

  std::vector<const ResultEntry*> entries;
  entries.reserve(c.store.size());
  for (const auto& [l, e] : c.store) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(),
            [](const ResultEntry* a, const ResultEntry* b) { return a->label < b->label; });
  Json store = Json::array();
  for (const auto* e : entries) store.push_back(to_json(*e));
  j["store"] = std::move(store);

  j["frontend"] = to_sexpr(*c.frontend);
  j["next_label"] = c.next_label;
  j["next_key"] = c.next_key;
  return j;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string digest(const Configuration& c) { return hex_digest(fnv1a(to_json(c).dump())); }

}  // namespace cg
