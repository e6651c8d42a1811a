#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "cg/syntax/ast.hpp"

namespace cg {

struct LabeledOp {
  Label label;
  Operation op;
};

// Head (index 0) is the oldest operation.
using StreamUnit = std::vector<LabeledOp>;
using OperationStream = std::vector<StreamUnit>;

struct Station {
  ExprPtr node;  // always an ExprKind::Node expression; components may be loads
  OperationStream streamlet;

  const ExprPtr& key() const { return node->kids[0]; }
  const ExprPtr& payload() const { return node->kids[1]; }
  const ExprPtr& adjacency() const { return node->kids[2]; }
};

using Backend = std::vector<Station>;

struct ResultEntry {
  Label label;
  std::vector<Key> residual;
  ExprPtr value;
};

using ResultStore = std::unordered_map<Label, ResultEntry, LabelHash>;

struct Configuration {
  Backend backend;
  OperationStream top;
  ResultStore store;
  ExprPtr frontend;
  // Monotone counters for fresh labels and generated keys.
  std::uint64_t next_label = 1;
  std::uint64_t next_key = 1;
};

class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Station make_station(ExprPtr node);

// ⟨B; []; ∅; e⟩, rejected unless it passes runtime typing.
Configuration init(ExprPtr program, Backend backend = {});

// Keys an emittable map/fold intends to visit. Nothing for add.
std::optional<std::vector<Key>> target(const Operation& op);

void append_top(Configuration& c, StreamUnit unit);
void append_station_tail(Backend& b, StreamUnit unit);
void merge_results(Configuration& c, const std::vector<ResultEntry>& results);

// Result of an operation that leaves the graph: 0 for a map, the current base
// value for a fold; the residual is whatever target remains.
ResultEntry finalize(Label label, const Operation& op);

bool is_dry(const Backend& b);
bool is_load_free(const Backend& b);
bool is_terminal(const Configuration& c);

std::vector<Label> labels_of(const OperationStream& s);
std::vector<Label> all_labels(const Configuration& c);

// Subterms of a station that count as load expressions: node components and
// fold bases of single-operation units. Used by is_load_free.
bool station_load_free(const Station& s);

}  // namespace cg
