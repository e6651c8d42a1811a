#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cg/engine/run.hpp"
#include "cg/syntax/parser.hpp"

namespace cg {

struct CorpusProgram {
  std::string name;
  std::string source;
  bool well_typed = true;
  // Checks the terminal facts the program is known for; returns a complaint
  // or nothing.
  std::function<std::optional<std::string>(const RunResult&)> expect;

  Program parse() const;
  Configuration initial() const;
};

const std::vector<CorpusProgram>& corpus();
const CorpusProgram& corpus_program(const std::string& name);

// The well-typed programs, in corpus order.
std::vector<const CorpusProgram*> runnable_corpus();

}  // namespace cg

namespace cg {

// Names an emitted operation by the derived form it was written as, when its
// shape gives that away: "mapVal [#k1, #k2]", "foldVal [#k1]", "add", ...
std::string emission_signature(const Operation& op);

}  // namespace cg
