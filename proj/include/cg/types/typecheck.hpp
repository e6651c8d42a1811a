#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cg/syntax/ast.hpp"

namespace cg {

struct Configuration;

class TypeError : public std::runtime_error {
 public:
  TypeError(std::string rule, SourceLoc loc, const std::string& message,
            bool phase_distinction = false);

  const std::string& rule() const { return rule_; }
  SourceLoc loc() const { return loc_; }
  const std::string& detail() const { return detail_; }
  bool is_phase_distinction() const { return phase_distinction_; }

 private:
  std::string rule_;
  SourceLoc loc_;
  std::string detail_;
  bool phase_distinction_;
};

// Names resolve right-most first; labels are kept in a hash map since a
// well-formed configuration never binds one twice.
class TypingEnv {
 public:
  void bind(const std::string& name, TypePtr type);
  void unbind_name();
  void bind(Label label, TypePtr type);

  TypePtr lookup(const std::string& name) const;
  TypePtr lookup(Label label) const;

  std::size_t label_count() const { return labels_.size(); }

 private:
  std::vector<std::pair<std::string, TypePtr>> names_;
  std::unordered_map<Label, TypePtr, LabelHash> labels_;
};

struct Typed {
  TypePtr type;
  Emittability effect = Emittability::F;
  SourceLoc emit_site;  // first emission responsible for effect T
};

Typed type_of_expr(const TypingEnv& env, const ExprPtr& e);

// Result type of an operation once claimed: add gives key, map int, fold node.
TypePtr operation_result_type(OpKind kind);

// Types an operation's arguments at emittability F and returns its future
// type. Used for operations already sitting in a stream.
TypePtr type_of_stream_operation(const TypingEnv& env, const Operation& op);

Typed type_of_config(const TypingEnv& env, const Configuration& config);

TypingEnv cached_env_insert(TypingEnv cache, Label label, const Operation& op);

}  // namespace cg
