#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "cg/runtime/config.hpp"

namespace cg {

using Json = nlohmann::ordered_json;

Json to_json(const Operation& op);
Json to_json(const StreamUnit& unit);
Json to_json(const OperationStream& stream);
Json to_json(const ResultEntry& entry);

// Canonical form: fixed field order, stores sorted by label, expressions as
// s-expressions.
Json to_json(const Configuration& c);

std::uint64_t fnv1a(const std::string& bytes);
std::string hex_digest(std::uint64_t h);

// Digest of the canonical JSON text.
std::string digest(const Configuration& c);

}  // namespace cg
