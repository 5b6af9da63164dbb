#pragma once

#include <string>

#include <json.hpp>

#include "gisl/graph.hpp"

namespace gisl {

using Json = nlohmann::json;

Json to_json(const Dag& dag);
Dag dag_from_json(const Json& j);

Json to_json(const AugmentedDag& aug);
AugmentedDag augmented_from_json(const Json& j);

// Labels come from `names` (indexed by vertex id).
Json to_json(const MixedGraph& g, const std::vector<std::string>& names);
MixedGraph mixed_from_json(const Json& j, const std::vector<std::string>& names);

std::string to_dot(const Dag& dag);
std::string to_dot(const MixedGraph& g, const std::vector<std::string>& names);

}  // namespace gisl
