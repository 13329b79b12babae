#pragma once

#include <string>
#include <string_view>

#include "teamq/quantizer.hpp"
#include "teamq/solver.hpp"

namespace teamq {

// JSON artifacts. Output is a pure function of the value (fixed key order,
// shortest round-trip doubles), so equal inputs give byte-identical files.

std::string qmdp_to_json(const QuantizedMDP& qmdp);
QuantizedMDP qmdp_from_json(std::string_view text);

std::string qtable_to_json(const QTable& table);
QTable qtable_from_json(std::string_view text);

/// Block ids are resolved through the MDP's action list.
std::string policy_to_json(const CoordinatorPolicy& policy, const QuantizedMDP& qmdp);
CoordinatorPolicy policy_from_json(std::string_view text, const QuantizedMDP& qmdp);

std::string value_iteration_to_json(const ValueIterationResult& result, const QuantizedMDP& qmdp);

}  // namespace teamq
