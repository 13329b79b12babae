#pragma once

#include <string>
#include <string_view>

#include "teamq/team_model.hpp"

namespace teamq {

// Model file layout:
//
//   {
//     "states": 3,
//     "agents": [ {"actions": 2, "measurements": 2, "channel": [[...], ...]}, ... ],
//     "tau":  [ {"action": [u1, ..., uN], "matrix": [[...], ...]}, ... ],
//     "cost": [ {"action": [u1, ..., uN], "values": [c(0,u), ..., c(n-1,u)]}, ... ],
//     "beta": 0.01,
//     "initial": [...]
//   }
//
// Every joint action must appear exactly once in both "tau" and "cost".

/// Parses a model document without validating stochasticity. Structural problems
/// (missing keys, malformed or duplicate joint actions) raise ValidationError.
RawModel parse_model(std::string_view json_text);

/// parse_model followed by TeamModel::validate.
TeamModel load_model(std::string_view json_text);

TeamModel load_model_file(const std::string& path);

std::string model_to_json(const TeamModel& model);

}  // namespace teamq
