#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "teamq/quantizer.hpp"
#include "teamq/team_model.hpp"

namespace teamq {

struct QTable {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> values;          // [s * n_actions + a]
  std::vector<std::uint64_t> visits;   // same layout

  static QTable filled(std::size_t n_states, std::size_t n_actions, double q0);
  double at(std::size_t s, std::size_t a) const { return values[s * n_actions + a]; }
  double& at(std::size_t s, std::size_t a) { return values[s * n_actions + a]; }
  std::uint64_t visit_count(std::size_t s, std::size_t a) const { return visits[s * n_actions + a]; }
  /// min_a Q(s, a)
  double row_min(std::size_t s) const;
};

/// Greedy map from codebook index to an action index of the quantized MDP
/// (qmdp.actions[action[s]] is the block id) and V = row minima.
struct CoordinatorPolicy {
  std::vector<std::size_t> action;
  std::vector<double> value;
};

// Sweep deltas at or below kContractionFloor * max(1, max|V|) are rounding
// noise and are left out of worst_contraction.
inline constexpr long double kContractionFloor = 1e-6L;

struct ValueIterationResult {
  std::vector<double> values;
  CoordinatorPolicy policy;
  double residual = 0.0;             // ||T V - V|| at the returned V
  std::size_t iterations = 0;
  std::vector<double> deltas;        // ||V_{k+1} - V_k|| per sweep
  double worst_contraction = 0.0;    // max_k deltas[k+1] / deltas[k], over deltas[k] above the floor
};

/// Bellman backups until the sweep delta drops to tol. Throws on non-finite
/// costs or a discount outside [0, 1).
ValueIterationResult value_iteration(const QuantizedMDP& qmdp, double tol = 1e-10, std::size_t max_iters = 100000,
                                     std::size_t workers = 1);

/// Q(s, a) = C[s][a] + discount * sum_s' P[s][a][s'] V(s').
QTable q_from_values(const QuantizedMDP& qmdp, const std::vector<double>& values);

/// Per-state argmin with the lowest index winning ties.
CoordinatorPolicy greedy_policy(const QTable& table);

enum class StepSizeRule {
  kPriorVisits,      // alpha = 1 / (1 + visits before this update)
  kInclusiveVisits,  // alpha = 1 / (1 + visits including this update)
};

enum class QLearningMode {
  kSurrogate,  // successor centers drawn from the quantized kernel
  kLive,       // simulate the true system for one period and quantize the new predictor
};

struct QLearningOptions {
  std::uint64_t steps = 1000000;
  QLearningMode mode = QLearningMode::kSurrogate;
  StepSizeRule step_rule = StepSizeRule::kPriorVisits;
  /// Exploration weights over actions; empty means uniform.
  std::vector<double> exploration;
  double q0 = 0.0;
  /// Start center; defaults to the center nearest the model's initial belief
  /// (live) or center 0 (surrogate).
  std::optional<std::size_t> start;
  /// Probability that the next visited center is redrawn uniformly from the
  /// codebook. The update target still uses the sampled successor.
  double restart = 0.0;
};

/// Asynchronous single-pair quantized Q-learning along one trajectory. Live
/// mode needs the model; surrogate mode ignores it.
QTable q_learning(const QuantizedMDP& qmdp, const TeamModel* model, const QLearningOptions& options, Rng& rng);

/// max over visited (s, a) of |Q(s, a) - reference(s, a)|, and the visited count.
struct QComparison {
  double max_abs_error = 0.0;
  std::size_t visited_pairs = 0;
  std::size_t visited_states = 0;
};

QComparison compare_visited(const QTable& learned, const QTable& reference);

}  // namespace teamq
