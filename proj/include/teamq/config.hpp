#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "teamq/bounds.hpp"
#include "teamq/evalsim.hpp"
#include "teamq/quantizer.hpp"
#include "teamq/solver.hpp"

namespace teamq {

/// Thrown for malformed or out-of-range configuration documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuantizerConfig {
  CodebookMode mode = CodebookMode::kReachable;
  std::size_t n = 4;  // grid resolution
  std::size_t depth = 3;
  std::size_t budget = 64;
  std::size_t blocks_per_node = 0;
  std::string metric = "discrete";  // discrete | line
  std::vector<std::vector<double>> extra_centers;
  bool expand_extra = false;
  std::vector<std::vector<double>> centers;  // explicit mode
  double min_separation = kCenterSeparation;
};

struct SolverConfig {
  std::uint64_t steps = 10000000;
  double tol = 1e-10;
  std::size_t max_iters = 100000;
  QLearningMode mode = QLearningMode::kLive;
  StepSizeRule step_rule = StepSizeRule::kPriorVisits;
  double q0 = 0.0;
  double restart = 0.0;
};

struct EvalConfig {
  std::uint64_t episodes = 100000;
  double trunc_eps = 1e-8;
  std::vector<std::size_t> centers;  // empty: the extra centers, else every center
  std::string policy = "vi";         // vi | q
};

struct StabilityConfig {
  std::vector<double> mu;  // empty: the model's initial belief
  std::vector<double> nu;  // empty: uniform
  std::size_t T = 12;
  std::uint64_t episodes = 10000;
};

struct RunConfig {
  std::string model_path;
  std::string model_json;  // inline model, dumped
  std::size_t K = 2;
  MemorySchedule schedule;
  QuantizerConfig quantizer;
  SolverConfig solver;
  EvalConfig eval;
  BoundsReportOptions bounds;
  StabilityConfig stability;
  std::uint64_t seed = 1;
  std::size_t workers = 0;  // 0: TEAMQ_WORKERS or hardware concurrency

  MemorySpec memory() const { return MemorySpec{schedule_window_starts(schedule, K)}; }
  std::size_t worker_count() const;
};

/// Parses a config document; absent keys keep their defaults.
RunConfig parse_config(std::string_view json_text);

GroundMetric metric_from_name(const std::string& name);

/// Codebook and quantized MDP exactly as the config describes them. The
/// reachable codebook draws from a generator seeded by the config seed.
Codebook build_codebook(const TeamModel& model, const RunConfig& config);
QuantizedMDP build_from_config(const TeamModel& model, const RunConfig& config);

/// Center indices the eval step reports on.
std::vector<std::size_t> eval_centers(const RunConfig& config, const QuantizedMDP& qmdp);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace teamq
