#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "teamq/belief.hpp"
#include "teamq/team_model.hpp"

namespace teamq {

using BlockId = std::uint64_t;

/// For each stage r of a period, the first measurement index m_r the stage-r
/// maps may read: they see y^i_{[m_r, r]}. Full memory is m_r = 0.
struct MemorySpec {
  std::vector<std::size_t> window_start;

  static MemorySpec full(std::size_t horizon) { return MemorySpec{std::vector<std::size_t>(horizon, 0)}; }
  std::size_t horizon() const noexcept { return window_start.size(); }
  std::size_t window_length(std::size_t stage) const { return stage - window_start.at(stage) + 1; }
};

/// Deterministic map from one agent's private measurement window to an action.
struct Prescription {
  std::size_t agent = 0;
  std::size_t stage = 0;
  std::size_t window_start = 0;
  std::size_t n_measurements = 0;  // |Y^i|
  /// Indexed by the window history in mixed radix, earliest measurement most significant.
  std::vector<std::size_t> table;

  std::size_t history_length() const noexcept { return stage - window_start + 1; }
};

/// The coordinator's action for one period: maps[agent][stage].
struct JointPrescriptionBlock {
  BlockId id = 0;
  std::vector<std::vector<Prescription>> maps;

  std::size_t horizon() const noexcept { return maps.empty() ? 0 : maps.front().size(); }

  /// History must hold exactly the stage's window y^i_{[m_r, r]}.
  std::size_t apply(std::size_t agent, std::size_t stage, std::span<const std::size_t> window) const;

  /// Joint action at `stage` given the joint measurements y_{[0, stage]} of the period.
  std::size_t joint_action(const TeamModel& model, std::size_t stage,
                           std::span<const std::size_t> joint_history) const;

  /// Human-readable dump of every table.
  std::string describe() const;
};

/// apply_prescription as a free function.
std::size_t apply_prescription(const JointPrescriptionBlock& block, std::size_t agent, std::size_t stage,
                               std::span<const std::size_t> window);

/// The finite set of joint prescription blocks for a period of length K under a
/// memory restriction, with the mixed-radix id as canonical order. The least
/// significant digit is agent 0, stage 0, history 0; history varies fastest,
/// then stage, then agent.
class PrescriptionSpace {
 public:
  PrescriptionSpace(const TeamModel& model, MemorySpec memory);

  std::size_t horizon() const noexcept { return memory_.horizon(); }
  const MemorySpec& memory() const noexcept { return memory_; }
  /// Number of blocks; throws std::overflow_error when it exceeds 2^63.
  BlockId size() const;
  /// log2 of the number of blocks (never overflows).
  double log2_size() const noexcept { return log2_size_; }

  JointPrescriptionBlock decode(BlockId id) const;
  BlockId encode(const JointPrescriptionBlock& block) const;

  /// Blocks whose every table entry equals the same action per agent.
  JointPrescriptionBlock constant_block(std::span<const std::size_t> actions) const;

 private:
  std::vector<std::size_t> n_actions_;
  std::vector<std::size_t> n_measurements_;
  MemorySpec memory_;
  std::vector<std::size_t> radix_;  // one per digit
  std::vector<std::size_t> domain_; // [agent * K + stage] table length
  bool overflow_ = false;
  BlockId size_ = 1;
  double log2_size_ = 0.0;
};

/// Number of blocks for arbitrary alphabet sizes (agent i has |U^i| actions and
/// |Y^i| measurements); used by bound optimization without building a model.
double log2_block_count(std::span<const std::size_t> n_actions, std::span<const std::size_t> n_measurements,
                        const MemorySpec& memory);

/// All blocks in id order. Throws std::length_error above `limit` blocks.
std::vector<JointPrescriptionBlock> enumerate_prescriptions(const TeamModel& model, const MemorySpec& memory,
                                                           std::size_t limit = std::size_t{1} << 22);

/// One path x_{qK}, y_{qK}, x_{qK+1}, ..., x_{(q+1)K} of a period with its probability.
struct PathAtom {
  std::vector<std::size_t> states;        // K + 1 entries
  std::vector<std::size_t> measurements;  // K joint measurement indices
  std::vector<std::size_t> actions;       // K joint action indices
  double probability = 0.0;
};

/// Exact enumeration of the positive-probability paths of one period.
std::vector<PathAtom> stage_distribution(const TeamModel& model, const Belief& predictor,
                                         const JointPrescriptionBlock& block);

struct SuccessorAtom {
  Belief belief;
  double probability = 0.0;
};

/// Reduced cost and successor distribution of (predictor, block) from a single
/// forward recursion over measurement sequences.
struct BlockExpansion {
  double cost = 0.0;
  std::vector<SuccessorAtom> successors;
};

inline constexpr double kSuccessorMergeTolerance = 1e-9;

BlockExpansion expand_block(const TeamModel& model, const Belief& predictor, const JointPrescriptionBlock& block,
                            double merge_tolerance = kSuccessorMergeTolerance);

/// c~(pi, a) = E[sum_{r<K} beta^r c(x_{qK+r}, u_{qK+r})].
double reduced_cost(const TeamModel& model, const Belief& predictor, const JointPrescriptionBlock& block);

/// theta(. | pi, a): successor predictors with their probabilities, merged within
/// 1e-9 in sup norm. Zero-probability measurement sequences are excluded.
std::vector<SuccessorAtom> kernel_theta(const TeamModel& model, const Belief& predictor,
                                        const JointPrescriptionBlock& block);

/// Upper bound on the reduced cost: ||c|| (1 - beta^K) / (1 - beta).
double reduced_cost_bound(const TeamModel& model, std::size_t horizon);

/// One simulated period of the true system starting from x_{qK}.
struct PeriodSample {
  std::vector<std::size_t> states;  // x_{qK} .. x_{(q+1)K}
  std::vector<std::size_t> measurements;
  std::vector<std::size_t> actions;
  double discounted_cost = 0.0;  // sum_r beta^r c(x, u)
};

PeriodSample simulate_period(const TeamModel& model, const JointPrescriptionBlock& block, std::size_t start_state,
                             Rng& rng);

}  // namespace teamq
