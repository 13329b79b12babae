#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "teamq/belief.hpp"
#include "teamq/coordinator.hpp"
#include "teamq/team_model.hpp"

namespace teamq {

enum class CodebookMode { kGrid, kReachable, kExplicit };

const char* codebook_mode_name(CodebookMode mode) noexcept;

struct Codebook {
  std::vector<Belief> centers;
  CodebookMode mode = CodebookMode::kExplicit;
  std::size_t parameter = 0;  // grid resolution n, or the reachable budget

  std::size_t size() const noexcept { return centers.size(); }
};

/// Minimum sup-norm gap kept between distinct centers.
inline constexpr double kCenterSeparation = 1e-9;

/// All points of the simplex with coordinates k/n, first coordinate descending
/// (lexicographic on the numerators, largest first).
Codebook build_grid_codebook(std::size_t n_states, std::size_t n);

/// Wraps caller-chosen centers; rejects null beliefs and near-duplicates.
Codebook make_codebook(std::vector<Belief> centers, double min_separation = kCenterSeparation);

struct ReachableOptions {
  std::size_t depth = 3;
  std::size_t budget = 64;  // total number of centers, extra centers included
  /// Blocks tried per expanded node; 0 means every block in id order,
  /// otherwise ids are drawn uniformly with replacement.
  std::size_t blocks_per_node = 0;
  /// Placed first, before anything reached from the initial belief.
  std::vector<Belief> extra_centers;
  /// Also expand the extra centers (queued before the initial belief).
  bool expand_extra = false;
  double min_separation = kCenterSeparation;
};

/// Breadth-first closure of the model's initial belief under kernel_theta,
/// deduplicated and truncated to the budget in first-visit order.
Codebook build_reachable_codebook(const TeamModel& model, const MemorySpec& memory, const ReachableOptions& options,
                                  Rng& rng);

/// argmin over centers of the W1 distance; ties go to the lowest index.
std::size_t nearest(const Codebook& codebook, const Belief& belief, const GroundMetric& metric);

struct SparseEntry {
  std::size_t next = 0;
  double probability = 0.0;
};

/// Finite surrogate over (center, block) pairs. Row index is s * n_actions + a.
struct QuantizedMDP {
  Codebook codebook;
  std::vector<BlockId> actions;
  MemorySpec memory;
  GroundMetric metric;
  double discount = 0.0;    // beta^K
  double cost_bound = 0.0;  // ||c|| (1 - beta^K) / (1 - beta)
  std::vector<std::vector<SparseEntry>> transitions;
  std::vector<double> costs;

  std::size_t n_states() const noexcept { return codebook.size(); }
  std::size_t n_actions() const noexcept { return actions.size(); }
  std::size_t horizon() const noexcept { return memory.horizon(); }
  std::size_t row(std::size_t s, std::size_t a) const noexcept { return s * actions.size() + a; }
  double cost(std::size_t s, std::size_t a) const { return costs[row(s, a)]; }
  const std::vector<SparseEntry>& transition(std::size_t s, std::size_t a) const { return transitions[row(s, a)]; }
};

/// Every block of the prescription space, in id order.
std::vector<BlockId> all_block_ids(const TeamModel& model, const MemorySpec& memory);

/// P[s][a] maps the exact kernel_theta atoms of (center s, block a) through
/// nearest; C[s][a] is the reduced cost at the center.
QuantizedMDP build_quantized_mdp(const TeamModel& model, const MemorySpec& memory, const Codebook& codebook,
                                 const std::vector<BlockId>& actions, const GroundMetric& metric,
                                 std::size_t workers = 1);

/// Largest deviation of a transition row sum from 1.
double max_row_defect(const QuantizedMDP& qmdp);

}  // namespace teamq
