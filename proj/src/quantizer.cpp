#include "teamq/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

#include "teamq/parallel.hpp"

namespace teamq {

const char* codebook_mode_name(CodebookMode mode) noexcept {
  switch (mode) {
    case CodebookMode::kGrid:
      return "grid";
    case CodebookMode::kReachable:
      return "reachable";
    case CodebookMode::kExplicit:
      return "explicit";
  }
  return "explicit";
}

Codebook build_grid_codebook(std::size_t n_states, std::size_t n) {
  if (n == 0) throw std::invalid_argument("grid resolution n must be at least 1");
  if (n_states == 0) throw std::invalid_argument("grid codebook needs at least one state");
  Codebook book;
  book.mode = CodebookMode::kGrid;
  book.parameter = n;
  std::vector<std::size_t> numerators(n_states, 0);
  auto fill = [&](auto&& self, std::size_t coord, std::size_t remaining) -> void {
    if (coord + 1 == n_states) {
      numerators[coord] = remaining;
      std::vector<double> w(n_states);
      for (std::size_t i = 0; i < n_states; ++i) w[i] = static_cast<double>(numerators[i]) / static_cast<double>(n);
      book.centers.push_back(Belief::normalize(std::move(w)));
      return;
    }
    for (std::size_t k = remaining + 1; k-- > 0;) {
      numerators[coord] = k;
      self(self, coord + 1, remaining - k);
    }
  };
  fill(fill, 0, n);
  return book;
}

namespace {

bool separated(const std::vector<Belief>& centers, const Belief& candidate, double min_separation) {
  for (const auto& c : centers)
    if (sup_distance(c, candidate) <= min_separation) return false;
  return true;
}

}  // namespace

Codebook make_codebook(std::vector<Belief> centers, double min_separation) {
  Codebook book;
  book.mode = CodebookMode::kExplicit;
  book.parameter = centers.size();
  for (auto& c : centers) {
    if (c.is_null()) throw std::invalid_argument("codebook center is null");
    if (!book.centers.empty() && c.size() != book.centers.front().size())
      throw std::invalid_argument("codebook centers over different state spaces");
    if (!separated(book.centers, c, min_separation))
      throw std::invalid_argument("codebook centers are not distinct");
    book.centers.push_back(std::move(c));
  }
  return book;
}

Codebook build_reachable_codebook(const TeamModel& model, const MemorySpec& memory, const ReachableOptions& options,
                                  Rng& rng) {
  if (options.depth == 0) throw std::invalid_argument("reachable codebook depth must be at least 1");
  if (options.budget == 0) throw std::invalid_argument("reachable codebook budget must be at least 1");
  const double separation = std::max(options.min_separation, kCenterSeparation);
  PrescriptionSpace space(model, memory);

  Codebook book;
  book.mode = CodebookMode::kReachable;
  book.parameter = options.budget;
  std::deque<std::pair<Belief, std::size_t>> frontier;
  for (const auto& c : options.extra_centers) {
    if (c.is_null() || c.size() != model.n_states()) throw std::invalid_argument("extra center does not fit the model");
    if (book.size() < options.budget && separated(book.centers, c, separation)) book.centers.push_back(c);
    if (options.expand_extra) frontier.emplace_back(c, 0);
  }

  Belief start = Belief::from_weights({model.initial().begin(), model.initial().end()});
  if (book.size() < options.budget && separated(book.centers, start, separation)) book.centers.push_back(start);
  frontier.emplace_back(std::move(start), 0);

  const BlockId n_blocks = space.size();
  const bool sample = options.blocks_per_node != 0 && static_cast<BlockId>(options.blocks_per_node) < n_blocks;
  std::uniform_int_distribution<BlockId> pick(0, n_blocks - 1);

  while (!frontier.empty() && book.size() < options.budget) {
    auto [belief, level] = std::move(frontier.front());
    frontier.pop_front();
    if (level >= options.depth) continue;
    const BlockId tries = sample ? options.blocks_per_node : n_blocks;
    for (BlockId k = 0; k < tries && book.size() < options.budget; ++k) {
      const BlockId id = sample ? pick(rng) : k;
      for (auto& atom : kernel_theta(model, belief, space.decode(id))) {
        if (book.size() >= options.budget) break;
        if (!separated(book.centers, atom.belief, separation)) continue;
        book.centers.push_back(atom.belief);
        frontier.emplace_back(std::move(atom.belief), level + 1);
      }
    }
  }
  return book;
}

std::size_t nearest(const Codebook& codebook, const Belief& belief, const GroundMetric& metric) {
  if (codebook.centers.empty()) throw std::invalid_argument("nearest: empty codebook");
  std::size_t best = 0;
  double best_distance = w1_distance(codebook.centers[0], belief, metric);
  for (std::size_t i = 1; i < codebook.centers.size(); ++i) {
    const double d = w1_distance(codebook.centers[i], belief, metric);
    // tolerance absorbs rounding so equidistant centers resolve to the lower index
    if (d < best_distance - 1e-12) {
      best = i;
      best_distance = d;
    }
  }
  return best;
}

std::vector<BlockId> all_block_ids(const TeamModel& model, const MemorySpec& memory) {
  PrescriptionSpace space(model, memory);
  if (space.log2_size() > 40.0) throw std::length_error("prescription space too large to list");
  std::vector<BlockId> ids(space.size());
  for (BlockId id = 0; id < ids.size(); ++id) ids[id] = id;
  return ids;
}

QuantizedMDP build_quantized_mdp(const TeamModel& model, const MemorySpec& memory, const Codebook& codebook,
                                 const std::vector<BlockId>& actions, const GroundMetric& metric,
                                 std::size_t workers) {
  if (codebook.centers.empty()) throw std::invalid_argument("build_quantized_mdp: empty codebook");
  if (actions.empty()) throw std::invalid_argument("build_quantized_mdp: empty action list");
  PrescriptionSpace space(model, memory);
  std::vector<JointPrescriptionBlock> blocks;
  blocks.reserve(actions.size());
  for (BlockId id : actions) blocks.push_back(space.decode(id));

  QuantizedMDP q;
  q.codebook = codebook;
  q.actions = actions;
  q.memory = memory;
  q.metric = metric;
  q.discount = std::pow(model.beta(), static_cast<double>(memory.horizon()));
  q.cost_bound = reduced_cost_bound(model, memory.horizon());
  const std::size_t S = codebook.size();
  const std::size_t A = actions.size();
  q.transitions.resize(S * A);
  q.costs.resize(S * A);

  parallel_for(S, workers, [&](std::size_t s) {
    for (std::size_t a = 0; a < A; ++a) {
      const BlockExpansion e = expand_block(model, codebook.centers[s], blocks[a]);
      std::map<std::size_t, double> mass;
      for (const auto& atom : e.successors) mass[nearest(codebook, atom.belief, metric)] += atom.probability;
      auto& row = q.transitions[s * A + a];
      row.reserve(mass.size());
      for (const auto& [next, p] : mass) row.push_back({next, p});
      q.costs[s * A + a] = e.cost;
    }
  });
  return q;
}

double max_row_defect(const QuantizedMDP& qmdp) {
  double worst = 0.0;
  for (const auto& row : qmdp.transitions) {
    double sum = 0.0;
    for (const auto& e : row) sum += e.probability;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

}  // namespace teamq
