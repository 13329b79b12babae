#include "teamq/coordinator.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace teamq {

namespace {

std::size_t ipow(std::size_t base, std::size_t exponent) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (r > std::numeric_limits<std::size_t>::max() / std::max<std::size_t>(base, 1))
      throw std::overflow_error("prescription domain too large");
    r *= base;
  }
  return r;
}

void check_memory(const MemorySpec& memory) {
  if (memory.horizon() == 0) throw std::invalid_argument("period length K must be at least 1");
  for (std::size_t r = 0; r < memory.horizon(); ++r)
    if (memory.window_start[r] > r)
      throw std::invalid_argument("window start m_r = " + std::to_string(memory.window_start[r]) +
                                  " exceeds stage " + std::to_string(r));
}

}  // namespace

std::size_t JointPrescriptionBlock::apply(std::size_t agent, std::size_t stage,
                                          std::span<const std::size_t> window) const {
  const Prescription& f = maps.at(agent).at(stage);
  if (window.size() != f.history_length())
    throw std::invalid_argument("apply_prescription: expected history of length " +
                                std::to_string(f.history_length()) + ", got " + std::to_string(window.size()));
  std::size_t index = 0;
  for (std::size_t y : window) {
    if (y >= f.n_measurements) throw std::out_of_range("apply_prescription: measurement out of range");
    index = index * f.n_measurements + y;
  }
  return f.table.at(index);
}

std::size_t JointPrescriptionBlock::joint_action(const TeamModel& model, std::size_t stage,
                                                 std::span<const std::size_t> joint_history) const {
  if (joint_history.size() < stage + 1)
    throw std::invalid_argument("joint_action: history shorter than stage + 1");
  std::size_t joint = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const Prescription& f = maps[i][stage];
    const std::size_t ny = model.n_measurements(i);
    std::size_t index = 0;
    for (std::size_t t = f.window_start; t <= stage; ++t) index = index * ny + model.measurement_of(joint_history[t], i);
    joint = joint * model.n_actions(i) + f.table[index];
  }
  return joint;
}

std::string JointPrescriptionBlock::describe() const {
  std::ostringstream os;
  os << "block " << id << '\n';
  for (const auto& agent_maps : maps)
    for (const auto& f : agent_maps) {
      os << "  agent " << f.agent << " stage " << f.stage << " window [" << f.window_start << "," << f.stage
         << "]:";
      for (std::size_t h = 0; h < f.table.size(); ++h) os << ' ' << h << "->" << f.table[h];
      os << '\n';
    }
  return os.str();
}

std::size_t apply_prescription(const JointPrescriptionBlock& block, std::size_t agent, std::size_t stage,
                               std::span<const std::size_t> window) {
  return block.apply(agent, stage, window);
}

PrescriptionSpace::PrescriptionSpace(const TeamModel& model, MemorySpec memory) : memory_(std::move(memory)) {
  check_memory(memory_);
  const std::size_t K = memory_.horizon();
  for (std::size_t i = 0; i < model.n_agents(); ++i) {
    n_actions_.push_back(model.n_actions(i));
    n_measurements_.push_back(model.n_measurements(i));
  }
  constexpr BlockId kLimit = BlockId{1} << 63;
  for (std::size_t i = 0; i < n_actions_.size(); ++i)
    for (std::size_t r = 0; r < K; ++r) {
      const std::size_t domain = ipow(n_measurements_[i], memory_.window_length(r));
      domain_.push_back(domain);
      for (std::size_t h = 0; h < domain; ++h) {
        radix_.push_back(n_actions_[i]);
        log2_size_ += std::log2(static_cast<double>(n_actions_[i]));
        if (!overflow_) {
          if (size_ > kLimit / n_actions_[i]) {
            overflow_ = true;
          } else {
            size_ *= n_actions_[i];
          }
        }
      }
    }
}

BlockId PrescriptionSpace::size() const {
  if (overflow_) throw std::overflow_error("prescription space has more than 2^63 blocks");
  return size_;
}

JointPrescriptionBlock PrescriptionSpace::decode(BlockId id) const {
  if (id >= size()) throw std::out_of_range("block id out of range");
  const std::size_t K = horizon();
  JointPrescriptionBlock block;
  block.id = id;
  block.maps.resize(n_actions_.size());
  BlockId rest = id;
  for (std::size_t i = 0; i < n_actions_.size(); ++i)
    for (std::size_t r = 0; r < K; ++r) {
      Prescription f{i, r, memory_.window_start[r], n_measurements_[i], {}};
      f.table.resize(domain_[i * K + r]);
      for (auto& entry : f.table) {
        entry = static_cast<std::size_t>(rest % n_actions_[i]);
        rest /= n_actions_[i];
      }
      block.maps[i].push_back(std::move(f));
    }
  return block;
}

BlockId PrescriptionSpace::encode(const JointPrescriptionBlock& block) const {
  const std::size_t K = horizon();
  if (block.maps.size() != n_actions_.size()) throw std::invalid_argument("encode: wrong number of agents");
  BlockId id = 0;
  BlockId weight = 1;
  for (std::size_t i = 0; i < n_actions_.size(); ++i) {
    if (block.maps[i].size() != K) throw std::invalid_argument("encode: wrong number of stages");
    for (std::size_t r = 0; r < K; ++r) {
      const auto& table = block.maps[i][r].table;
      if (table.size() != domain_[i * K + r]) throw std::invalid_argument("encode: table is not total");
      for (std::size_t a : table) {
        if (a >= n_actions_[i]) throw std::out_of_range("encode: action outside the agent's alphabet");
        id += weight * a;
        weight *= n_actions_[i];
      }
    }
  }
  return id;
}

JointPrescriptionBlock PrescriptionSpace::constant_block(std::span<const std::size_t> actions) const {
  if (actions.size() != n_actions_.size()) throw std::invalid_argument("constant_block: one action per agent");
  const std::size_t K = horizon();
  JointPrescriptionBlock block;
  block.maps.resize(n_actions_.size());
  for (std::size_t i = 0; i < n_actions_.size(); ++i)
    for (std::size_t r = 0; r < K; ++r)
      block.maps[i].push_back(
          Prescription{i, r, memory_.window_start[r], n_measurements_[i],
                       std::vector<std::size_t>(domain_[i * K + r], actions[i])});
  block.id = encode(block);
  return block;
}

double log2_block_count(std::span<const std::size_t> n_actions, std::span<const std::size_t> n_measurements,
                        const MemorySpec& memory) {
  check_memory(memory);
  double total = 0.0;
  for (std::size_t i = 0; i < n_actions.size(); ++i)
    for (std::size_t r = 0; r < memory.horizon(); ++r)
      total += std::pow(static_cast<double>(n_measurements[i]), static_cast<double>(memory.window_length(r))) *
               std::log2(static_cast<double>(n_actions[i]));
  return total;
}

std::vector<JointPrescriptionBlock> enumerate_prescriptions(const TeamModel& model, const MemorySpec& memory,
                                                           std::size_t limit) {
  PrescriptionSpace space(model, memory);
  if (space.log2_size() > 62.0 || space.size() > limit)
    throw std::length_error("prescription space too large to enumerate (2^" + std::to_string(space.log2_size()) +
                            " blocks)");
  std::vector<JointPrescriptionBlock> blocks;
  blocks.reserve(space.size());
  for (BlockId id = 0; id < space.size(); ++id) blocks.push_back(space.decode(id));
  return blocks;
}

namespace {

void require_predictor(const TeamModel& model, const Belief& predictor, const JointPrescriptionBlock& block) {
  if (predictor.is_null()) throw std::invalid_argument("null predictor");
  if (predictor.size() != model.n_states()) throw std::invalid_argument("predictor size mismatch");
  if (block.maps.size() != model.n_agents() || block.horizon() == 0)
    throw std::invalid_argument("block does not match the model");
}

}  // namespace

std::vector<PathAtom> stage_distribution(const TeamModel& model, const Belief& predictor,
                                         const JointPrescriptionBlock& block) {
  require_predictor(model, predictor, block);
  const std::size_t K = block.horizon();
  std::vector<PathAtom> atoms;
  PathAtom current;

  // depth r: x_r is fixed, choose y_r, derive u_r, then choose x_{r+1}
  auto recurse = [&](auto&& self, std::size_t r, double p) -> void {
    if (r == K) {
      current.probability = p;
      atoms.push_back(current);
      return;
    }
    const std::size_t x = current.states.back();
    for (std::size_t jy = 0; jy < model.n_joint_measurements(); ++jy) {
      const double py = p * model.likelihood(x, jy);
      if (py == 0.0) continue;
      current.measurements.push_back(jy);
      const std::size_t u = block.joint_action(model, r, current.measurements);
      current.actions.push_back(u);
      const auto row = model.transition(x, u);
      for (std::size_t x1 = 0; x1 < model.n_states(); ++x1) {
        if (row[x1] == 0.0) continue;
        current.states.push_back(x1);
        self(self, r + 1, py * row[x1]);
        current.states.pop_back();
      }
      current.actions.pop_back();
      current.measurements.pop_back();
    }
  };

  for (std::size_t x0 = 0; x0 < model.n_states(); ++x0) {
    if (predictor[x0] == 0.0) continue;
    current.states.assign(1, x0);
    recurse(recurse, 0, predictor[x0]);
  }
  return atoms;
}

BlockExpansion expand_block(const TeamModel& model, const Belief& predictor, const JointPrescriptionBlock& block,
                            double merge_tolerance) {
  require_predictor(model, predictor, block);
  const std::size_t K = block.horizon();
  const std::size_t n = model.n_states();
  const double beta = model.beta();
  BlockExpansion out;
  std::vector<std::size_t> history;
  history.reserve(K);
  std::vector<std::vector<double>> alpha(K + 1, std::vector<double>(n));
  alpha[0].assign(predictor.weights().begin(), predictor.weights().end());

  // alpha[r](x) = P(x_r = x, y_{[0,r-1]} = history)
  auto recurse = [&](auto&& self, std::size_t r, double discount) -> void {
    const auto& a = alpha[r];
    for (std::size_t jy = 0; jy < model.n_joint_measurements(); ++jy) {
      double mass = 0.0;
      for (std::size_t x = 0; x < n; ++x) mass += a[x] * model.likelihood(x, jy);
      if (mass == 0.0) continue;
      history.push_back(jy);
      const std::size_t u = block.joint_action(model, r, history);
      auto& next = alpha[r + 1];
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t x = 0; x < n; ++x) {
        const double w = a[x] * model.likelihood(x, jy);
        if (w == 0.0) continue;
        out.cost += discount * w * model.cost(x, u);
        const auto row = model.transition(x, u);
        for (std::size_t x1 = 0; x1 < n; ++x1) next[x1] += w * row[x1];
      }
      if (r + 1 == K) {
        const double p = std::accumulate(next.begin(), next.end(), 0.0);
        Belief successor = Belief::normalize(next);
        bool merged = false;
        for (auto& atom : out.successors)
          if (sup_distance(atom.belief, successor) <= merge_tolerance) {
            atom.probability += p;
            merged = true;
            break;
          }
        if (!merged) out.successors.push_back({std::move(successor), p});
      } else {
        self(self, r + 1, discount * beta);
      }
      history.pop_back();
    }
  };
  recurse(recurse, 0, 1.0);
  return out;
}

double reduced_cost(const TeamModel& model, const Belief& predictor, const JointPrescriptionBlock& block) {
  return expand_block(model, predictor, block).cost;
}

std::vector<SuccessorAtom> kernel_theta(const TeamModel& model, const Belief& predictor,
                                        const JointPrescriptionBlock& block) {
  return expand_block(model, predictor, block).successors;
}

double reduced_cost_bound(const TeamModel& model, std::size_t horizon) {
  const double beta = model.beta();
  return model.cost_sup() * (1.0 - std::pow(beta, static_cast<double>(horizon))) / (1.0 - beta);
}

PeriodSample simulate_period(const TeamModel& model, const JointPrescriptionBlock& block, std::size_t start_state,
                             Rng& rng) {
  const std::size_t K = block.horizon();
  PeriodSample s;
  s.states.reserve(K + 1);
  s.measurements.reserve(K);
  s.actions.reserve(K);
  s.states.push_back(start_state);
  double discount = 1.0;
  for (std::size_t r = 0; r < K; ++r) {
    const std::size_t x = s.states.back();
    s.measurements.push_back(observe_index(model, x, rng));
    const std::size_t u = block.joint_action(model, r, s.measurements);
    s.actions.push_back(u);
    s.discounted_cost += discount * model.cost(x, u);
    discount *= model.beta();
    s.states.push_back(step(model, x, u, rng));
  }
  return s;
}

}  // namespace teamq
