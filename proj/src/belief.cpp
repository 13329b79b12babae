#include "teamq/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace teamq {

Belief Belief::from_weights(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("belief weights must be finite and nonnegative");
    sum += w;
  }
  if (weights.empty() || std::abs(sum - 1.0) > kStochasticTolerance)
    throw std::invalid_argument("belief weights must sum to 1");
  for (double& w : weights) w /= sum;
  Belief b;
  b.weights_ = std::move(weights);
  b.is_null_ = false;
  return b;
}

Belief Belief::restore(std::vector<double> weights) {
  Belief b = from_weights(weights);
  b.weights_ = std::move(weights);
  return b;
}

Belief Belief::normalize(std::vector<double> unnormalized) {
  const double sum = std::accumulate(unnormalized.begin(), unnormalized.end(), 0.0);
  if (!(sum > 0.0)) return null(unnormalized.size());
  for (double& w : unnormalized) w /= sum;
  Belief b;
  b.weights_ = std::move(unnormalized);
  b.is_null_ = false;
  return b;
}

Belief Belief::null(std::size_t n_states) {
  Belief b;
  b.weights_.assign(n_states, 0.0);
  b.is_null_ = true;
  return b;
}

Belief Belief::point_mass(std::size_t n_states, std::size_t state) {
  if (state >= n_states) throw std::out_of_range("point_mass: state out of range");
  std::vector<double> w(n_states, 0.0);
  w[state] = 1.0;
  return from_weights(std::move(w));
}

Belief Belief::uniform(std::size_t n_states) {
  return normalize(std::vector<double>(n_states, 1.0));
}

double sup_distance(const Belief& a, const Belief& b) {
  if (a.size() != b.size()) throw std::invalid_argument("beliefs over different state spaces");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

namespace {

void require_usable(const TeamModel& model, const Belief& b, const char* what) {
  if (b.is_null()) throw std::invalid_argument(std::string(what) + ": null belief");
  if (b.size() != model.n_states()) throw std::invalid_argument(std::string(what) + ": belief size mismatch");
}

void require_pair(const Belief& a, const Belief& b, const char* what) {
  if (a.is_null() || b.is_null()) throw std::invalid_argument(std::string(what) + ": null belief");
  if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": beliefs over different state spaces");
}

}  // namespace

Belief predictor_update(const TeamModel& model, const Belief& predictor, std::size_t joint_action,
                        std::size_t joint_measurement) {
  require_usable(model, predictor, "predictor_update");
  if (joint_measurement >= model.n_joint_measurements())
    throw std::out_of_range("predictor_update: joint measurement out of range");
  const std::size_t n = model.n_states();
  std::vector<double> next(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const double w = predictor[x] * model.likelihood(x, joint_measurement);
    if (w == 0.0) continue;
    const auto row = model.transition(x, joint_action);
    for (std::size_t x1 = 0; x1 < n; ++x1) next[x1] += w * row[x1];
  }
  return Belief::normalize(std::move(next));
}

Belief filter_update(const TeamModel& model, const Belief& filter, std::size_t joint_action,
                     std::size_t next_joint_measurement) {
  require_usable(model, filter, "filter_update");
  if (next_joint_measurement >= model.n_joint_measurements())
    throw std::out_of_range("filter_update: joint measurement out of range");
  const std::size_t n = model.n_states();
  std::vector<double> next(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    if (filter[x] == 0.0) continue;
    const auto row = model.transition(x, joint_action);
    for (std::size_t x1 = 0; x1 < n; ++x1) next[x1] += filter[x] * row[x1];
  }
  for (std::size_t x1 = 0; x1 < n; ++x1) next[x1] *= model.likelihood(x1, next_joint_measurement);
  return Belief::normalize(std::move(next));
}

Belief k_step_update(const TeamModel& model, const Belief& predictor, std::span<const std::size_t> joint_actions,
                     std::span<const std::size_t> joint_measurements) {
  require_usable(model, predictor, "k_step_update");
  if (joint_actions.size() != joint_measurements.size())
    throw std::invalid_argument("k_step_update: action and measurement sequences differ in length");
  if (joint_actions.empty()) throw std::invalid_argument("k_step_update: empty sequence");
  Belief current = predictor;
  for (std::size_t r = 0; r < joint_actions.size(); ++r) {
    current = predictor_update(model, current, joint_actions[r], joint_measurements[r]);
    if (current.is_null()) return current;
  }
  return current;
}

double tv_distance(const Belief& a, const Belief& b) {
  require_pair(a, b, "tv_distance");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

GroundMetric GroundMetric::discrete() { return GroundMetric{}; }

GroundMetric GroundMetric::line() {
  GroundMetric m;
  m.kind_ = Kind::kLine;
  return m;
}

GroundMetric GroundMetric::matrix(std::vector<std::vector<double>> distances) {
  const std::size_t n = distances.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (distances[i].size() != n) throw std::invalid_argument("ground metric must be square");
    for (std::size_t j = 0; j < n; ++j) {
      const double d = distances[i][j];
      if (!std::isfinite(d) || d < 0.0) throw std::invalid_argument("ground metric entries must be finite and >= 0");
      if (i == j && d != 0.0) throw std::invalid_argument("ground metric must vanish on the diagonal");
      if (i != j && d <= 0.0) throw std::invalid_argument("ground metric must separate distinct states");
      if (std::abs(d - distances[j][i]) > 1e-12) throw std::invalid_argument("ground metric must be symmetric");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (distances[i][j] > distances[i][k] + distances[k][j] + 1e-12)
          throw std::invalid_argument("ground metric violates the triangle inequality");
  GroundMetric m;
  m.kind_ = Kind::kMatrix;
  m.distances_ = std::move(distances);
  return m;
}

double GroundMetric::distance(std::size_t x, std::size_t y) const {
  switch (kind_) {
    case Kind::kDiscrete:
      return x == y ? 0.0 : 1.0;
    case Kind::kLine:
      return x > y ? static_cast<double>(x - y) : static_cast<double>(y - x);
    case Kind::kMatrix:
      return distances_.at(x).at(y);
  }
  return 0.0;
}

const char* GroundMetric::name() const noexcept {
  switch (kind_) {
    case Kind::kDiscrete:
      return "discrete";
    case Kind::kLine:
      return "line";
    case Kind::kMatrix:
      return "matrix";
  }
  return "discrete";
}

double w1_distance(const Belief& a, const Belief& b, const GroundMetric& metric) {
  require_pair(a, b, "w1_distance");
  switch (metric.kind()) {
    case GroundMetric::Kind::kDiscrete: {
      double d = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
      return 0.5 * d;
    }
    case GroundMetric::Kind::kLine: {
      double d = 0.0;
      double cdf_gap = 0.0;
      for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        cdf_gap += a[i] - b[i];
        d += std::abs(cdf_gap);
      }
      return d;
    }
    case GroundMetric::Kind::kMatrix: {
      std::vector<std::vector<double>> cost(a.size(), std::vector<double>(a.size()));
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) cost[i][j] = metric.distance(i, j);
      return transport_cost(a.weights(), b.weights(), cost);
    }
  }
  return 0.0;
}

double transport_cost(std::span<const double> supply, std::span<const double> demand,
                      const std::vector<std::vector<double>>& cost) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  if (cost.size() != n) throw std::invalid_argument("transport_cost: cost rows mismatch");
  for (const auto& row : cost)
    if (row.size() != m) throw std::invalid_argument("transport_cost: cost columns mismatch");

  struct Edge {
    std::size_t to;
    double capacity;
    double cost;
    std::size_t reverse;
  };
  const std::size_t source = 0;
  const std::size_t sink = n + m + 1;
  std::vector<std::vector<Edge>> graph(n + m + 2);
  auto add_edge = [&](std::size_t from, std::size_t to, double capacity, double c) {
    graph[from].push_back({to, capacity, c, graph[to].size()});
    graph[to].push_back({from, 0.0, -c, graph[from].size() - 1});
  };
  const double inf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    add_edge(source, 1 + i, supply[i], 0.0);
    total += supply[i];
  }
  for (std::size_t j = 0; j < m; ++j) add_edge(1 + n + j, sink, demand[j], 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) add_edge(1 + i, 1 + n + j, inf, cost[i][j]);

  constexpr double kFlowEps = 1e-15;
  double shipped = 0.0;
  double result = 0.0;
  const std::size_t nodes = graph.size();
  for (std::size_t iteration = 0; iteration < 4 * nodes * nodes && total - shipped > kFlowEps; ++iteration) {
    // Bellman-Ford: residual graph may carry negative reverse costs
    std::vector<double> dist(nodes, inf);
    std::vector<std::size_t> prev_node(nodes, nodes), prev_edge(nodes, 0);
    dist[source] = 0.0;
    for (std::size_t pass = 0; pass + 1 < nodes; ++pass) {
      bool changed = false;
      for (std::size_t u = 0; u < nodes; ++u) {
        if (dist[u] == inf) continue;
        for (std::size_t e = 0; e < graph[u].size(); ++e) {
          const Edge& edge = graph[u][e];
          if (edge.capacity <= kFlowEps) continue;
          if (dist[u] + edge.cost < dist[edge.to] - 1e-15) {
            dist[edge.to] = dist[u] + edge.cost;
            prev_node[edge.to] = u;
            prev_edge[edge.to] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[sink] == inf) break;
    double push = inf;
    for (std::size_t v = sink; v != source; v = prev_node[v])
      push = std::min(push, graph[prev_node[v]][prev_edge[v]].capacity);
    for (std::size_t v = sink; v != source; v = prev_node[v]) {
      Edge& edge = graph[prev_node[v]][prev_edge[v]];
      edge.capacity -= push;
      graph[v][edge.reverse].capacity += push;
    }
    shipped += push;
    result += push * dist[sink];
  }
  return result;
}

}  // namespace teamq
