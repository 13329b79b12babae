// Shared fixtures and independent oracles for the test suites.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "teamq/belief.hpp"
#include "teamq/model_io.hpp"
#include "teamq/team_model.hpp"

namespace support {

using teamq::Belief;
using teamq::RawModel;
using teamq::Rng;
using teamq::TeamModel;

inline std::string fixture(const std::string& name) { return std::string(TEAMQ_SOURCE_DIR) + "/fixtures/" + name; }
inline std::string config(const std::string& name) { return std::string(TEAMQ_SOURCE_DIR) + "/configs/" + name; }

// Two agents, three states, built from the formulas rather than the fixture file.
inline RawModel example_raw() {
  RawModel m;
  m.n_states = 3;
  for (int i = 0; i < 2; ++i) m.agents.push_back({2, 2, {{0.5, 0.5}, {0.0, 1.0}, {0.0, 1.0}}});
  for (std::size_t u1 = 0; u1 < 2; ++u1)
    for (std::size_t u2 = 0; u2 < 2; ++u2) {
      if (u1 == u2)
        m.tau.push_back({{0, .5, .5}, {.5, 0, .5}, {.5, .5, 0}});
      else
        m.tau.push_back({{1. / 3, 1. / 3, 1. / 3}, {1. / 3, 1. / 3, 1. / 3}, {1. / 3, 1. / 3, 1. / 3}});
      std::vector<double> row;
      for (int x = 0; x < 3; ++x) {
        const double d = x - double(u1) - double(u2);
        row.push_back(d * d + double(u1 * u1) + double(u2 * u2));
      }
      m.cost.push_back(row);
    }
  m.beta = 0.01;
  m.initial = {1. / 3, 1. / 3, 1. / 3};
  return m;
}

inline const TeamModel& example() {
  static const TeamModel m = TeamModel::validate(example_raw());
  return m;
}

inline std::vector<double> random_row(std::size_t n, Rng& rng, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> r(n);
  double s = 0.0;
  for (auto& v : r) {
    v = U(rng) < zero_prob ? 0.0 : U(rng) + 1e-3;
    s += v;
  }
  if (s == 0.0) {
    r[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1.0;
    return r;
  }
  for (auto& v : r) v /= s;
  return r;
}

struct RandomModelShape {
  std::size_t max_states = 3;
  std::size_t max_agents = 2;
  std::size_t max_actions = 3;
  std::size_t max_measurements = 3;
  double zero_prob = 0.25;  // sparsity of channel and tau rows
};

inline RawModel random_raw(Rng& rng, const RandomModelShape& shape = {}) {
  auto pick = [&](std::size_t hi) { return std::uniform_int_distribution<std::size_t>(1, hi)(rng); };
  RawModel m;
  m.n_states = pick(shape.max_states);
  const std::size_t n_agents = pick(shape.max_agents);
  std::size_t joint = 1;
  for (std::size_t i = 0; i < n_agents; ++i) {
    teamq::RawAgent a;
    a.n_actions = pick(shape.max_actions);
    a.n_measurements = pick(shape.max_measurements);
    for (std::size_t x = 0; x < m.n_states; ++x) a.channel.push_back(random_row(a.n_measurements, rng, shape.zero_prob));
    joint *= a.n_actions;
    m.agents.push_back(std::move(a));
  }
  std::uniform_real_distribution<double> C(0.0, 5.0);
  for (std::size_t u = 0; u < joint; ++u) {
    std::vector<std::vector<double>> mat;
    std::vector<double> cost;
    for (std::size_t x = 0; x < m.n_states; ++x) {
      mat.push_back(random_row(m.n_states, rng, shape.zero_prob));
      cost.push_back(C(rng));
    }
    m.tau.push_back(std::move(mat));
    m.cost.push_back(std::move(cost));
  }
  m.beta = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  m.initial = random_row(m.n_states, rng);
  return m;
}

inline Belief random_belief(std::size_t n, Rng& rng, double zero_prob = 0.0) {
  return Belief::from_weights(random_row(n, rng, zero_prob));
}

// Exhaustive sum over state paths x_0..x_K of
//   prior(x_0) * prod_r [ h(x_r, y_r) * tau(x_{r+1} | x_r, u_r) ]
// marginalized on x_K; empty result when the total mass is zero.
inline std::vector<double> path_predictor(const TeamModel& m, const std::vector<double>& prior,
                                          const std::vector<std::size_t>& u, const std::vector<std::size_t>& y) {
  const std::size_t n = m.n_states();
  const std::size_t K = u.size();
  std::vector<double> out(n, 0.0);
  std::vector<std::size_t> path(K + 1, 0);
  std::function<void(std::size_t, double)> walk = [&](std::size_t r, double w) {
    if (w == 0.0) return;
    if (r == K) {
      out[path[K]] += w;
      return;
    }
    double lik = 1.0;
    for (std::size_t i = 0; i < m.n_agents(); ++i)
      lik *= m.channel(i, path[r], m.decode_measurements(y[r])[i]);
    for (std::size_t x1 = 0; x1 < n; ++x1) {
      path[r + 1] = x1;
      walk(r + 1, w * lik * m.transition(path[r], u[r])[x1]);
    }
  };
  for (std::size_t x0 = 0; x0 < n; ++x0) {
    path[0] = x0;
    walk(0, prior[x0]);
  }
  double s = 0.0;
  for (double v : out) s += v;
  if (s == 0.0) return {};
  for (auto& v : out) v /= s;
  return out;
}

// Filter oracle: joint law of (x, x') weighted by h(x', y), marginal on x'.
inline std::vector<double> path_filter(const TeamModel& m, const std::vector<double>& prior, std::size_t u,
                                       std::size_t y) {
  const std::size_t n = m.n_states();
  std::vector<double> out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t x1 = 0; x1 < n; ++x1) {
      double lik = 1.0;
      for (std::size_t i = 0; i < m.n_agents(); ++i) lik *= m.channel(i, x1, m.decode_measurements(y)[i]);
      out[x1] += prior[x] * m.transition(x, u)[x1] * lik;
    }
  double s = 0.0;
  for (double v : out) s += v;
  if (s == 0.0) return {};
  for (auto& v : out) v /= s;
  return out;
}

inline double linf(std::span<const double> a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Upper 1% point of chi-square with k degrees of freedom (Wilson-Hilferty).
inline double chi2_crit_01(std::size_t k) {
  const double z = 2.3263478740408408;
  const double kk = static_cast<double>(k);
  const double t = 1.0 - 2.0 / (9.0 * kk) + z * std::sqrt(2.0 / (9.0 * kk));
  return kk * t * t * t;
}

// Pearson statistic of observed counts against expected probabilities; cells
// with zero probability must be empty.
inline double chi2_stat(const std::vector<std::size_t>& counts, const std::vector<double>& p, std::size_t total,
                        std::size_t* dof) {
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) {
      if (counts[i] != 0) return INFINITY;
      continue;
    }
    const double e = p[i] * double(total);
    stat += (double(counts[i]) - e) * (double(counts[i]) - e) / e;
    ++cells;
  }
  *dof = cells > 1 ? cells - 1 : 1;
  return stat;
}

inline bool chi2_ok(const std::vector<std::size_t>& counts, const std::vector<double>& p, std::size_t total) {
  std::size_t dof = 0;
  const double stat = chi2_stat(counts, p, total, &dof);
  return stat < chi2_crit_01(dof);
}

// Every set partition of {0..n-1} as a block label per element.
inline std::vector<std::vector<std::size_t>> set_partitions(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> label(n, 0);
  std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t blocks) {
    if (i == n) {
      out.push_back(label);
      return;
    }
    for (std::size_t b = 0; b <= blocks; ++b) {
      label[i] = b;
      go(i + 1, std::max(blocks, b + 1));
    }
  };
  go(0, 0);
  return out;
}

// inf over input pairs and output partitions of sum_i min(K(A_i|x), K(A_i|y))
inline double dobrushin_by_partitions(const std::vector<std::vector<double>>& k) {
  if (k.size() == 1) return 1.0;
  const auto parts = set_partitions(k.front().size());
  double best = INFINITY;
  for (std::size_t x = 0; x < k.size(); ++x)
    for (std::size_t y = x + 1; y < k.size(); ++y)
      for (const auto& label : parts) {
        std::vector<double> px(k.front().size(), 0.0), py(px.size(), 0.0);
        for (std::size_t z = 0; z < label.size(); ++z) {
          px[label[z]] += k[x][z];
          py[label[z]] += k[y][z];
        }
        double s = 0.0;
        for (std::size_t b = 0; b < px.size(); ++b) s += std::min(px[b], py[b]);
        best = std::min(best, s);
      }
  return best;
}

}  // namespace support
