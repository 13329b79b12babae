#include <fstream>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "teamq/artifacts.hpp"
#include "teamq/config.hpp"

using namespace teamq;
using support::example;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSmall = R"({
  "seed": 3,
  "reduction": {"K": 2},
  "quantizer": {"mode": "reachable", "depth": 2, "budget": 10},
  "solver": {"steps": 2000, "mode": "surrogate"},
  "eval": {"episodes": 100}
})";

}  // namespace

TEST_CASE("shipped config parses with its documented values") {
  const RunConfig c = parse_config(slurp(support::config("team_example.json")));
  CHECK(c.K == 2);
  CHECK(c.schedule.empty());
  CHECK(c.seed == 7);
  CHECK(c.quantizer.mode == CodebookMode::kReachable);
  CHECK(c.quantizer.budget == 72);
  CHECK(c.quantizer.expand_extra);
  CHECK(c.quantizer.extra_centers.size() == 8);
  CHECK(c.solver.restart == 0.5);
  CHECK(c.solver.mode == QLearningMode::kLive);
  CHECK(c.solver.steps >= 10000000);
  CHECK(c.eval.episodes == 100000);
}

TEST_CASE("config defaults and errors") {
  const RunConfig d = parse_config("{}");
  CHECK(d.K == 2);
  CHECK(d.solver.tol == 1e-10);
  CHECK(d.eval.trunc_eps == 1e-8);
  CHECK(d.eval.policy == "vi");

  const RunConfig s = parse_config(R"({"reduction": {"K": 3, "memory_schedule": [{"t": 2, "m": 1}]}})");
  CHECK(s.memory().window_start == std::vector<std::size_t>{0, 0, 1});

  for (const char* bad : {
           "{\"reduction\": ",
           "[1, 2]",
           R"({"reduction": {"K": 0}})",
           R"({"reduction": {"K": 2, "memory_schedule": [{"t": 2, "m": 1}]}})",
           R"({"reduction": {"K": 3, "memory_schedule": [{"t": 2}]}})",
           R"({"quantizer": {"mode": "hex"}})",
           R"({"quantizer": {"budget": "many"}})",
           R"({"solver": {"restart": 1.5}})",
           R"({"solver": {"mode": "offline"}})",
           R"({"solver": {"step_rule": "harmonic"}})",
           R"({"eval": {"policy": "random"}})",
           R"({"solver": 4})",
       })
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("config builds are reproducible and artifacts round-trip byte for byte") {
  const RunConfig c = parse_config(kSmall);
  const QuantizedMDP a = build_from_config(example(), c);
  const QuantizedMDP b = build_from_config(example(), c);
  const std::string text = qmdp_to_json(a);
  CHECK(text == qmdp_to_json(b));
  CHECK(a.n_states() <= 10);
  CHECK(a.n_actions() == 4096);

  const QuantizedMDP back = qmdp_from_json(text);
  CHECK(qmdp_to_json(back) == text);
  CHECK(back.costs == a.costs);
  CHECK(back.discount == a.discount);
  for (std::size_t s = 0; s < a.n_states(); ++s)
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.codebook.centers[s][i] == a.codebook.centers[s][i]);

  const ValueIterationResult vi = value_iteration(back);
  const ValueIterationResult vi0 = value_iteration(a);
  CHECK(vi.values == vi0.values);
  CHECK(value_iteration_to_json(vi, back) == value_iteration_to_json(vi0, a));

  const std::string policy = policy_to_json(vi.policy, back);
  const CoordinatorPolicy p = policy_from_json(policy, back);
  CHECK(p.action == vi.policy.action);
  CHECK(policy_to_json(p, back) == policy);

  QLearningOptions o;
  o.steps = 3000;
  Rng rng(2);
  const QTable t = q_learning(back, nullptr, o, rng);
  const std::string qt = qtable_to_json(t);
  const QTable t2 = qtable_from_json(qt);
  CHECK(t2.values == t.values);
  CHECK(t2.visits == t.visits);
  CHECK(qtable_to_json(t2) == qt);

  CHECK_THROWS(qmdp_from_json("{\"kind\": \"q_table\"}"));
  CHECK_THROWS(qtable_from_json("not json"));
}

TEST_CASE("explicit and grid codebooks from config") {
  RunConfig c = parse_config(R"({"reduction": {"K": 1}, "quantizer": {"mode": "grid", "n": 2}})");
  CHECK(build_codebook(example(), c).size() == 6);
  c = parse_config(R"({"reduction": {"K": 1},
                       "quantizer": {"mode": "explicit", "centers": [[1, 0, 0], [0, 0.5, 0.5]]}})");
  const Codebook e = build_codebook(example(), c);
  REQUIRE(e.size() == 2);
  CHECK(e.centers[1][2] == 0.5);
  CHECK(metric_from_name("line").kind() == GroundMetric::Kind::kLine);
  CHECK_THROWS(metric_from_name("hamming"));
}
