// teamq: batch driver for the team coordinator pipeline.
//
//   teamq validate  <config>     check the model
//   teamq bounds    <config>     certificates and memory schedule
//   teamq reduce    <config>     build the quantized MDP
//   teamq vi        <config>     value iteration on the reduced MDP
//   teamq qlearn    <config>     quantized Q-learning
//   teamq eval      <config>     rollout table for the chosen policy
//   teamq stability <config>     predictor gap sequence
//   teamq report    <config>     merge vi, qlearn and eval
//
// Artifacts go to <runs>/run-<config hash>-s<seed>/.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "teamq/teamq.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitMissing = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitRuntime = 1;

struct Failure {
  int code;
  std::string message;
};

int exit_code(tq_status s) {
  switch (s) {
    case TQ_OK:
      return kExitOk;
    case TQ_ERR_PARSE:
    case TQ_ERR_VALIDATION:
    case TQ_ERR_INVALID_ARGUMENT:
      return kExitValidation;
    case TQ_ERR_MISSING:
      return kExitMissing;
    case TQ_ERR_INFEASIBLE:
      return kExitInfeasible;
    default:
      return kExitRuntime;
  }
}

void check(tq_status s, const std::string& what) {
  if (s != TQ_OK) throw Failure{exit_code(s), what + ": " + tq_last_error()};
}

// Owns a string handed out by the library.
struct Text {
  char* p = nullptr;
  ~Text() { tq_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct Model {
  tq_model* p = nullptr;
  ~Model() { tq_model_free(p); }
};

struct Qmdp {
  tq_qmdp* p = nullptr;
  ~Qmdp() { tq_qmdp_free(p); }
};

std::optional<std::string> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string need(const fs::path& path, const std::string& hint) {
  auto text = slurp(path);
  if (!text) throw Failure{kExitMissing, "missing artifact " + path.string() + " (run `" + hint + "` first)"};
  return *text;
}

void spill(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitRuntime, "cannot write " + path.string()};
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

struct Run {
  fs::path config_path;
  std::string config_text;  // config as handed to the library, seed applied
  ordered_json config;
  std::uint64_t seed = 1;
  fs::path dir;
  std::string model_text;
};

Run open_run(const std::string& config_file, std::optional<std::int64_t> seed_flag, const fs::path& runs_root) {
  Run r;
  r.config_path = config_file;
  const auto raw = slurp(r.config_path);
  if (!raw) throw Failure{kExitMissing, "config not found: " + config_file};
  try {
    r.config = ordered_json::parse(*raw);
  } catch (const ordered_json::parse_error& e) {
    throw Failure{kExitValidation, std::string("config is not valid JSON: ") + e.what()};
  }
  if (!r.config.is_object()) throw Failure{kExitValidation, "config must be a JSON object"};

  if (seed_flag) {
    if (*seed_flag < 0) throw Failure{kExitValidation, "--seed must be nonnegative"};
    r.config["seed"] = *seed_flag;
    if (r.config.contains("solver") && r.config["solver"].is_object() && r.config["solver"].contains("seed"))
      r.config["solver"]["seed"] = *seed_flag;
  }
  const ordered_json* seed_src = &r.config;
  if (r.config.contains("solver") && r.config["solver"].is_object() && r.config["solver"].contains("seed"))
    seed_src = &r.config["solver"];
  try {
    r.seed = seed_src->value("seed", std::uint64_t{1});
  } catch (const ordered_json::exception& e) {
    throw Failure{kExitValidation, std::string("config seed: ") + e.what()};
  }

  if (r.config.contains("model")) {
    r.model_text = r.config["model"].dump();
  } else if (r.config.contains("model_path") && r.config["model_path"].is_string()) {
    fs::path mp = r.config["model_path"].get<std::string>();
    // relative paths are tried against the working directory, then the config's folder
    if (mp.is_relative() && !fs::exists(mp)) mp = r.config_path.parent_path() / mp;
    const auto text = slurp(mp);
    if (!text) throw Failure{kExitMissing, "model not found: " + mp.string()};
    r.model_text = *text;
  } else {
    throw Failure{kExitValidation, "config needs \"model\" or \"model_path\""};
  }

  r.config_text = r.config.dump();
  std::ostringstream name;
  name << "run-" << std::hex << std::setw(16) << std::setfill('0')
       << tq_hash(r.config_text.data(), r.config_text.size()) << std::dec << "-s" << r.seed;
  r.dir = runs_root / name.str();
  fs::create_directories(r.dir);
  spill(r.dir / "config.json", r.config.dump(1));
  return r;
}

Model load_model(const Run& run) {
  Model m;
  check(tq_model_load_json(run.model_text.c_str(), &m.p), "model");
  return m;
}

Qmdp load_qmdp(const Run& run) {
  Qmdp q;
  check(tq_qmdp_load_json(need(run.dir / "qmdp.json", "reduce").c_str(), &q.p), "qmdp.json");
  return q;
}

int cmd_validate(const Run& run) {
  Text report;
  const tq_status s = tq_model_validate_json(run.model_text.c_str(), &report.p);
  if (s == TQ_ERR_VALIDATION) {
    spill(run.dir / "validation.json", report.str());
    std::cerr << "model is invalid:\n" << report.str() << "\n";
    return kExitValidation;
  }
  check(s, "validate");
  Model m = load_model(run);
  Text info;
  check(tq_model_info(m.p, &info.p), "model info");
  spill(run.dir / "model_info.json", info.str());
  std::cout << "model ok " << info.str() << "\n";
  return kExitOk;
}

int cmd_bounds(const Run& run) {
  Model m = load_model(run);
  Text report;
  int feasible = 0;
  check(tq_bounds_report(m.p, run.config_text.c_str(), &report.p, &feasible), "bounds");
  spill(run.dir / "bounds.txt", report.str());
  std::cout << report.str();
  if (!feasible) {
    std::cerr << "no memory schedule meets epsilon\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_reduce(const Run& run) {
  Model m = load_model(run);
  Qmdp q;
  check(tq_qmdp_build(m.p, run.config_text.c_str(), &q.p), "reduce");
  Text json, info;
  check(tq_qmdp_to_json(q.p, &json.p), "serialize qmdp");
  check(tq_qmdp_info(q.p, &info.p), "qmdp info");
  spill(run.dir / "qmdp.json", json.str());
  std::cout << info.str() << "\n";
  return kExitOk;
}

int cmd_vi(const Run& run) {
  Qmdp q = load_qmdp(run);
  Text result;
  check(tq_value_iteration(q.p, run.config_text.c_str(), &result.p), "value iteration");
  spill(run.dir / "vi.json", result.str());
  const auto doc = ordered_json::parse(result.str());
  std::cout << "iterations=" << doc["iterations"] << " residual=" << doc["residual"] << "\n";
  return kExitOk;
}

int cmd_qlearn(const Run& run, std::int64_t steps) {
  Qmdp q = load_qmdp(run);
  Model m = load_model(run);
  Text table, policy;
  check(tq_q_learning(q.p, m.p, run.config_text.c_str(), steps, static_cast<std::int64_t>(run.seed), &table.p),
        "Q-learning");
  check(tq_greedy_policy(q.p, table.p, &policy.p), "greedy policy");
  spill(run.dir / "qtable.json", table.str());
  spill(run.dir / "q_policy.json", policy.str());
  std::cout << "wrote " << (run.dir / "qtable.json").string() << "\n";
  return kExitOk;
}

int cmd_eval(const Run& run) {
  Qmdp q = load_qmdp(run);
  Model m = load_model(run);
  std::string which = "vi";
  if (run.config.contains("eval") && run.config["eval"].is_object())
    which = run.config["eval"].value("policy", std::string("vi"));
  std::string policy;
  if (which == "q") {
    policy = need(run.dir / "q_policy.json", "qlearn");
  } else {
    const auto vi = ordered_json::parse(need(run.dir / "vi.json", "vi"));
    policy = vi.at("policy").dump();
  }
  Text result;
  check(tq_rollout(m.p, q.p, policy.c_str(), run.config_text.c_str(), static_cast<std::int64_t>(run.seed), &result.p),
        "rollout");
  spill(run.dir / "eval.json", result.str());
  for (const auto& row : ordered_json::parse(result.str()))
    std::cout << "center " << row["center"] << " mean=" << row["mean"] << " se=" << row["std_error"] << "\n";
  return kExitOk;
}

int cmd_stability(const Run& run) {
  Model m = load_model(run);
  Text csv;
  check(tq_stability(m.p, run.config_text.c_str(), static_cast<std::int64_t>(run.seed), &csv.p), "stability");
  spill(run.dir / "stability.csv", csv.str());
  std::cout << csv.str();
  return kExitOk;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

int cmd_report(const Run& run) {
  const auto vi = ordered_json::parse(need(run.dir / "vi.json", "vi"));
  const auto qt = ordered_json::parse(need(run.dir / "qtable.json", "qlearn"));
  const auto ev = ordered_json::parse(need(run.dir / "eval.json", "eval"));
  const auto qm = ordered_json::parse(need(run.dir / "qmdp.json", "reduce"));
  const auto& centers = qm.at("codebook").at("centers");

  std::ostringstream md, csv;
  md << "| Bin Center | J_Sim | J_Q | J_EVI |\n|---|---|---|---|\n";
  csv << "center,J_sim,std_err,J_vi,J_q\n";
  csv << std::setprecision(10);
  for (const auto& row : ev) {
    const std::size_t s = row.at("center").get<std::size_t>();
    // J_Q is the minimum over visited actions; an unvisited row has no estimate
    std::optional<double> jq;
    const auto& values = qt.at("values").at(s);
    const auto& visits = qt.at("visits").at(s);
    for (std::size_t a = 0; a < values.size(); ++a)
      if (visits[a].get<std::uint64_t>() > 0 && (!jq || values[a].get<double>() < *jq)) jq = values[a].get<double>();
    const double jv = vi.at("values").at(s).get<double>();
    const double js = row.at("mean").get<double>();

    std::string label = "[";
    for (std::size_t i = 0; i < centers.at(s).size(); ++i) label += (i ? " " : "") + fixed(centers[s][i]);
    label += "]";
    md << "| " << label << " | " << fixed(js) << " | " << (jq ? fixed(*jq) : "n/a") << " | " << fixed(jv) << " |\n";
    csv << s << ',' << js << ',' << row.at("std_error").get<double>() << ',' << jv << ',';
    if (jq) csv << *jq;
    csv << '\n';
  }
  spill(run.dir / "report.md", md.str());
  spill(run.dir / "report.csv", csv.str());
  std::cout << md.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"teamq: quantized coordinator reduction for decentralized teams"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tq_version()));

  std::string config_file;
  std::optional<std::int64_t> seed;
  std::string runs_root = "runs";
  std::int64_t steps = -1;

  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_file, "run config (JSON)")->required();
    sub->add_option("--seed", seed, "RNG seed; overrides the config (default: config seed, else 1)");
    sub->add_option("--runs", runs_root, "root folder for run directories")->capture_default_str();
    return sub;
  };
  add("validate", "check the model");
  add("bounds", "write the bounds report; exit 4 when no schedule meets epsilon");
  add("reduce", "build and save the quantized MDP");
  add("vi", "value iteration on the saved quantized MDP");
  add("qlearn", "quantized Q-learning on the saved quantized MDP")
      ->add_option("--steps", steps, "number of updates; overrides solver.steps (default: config, else 1e7)");
  add("eval", "rollout costs of the eval.policy policy (vi or q)");
  add("stability", "predictor stability gap sequence as CSV");
  add("report", "merge vi, qlearn and eval into a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    const Run run = open_run(config_file, seed, runs_root);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "validate") return cmd_validate(run);
    if (cmd == "bounds") return cmd_bounds(run);
    if (cmd == "reduce") return cmd_reduce(run);
    if (cmd == "vi") return cmd_vi(run);
    if (cmd == "qlearn") return cmd_qlearn(run, steps);
    if (cmd == "eval") return cmd_eval(run);
    if (cmd == "stability") return cmd_stability(run);
    return cmd_report(run);
  } catch (const Failure& f) {
    std::cerr << "teamq: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "teamq: " << e.what() << "\n";
    return kExitRuntime;
  }
}
