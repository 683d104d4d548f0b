// qcgym command-line front end.
//
// Exit status: 0 success, 2 configuration error, 3 runtime error.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qcgym/agents.hpp"
#include "qcgym/oracles.hpp"
#include "qcgym/render.hpp"
#include "qcgym/run_config.hpp"
#include "qcgym/trace.hpp"

namespace {

using namespace qcgym;
using cli::ConfigError;
using nlohmann::json;

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

// ---------------------------------------------------------------------------
// Output and instance helpers
// ---------------------------------------------------------------------------

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

/// Writes to the configured `out` file, or stdout when none is set.
void emit(const json& cfg, const std::string& text) {
  if (cfg.contains("out") && cfg["out"] != "-") write_text(cfg["out"], text);
  else std::cout << text << std::flush;
}

std::uint64_t seed_of(const json& cfg) { return cfg["seed"].get<std::uint64_t>(); }

std::optional<std::string> instance_path(const json& cfg) {
  if (!cfg.contains("instance")) return std::nullopt;
  return cfg["instance"].get<std::string>();
}

std::optional<InteractionGraph> load_instance(const InitialMappingEnv&, const json& cfg) {
  if (auto p = instance_path(cfg)) return InteractionGraph(load_graph(*p));
  return std::nullopt;
}
std::optional<RoutingInstance> load_instance(const RoutingEnv&, const json& cfg) {
  if (auto p = instance_path(cfg)) return RoutingInstance(interaction_circuit_of(load_circuit(*p)));
  return std::nullopt;
}
std::optional<Circuit> load_instance(const SchedulingEnv&, const json& cfg) {
  if (auto p = instance_path(cfg)) return load_circuit(*p);
  return std::nullopt;
}

/// Builds the configured environment and hands it to `f`.
template <class F>
int with_env(const json& cfg, F&& f) {
  const std::string kind = cfg["env"];
  if (kind == "mapping") {
    auto env = cli::make_mapping_env(cfg);
    return f(env);
  }
  if (kind == "routing") {
    auto env = cli::make_routing_env(cfg);
    return f(env);
  }
  auto env = cli::make_scheduling_env(cfg);
  return f(env);
}

// ---------------------------------------------------------------------------
// Objectives and oracles per environment
// ---------------------------------------------------------------------------

std::string objective_name(const InitialMappingEnv&) { return "cost"; }
std::string objective_name(const RoutingEnv&) { return "swaps"; }
std::string objective_name(const SchedulingEnv&) { return "makespan"; }

long objective_value(const InitialMappingEnv& env) { return env.episode_cost(); }
long objective_value(const RoutingEnv& env) { return static_cast<long>(env.swaps().size()); }
long objective_value(const SchedulingEnv& env) { return env.finalize_schedule().makespan(); }

json witness_json(const Mapping& m) { return m.assignment(); }
json witness_json(const std::vector<SwapRecord>& swaps) {
  json arr = json::array();
  for (const auto& s : swaps) arr.push_back({{"position", s.position}, {"edge", {s.edge.first, s.edge.second}}});
  return arr;
}
json witness_json(const Schedule& s) { return s.start_cycles(); }

template <class W>
json oracle_json(const OracleResult<W>& r, bool timing) {
  json j{{"objective", r.objective}, {"witness", witness_json(r.witness)}, {"nodes_explored", r.nodes_explored}};
  if (timing) j["elapsed_seconds"] = r.elapsed.count();
  return j;
}

/// Solves the instance the environment currently holds.
json run_oracle(const InitialMappingEnv& env, bool timing) {
  return oracle_json(optimal_mapping(env.interaction(), env.coupling()), timing);
}
json run_oracle(const RoutingEnv& env, bool timing) {
  return oracle_json(optimal_routing(env.circuit(), env.coupling(), env.initial_placement()), timing);
}
json run_oracle(const SchedulingEnv& env, bool timing) {
  return oracle_json(optimal_schedule(env.circuit(), env.config().properties, env.config().rules), timing);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_gen(const json& cfg) {
  return with_env(cfg, [&](auto& env) {
    env.reset(seed_of(cfg));
    emit(cfg, env.instance_descriptor());
    return 0;
  });
}

int cmd_train(const json& cfg) {
  std::vector<std::uint64_t> seeds;
  if (cfg.contains("seeds")) seeds = cfg["seeds"].get<std::vector<std::uint64_t>>();
  else seeds.push_back(seed_of(cfg));
  if (seeds.empty()) throw ConfigError("key 'seeds': at least one seed is required");
  if (cfg["agent"] != "q") throw ConfigError("key 'agent': train supports only 'q'");

  QLearningParams params;
  params.alpha = cfg["alpha"];
  params.gamma = cfg["gamma"];
  params.epsilon_start = cfg["epsilon_start"];
  params.epsilon_end = cfg["epsilon_end"];
  params.anneal_fraction = cfg["anneal_fraction"];
  const long episodes = cfg["episodes"];
  const long window_cfg = cfg["rolling_window"];
  if (window_cfg <= 0) throw ConfigError("key 'rolling_window': must be positive");
  const auto window = static_cast<std::size_t>(window_cfg);

  const std::string env_name = cfg["env"];
  const std::filesystem::path dir = cfg["out_dir"].get<std::string>();
  // Fail on an unreadable instance before writing any artifact.
  with_env(cfg, [&](auto& env) {
    (void)load_instance(env, cfg);
    return 0;
  });
  std::filesystem::create_directories(dir);
  write_text((dir / (env_name + "_config.json")).string(), cfg.dump(2) + "\n");

  for (auto seed : seeds) {
    with_env(cfg, [&](auto& env) {
      auto result = q_learning_train(env, episodes, params, seed, load_instance(env, cfg));
      const auto stem = env_name + "_seed" + std::to_string(seed);
      std::ostringstream csv, table;
      result.log.write_csv(csv, window);
      result.policy.save(table);
      write_text((dir / (stem + ".csv")).string(), csv.str());
      write_text((dir / (stem + ".qtable")).string(), table.str());

      const auto n = result.log.size();
      const auto w = std::min(window, n);
      std::cout << "seed " << seed << ": " << n << " episodes, " << result.policy.state_count() << " states"
                << ", mean reward first/last " << w << " = " << format_number(result.log.mean_reward(0, w)) << " / "
                << format_number(result.log.mean_reward(n - w, n))
                << ", mean length first/last = " << format_number(result.log.mean_length(0, w)) << " / "
                << format_number(result.log.mean_length(n - w, n)) << '\n';
      return 0;
    });
  }
  return 0;
}

int cmd_eval(const json& cfg) {
  const std::string agent = cfg["agent"];
  return with_env(cfg, [&](auto& env) {
    using Env = std::decay_t<decltype(env)>;
    using Obs = typename Env::Observation;
    std::function<int(const Obs&, const ActionMask&)> policy;
    const auto seed = seed_of(cfg);
    if (agent == "q") {
      if (!cfg.contains("policy")) throw ConfigError("key 'policy': required for agent 'q'");
      std::istringstream in(detail::read_file(cfg["policy"]));
      auto q = QPolicy::load(in);
      if (q.action_count() != env.action_count())
        throw std::runtime_error("policy has " + std::to_string(q.action_count()) + " actions, environment has " +
                                 std::to_string(env.action_count()));
      policy = q;
    } else if (agent == "greedy") {
      if constexpr (std::is_same_v<Env, SchedulingEnv>) policy = GreedySchedulingPolicy{};
      else throw ConfigError("key 'agent': greedy is only defined for env scheduling");
    } else if (agent == "random") {
      policy = RandomPolicy(seed, env.action_count());
    } else if (agent == "masked_random") {
      policy = MaskedRandomPolicy(seed);
    } else {
      throw ConfigError("key 'agent': unknown agent '" + agent + "' (expected q | greedy | random | masked_random)");
    }

    auto trace = run_episode(env, policy, seed, load_instance(env, cfg));
    json report{{"env", cfg["env"]},
                {"agent", agent},
                {"seed", seed},
                {"steps", trace.length()},
                {"total_reward", trace.total_reward()},
                {"terminated", trace.terminated() || (env.done() && trace.length() == 0)},
                {"truncated", trace.truncated()},
                {"objective", objective_name(env)}};
    const bool finished = !trace.truncated();
    report["value"] = finished ? json(objective_value(env)) : json(nullptr);
    try {
      report["oracle"] = run_oracle(env, false)["objective"];
    } catch (const OracleBoundError& e) {
      report["oracle"] = nullptr;
      report["oracle_note"] = e.what();
    }
    std::cout << report.dump(2) << '\n';
    return 0;
  });
}

int cmd_oracle(const json& cfg) {
  return with_env(cfg, [&](auto& env) {
    env.reset(seed_of(cfg), load_instance(env, cfg));
    emit(cfg, run_oracle(env, cfg["timing"]).dump() + "\n");
    return 0;
  });
}

/// Circuit of a scheduling command: the instance file, or a generated one.
Circuit scheduling_circuit(const json& cfg, const SchedulingConfig& sc) {
  if (auto p = instance_path(cfg)) {
    auto c = load_circuit(*p);
    sc.properties.check_circuit(c);
    return c;
  }
  SchedulingEnv env(sc);
  env.reset(seed_of(cfg));
  return env.circuit();
}

int cmd_alap(const json& cfg) {
  if (cfg["env"] != "scheduling") throw ConfigError("key 'env': alap requires env scheduling");
  const auto sc = cli::scheduling_config_from(cfg);
  const std::string format = cfg["format"];
  if (format != "schedule" && format != "text" && format != "svg")
    throw ConfigError("key 'format': unknown format '" + format + "' for alap (expected schedule | text | svg)");
  const auto circuit = scheduling_circuit(cfg, sc);
  const auto s = cfg["use_rules"].get<bool>() ? alap_schedule(circuit, sc.properties, sc.rules)
                                              : alap_schedule(circuit, sc.properties);
  if (format == "schedule") emit(cfg, write_schedule(s));
  else if (format == "text") emit(cfg, render_gantt_text(s));
  else emit(cfg, render_gantt_svg(s));
  return 0;
}

int cmd_render(const json& cfg) {
  const std::string kind = cfg["env"];
  const std::string format = cfg["format"];
  if (kind == "mapping") {
    if (format != "dot") throw ConfigError("key 'format': unknown format '" + format + "' for mapping (expected dot)");
    auto env = cli::make_mapping_env(cfg);
    env.reset(seed_of(cfg), load_instance(env, cfg));
    Mapping m(env.n());
    if (cfg.contains("assignment")) {
      auto a = cfg["assignment"].get<std::vector<int>>();
      if (static_cast<int>(a.size()) != env.n())
        throw ConfigError("key 'assignment': expected " + std::to_string(env.n()) + " entries");
      m = cli::detail::as_config_error("key 'assignment': ", [&] { return Mapping(a); });
    }
    emit(cfg, render_mapping_dot(env.interaction(), env.coupling(), m));
    return 0;
  }
  if (kind != "scheduling") throw ConfigError("key 'env': render supports mapping and scheduling");
  if (format != "text" && format != "svg")
    throw ConfigError("key 'format': unknown format '" + format + "' for scheduling (expected text | svg)");
  const auto sc = cli::scheduling_config_from(cfg);
  const auto circuit = scheduling_circuit(cfg, sc);
  Schedule s = cfg.contains("schedule")
                   ? Schedule(circuit, sc.properties,
                              parse_schedule_starts(detail::read_file(cfg["schedule"]), circuit.size()))
                   : alap_schedule(circuit, sc.properties);
  emit(cfg, format == "text" ? render_gantt_text(s) : render_gantt_svg(s));
  return 0;
}

int cmd_trace(const json& cfg) {
  const std::string kind = cfg["env"];
  return with_env(cfg, [&](auto& env) {
    const auto seed = seed_of(cfg);
    auto obs = env.reset(seed, load_instance(env, cfg));
    EpisodeTrace<std::decay_t<decltype(obs)>> trace(seed, env.instance_descriptor(), obs);
    for (int action : cfg["actions"].get<std::vector<int>>()) {
      if (env.done()) break;
      trace.record(action, env.step(action));
    }
    std::ostringstream steps;
    write_trace(steps, kind, trace);
    emit(cfg, steps.str());
    if (cfg.contains("obs_out")) {
      std::ostringstream obs_lines;
      write_trace_observations(obs_lines, trace);
      write_text(cfg["obs_out"], obs_lines.str());
    }
    return 0;
  });
}

int dispatch(const std::string& cmd, const json& cfg) {
  if (cmd == "gen") return cmd_gen(cfg);
  if (cmd == "train") return cmd_train(cfg);
  if (cmd == "eval") return cmd_eval(cfg);
  if (cmd == "oracle") return cmd_oracle(cfg);
  if (cmd == "alap") return cmd_alap(cfg);
  if (cmd == "render") return cmd_render(cfg);
  return cmd_trace(cfg);
}

const std::map<std::string, std::string>& command_help() {
  static const std::map<std::string, std::string> help{
      {"gen", "generate a random instance from the env's generator"},
      {"train", "train a tabular Q-learning agent; writes CSV log, Q-table and effective config"},
      {"eval", "run one episode with a policy and report the objective next to the oracle optimum"},
      {"oracle", "solve an instance exactly (small instances only)"},
      {"alap", "as-late-as-possible baseline schedule"},
      {"render", "render a mapping as DOT or a schedule as a text/SVG Gantt chart"},
      {"trace", "replay scripted actions and write the step trace"},
  };
  return help;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcgym: reinforcement-learning environments for quantum compilation"};
  app.require_subcommand(1, 1);
  app.footer(cli::keys_help());

  std::string config_path;
  std::map<std::string, std::string> flag_values;
  for (const auto& cmd : cli::commands()) {
    auto* sub = app.add_subcommand(cmd, command_help().at(cmd));
    sub->add_option("--config", config_path, "JSON config file; flags override its keys");
    for (const auto& k : cli::key_table()) {
      if (!k.applies_to_command(cmd)) continue;
      std::string names = k.flag();
      if (k.name == "n_qubits") names += ",--qubits";
      if (k.kind == cli::ValueKind::Boolean) {
        sub->add_flag_function(names, [&flag_values, name = k.name](std::int64_t n) {
          flag_values[name] = n > 0 ? "true" : "false";
        }, k.help);
      } else {
        sub->add_option_function<std::string>(
            names, [&flag_values, name = k.name](const std::string& v) { flag_values[name] = v; }, k.help);
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  json cfg;
  try {
    cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
      try {
        cfg = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + config_path + "': " + e.what());
      }
      if (!cfg.is_object()) throw ConfigError("config file '" + config_path + "' must hold a JSON object");
    }
    for (const auto& [name, text] : flag_values) cfg[name] = cli::flag_value(*cli::find_key(name), text);
    cfg = cli::effective_config(cfg, cmd);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    return dispatch(cmd, cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
