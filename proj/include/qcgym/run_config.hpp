#pragma once

// Run configuration shared by the command-line tool: the key table, value
// parsing, validation, default materialization and environment factories.

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qcgym/agents.hpp"
#include "qcgym/formats.hpp"
#include "qcgym/initial_mapping.hpp"
#include "qcgym/routing.hpp"
#include "qcgym/scheduling.hpp"

namespace qcgym::cli {

using nlohmann::json;

/// Invalid or unknown configuration; maps to exit status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ValueKind { Integer, Real, Text, Boolean, IntList, TextList, Structured };

inline const std::vector<std::string>& env_kinds() {
  static const std::vector<std::string> kinds{"mapping", "routing", "scheduling"};
  return kinds;
}

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> cmds{"gen", "train", "eval", "oracle", "alap", "render", "trace"};
  return cmds;
}

struct KeySpec {
  std::string name;
  ValueKind kind;
  std::vector<std::string> envs;      // empty: every env
  std::vector<std::string> commands;  // empty: every command
  std::string help;

  [[nodiscard]] bool applies_to_env(const std::string& env) const {
    return envs.empty() || std::find(envs.begin(), envs.end(), env) != envs.end();
  }
  [[nodiscard]] bool applies_to_command(const std::string& cmd) const {
    return commands.empty() || std::find(commands.begin(), commands.end(), cmd) != commands.end();
  }
  [[nodiscard]] std::string flag() const {
    std::string f = name;
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
  }
};

inline const std::vector<KeySpec>& key_table() {
  using K = ValueKind;
  static const std::vector<KeySpec> table{
      {"env", K::Text, {}, {}, "environment kind: mapping | routing | scheduling"},
      {"seed", K::Integer, {}, {}, "RNG seed (default 0)"},
      {"seeds", K::IntList, {}, {"train"}, "comma-separated seeds, trained one after another"},
      {"episodes", K::Integer, {}, {"train"}, "training episodes (default 1000)"},
      {"agent", K::Text, {}, {"train", "eval"}, "train: q; eval: q | greedy | random | masked_random"},
      {"alpha", K::Real, {}, {"train"}, "Q-learning step size (default 0.1)"},
      {"gamma", K::Real, {}, {"train"}, "discount factor (default 0.95)"},
      {"epsilon_start", K::Real, {}, {"train"}, "initial exploration rate (default 1.0)"},
      {"epsilon_end", K::Real, {}, {"train"}, "final exploration rate (default 0.05)"},
      {"anneal_fraction", K::Real, {}, {"train"}, "fraction of episodes over which epsilon anneals (default 0.5)"},
      {"rolling_window", K::Integer, {}, {"train"}, "rolling-mean window of the training CSV (default 100)"},
      {"out_dir", K::Text, {}, {"train"}, "directory for training artifacts (default .)"},
      {"policy", K::Text, {}, {"eval"}, "saved Q-table to evaluate"},
      {"instance", K::Text, {}, {"train", "eval", "oracle", "alap", "render", "trace"},
       "instance file: graph (mapping) or circuit (routing, scheduling); generated from seed when absent"},
      {"actions", K::IntList, {}, {"trace"}, "scripted action codes, comma-separated"},
      {"out", K::Text, {}, {"gen", "oracle", "alap", "render", "trace"}, "output file (default stdout)"},
      {"obs_out", K::Text, {}, {"trace"}, "also write one JSON observation per line to this file"},
      {"format", K::Text, {}, {"alap", "render"}, "alap: schedule | text | svg; render: dot | text | svg"},
      {"schedule", K::Text, {"scheduling"}, {"render"}, "schedule file ('gate start' lines); ALAP when absent"},
      {"assignment", K::IntList, {"mapping"}, {"render"}, "physical qubit per logical qubit, -1 for unmapped"},
      {"use_rules", K::Boolean, {"scheduling"}, {"alap"}, "let ALAP exploit the commutation rules (default false)"},
      {"timing", K::Boolean, {}, {"oracle"}, "include wall-clock time in the oracle record (default false)"},
      {"edge_probability", K::Real, {"mapping"}, {}, "edge probability of generated interaction graphs (default 0.5)"},
      {"connection_graph", K::Structured, {"mapping", "routing"}, {},
       "coupling graph: file path, line:N | star:N | complete:N, or [[u,v],...] "
       "(mapping default star:4, routing default line over n_qubits)"},
      {"reward", K::Structured, {}, {},
       "preset name or weight object (mapping: shaped | flat, {on_edge, off_edge, illegal, completion}; "
       "routing: {advance, swap, illegal}; scheduling: {schedule, advance, illegal})"},
      {"n_qubits", K::Integer, {"routing", "scheduling"}, {},
       "qubit count (routing default 3, scheduling default 2)"},
      {"circuit_length_range", K::IntList, {"routing"}, {}, "min,max generated circuit length (default 1,8)"},
      {"window_size", K::Integer, {"routing"}, {}, "interaction pairs visible to the agent (default 4)"},
      {"machine_properties", K::Structured, {"scheduling"}, {},
       "{durations: {gate: cycles}, exclusion_classes: [[gate,...],...]} (default built-in table)"},
      {"commutation_rules", K::Structured, {"scheduling"}, {},
       "default | none | [[gate, role, gate, role],...] with role control | target | single"},
      {"max_gates", K::Integer, {"scheduling"}, {}, "maximum generated circuit size (default 5)"},
      {"gate_set", K::TextList, {"scheduling"}, {}, "gate names drawn by the generator (default x,y,z,h,cnot,measure)"},
      {"max_observed_gates", K::Integer, {"scheduling"}, {}, "fixed observation capacity (default 20)"},
  };
  return table;
}

inline const KeySpec* find_key(const std::string& name) {
  for (const auto& k : key_table())
    if (k.name == name) return &k;
  return nullptr;
}

/// Help text listing every accepted key per environment kind.
inline std::string keys_help() {
  std::ostringstream out;
  out << "Configuration keys (JSON file via --config, or the matching --flag; flags win):\n";
  for (const auto& env : env_kinds()) {
    out << "  env " << env << ":\n";
    for (const auto& k : key_table())
      if (k.applies_to_env(env)) out << "    " << k.name << "  " << k.help << '\n';
  }
  return out.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

inline long long to_integer(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  long long v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || p != t.data() + t.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
  return v;
}

inline double to_real(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!text.empty() && text.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Converts the text of a command-line flag into the key's JSON value.
inline json flag_value(const KeySpec& k, const std::string& text) {
  switch (k.kind) {
    case ValueKind::Integer: return detail::to_integer(k.name, text);
    case ValueKind::Real: return detail::to_real(k.name, text);
    case ValueKind::Text: return text;
    case ValueKind::Boolean:
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw ConfigError("key '" + k.name + "': expected true or false, got '" + text + "'");
    case ValueKind::IntList: {
      json arr = json::array();
      if (detail::trim(text).empty()) return arr;
      for (const auto& item : detail::split(text)) arr.push_back(detail::to_integer(k.name, item));
      return arr;
    }
    case ValueKind::TextList: {
      json arr = json::array();
      for (const auto& item : detail::split(text))
        if (!item.empty()) arr.push_back(item);
      return arr;
    }
    case ValueKind::Structured: {
      const auto t = detail::trim(text);
      if (!t.empty() && (t.front() == '[' || t.front() == '{')) {
        try {
          return json::parse(t);
        } catch (const json::parse_error& e) {
          throw ConfigError("key '" + k.name + "': malformed JSON value: " + e.what());
        }
      }
      return t;
    }
  }
  return text;
}

/// Checks JSON value types against the key table.
inline void check_value_type(const KeySpec& k, const json& v) {
  auto fail = [&](const char* what) { throw ConfigError("key '" + k.name + "': expected " + what); };
  switch (k.kind) {
    case ValueKind::Integer:
      if (!v.is_number_integer()) fail("an integer");
      break;
    case ValueKind::Real:
      if (!v.is_number()) fail("a number");
      break;
    case ValueKind::Text:
      if (!v.is_string()) fail("a string");
      break;
    case ValueKind::Boolean:
      if (!v.is_boolean()) fail("true or false");
      break;
    case ValueKind::IntList:
      if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_integer(); }))
        fail("a list of integers");
      break;
    case ValueKind::TextList:
      if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); }))
        fail("a list of strings");
      break;
    case ValueKind::Structured:
      if (!v.is_string() && !v.is_array() && !v.is_object()) fail("a string, list or object");
      break;
  }
}

/// Rejects unknown keys, keys of another env or command, and mistyped values.
inline void validate(const json& cfg, const std::string& command) {
  if (!cfg.is_object()) throw ConfigError("configuration must be a JSON object");
  if (!cfg.contains("env")) throw ConfigError("key 'env' is required (mapping | routing | scheduling)");
  if (!cfg["env"].is_string()) throw ConfigError("key 'env': expected a string");
  const std::string env = cfg["env"];
  if (std::find(env_kinds().begin(), env_kinds().end(), env) == env_kinds().end())
    throw ConfigError("key 'env': unknown environment '" + env + "' (expected mapping | routing | scheduling)");
  for (const auto& [name, value] : cfg.items()) {
    const auto* k = find_key(name);
    if (!k) throw ConfigError("unknown key '" + name + "'");
    if (!k->applies_to_env(env)) throw ConfigError("key '" + name + "' is not accepted for env '" + env + "'");
    if (!k->applies_to_command(command))
      throw ConfigError("key '" + name + "' is not accepted by command '" + command + "'");
    check_value_type(*k, value);
  }
}

// ---------------------------------------------------------------------------
// Value decoding
// ---------------------------------------------------------------------------

inline json machine_properties_json(const MachineProperties& p) {
  json classes = json::array();
  for (const auto& cls : p.exclusion_classes()) classes.push_back(json(std::vector<std::string>(cls.begin(), cls.end())));
  return {{"durations", p.durations()}, {"exclusion_classes", classes}};
}

inline MachineProperties machine_properties_from(const json& v, int n_qubits) {
  if (v.is_string() && v == "default") return MachineProperties::defaults(n_qubits);
  if (!v.is_object()) throw ConfigError("key 'machine_properties': expected \"default\" or an object");
  for (const auto& [field, _] : v.items())
    if (field != "durations" && field != "exclusion_classes")
      throw ConfigError("key 'machine_properties': unknown field '" + field + "'");
  auto props = MachineProperties::defaults(n_qubits);
  auto durations = props.durations();
  auto classes = props.exclusion_classes();
  try {
    if (v.contains("durations")) durations = v["durations"].get<std::map<std::string, int>>();
    if (v.contains("exclusion_classes")) classes = v["exclusion_classes"].get<std::vector<std::set<std::string>>>();
    return MachineProperties(n_qubits, durations, classes);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("key 'machine_properties': ") + e.what());
  }
}

inline json commutation_rules_json(const CommutationRules& rules) {
  json arr = json::array();
  for (const auto& r : rules.canonical_entries())
    arr.push_back({r.first, to_string(r.first_role), r.second, to_string(r.second_role)});
  return arr;
}

inline CommutationRules commutation_rules_from(const json& v) {
  if (v.is_string()) {
    if (v == "default") return CommutationRules::defaults();
    if (v == "none") return CommutationRules::none();
    throw ConfigError("key 'commutation_rules': expected default, none or a rule list");
  }
  if (!v.is_array()) throw ConfigError("key 'commutation_rules': expected default, none or a rule list");
  std::vector<CommutationRules::Rule> rules;
  try {
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 4) throw ConfigError("each rule must be [gate, role, gate, role]");
      rules.push_back({e[0].get<std::string>(), parse_role(e[1].get<std::string>()), e[2].get<std::string>(),
                       parse_role(e[3].get<std::string>())});
    }
  } catch (const std::exception& e) {
    throw ConfigError(std::string("key 'commutation_rules': ") + e.what());
  }
  return CommutationRules(std::move(rules));
}

inline CouplingGraph coupling_from(const json& v) {
  try {
    if (v.is_array()) {
      std::vector<Edge> edges;
      int n = 0;
      for (const auto& e : v) {
        if (!e.is_array() || e.size() != 2) throw ConfigError("inline edges must be [u, v] pairs");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        n = std::max({n, edges.back().first + 1, edges.back().second + 1});
      }
      return CouplingGraph(n, edges);
    }
    if (!v.is_string()) throw ConfigError("expected a path, a named graph or an edge list");
    const std::string s = v;
    const auto colon = s.find(':');
    if (colon != std::string::npos) {
      const auto kind = s.substr(0, colon);
      if (kind == "line" || kind == "star" || kind == "complete") {
        const int n = static_cast<int>(detail::to_integer("connection_graph", s.substr(colon + 1)));
        if (kind == "line") return CouplingGraph::line(n);
        if (kind == "star") return CouplingGraph::star(n);
        return CouplingGraph::complete(n);
      }
    }
    return CouplingGraph(load_graph(s));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("key 'connection_graph': ") + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("key 'connection_graph': ") + e.what());
  }
}

namespace detail {

/// Overlays a weight object onto `base`, accepting only the listed fields.
inline void apply_weights(const std::string& env, const json& v, std::initializer_list<std::pair<const char*, double*>> fields) {
  for (const auto& [name, value] : v.items()) {
    bool known = false;
    for (const auto& [field, target] : fields)
      if (name == field) {
        if (!value.is_number()) throw ConfigError("key 'reward': weight '" + name + "' must be a number");
        *target = value.get<double>();
        known = true;
      }
    if (!known) throw ConfigError("key 'reward': unknown weight '" + name + "' for env '" + env + "'");
  }
}

/// Runs `f`, turning library argument errors into ConfigError with `prefix`.
template <class F>
auto as_config_error(const std::string& prefix, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(prefix + e.what());
  }
}

}  // namespace detail

inline MappingReward mapping_reward_from(const json& v) {
  if (v.is_string()) return detail::as_config_error("key 'reward': ", [&] { return MappingReward::preset(v); });
  if (!v.is_object()) throw ConfigError("key 'reward': expected a preset name or a weight object");
  MappingReward r;
  detail::apply_weights("mapping", v,
                        {{"on_edge", &r.on_edge}, {"off_edge", &r.off_edge}, {"illegal", &r.illegal},
                         {"completion", &r.completion}});
  return r;
}

inline RoutingReward routing_reward_from(const json& v) {
  if (v.is_string()) return detail::as_config_error("key 'reward': ", [&] { return RoutingReward::preset(v); });
  if (!v.is_object()) throw ConfigError("key 'reward': expected a preset name or a weight object");
  RoutingReward r;
  detail::apply_weights("routing", v, {{"advance", &r.advance}, {"swap", &r.swap}, {"illegal", &r.illegal}});
  return r;
}

inline SchedulingReward scheduling_reward_from(const json& v) {
  if (v.is_string()) return detail::as_config_error("key 'reward': ", [&] { return SchedulingReward::preset(v); });
  if (!v.is_object()) throw ConfigError("key 'reward': expected a preset name or a weight object");
  SchedulingReward r;
  detail::apply_weights("scheduling", v, {{"schedule", &r.schedule}, {"advance", &r.advance}, {"illegal", &r.illegal}});
  return r;
}

// ---------------------------------------------------------------------------
// Defaults
// ---------------------------------------------------------------------------

/// Validates `cfg` for `command` and fills in every default, so the result
/// fully describes the run.
inline json effective_config(json cfg, const std::string& command) {
  validate(cfg, command);
  const std::string env = cfg["env"];
  auto put = [&](const std::string& key, json value) {
    const auto* k = find_key(key);
    if (k->applies_to_env(env) && k->applies_to_command(command) && !cfg.contains(key)) cfg[key] = std::move(value);
  };
  put("seed", 0);
  put("episodes", 1000);
  put("agent", command == "eval" ? (cfg.contains("policy") ? "q" : "masked_random") : "q");
  const QLearningParams q;
  put("alpha", q.alpha);
  put("gamma", q.gamma);
  put("epsilon_start", q.epsilon_start);
  put("epsilon_end", q.epsilon_end);
  put("anneal_fraction", q.anneal_fraction);
  put("rolling_window", 100);
  put("out_dir", ".");
  put("actions", json::array());
  put("format", command == "alap" ? "schedule" : (env == "mapping" ? "dot" : "text"));
  put("use_rules", false);
  put("timing", false);
  if (env == "mapping") {
    put("edge_probability", 0.5);
    put("connection_graph", "star:4");
    put("reward", "shaped");
  } else if (env == "routing") {
    put("n_qubits", 3);
    put("connection_graph", "line:" + std::to_string(cfg["n_qubits"].get<int>()));
    put("circuit_length_range", json::array({1, 8}));
    put("window_size", 4);
    put("reward", "default");
  } else {
    const SchedulingConfig d;
    put("n_qubits", d.properties.n_qubits());
    put("machine_properties", machine_properties_json(MachineProperties::defaults(cfg["n_qubits"].get<int>())));
    put("commutation_rules", commutation_rules_json(d.rules));
    put("max_gates", d.max_gates);
    put("gate_set", d.gate_set);
    put("max_observed_gates", d.max_observed_gates);
    put("reward", "default");
  }
  if (command == "train" && cfg["episodes"].get<long long>() <= 0) throw ConfigError("key 'episodes': must be positive");
  if (cfg.contains("seed") && cfg["seed"].get<long long>() < 0) throw ConfigError("key 'seed': must be non-negative");
  if (cfg.contains("seeds"))
    for (const auto& s : cfg["seeds"])
      if (s.get<long long>() < 0) throw ConfigError("key 'seeds': seeds must be non-negative");
  return cfg;
}

// ---------------------------------------------------------------------------
// Environment factories (take an effective config)
// ---------------------------------------------------------------------------

inline InitialMappingEnv make_mapping_env(const json& cfg) {
  auto coupling = coupling_from(cfg["connection_graph"]);
  auto reward = mapping_reward_from(cfg["reward"]);
  return detail::as_config_error("key 'edge_probability': ", [&] {
    return InitialMappingEnv(cfg["edge_probability"].get<double>(), coupling, reward);
  });
}

inline RoutingEnv make_routing_env(const json& cfg) {
  auto coupling = coupling_from(cfg["connection_graph"]);
  const auto& range = cfg["circuit_length_range"];
  if (range.size() != 2) throw ConfigError("key 'circuit_length_range': expected min,max");
  if (cfg["n_qubits"].get<int>() != coupling.n_nodes())
    throw ConfigError("key 'n_qubits': " + std::to_string(cfg["n_qubits"].get<int>()) +
                      " does not match the connection graph (" + std::to_string(coupling.n_nodes()) + " nodes)");
  auto reward = routing_reward_from(cfg["reward"]);
  return detail::as_config_error("routing config (circuit_length_range, window_size): ", [&] {
    return RoutingEnv(coupling, {range[0].get<int>(), range[1].get<int>()}, cfg["window_size"].get<int>(), reward);
  });
}

inline SchedulingConfig scheduling_config_from(const json& cfg) {
  SchedulingConfig c;
  if (cfg["n_qubits"].get<int>() < 1) throw ConfigError("key 'n_qubits': must be positive");
  c.properties = machine_properties_from(cfg["machine_properties"], cfg["n_qubits"].get<int>());
  c.rules = commutation_rules_from(cfg["commutation_rules"]);
  c.max_gates = cfg["max_gates"].get<int>();
  c.gate_set = cfg["gate_set"].get<std::vector<std::string>>();
  c.max_observed_gates = cfg["max_observed_gates"].get<int>();
  c.reward = scheduling_reward_from(cfg["reward"]);
  return c;
}

inline SchedulingEnv make_scheduling_env(const json& cfg) {
  auto c = scheduling_config_from(cfg);
  return detail::as_config_error("scheduling config (gate_set, max_gates, max_observed_gates): ", [&] { return SchedulingEnv(c); });
}

}  // namespace qcgym::cli
