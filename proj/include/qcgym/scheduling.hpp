#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcgym/core.hpp"
#include "qcgym/env.hpp"
#include "qcgym/formats.hpp"
#include "qcgym/rng.hpp"

namespace qcgym {

struct GateSpec {
  std::string name;
  int arity = 1;
};

inline int default_arity(const std::string& name) {
  static const std::set<std::string> two_qubit{"cnot", "cx", "cz", "swap"};
  return two_qubit.count(name) ? 2 : 1;
}

inline std::vector<GateSpec> gate_specs(const std::vector<std::string>& names) {
  std::vector<GateSpec> out;
  for (const auto& n : names) out.push_back({n, default_arity(n)});
  return out;
}

/// Gate count uniform in [1, max_gates]; each gate uniform over the gate
/// kinds that fit on `n_qubits`, with uniform distinct operands.
inline Circuit generate_random_circuit(RngStream& rng, int n_qubits, int max_gates, const std::vector<GateSpec>& gate_set) {
  if (max_gates < 1) throw std::invalid_argument("generate_random_circuit: max_gates must be at least 1");
  if (gate_set.empty()) throw std::invalid_argument("generate_random_circuit: gate set is empty");
  std::vector<GateSpec> feasible;
  for (const auto& g : gate_set)
    if (g.arity >= 1 && g.arity <= std::min(n_qubits, 2)) feasible.push_back(g);
  if (feasible.empty()) throw std::invalid_argument("generate_random_circuit: no gate in the set fits the qubit count");

  Circuit c(n_qubits);
  const int count = rng.uniform_int(1, max_gates);
  for (int k = 0; k < count; ++k) {
    const auto& spec = feasible[rng.below(feasible.size())];
    const int q0 = rng.uniform_int(0, n_qubits - 1);
    if (spec.arity == 1) {
      c.add(gate(spec.name, q0));
    } else {
      int q1 = rng.uniform_int(0, n_qubits - 2);
      if (q1 >= q0) ++q1;
      c.add(gate(spec.name, q0, q1));
    }
  }
  return c;
}

struct SchedulingReward {
  double schedule = 0.0;
  double advance = -1.0;
  double illegal = -5.0;

  static SchedulingReward preset(const std::string& name) {
    if (name == "default") return {};
    throw std::invalid_argument("unknown scheduling reward preset '" + name + "' (expected default)");
  }
};

struct SchedulingConfig {
  MachineProperties properties = MachineProperties::defaults(2);
  CommutationRules rules = CommutationRules::defaults();
  int max_gates = 5;
  std::vector<std::string> gate_set{"x", "y", "z", "h", "cnot", "measure"};
  int max_observed_gates = 20;
  SchedulingReward reward{};
};

/// All arrays padded to the fixed gate capacity G_max.
struct SchedulingObservation {
  std::vector<int> legal_mask;
  std::vector<int> scheduled_flags;
  std::vector<int> gate_encoding;  // (type id, qubit0, qubit1 or n) per gate
  std::vector<int> blockers_remaining;

  [[nodiscard]] std::string key() const {
    std::ostringstream out;
    auto put = [&](const std::vector<int>& v) {
      for (int x : v) out << x << ',';
      out << '|';
    };
    put(legal_mask);
    put(scheduled_flags);
    put(gate_encoding);
    put(blockers_remaining);
    return out.str();
  }

  friend bool operator==(const SchedulingObservation&, const SchedulingObservation&) = default;
};

/// Back-to-front cycle scheduling. Cycles count backwards from the circuit
/// end; `finalize_schedule` converts to forward start cycles.
///
/// Gate i may start at the current reverse cycle when every dependency
/// successor has finished (in reverse time), its qubits are free, and no
/// gate of a shared exclusion class is still running.
class SchedulingEnv {
 public:
  using Observation = SchedulingObservation;
  using Instance = Circuit;
  static constexpr int kUnassigned = -1;

  explicit SchedulingEnv(SchedulingConfig config = {})
      : cfg_(std::move(config)), gate_set_(gate_specs(cfg_.gate_set)) {
    if (cfg_.max_gates < 1) throw std::invalid_argument("SchedulingEnv: max_gates must be at least 1");
    if (cfg_.max_observed_gates < cfg_.max_gates)
      throw std::invalid_argument("SchedulingEnv: gate capacity smaller than max_gates");
    for (const auto& g : gate_set_)
      if (!cfg_.properties.has_duration(g.name))
        throw std::invalid_argument("SchedulingEnv: gate '" + g.name + "' in gate set has no duration");
    for (const auto& entry : cfg_.properties.durations()) type_ids_.push_back(entry.first);
  }

  [[nodiscard]] int capacity() const { return cfg_.max_observed_gates; }
  [[nodiscard]] int advance_action() const { return capacity(); }
  [[nodiscard]] int action_count() const { return capacity() + 1; }
  [[nodiscard]] int n_qubits() const { return cfg_.properties.n_qubits(); }
  [[nodiscard]] long step_budget() const {
    long total = 0;
    for (int d : durations_) total += d;
    return 4L * (total + static_cast<long>(circuit_.size()));
  }

  Observation reset(std::optional<std::uint64_t> seed = std::nullopt, std::optional<Instance> instance = std::nullopt) {
    if (seed) rng_.reseed(*seed);
    if (instance) {
      cfg_.properties.check_circuit(*instance);
      if (static_cast<int>(instance->size()) > capacity())
        throw std::invalid_argument("SchedulingEnv: circuit has " + std::to_string(instance->size()) +
                                    " gates, capacity is " + std::to_string(capacity()));
      circuit_ = std::move(*instance);
    } else {
      circuit_ = generate_random_circuit(rng_, n_qubits(), cfg_.max_gates, gate_set_);
    }
    dag_ = dependency_dag(circuit_, cfg_.rules);
    durations_.clear();
    classes_.clear();
    for (const auto& g : circuit_.gates()) {
      durations_.push_back(cfg_.properties.duration(g));
      classes_.push_back(cfg_.properties.classes_of(g.name));
    }
    reverse_cycle_ = 0;
    rev_start_.assign(circuit_.size(), kUnassigned);
    qubit_busy_.assign(n_qubits(), 0);
    class_busy_.assign(cfg_.properties.exclusion_classes().size(), 0);
    assigned_count_ = 0;
    advances_ = 0;
    clock_.start(step_budget(), circuit_.empty());
    return observe();
  }

  StepResult<Observation> step(int action) {
    clock_.require_active();
    StepResult<Observation> r;
    bool legal = true;
    if (action == advance_action()) {
      ++reverse_cycle_;
      ++advances_;
      r.reward = cfg_.reward.advance;
    } else if (action >= 0 && action < static_cast<int>(circuit_.size()) && is_legal(action)) {
      assign(action);
      r.reward = cfg_.reward.schedule;
    } else {
      legal = false;
      r.reward = cfg_.reward.illegal;
    }
    const bool complete = assigned_count_ == static_cast<int>(circuit_.size());
    clock_.tick(complete);
    r.terminated = clock_.terminated();
    r.truncated = clock_.truncated();
    r.info["illegal_action"] = !legal;
    r.info["action_mask"] = mask_as_ints();
    if (complete) r.info["makespan"] = static_cast<std::int64_t>(current_makespan());
    r.observation = observe();
    return r;
  }

  /// Per-gate legality at the current reverse cycle, padded to capacity.
  [[nodiscard]] std::vector<int> legal_gates() const {
    std::vector<int> mask(capacity(), 0);
    for (std::size_t i = 0; i < circuit_.size(); ++i) mask[i] = is_legal(static_cast<int>(i)) ? 1 : 0;
    return mask;
  }

  [[nodiscard]] ActionMask action_mask() const {
    ActionMask m(action_count(), 0);
    for (std::size_t i = 0; i < circuit_.size(); ++i) m[i] = is_legal(static_cast<int>(i)) ? 1 : 0;
    m[advance_action()] = 1;
    return m;
  }

  [[nodiscard]] bool is_legal(int i) const {
    if (i < 0 || i >= static_cast<int>(circuit_.size()) || rev_start_[i] != kUnassigned) return false;
    for (int s : dag_.successors[i])
      if (rev_start_[s] == kUnassigned || rev_start_[s] + durations_[s] > reverse_cycle_) return false;
    for (int q : circuit_[i].operands)
      if (reverse_cycle_ < qubit_busy_[q]) return false;
    for (int c : classes_[i])
      if (reverse_cycle_ < class_busy_[c]) return false;
    return true;
  }

  /// Forward schedule of a terminated episode.
  [[nodiscard]] Schedule finalize_schedule() const {
    if (!clock_.terminated()) throw EpisodeError("finalize_schedule: episode has not terminated");
    const int m = current_makespan();
    std::vector<int> start(circuit_.size());
    for (std::size_t i = 0; i < circuit_.size(); ++i) start[i] = m - rev_start_[i] - durations_[i];
    return Schedule(circuit_, cfg_.properties, std::move(start));
  }

  [[nodiscard]] bool done() const { return clock_.done(); }
  [[nodiscard]] const EpisodeClock& clock() const { return clock_; }
  [[nodiscard]] const Circuit& circuit() const { return circuit_; }
  [[nodiscard]] const DependencyDag& dag() const { return dag_; }
  [[nodiscard]] const SchedulingConfig& config() const { return cfg_; }
  [[nodiscard]] int reverse_cycle() const { return reverse_cycle_; }
  [[nodiscard]] const std::vector<int>& reverse_starts() const { return rev_start_; }
  [[nodiscard]] int advances() const { return advances_; }
  [[nodiscard]] const std::vector<std::string>& gate_types() const { return type_ids_; }

  [[nodiscard]] std::string instance_descriptor() const { return write_circuit(circuit_); }

 private:
  void assign(int i) {
    rev_start_[i] = reverse_cycle_;
    const int until = reverse_cycle_ + durations_[i];
    for (int q : circuit_[i].operands) qubit_busy_[q] = std::max(qubit_busy_[q], until);
    for (int c : classes_[i]) class_busy_[c] = std::max(class_busy_[c], until);
    ++assigned_count_;
  }

  [[nodiscard]] int current_makespan() const {
    int m = 0;
    for (std::size_t i = 0; i < circuit_.size(); ++i)
      if (rev_start_[i] != kUnassigned) m = std::max(m, rev_start_[i] + durations_[i]);
    return m;
  }

  [[nodiscard]] int type_id(const std::string& name) const {
    auto it = std::find(type_ids_.begin(), type_ids_.end(), name);
    return static_cast<int>(it - type_ids_.begin());
  }

  [[nodiscard]] std::vector<int> mask_as_ints() const {
    auto m = action_mask();
    return {m.begin(), m.end()};
  }

  [[nodiscard]] Observation observe() const {
    Observation o;
    const int cap = capacity();
    const int sentinel_type = static_cast<int>(type_ids_.size());
    o.legal_mask = legal_gates();
    o.scheduled_flags.assign(cap, 0);
    o.gate_encoding.assign(3 * static_cast<std::size_t>(cap), 0);
    o.blockers_remaining.assign(cap, 0);
    for (int i = 0; i < cap; ++i) {
      int* enc = &o.gate_encoding[3 * static_cast<std::size_t>(i)];
      if (i >= static_cast<int>(circuit_.size())) {
        enc[0] = sentinel_type;
        enc[1] = enc[2] = n_qubits();
        continue;
      }
      const auto& g = circuit_[i];
      o.scheduled_flags[i] = rev_start_[i] != kUnassigned ? 1 : 0;
      enc[0] = type_id(g.name);
      enc[1] = g.operands[0];
      enc[2] = g.is_two_qubit() ? g.operands[1] : n_qubits();
      o.blockers_remaining[i] = static_cast<int>(std::count_if(dag_.successors[i].begin(), dag_.successors[i].end(),
                                                               [&](int s) { return rev_start_[s] == kUnassigned; }));
    }
    return o;
  }

  SchedulingConfig cfg_;
  std::vector<GateSpec> gate_set_;
  std::vector<std::string> type_ids_;
  RngStream rng_{0};
  Circuit circuit_;
  DependencyDag dag_;
  std::vector<int> durations_;
  std::vector<std::vector<int>> classes_;
  int reverse_cycle_ = 0;
  std::vector<int> rev_start_;
  std::vector<int> qubit_busy_;
  std::vector<int> class_busy_;
  int assigned_count_ = 0;
  int advances_ = 0;
  EpisodeClock clock_;
};

}  // namespace qcgym
