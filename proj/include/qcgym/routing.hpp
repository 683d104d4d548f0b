#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcgym/core.hpp"
#include "qcgym/env.hpp"
#include "qcgym/formats.hpp"
#include "qcgym/rng.hpp"

namespace qcgym {

/// Uniform i.i.d. draws over the n(n-1)/2 unordered pairs, emitted as (low, high).
inline InteractionCircuit generate_interaction_circuit(RngStream& rng, int n, int length) {
  if (length < 0) throw std::invalid_argument("generate_interaction_circuit: negative length");
  if (n < 2 && length > 0) throw std::invalid_argument("generate_interaction_circuit: need at least 2 qubits");
  std::vector<Edge> all;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) all.emplace_back(i, j);
  std::vector<Edge> pairs;
  pairs.reserve(length);
  for (int k = 0; k < length; ++k) pairs.push_back(all[rng.below(all.size())]);
  return InteractionCircuit(std::max(n, 1), std::move(pairs));
}

struct RoutingReward {
  double advance = 0.0;
  double swap = -1.0;
  double illegal = -5.0;

  static RoutingReward preset(const std::string& name) {
    if (name == "default") return {};
    throw std::invalid_argument("unknown routing reward preset '" + name + "' (expected default)");
  }
};

struct RoutingObservation {
  std::vector<int> window;  // k physical pairs, flattened; (n, n) past the end
  double position_fraction = 0.0;
  int swap_count = 0;

  [[nodiscard]] std::string key() const {
    std::ostringstream out;
    for (int x : window) out << x << ',';
    out << '|' << format_number(position_fraction) << '|' << swap_count;
    return out.str();
  }

  friend bool operator==(const RoutingObservation&, const RoutingObservation&) = default;
};

/// Swap inserted before the interaction at `position`, on physical edge `edge`.
struct SwapRecord {
  int position;
  Edge edge;
  friend bool operator==(const SwapRecord&, const SwapRecord&) = default;
};

/// One physical-level operation of a routed circuit.
struct RoutedOp {
  bool is_swap;
  Edge qubits;
  friend bool operator==(const RoutedOp&, const RoutedOp&) = default;
};

/// A circuit to route, optionally with a starting placement (identity otherwise).
struct RoutingInstance {
  InteractionCircuit circuit;
  std::optional<std::vector<int>> placement;

  RoutingInstance(InteractionCircuit c, std::optional<std::vector<int>> p = std::nullopt)  // NOLINT
      : circuit(std::move(c)), placement(std::move(p)) {}
};

/// Applies a swap on physical edge {a, b} to a logical->physical placement.
inline void apply_swap(std::vector<int>& placement, Edge physical) {
  for (int& p : placement) {
    if (p == physical.first) p = physical.second;
    else if (p == physical.second) p = physical.first;
  }
}

/// Walks a position over the interaction circuit; the agent either advances
/// (legal only when the current interaction sits on a coupling edge) or
/// inserts a swap on a coupling edge.
class RoutingEnv {
 public:
  using Observation = RoutingObservation;
  using Instance = RoutingInstance;

  RoutingEnv(CouplingGraph coupling, std::pair<int, int> length_range = {1, 8}, int window_size = 4,
             RoutingReward reward = {})
      : coupling_(std::move(coupling)), edges_(coupling_.sorted_edges()), length_range_(length_range),
        window_(window_size), reward_(reward) {
    if (length_range.first < 0 || length_range.second < length_range.first)
      throw std::invalid_argument("RoutingEnv: invalid circuit length range");
    if (window_size < 1) throw std::invalid_argument("RoutingEnv: window size must be positive");
    if (coupling_.n_nodes() < 2 && length_range.second > 0)
      throw std::invalid_argument("RoutingEnv: coupling graph needs at least 2 qubits");
  }

  [[nodiscard]] int n() const { return coupling_.n_nodes(); }
  [[nodiscard]] int action_count() const { return 1 + static_cast<int>(edges_.size()); }
  [[nodiscard]] long step_budget() const { return 4L * n() * n() * static_cast<long>(circuit_.size()); }
  [[nodiscard]] const std::vector<Edge>& swap_edges() const { return edges_; }

  Observation reset(std::optional<std::uint64_t> seed = std::nullopt, std::optional<Instance> instance = std::nullopt) {
    if (seed) rng_.reseed(*seed);
    if (instance) {
      if (instance->circuit.n_qubits() != n())
        throw std::invalid_argument("RoutingEnv: circuit has " + std::to_string(instance->circuit.n_qubits()) +
                                    " qubits, coupling graph has " + std::to_string(n()));
      circuit_ = std::move(instance->circuit);
      if (instance->placement) {
        Mapping check(*instance->placement);
        if (check.size() != n() || !check.complete())
          throw std::invalid_argument("RoutingEnv: starting placement must be a bijection on " + std::to_string(n()) +
                                      " qubits");
        initial_placement_ = *instance->placement;
      } else {
        initial_placement_ = identity();
      }
    } else {
      const int len = rng_.uniform_int(length_range_.first, length_range_.second);
      circuit_ = generate_interaction_circuit(rng_, n(), len);
      initial_placement_ = identity();
    }
    placement_ = initial_placement_;
    position_ = 0;
    swaps_.clear();
    clock_.start(step_budget(), circuit_.empty());
    return observe();
  }

  StepResult<Observation> step(int action) {
    clock_.require_active();
    StepResult<Observation> r;
    bool legal = true;
    if (action == 0) {
      legal = current_executable();
      if (legal) {
        ++position_;
        r.reward = reward_.advance;
      }
    } else if (action >= 1 && action < action_count()) {
      const Edge e = edges_[action - 1];
      apply_swap(placement_, e);
      swaps_.push_back({position_, e});
      r.reward = reward_.swap;
    } else {
      legal = false;
    }
    if (!legal) r.reward = reward_.illegal;
    const bool finished = position_ == static_cast<int>(circuit_.size());
    clock_.tick(finished);
    r.terminated = clock_.terminated();
    r.truncated = clock_.truncated();
    r.info["illegal_action"] = !legal;
    r.info["action_mask"] = mask_as_ints();
    r.info["swaps"] = static_cast<std::int64_t>(swaps_.size());
    r.observation = observe();
    return r;
  }

  [[nodiscard]] ActionMask action_mask() const {
    ActionMask m(action_count(), 1);
    m[0] = current_executable() ? 1 : 0;
    return m;
  }

  /// Physical-level sequence: per position, its swaps followed by the
  /// interaction under the placement in effect there.
  [[nodiscard]] std::vector<RoutedOp> routed_output() const {
    if (!clock_.terminated()) throw EpisodeError("routed_output: episode has not terminated");
    std::vector<RoutedOp> out;
    auto placement = initial_placement_;
    std::size_t next_swap = 0;
    for (int pos = 0; pos < static_cast<int>(circuit_.size()); ++pos) {
      while (next_swap < swaps_.size() && swaps_[next_swap].position == pos) {
        apply_swap(placement, swaps_[next_swap].edge);
        out.push_back({true, swaps_[next_swap].edge});
        ++next_swap;
      }
      auto [a, b] = circuit_[pos];
      out.push_back({false, {placement[a], placement[b]}});
    }
    return out;
  }

  /// Routed output in the QASM subset, interactions named `gate_name`.
  [[nodiscard]] Circuit routed_circuit(const std::string& gate_name = "cnot") const {
    Circuit c(n());
    for (const auto& op : routed_output())
      c.add(gate(op.is_swap ? "swap" : gate_name, op.qubits.first, op.qubits.second));
    return c;
  }

  [[nodiscard]] bool done() const { return clock_.done(); }
  [[nodiscard]] const EpisodeClock& clock() const { return clock_; }
  [[nodiscard]] const CouplingGraph& coupling() const { return coupling_; }
  [[nodiscard]] const InteractionCircuit& circuit() const { return circuit_; }
  [[nodiscard]] const std::vector<int>& placement() const { return placement_; }
  [[nodiscard]] const std::vector<int>& initial_placement() const { return initial_placement_; }
  [[nodiscard]] int position() const { return position_; }
  [[nodiscard]] const std::vector<SwapRecord>& swaps() const { return swaps_; }
  [[nodiscard]] int window_size() const { return window_; }
  [[nodiscard]] std::pair<int, int> length_range() const { return length_range_; }
  [[nodiscard]] const RoutingReward& reward_function() const { return reward_; }

  [[nodiscard]] std::string instance_descriptor() const { return write_circuit(as_circuit(circuit_)); }

 private:
  [[nodiscard]] std::vector<int> identity() const {
    std::vector<int> p(n());
    std::iota(p.begin(), p.end(), 0);
    return p;
  }

  [[nodiscard]] bool current_executable() const {
    if (position_ >= static_cast<int>(circuit_.size())) return false;
    auto [a, b] = circuit_[position_];
    return coupling_.has_edge(placement_[a], placement_[b]);
  }

  [[nodiscard]] std::vector<int> mask_as_ints() const {
    auto m = action_mask();
    return {m.begin(), m.end()};
  }

  [[nodiscard]] Observation observe() const {
    Observation o;
    o.window.reserve(2 * window_);
    for (int j = 0; j < window_; ++j) {
      const std::size_t pos = static_cast<std::size_t>(position_) + j;
      if (pos < circuit_.size()) {
        o.window.push_back(placement_[circuit_[pos].first]);
        o.window.push_back(placement_[circuit_[pos].second]);
      } else {
        o.window.push_back(n());
        o.window.push_back(n());
      }
    }
    o.position_fraction = circuit_.empty() ? 1.0 : static_cast<double>(position_) / static_cast<double>(circuit_.size());
    o.swap_count = static_cast<int>(swaps_.size());
    return o;
  }

  CouplingGraph coupling_;
  std::vector<Edge> edges_;
  std::pair<int, int> length_range_;
  int window_;
  RoutingReward reward_;
  RngStream rng_{0};
  InteractionCircuit circuit_;
  std::vector<int> initial_placement_;
  std::vector<int> placement_;
  int position_ = 0;
  std::vector<SwapRecord> swaps_;
  EpisodeClock clock_;
};

}  // namespace qcgym
