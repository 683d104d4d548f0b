#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcgym/core.hpp"
#include "qcgym/env.hpp"
#include "qcgym/formats.hpp"
#include "qcgym/rng.hpp"

namespace qcgym {

/// Erdős–Rényi G(n, p): each of the n(n-1)/2 possible edges independently.
inline InteractionGraph generate_interaction_graph(RngStream& rng, int n, double edge_probability) {
  if (n < 1) throw std::invalid_argument("generate_interaction_graph: n must be at least 1");
  if (!(edge_probability >= 0.0 && edge_probability <= 1.0))
    throw std::invalid_argument("generate_interaction_graph: edge probability must lie in [0, 1]");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(edge_probability)) edges.emplace_back(i, j);
  return InteractionGraph(n, edges);
}

/// Per-assignment shaping. A legal assignment earns `on_edge` for every
/// interaction edge it realizes on the coupling graph and `-off_edge` for
/// every one it realizes off it, so the episode total is affine in -cost.
struct MappingReward {
  double on_edge = 1.0;
  double off_edge = 1.0;
  double illegal = -5.0;
  double completion = 0.0;

  static MappingReward shaped() { return {}; }
  /// Only penalizes uncovered edges.
  static MappingReward flat() { return {0.0, 1.0, -5.0, 0.0}; }

  static MappingReward preset(const std::string& name) {
    if (name == "shaped" || name == "default") return shaped();
    if (name == "flat") return flat();
    throw std::invalid_argument("unknown mapping reward preset '" + name + "' (expected shaped|flat)");
  }
};

struct MappingObservation {
  std::vector<int> mapping_vector;  // assignment[logical], sentinel n
  std::vector<int> mapped_flags;    // per physical qubit
  std::vector<int> interaction_adjacency;
  std::vector<int> coupling_adjacency;

  [[nodiscard]] std::string key() const {
    std::ostringstream out;
    auto put = [&](const std::vector<int>& v) {
      for (int x : v) out << x << ',';
      out << '|';
    };
    put(mapping_vector);
    put(mapped_flags);
    put(interaction_adjacency);
    put(coupling_adjacency);
    return out.str();
  }

  friend bool operator==(const MappingObservation&, const MappingObservation&) = default;
};

/// Grows a logical->physical bijection one assignment per step against a
/// fixed coupling graph; each episode draws a fresh interaction graph.
class InitialMappingEnv {
 public:
  using Observation = MappingObservation;
  using Instance = InteractionGraph;

  InitialMappingEnv(double edge_probability, CouplingGraph coupling, MappingReward reward = {})
      : edge_probability_(edge_probability), coupling_(std::move(coupling)), reward_(reward) {
    if (!(edge_probability >= 0.0 && edge_probability <= 1.0))
      throw std::invalid_argument("InitialMappingEnv: edge probability must lie in [0, 1]");
  }

  [[nodiscard]] int n() const { return coupling_.n_nodes(); }
  [[nodiscard]] int action_count() const { return n() * n(); }
  [[nodiscard]] long step_budget() const { return 10L * n(); }

  [[nodiscard]] int encode(int logical, int physical) const { return logical * n() + physical; }
  [[nodiscard]] std::pair<int, int> decode(int action) const { return {action / n(), action % n()}; }

  Observation reset(std::optional<std::uint64_t> seed = std::nullopt, std::optional<Instance> instance = std::nullopt) {
    if (seed) rng_.reseed(*seed);
    if (instance) {
      if (instance->n_nodes() != n())
        throw std::invalid_argument("InitialMappingEnv: interaction graph has " + std::to_string(instance->n_nodes()) +
                                    " nodes, coupling graph has " + std::to_string(n()));
      interaction_ = std::move(*instance);
    } else {
      interaction_ = generate_interaction_graph(rng_, n(), edge_probability_);
    }
    mapping_ = Mapping(n());
    clock_.start(step_budget(), false);
    return observe();
  }

  StepResult<Observation> step(int action) {
    clock_.require_active();
    StepResult<Observation> r;
    bool legal = action >= 0 && action < action_count();
    int logical = 0, physical = 0;
    if (legal) {
      std::tie(logical, physical) = decode(action);
      legal = mapping_.assign(logical, physical);
    }
    if (legal) {
      for (int other = 0; other < n(); ++other) {
        if (other == logical || !mapping_.is_mapped(other) || !interaction_.has_edge(logical, other)) continue;
        r.reward += coupling_.has_edge(physical, mapping_[other]) ? reward_.on_edge : -reward_.off_edge;
      }
    } else {
      r.reward = reward_.illegal;
    }
    const bool complete = mapping_.complete();
    if (legal && complete) r.reward += reward_.completion;
    clock_.tick(complete);
    r.terminated = clock_.terminated();
    r.truncated = clock_.truncated();
    r.info["illegal_action"] = !legal;
    r.info["action_mask"] = mask_as_ints();
    if (complete) r.info["cost"] = static_cast<std::int64_t>(episode_cost());
    r.observation = observe();
    return r;
  }

  [[nodiscard]] ActionMask action_mask() const {
    ActionMask m(action_count(), 0);
    for (int l = 0; l < n(); ++l) {
      if (mapping_.is_mapped(l)) continue;
      for (int p = 0; p < n(); ++p)
        if (!mapping_.physical_used(p)) m[encode(l, p)] = 1;
    }
    return m;
  }

  [[nodiscard]] bool done() const { return clock_.done(); }
  [[nodiscard]] const EpisodeClock& clock() const { return clock_; }
  [[nodiscard]] const CouplingGraph& coupling() const { return coupling_; }
  [[nodiscard]] const InteractionGraph& interaction() const { return interaction_; }
  [[nodiscard]] const Mapping& mapping() const { return mapping_; }
  [[nodiscard]] double edge_probability() const { return edge_probability_; }
  [[nodiscard]] const MappingReward& reward_function() const { return reward_; }

  /// Cost of the completed mapping; throws while the mapping is partial.
  [[nodiscard]] int episode_cost() const { return mapping_cost(mapping_, interaction_, coupling_); }

  [[nodiscard]] std::string instance_descriptor() const { return write_graph(interaction_); }

 private:
  [[nodiscard]] std::vector<int> mask_as_ints() const {
    auto m = action_mask();
    return {m.begin(), m.end()};
  }

  [[nodiscard]] Observation observe() const {
    Observation o;
    o.mapping_vector.resize(n());
    o.mapped_flags.assign(n(), 0);
    for (int l = 0; l < n(); ++l) {
      o.mapping_vector[l] = mapping_.is_mapped(l) ? mapping_[l] : n();
      if (mapping_.is_mapped(l)) o.mapped_flags[mapping_[l]] = 1;
    }
    o.interaction_adjacency = interaction_.upper_triangle();
    o.coupling_adjacency = coupling_.upper_triangle();
    return o;
  }

  double edge_probability_;
  CouplingGraph coupling_;
  MappingReward reward_;
  RngStream rng_{0};
  InteractionGraph interaction_;
  Mapping mapping_;
  EpisodeClock clock_;
};

}  // namespace qcgym
