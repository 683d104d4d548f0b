#pragma once

#include <ostream>
#include <string>

#include "json.hpp"
#include "qcgym/env.hpp"
#include "qcgym/initial_mapping.hpp"
#include "qcgym/routing.hpp"
#include "qcgym/scheduling.hpp"

namespace qcgym {

inline nlohmann::json to_json(const MappingObservation& o) {
  return {{"mapping_vector", o.mapping_vector},
          {"mapped_flags", o.mapped_flags},
          {"interaction_adjacency", o.interaction_adjacency},
          {"coupling_adjacency", o.coupling_adjacency}};
}

inline nlohmann::json to_json(const RoutingObservation& o) {
  return {{"window", o.window}, {"position_fraction", o.position_fraction}, {"swap_count", o.swap_count}};
}

inline nlohmann::json to_json(const SchedulingObservation& o) {
  return {{"legal_mask", o.legal_mask},
          {"scheduled_flags", o.scheduled_flags},
          {"gate_encoding", o.gate_encoding},
          {"blockers_remaining", o.blockers_remaining}};
}

/// JSON header line, then `step_idx action reward terminated truncated` per step.
template <class Observation>
void write_trace(std::ostream& out, const std::string& env_name, const EpisodeTrace<Observation>& trace) {
  nlohmann::json header{{"env", env_name}, {"seed", trace.seed()}, {"instance", trace.instance()}};
  out << header.dump() << '\n';
  write_trace_steps(out, trace);
}

/// One JSON observation per line: the reset observation, then one per step.
template <class Observation>
void write_trace_observations(std::ostream& out, const EpisodeTrace<Observation>& trace) {
  out << to_json(trace.initial_observation()).dump() << '\n';
  for (const auto& s : trace.steps()) out << to_json(s.result.observation).dump() << '\n';
}

}  // namespace qcgym
