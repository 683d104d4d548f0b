#pragma once

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcgym/core.hpp"
#include "qcgym/routing.hpp"

namespace qcgym {

/// Instance exceeds what an exhaustive solver is allowed to attempt.
class OracleBoundError : public std::length_error {
 public:
  using std::length_error::length_error;
};

template <class Witness>
struct OracleResult {
  long objective = 0;
  Witness witness;
  long nodes_explored = 0;
  std::chrono::duration<double> elapsed{};
};

// ---------------------------------------------------------------------------
// ALAP list scheduling
// ---------------------------------------------------------------------------

/// Places gates from the circuit end, in reverse circuit order, each at the
/// latest cycle its successors, qubits and exclusion classes allow. Without
/// rules every pair of gates sharing a qubit is ordered.
inline Schedule alap_schedule(const Circuit& c, const MachineProperties& props,
                              const std::optional<CommutationRules>& rules = std::nullopt) {
  props.check_circuit(c);
  const auto dag = dependency_dag(c, rules ? *rules : CommutationRules::none());
  const std::size_t n = c.size();
  std::vector<int> rev(n, 0), dur(n);
  std::vector<int> qubit_busy(props.n_qubits(), 0);
  std::vector<int> class_busy(props.exclusion_classes().size(), 0);
  for (std::size_t i = 0; i < n; ++i) dur[i] = props.duration(c[i]);

  for (std::size_t k = n; k-- > 0;) {
    int at = 0;
    for (int s : dag.successors[k]) at = std::max(at, rev[s] + dur[s]);
    for (int q : c[k].operands) at = std::max(at, qubit_busy[q]);
    const auto classes = props.classes_of(c[k].name);
    for (int cl : classes) at = std::max(at, class_busy[cl]);
    rev[k] = at;
    for (int q : c[k].operands) qubit_busy[q] = std::max(qubit_busy[q], at + dur[k]);
    for (int cl : classes) class_busy[cl] = std::max(class_busy[cl], at + dur[k]);
  }

  int makespan = 0;
  for (std::size_t i = 0; i < n; ++i) makespan = std::max(makespan, rev[i] + dur[i]);
  std::vector<int> start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = makespan - rev[i] - dur[i];
  return Schedule(c, props, std::move(start));
}

// ---------------------------------------------------------------------------
// Initial mapping
// ---------------------------------------------------------------------------

/// Exhaustive search over all n! bijections. Ties go to the lexicographically
/// smallest assignment.
inline OracleResult<Mapping> optimal_mapping(const Graph& interaction, const Graph& coupling, int max_nodes = 8) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = interaction.n_nodes();
  if (n != coupling.n_nodes())
    throw std::invalid_argument("optimal_mapping: interaction graph has " + std::to_string(n) +
                                " nodes, coupling graph has " + std::to_string(coupling.n_nodes()));
  if (n > max_nodes)
    throw OracleBoundError("optimal_mapping: " + std::to_string(n) + " nodes exceeds the exhaustive bound of " +
                           std::to_string(max_nodes));

  const auto edges = interaction.sorted_edges();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  OracleResult<Mapping> best;
  best.objective = std::numeric_limits<long>::max();
  do {
    ++best.nodes_explored;
    long cost = 0;
    for (auto [u, v] : edges)
      if (!coupling.has_edge(perm[u], perm[v]) && ++cost >= best.objective) break;
    if (cost < best.objective) {
      best.objective = cost;
      best.witness = Mapping(perm);
      if (cost == 0) break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  best.elapsed = std::chrono::steady_clock::now() - t0;
  return best;
}

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

struct RoutingBounds {
  int max_qubits = 5;
  int max_length = 8;
};

/// Uniform-cost search over (position, placement): advancing is free when the
/// current interaction is executable, every swap costs one.
inline OracleResult<std::vector<SwapRecord>> optimal_routing(const InteractionCircuit& circuit,
                                                             const CouplingGraph& coupling,
                                                             std::optional<std::vector<int>> start_placement = std::nullopt,
                                                             RoutingBounds bounds = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = coupling.n_nodes();
  if (circuit.n_qubits() != n)
    throw std::invalid_argument("optimal_routing: circuit and coupling graph qubit counts differ");
  if (n > bounds.max_qubits || static_cast<int>(circuit.size()) > bounds.max_length)
    throw OracleBoundError("optimal_routing: instance exceeds the search bound of " +
                           std::to_string(bounds.max_qubits) + " qubits and " + std::to_string(bounds.max_length) +
                           " interactions");

  std::vector<int> start(n);
  std::iota(start.begin(), start.end(), 0);
  if (start_placement) {
    Mapping check(*start_placement);
    if (check.size() != n || !check.complete())
      throw std::invalid_argument("optimal_routing: starting placement must be a bijection");
    start = *start_placement;
  }

  using State = std::pair<int, std::vector<int>>;
  struct Parent {
    State from;
    std::optional<Edge> swap;
  };
  const auto edges = coupling.sorted_edges();
  const int goal = static_cast<int>(circuit.size());
  std::map<State, long> dist;
  std::map<State, Parent> parent;
  std::deque<State> queue;
  dist[{0, start}] = 0;
  queue.push_back({0, start});

  OracleResult<std::vector<SwapRecord>> result;
  std::optional<State> reached;
  while (!queue.empty()) {
    State s = queue.front();
    queue.pop_front();
    const long d = dist[s];
    ++result.nodes_explored;
    if (s.first == goal) {
      reached = s;
      break;
    }
    auto relax = [&](State next, long cost, std::optional<Edge> swap) {
      auto it = dist.find(next);
      if (it != dist.end() && it->second <= d + cost) return;
      dist[next] = d + cost;
      parent[next] = Parent{s, swap};
      if (cost == 0) queue.push_front(std::move(next));
      else queue.push_back(std::move(next));
    };
    auto [a, b] = circuit[s.first];
    if (coupling.has_edge(s.second[a], s.second[b])) relax({s.first + 1, s.second}, 0, std::nullopt);
    for (const auto& e : edges) {
      auto placement = s.second;
      apply_swap(placement, e);
      relax({s.first, std::move(placement)}, 1, e);
    }
  }
  if (!reached) throw std::logic_error("optimal_routing: goal unreachable");

  result.objective = dist[*reached];
  for (State s = *reached; parent.count(s);) {
    const auto& p = parent.at(s);
    if (p.swap) result.witness.push_back({p.from.first, *p.swap});
    s = p.from;
  }
  std::reverse(result.witness.begin(), result.witness.end());
  result.elapsed = std::chrono::steady_clock::now() - t0;
  return result;
}

// ---------------------------------------------------------------------------
// Scheduling
// ---------------------------------------------------------------------------

namespace detail {

/// Depth-first branch and bound over the reverse-time action space.
class ScheduleSearch {
 public:
  ScheduleSearch(const Circuit& c, const MachineProperties& props, const CommutationRules& rules)
      : c_(c), dag_(dependency_dag(c, rules)), n_(c.size()), rev_(n_, -1), dur_(n_),
        qubit_busy_(props.n_qubits(), 0), class_busy_(props.exclusion_classes().size(), 0) {
    for (std::size_t i = 0; i < n_; ++i) {
      dur_[i] = props.duration(c[i]);
      classes_.push_back(props.classes_of(c[i].name));
    }
  }

  void seed_incumbent(int makespan, std::vector<int> rev) {
    best_ = makespan;
    best_rev_ = std::move(rev);
  }

  void run() { dfs(-1); }

  [[nodiscard]] int best() const { return best_; }
  [[nodiscard]] const std::vector<int>& best_reverse_starts() const { return best_rev_; }
  [[nodiscard]] long nodes() const { return nodes_; }

 private:
  [[nodiscard]] bool legal(std::size_t i) const {
    if (rev_[i] >= 0) return false;
    for (int s : dag_.successors[i])
      if (rev_[s] < 0 || rev_[s] + dur_[s] > cycle_) return false;
    for (int q : c_[i].operands)
      if (cycle_ < qubit_busy_[q]) return false;
    for (int cl : classes_[i])
      if (cycle_ < class_busy_[cl]) return false;
    return true;
  }

  [[nodiscard]] int lower_bound() const {
    int lb = 0;
    for (std::size_t i = 0; i < n_; ++i) lb = std::max(lb, rev_[i] >= 0 ? rev_[i] + dur_[i] : cycle_ + dur_[i]);
    std::vector<int> qubit_load(qubit_busy_.size(), 0), class_load(class_busy_.size(), 0);
    for (std::size_t i = 0; i < n_; ++i) {
      if (rev_[i] >= 0) continue;
      for (int q : c_[i].operands) qubit_load[q] += dur_[i];
      for (int cl : classes_[i]) class_load[cl] += dur_[i];
    }
    for (std::size_t q = 0; q < qubit_load.size(); ++q)
      if (qubit_load[q]) lb = std::max(lb, std::max(cycle_, qubit_busy_[q]) + qubit_load[q]);
    for (std::size_t cl = 0; cl < class_load.size(); ++cl)
      if (class_load[cl]) lb = std::max(lb, std::max(cycle_, class_busy_[cl]) + class_load[cl]);
    return lb;
  }

  // Gates placed at one cycle are added in increasing index order; other
  // orders reach the same state.
  void dfs(int last_at_cycle) {
    ++nodes_;
    if (assigned_ == n_) {
      int m = 0;
      for (std::size_t i = 0; i < n_; ++i) m = std::max(m, rev_[i] + dur_[i]);
      if (m < best_) {
        best_ = m;
        best_rev_ = rev_;
      }
      return;
    }
    if (lower_bound() >= best_) return;

    for (std::size_t i = static_cast<std::size_t>(last_at_cycle + 1); i < n_; ++i) {
      if (!legal(i)) continue;
      const auto saved_q = qubit_busy_;
      const auto saved_c = class_busy_;
      rev_[i] = cycle_;
      for (int q : c_[i].operands) qubit_busy_[q] = std::max(qubit_busy_[q], cycle_ + dur_[i]);
      for (int cl : classes_[i]) class_busy_[cl] = std::max(class_busy_[cl], cycle_ + dur_[i]);
      ++assigned_;
      dfs(static_cast<int>(i));
      --assigned_;
      rev_[i] = -1;
      qubit_busy_ = saved_q;
      class_busy_ = saved_c;
    }

    // Waiting only matters up to the next cycle at which some horizon expires.
    int next = std::numeric_limits<int>::max();
    for (int h : qubit_busy_)
      if (h > cycle_) next = std::min(next, h);
    for (int h : class_busy_)
      if (h > cycle_) next = std::min(next, h);
    if (next == std::numeric_limits<int>::max()) return;
    const int saved_cycle = cycle_;
    cycle_ = next;
    dfs(-1);
    cycle_ = saved_cycle;
  }

  const Circuit& c_;
  DependencyDag dag_;
  std::size_t n_;
  std::vector<int> rev_;
  std::vector<int> dur_;
  std::vector<std::vector<int>> classes_;
  std::vector<int> qubit_busy_;
  std::vector<int> class_busy_;
  int cycle_ = 0;
  std::size_t assigned_ = 0;
  int best_ = std::numeric_limits<int>::max();
  std::vector<int> best_rev_;
  long nodes_ = 0;
};

}  // namespace detail

/// Minimal-makespan schedule by branch and bound, seeded with the
/// commutation-aware ALAP schedule as incumbent.
inline OracleResult<Schedule> optimal_schedule(const Circuit& c, const MachineProperties& props,
                                               const CommutationRules& rules, int max_gates = 6) {
  const auto t0 = std::chrono::steady_clock::now();
  if (static_cast<int>(c.size()) > max_gates)
    throw OracleBoundError("optimal_schedule: " + std::to_string(c.size()) + " gates exceeds the search bound of " +
                           std::to_string(max_gates));
  props.check_circuit(c);

  const auto incumbent = alap_schedule(c, props, rules);
  std::vector<int> incumbent_rev(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    incumbent_rev[i] = incumbent.makespan() - incumbent.finish(i);

  detail::ScheduleSearch search(c, props, rules);
  search.seed_incumbent(incumbent.makespan(), incumbent_rev);
  search.run();

  const int m = search.best();
  std::vector<int> start(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) start[i] = m - search.best_reverse_starts()[i] - props.duration(c[i]);

  OracleResult<Schedule> out;
  out.objective = m;
  out.witness = Schedule(c, props, std::move(start));
  out.nodes_explored = search.nodes();
  out.elapsed = std::chrono::steady_clock::now() - t0;
  return out;
}

}  // namespace qcgym
