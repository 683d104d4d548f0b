#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace qcgym {

/// Unordered qubit pair, stored with first < second.
using Edge = std::pair<int, int>;
using EdgeSet = std::set<Edge>;

inline Edge make_edge(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

// ---------------------------------------------------------------------------
// Gates and circuits
// ---------------------------------------------------------------------------

/// A named operation on one or two qubits. For two-qubit gates operands[0]
/// is the control and operands[1] the target.
struct Gate {
  std::string name;
  std::vector<int> operands;

  [[nodiscard]] bool is_two_qubit() const { return operands.size() == 2; }
  [[nodiscard]] bool acts_on(int q) const {
    return std::find(operands.begin(), operands.end(), q) != operands.end();
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

inline Gate gate(std::string name, int q) { return Gate{std::move(name), {q}}; }
inline Gate gate(std::string name, int q0, int q1) { return Gate{std::move(name), {q0, q1}}; }

inline bool share_qubit(const Gate& a, const Gate& b) {
  return std::any_of(a.operands.begin(), a.operands.end(), [&](int q) { return b.acts_on(q); });
}

class Circuit {
 public:
  Circuit() = default;

  explicit Circuit(int n_qubits, std::vector<Gate> gates = {}) : n_qubits_(n_qubits) {
    if (n_qubits <= 0) throw std::invalid_argument("Circuit: qubit count must be positive");
    for (auto& g : gates) add(std::move(g));
  }

  void add(Gate g) {
    if (g.operands.empty() || g.operands.size() > 2)
      throw std::invalid_argument("Circuit: gate '" + g.name + "' must act on one or two qubits");
    for (int q : g.operands)
      if (q < 0 || q >= n_qubits_)
        throw std::invalid_argument("Circuit: gate '" + g.name + "' operand " + std::to_string(q) +
                                    " out of range for " + std::to_string(n_qubits_) + " qubits");
    if (g.is_two_qubit() && g.operands[0] == g.operands[1])
      throw std::invalid_argument("Circuit: two-qubit gate '" + g.name + "' has repeated operand");
    gates_.push_back(std::move(g));
  }

  [[nodiscard]] int n_qubits() const { return n_qubits_; }
  [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
  [[nodiscard]] std::size_t size() const { return gates_.size(); }
  [[nodiscard]] bool empty() const { return gates_.empty(); }
  const Gate& operator[](std::size_t i) const { return gates_[i]; }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int n_qubits_ = 1;
  std::vector<Gate> gates_;
};

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

/// Undirected simple graph over nodes 0..n-1.
class Graph {
 public:
  Graph() = default;

  Graph(int n_nodes, const std::vector<Edge>& edges) : n_(n_nodes), adj_(static_cast<std::size_t>(n_nodes) * n_nodes, 0) {
    if (n_nodes <= 0) throw std::invalid_argument("Graph: node count must be positive");
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n_ || v >= n_)
        throw std::invalid_argument("Graph: edge (" + std::to_string(u) + "," + std::to_string(v) +
                                    ") out of range");
      if (u == v) throw std::invalid_argument("Graph: self-loop on node " + std::to_string(u));
      if (!edges_.insert(make_edge(u, v)).second)
        throw std::invalid_argument("Graph: duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
      adj_[index(u, v)] = adj_[index(v, u)] = 1;
    }
  }

  [[nodiscard]] int n_nodes() const { return n_; }
  [[nodiscard]] const EdgeSet& edges() const { return edges_; }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
  [[nodiscard]] bool has_edge(int u, int v) const { return u != v && adj_[index(u, v)] != 0; }

  /// Edges in lexicographic order.
  [[nodiscard]] std::vector<Edge> sorted_edges() const { return {edges_.begin(), edges_.end()}; }

  [[nodiscard]] std::vector<int> neighbours(int u) const {
    std::vector<int> out;
    for (int v = 0; v < n_; ++v)
      if (has_edge(u, v)) out.push_back(v);
    return out;
  }

  [[nodiscard]] bool is_connected() const {
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n_; ++v)
        if (!seen[v] && has_edge(u, v)) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
    }
    return count == n_;
  }

  /// Upper-triangle adjacency (i < j) in row-major order, n(n-1)/2 entries.
  [[nodiscard]] std::vector<int> upper_triangle() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n_) * (n_ - 1) / 2);
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) out.push_back(has_edge(i, j) ? 1 : 0);
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

 private:
  [[nodiscard]] std::size_t index(int u, int v) const { return static_cast<std::size_t>(u) * n_ + v; }

  int n_ = 0;
  EdgeSet edges_;
  std::vector<std::uint8_t> adj_;
};

/// Hardware connectivity between physical qubits. Always connected.
class CouplingGraph : public Graph {
 public:
  CouplingGraph() = default;
  CouplingGraph(int n_nodes, const std::vector<Edge>& edges) : Graph(n_nodes, edges) {
    if (!is_connected()) throw std::invalid_argument("CouplingGraph: graph must be connected");
  }
  explicit CouplingGraph(const Graph& g) : CouplingGraph(g.n_nodes(), g.sorted_edges()) {}

  static CouplingGraph line(int n) {
    std::vector<Edge> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return {n, e};
  }
  static CouplingGraph star(int n) {
    std::vector<Edge> e;
    for (int i = 1; i < n; ++i) e.emplace_back(0, i);
    return {n, e};
  }
  static CouplingGraph complete(int n) {
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return {n, e};
  }
};

/// Which logical qubits share a two-qubit gate.
class InteractionGraph : public Graph {
 public:
  InteractionGraph() = default;
  InteractionGraph(int n_nodes, const std::vector<Edge>& edges) : Graph(n_nodes, edges) {}
  explicit InteractionGraph(const Graph& g) : Graph(g) {}
};

// ---------------------------------------------------------------------------
// Mappings
// ---------------------------------------------------------------------------

/// Partial injection logical -> physical; complete mappings are bijections.
class Mapping {
 public:
  static constexpr int kUnmapped = -1;

  Mapping() = default;
  explicit Mapping(int n) : assignment_(n, kUnmapped) {}
  explicit Mapping(std::vector<int> assignment) : assignment_(std::move(assignment)) {
    const int n = size();
    std::vector<char> used(n, 0);
    for (int p : assignment_) {
      if (p == kUnmapped) continue;
      if (p < 0 || p >= n) throw std::invalid_argument("Mapping: physical index out of range");
      if (used[p]) throw std::invalid_argument("Mapping: physical qubit " + std::to_string(p) + " used twice");
      used[p] = 1;
    }
  }

  static Mapping identity(int n) {
    std::vector<int> a(n);
    std::iota(a.begin(), a.end(), 0);
    return Mapping(std::move(a));
  }

  [[nodiscard]] int size() const { return static_cast<int>(assignment_.size()); }
  [[nodiscard]] int operator[](int logical) const { return assignment_[logical]; }
  [[nodiscard]] const std::vector<int>& assignment() const { return assignment_; }
  [[nodiscard]] bool is_mapped(int logical) const { return assignment_[logical] != kUnmapped; }
  [[nodiscard]] bool physical_used(int physical) const {
    return std::find(assignment_.begin(), assignment_.end(), physical) != assignment_.end();
  }
  [[nodiscard]] bool complete() const {
    return std::none_of(assignment_.begin(), assignment_.end(), [](int p) { return p == kUnmapped; });
  }
  [[nodiscard]] int mapped_count() const {
    return static_cast<int>(std::count_if(assignment_.begin(), assignment_.end(), [](int p) { return p != kUnmapped; }));
  }

  /// Records logical -> physical. Returns false, leaving the mapping
  /// untouched, when either side is already taken.
  bool assign(int logical, int physical) {
    if (is_mapped(logical) || physical_used(physical)) return false;
    assignment_[logical] = physical;
    return true;
  }

  friend bool operator==(const Mapping&, const Mapping&) = default;

 private:
  std::vector<int> assignment_;
};

// ---------------------------------------------------------------------------
// Interaction circuits
// ---------------------------------------------------------------------------

/// Ordered two-qubit interactions. Pairs keep operand order (control first).
class InteractionCircuit {
 public:
  InteractionCircuit() = default;
  InteractionCircuit(int n_qubits, std::vector<Edge> pairs) : n_qubits_(n_qubits), pairs_(std::move(pairs)) {
    if (n_qubits <= 0) throw std::invalid_argument("InteractionCircuit: qubit count must be positive");
    for (auto [a, b] : pairs_)
      if (a == b || a < 0 || b < 0 || a >= n_qubits || b >= n_qubits)
        throw std::invalid_argument("InteractionCircuit: invalid pair (" + std::to_string(a) + "," +
                                    std::to_string(b) + ")");
  }

  [[nodiscard]] int n_qubits() const { return n_qubits_; }
  [[nodiscard]] const std::vector<Edge>& pairs() const { return pairs_; }
  [[nodiscard]] std::size_t size() const { return pairs_.size(); }
  [[nodiscard]] bool empty() const { return pairs_.empty(); }
  const Edge& operator[](std::size_t i) const { return pairs_[i]; }

  friend bool operator==(const InteractionCircuit&, const InteractionCircuit&) = default;

 private:
  int n_qubits_ = 1;
  std::vector<Edge> pairs_;
};

// ---------------------------------------------------------------------------
// Machine properties and commutation rules
// ---------------------------------------------------------------------------

class MachineProperties {
 public:
  MachineProperties() = default;
  MachineProperties(int n_qubits, std::map<std::string, int> durations,
                    std::vector<std::set<std::string>> exclusion_classes = {})
      : n_qubits_(n_qubits), durations_(std::move(durations)), exclusion_classes_(std::move(exclusion_classes)) {
    if (n_qubits <= 0) throw std::invalid_argument("MachineProperties: qubit count must be positive");
    for (const auto& [name, d] : durations_)
      if (d <= 0) throw std::invalid_argument("MachineProperties: duration of '" + name + "' must be positive");
  }

  /// Single-qubit gates 1 cycle, two-qubit gates 2, measure 4, swap 6;
  /// measurements form the one exclusion class.
  static MachineProperties defaults(int n_qubits) {
    std::map<std::string, int> d;
    for (const char* g : {"x", "y", "z", "h", "s", "sdg", "t", "tdg", "x90", "y90", "mx90", "my90", "i"}) d[g] = 1;
    for (const char* g : {"cnot", "cx", "cz"}) d[g] = 2;
    d["measure"] = 4;
    d["swap"] = 6;
    return {n_qubits, std::move(d), {{"measure"}}};
  }

  [[nodiscard]] int n_qubits() const { return n_qubits_; }
  [[nodiscard]] const std::map<std::string, int>& durations() const { return durations_; }
  [[nodiscard]] const std::vector<std::set<std::string>>& exclusion_classes() const { return exclusion_classes_; }

  [[nodiscard]] bool has_duration(const std::string& name) const { return durations_.count(name) != 0; }
  [[nodiscard]] int duration(const std::string& name) const {
    auto it = durations_.find(name);
    if (it == durations_.end()) throw std::invalid_argument("MachineProperties: no duration for gate '" + name + "'");
    return it->second;
  }
  [[nodiscard]] int duration(const Gate& g) const { return duration(g.name); }

  /// Indices of the exclusion classes containing `name`.
  [[nodiscard]] std::vector<int> classes_of(const std::string& name) const {
    std::vector<int> out;
    for (std::size_t c = 0; c < exclusion_classes_.size(); ++c)
      if (exclusion_classes_[c].count(name)) out.push_back(static_cast<int>(c));
    return out;
  }

  /// Throws unless every gate of `c` has a duration and fits the qubit count.
  void check_circuit(const Circuit& c) const {
    if (c.n_qubits() > n_qubits_)
      throw std::invalid_argument("MachineProperties: circuit uses " + std::to_string(c.n_qubits()) +
                                  " qubits, machine has " + std::to_string(n_qubits_));
    for (const auto& g : c.gates()) (void)duration(g);
  }

 private:
  int n_qubits_ = 1;
  std::map<std::string, int> durations_;
  std::vector<std::set<std::string>> exclusion_classes_;
};

enum class Role { Control, Target, Single };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::Control: return "control";
    case Role::Target: return "target";
    case Role::Single: return "single";
  }
  return "?";
}

inline Role parse_role(const std::string& s) {
  if (s == "control") return Role::Control;
  if (s == "target") return Role::Target;
  if (s == "single") return Role::Single;
  throw std::invalid_argument("unknown qubit role '" + s + "'");
}

inline Role role_of(const Gate& g, int qubit) {
  if (!g.is_two_qubit()) return Role::Single;
  return g.operands[0] == qubit ? Role::Control : Role::Target;
}

/// Table of pairwise commutation facts for gates that share qubits.
///
/// Two gates commute when, on every shared qubit, their (name, role) pair is
/// listed (in either order) or both are the same diagonal single-qubit gate.
class CommutationRules {
 public:
  struct Rule {
    std::string first;
    Role first_role;
    std::string second;
    Role second_role;
    friend auto operator<=>(const Rule&, const Rule&) = default;
  };

  CommutationRules() = default;
  explicit CommutationRules(std::vector<Rule> rules, std::set<std::string> diagonal = default_diagonal())
      : diagonal_(std::move(diagonal)) {
    for (auto& r : rules) add(std::move(r));
  }

  static std::set<std::string> default_diagonal() { return {"z", "s", "sdg", "t", "tdg"}; }

  /// X on a CNOT target, Z on a CNOT control, Z with Z, CNOTs sharing a control.
  static CommutationRules defaults() {
    return CommutationRules({{"x", Role::Single, "cnot", Role::Target},
                             {"z", Role::Single, "cnot", Role::Control},
                             {"z", Role::Single, "z", Role::Single},
                             {"cnot", Role::Control, "cnot", Role::Control}});
  }

  /// No rules and no diagonal set: gates sharing a qubit never commute.
  static CommutationRules none() { return CommutationRules({}, {}); }

  void add(Rule r) {
    Rule mirrored{r.second, r.second_role, r.first, r.first_role};
    rules_.insert(std::move(r));
    rules_.insert(std::move(mirrored));
  }

  [[nodiscard]] const std::set<Rule>& entries() const { return rules_; }
  [[nodiscard]] const std::set<std::string>& diagonal() const { return diagonal_; }

  /// Canonical (non-mirrored) listing, one entry per symmetric pair.
  [[nodiscard]] std::vector<Rule> canonical_entries() const {
    std::vector<Rule> out;
    for (const auto& r : rules_) {
      Rule m{r.second, r.second_role, r.first, r.first_role};
      if (!(m < r)) out.push_back(r);
    }
    return out;
  }

  [[nodiscard]] bool commutes(const Gate& a, const Gate& b) const {
    for (int q : a.operands) {
      if (!b.acts_on(q)) continue;
      const Role ra = role_of(a, q);
      const Role rb = role_of(b, q);
      if (ra == Role::Single && rb == Role::Single && a.name == b.name && diagonal_.count(a.name)) continue;
      if (!rules_.count(Rule{a.name, ra, b.name, rb})) return false;
    }
    return true;
  }

 private:
  std::set<Rule> rules_;
  std::set<std::string> diagonal_;
};

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

class Schedule {
 public:
  Schedule() = default;
  Schedule(Circuit circuit, MachineProperties props, std::vector<int> start_cycles)
      : circuit_(std::move(circuit)), props_(std::move(props)), start_(std::move(start_cycles)) {
    if (start_.size() != circuit_.size())
      throw std::invalid_argument("Schedule: expected " + std::to_string(circuit_.size()) + " start cycles, got " +
                                  std::to_string(start_.size()));
    for (int s : start_)
      if (s < 0) throw std::invalid_argument("Schedule: negative start cycle");
    props_.check_circuit(circuit_);
  }

  [[nodiscard]] const Circuit& circuit() const { return circuit_; }
  [[nodiscard]] const MachineProperties& properties() const { return props_; }
  [[nodiscard]] const std::vector<int>& start_cycles() const { return start_; }
  [[nodiscard]] int start(std::size_t gate) const { return start_[gate]; }
  [[nodiscard]] int duration(std::size_t gate) const { return props_.duration(circuit_[gate]); }
  [[nodiscard]] int finish(std::size_t gate) const { return start_[gate] + duration(gate); }

  [[nodiscard]] int makespan() const {
    int m = 0;
    for (std::size_t i = 0; i < start_.size(); ++i) m = std::max(m, finish(i));
    return m;
  }

 private:
  Circuit circuit_;
  MachineProperties props_;
  std::vector<int> start_;
};

enum class ViolationKind { QubitOverlap, Ordering, Exclusion };

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::QubitOverlap: return "qubit-overlap";
    case ViolationKind::Ordering: return "ordering";
    case ViolationKind::Exclusion: return "exclusion";
  }
  return "?";
}

/// Gates `first` < `second` (circuit order) break constraint `kind`.
struct Violation {
  ViolationKind kind;
  int first;
  int second;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ScheduleCheck {
  bool valid = true;
  std::vector<Violation> violations;
  explicit operator bool() const { return valid; }
};

// ---------------------------------------------------------------------------
// Derived structures
// ---------------------------------------------------------------------------

inline InteractionGraph interaction_graph_of(const Circuit& c) {
  EdgeSet edges;
  for (const auto& g : c.gates())
    if (g.is_two_qubit()) edges.insert(make_edge(g.operands[0], g.operands[1]));
  return InteractionGraph(c.n_qubits(), {edges.begin(), edges.end()});
}

inline InteractionCircuit interaction_circuit_of(const Circuit& c) {
  std::vector<Edge> pairs;
  for (const auto& g : c.gates())
    if (g.is_two_qubit()) pairs.emplace_back(g.operands[0], g.operands[1]);
  return InteractionCircuit(c.n_qubits(), std::move(pairs));
}

inline EdgeSet mapped_edges(const Mapping& m, const Graph& interaction) {
  if (!m.complete()) throw std::invalid_argument("mapped_edges: mapping is only a partial bijection");
  if (m.size() != interaction.n_nodes())
    throw std::invalid_argument("mapped_edges: mapping size does not match interaction graph");
  EdgeSet out;
  for (auto [u, v] : interaction.edges()) out.insert(make_edge(m[u], m[v]));
  return out;
}

/// |E_M \ E_C|: interaction edges that land off the coupling graph.
inline int mapping_cost(const Mapping& m, const Graph& interaction, const Graph& coupling) {
  if (interaction.n_nodes() != coupling.n_nodes())
    throw std::invalid_argument("mapping_cost: interaction graph has " + std::to_string(interaction.n_nodes()) +
                                " nodes, coupling graph has " + std::to_string(coupling.n_nodes()));
  int cost = 0;
  for (auto [u, v] : mapped_edges(m, interaction))
    if (!coupling.has_edge(u, v)) ++cost;
  return cost;
}

/// Precedence constraints between gates that may not be reordered.
struct DependencyDag {
  std::vector<std::vector<int>> successors;
  std::vector<std::vector<int>> predecessors;

  [[nodiscard]] bool has_edge(int from, int to) const {
    const auto& s = successors[from];
    return std::find(s.begin(), s.end(), to) != s.end();
  }
  [[nodiscard]] std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& s : successors) n += s.size();
    return n;
  }
};

inline DependencyDag dependency_dag(const Circuit& c, const CommutationRules& rules) {
  const std::size_t n = c.size();
  DependencyDag dag{std::vector<std::vector<int>>(n), std::vector<std::vector<int>>(n)};
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t g = h + 1; g < n; ++g)
      if (share_qubit(c[h], c[g]) && !rules.commutes(c[h], c[g])) {
        dag.successors[h].push_back(static_cast<int>(g));
        dag.predecessors[g].push_back(static_cast<int>(h));
      }
  return dag;
}

inline ScheduleCheck is_valid_schedule(const Schedule& s, const CommutationRules& rules) {
  ScheduleCheck out;
  const auto& c = s.circuit();
  const auto& props = s.properties();
  auto overlap = [&](std::size_t a, std::size_t b) { return s.start(a) < s.finish(b) && s.start(b) < s.finish(a); };

  for (std::size_t h = 0; h < c.size(); ++h) {
    for (std::size_t g = h + 1; g < c.size(); ++g) {
      const int ih = static_cast<int>(h), ig = static_cast<int>(g);
      if (share_qubit(c[h], c[g])) {
        if (overlap(h, g)) out.violations.push_back({ViolationKind::QubitOverlap, ih, ig});
        if (!rules.commutes(c[h], c[g]) && s.start(h) >= s.start(g))
          out.violations.push_back({ViolationKind::Ordering, ih, ig});
      }
      if (overlap(h, g)) {
        auto ch = props.classes_of(c[h].name);
        auto cg = props.classes_of(c[g].name);
        bool same = std::any_of(ch.begin(), ch.end(),
                                [&](int k) { return std::find(cg.begin(), cg.end(), k) != cg.end(); });
        if (same) out.violations.push_back({ViolationKind::Exclusion, ih, ig});
      }
    }
  }
  out.valid = out.violations.empty();
  return out;
}

}  // namespace qcgym
