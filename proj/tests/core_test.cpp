#include <gtest/gtest.h>

#include <algorithm>

#include "qcgym/core.hpp"
#include "qcgym/formats.hpp"
#include "qcgym/rng.hpp"
#include "reference_oracles.hpp"

namespace qcgym {
namespace {

TEST(Circuit, RejectsInvalidGates) {
  Circuit c(2);
  EXPECT_THROW(c.add(gate("x", 2)), std::invalid_argument);
  EXPECT_THROW(c.add(gate("cnot", 1, 1)), std::invalid_argument);
  EXPECT_THROW(c.add(Gate{"ccx", {0, 1, 0}}), std::invalid_argument);
  EXPECT_THROW(Circuit(0), std::invalid_argument);
}

TEST(Graph, RejectsSelfLoopsDuplicatesAndDisconnectedCoupling) {
  EXPECT_THROW(Graph(3, {{1, 1}}), std::invalid_argument);
  EXPECT_THROW(Graph(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(CouplingGraph(3, {{0, 1}}), std::invalid_argument);
  EXPECT_NO_THROW(InteractionGraph(3, {{0, 1}}));
}

TEST(InteractionGraphOf, TriangleFromThreeCnots) {
  Circuit c(3, {gate("cnot", 0, 1), gate("cnot", 1, 2), gate("cnot", 0, 2)});
  auto g = interaction_graph_of(c);
  EXPECT_EQ(g.n_nodes(), 3);
  EXPECT_EQ(g.edges(), (EdgeSet{{0, 1}, {1, 2}, {0, 2}}));
}

TEST(InteractionGraphOf, SingleQubitGatesOnlyGiveEdgeless) {
  Circuit c(3, {gate("x", 0), gate("h", 2), gate("measure", 1)});
  EXPECT_EQ(interaction_graph_of(c).edge_count(), 0u);
}

TEST(InteractionGraphOf, RepeatedGateGivesOneEdge) {
  Circuit c(2);
  for (int i = 0; i < 5; ++i) c.add(gate("cnot", 0, 1));
  EXPECT_EQ(interaction_graph_of(c).edges(), (EdgeSet{{0, 1}}));
}

TEST(InteractionCircuitOf, DropsSingleQubitGatesAndKeepsOrder) {
  EXPECT_EQ(interaction_circuit_of(Circuit(2, {gate("x", 0), gate("cnot", 0, 1), gate("measure", 1)})).pairs(),
            (std::vector<Edge>{{0, 1}}));
  EXPECT_TRUE(interaction_circuit_of(Circuit(2, {gate("x", 0)})).empty());
  Circuit c(3, {gate("cnot", 0, 1), gate("cnot", 1, 2), gate("cnot", 0, 2)});
  EXPECT_EQ(interaction_circuit_of(c).pairs(), (std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}}));
}

TEST(InteractionCircuitOf, PreservesRelativeOrderProperty) {
  RngStream rng(11);
  const char* names[] = {"x", "h", "cnot", "cz", "measure"};
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(4));
    Circuit c(n);
    std::vector<Edge> expected;
    for (int k = 0, len = static_cast<int>(rng.below(12)); k < len; ++k) {
      std::string name = names[rng.below(5)];
      int a = static_cast<int>(rng.below(n));
      if (name == "cnot" || name == "cz") {
        int b = (a + 1 + static_cast<int>(rng.below(n - 1))) % n;
        c.add(gate(name, a, b));
        expected.emplace_back(a, b);
      } else {
        c.add(gate(name, a));
      }
    }
    EXPECT_EQ(interaction_circuit_of(c).pairs(), expected);
  }
}

TEST(MappedEdges, IdentityAndRelabeling) {
  InteractionGraph ig(3, {{0, 2}, {1, 2}});
  EXPECT_EQ(mapped_edges(Mapping::identity(3), ig), ig.edges());
  InteractionGraph single(3, {{0, 2}});
  EXPECT_EQ(mapped_edges(Mapping({1, 0, 2}), single), (EdgeSet{{1, 2}}));
  InteractionGraph tri(3, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_EQ(mapped_edges(Mapping({2, 0, 1}), tri).size(), 3u);
}

TEST(MappedEdges, PartialMappingIsAnError) {
  Mapping m(3);
  m.assign(0, 1);
  EXPECT_THROW(mapped_edges(m, InteractionGraph(3, {})), std::invalid_argument);
}

TEST(MappingCost, Examples) {
  auto star = CouplingGraph::star(4);
  EXPECT_EQ(mapping_cost(Mapping::identity(4), star, star), 0);
  // Every bijection of the triangle onto a 3-node line leaves one edge off (enumerated).
  InteractionGraph tri(3, {{0, 1}, {1, 2}, {0, 2}});
  auto line = CouplingGraph::line(3);
  std::vector<int> perm{0, 1, 2};
  int best = 99;
  do best = std::min(best, mapping_cost(Mapping(perm), tri, line));
  while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(best, 1);
  EXPECT_EQ(mapping_cost(Mapping({3, 1, 0, 2}), InteractionGraph(4, {}), star), 0);
}

TEST(MappingCost, NodeCountMismatchIsAnError) {
  EXPECT_THROW(mapping_cost(Mapping::identity(3), InteractionGraph(3, {}), CouplingGraph::line(4)),
               std::invalid_argument);
}

TEST(MappingCost, BijectionsPreserveEdgeCountAndRelabelingInvariance) {
  RngStream rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(5));
    auto ig = testing::random_graph(rng, n, 0.5);
    auto cg = testing::random_connected_graph(rng, n, 0.6);
    std::vector<int> f(n), sigma(n);
    std::iota(f.begin(), f.end(), 0);
    std::iota(sigma.begin(), sigma.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      std::swap(f[i], f[rng.below(i + 1)]);
      std::swap(sigma[i], sigma[rng.below(i + 1)]);
    }
    EXPECT_EQ(mapped_edges(Mapping(f), ig).size(), ig.edge_count());
    // Relabel logical qubits by sigma in both the graph and the mapping.
    std::vector<Edge> relabeled;
    for (auto [u, v] : ig.edges()) relabeled.emplace_back(sigma[u], sigma[v]);
    std::vector<int> g(n);
    for (int l = 0; l < n; ++l) g[sigma[l]] = f[l];
    EXPECT_EQ(mapping_cost(Mapping(f), ig, cg), mapping_cost(Mapping(g), InteractionGraph(n, relabeled), cg));
  }
}

TEST(Mapping, AssignEnforcesInjectivity) {
  Mapping m(3);
  EXPECT_TRUE(m.assign(0, 2));
  EXPECT_FALSE(m.assign(0, 1));
  EXPECT_FALSE(m.assign(1, 2));
  EXPECT_EQ(m.mapped_count(), 1);
  EXPECT_FALSE(m.complete());
  EXPECT_THROW(Mapping({0, 0}), std::invalid_argument);
}

TEST(CommutationRules, SymmetricAndDisjointAlwaysCommute) {
  auto rules = CommutationRules::defaults();
  const std::vector<Gate> gates{gate("x", 0),          gate("x", 1),          gate("z", 0),
                                gate("z", 1),          gate("h", 0),          gate("cnot", 0, 1),
                                gate("cnot", 1, 0),    gate("cnot", 0, 2),    gate("measure", 1),
                                gate("cnot", 2, 1)};
  for (const auto& a : gates)
    for (const auto& b : gates) {
      EXPECT_EQ(rules.commutes(a, b), rules.commutes(b, a)) << a.name << " " << b.name;
      if (!share_qubit(a, b)) EXPECT_TRUE(rules.commutes(a, b));
    }
  EXPECT_TRUE(rules.commutes(gate("x", 1), gate("cnot", 0, 1)));
  EXPECT_FALSE(rules.commutes(gate("x", 0), gate("cnot", 0, 1)));
  EXPECT_TRUE(rules.commutes(gate("z", 0), gate("cnot", 0, 1)));
  EXPECT_TRUE(rules.commutes(gate("cnot", 0, 1), gate("cnot", 0, 2)));
  EXPECT_FALSE(rules.commutes(gate("cnot", 0, 1), gate("cnot", 1, 0)));
  EXPECT_FALSE(rules.commutes(gate("cnot", 0, 1), gate("cnot", 2, 1)));
  EXPECT_TRUE(CommutationRules(std::vector<CommutationRules::Rule>{}).commutes(gate("t", 0), gate("t", 0)));
  EXPECT_FALSE(CommutationRules(std::vector<CommutationRules::Rule>{}).commutes(gate("h", 0), gate("h", 0)));
}

TEST(DependencyDag, Examples) {
  Circuit c(2, {gate("x", 1), gate("cnot", 0, 1)});
  EXPECT_EQ(dependency_dag(c, testing::x_cnot_rule()).edge_count(), 0u);
  auto strict = dependency_dag(c, CommutationRules::none());
  EXPECT_TRUE(strict.has_edge(0, 1));
  EXPECT_EQ(strict.edge_count(), 1u);
  EXPECT_EQ(dependency_dag(Circuit(2, {gate("h", 0), gate("h", 1)}), CommutationRules::none()).edge_count(), 0u);
}

TEST(DependencyDag, EmptyRulesOrderEverySharedQubitPair) {
  RngStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Circuit c(3);
    for (int k = 0; k < 8; ++k) {
      int a = static_cast<int>(rng.below(3));
      if (rng.bernoulli(0.5)) c.add(gate("x", a));
      else c.add(gate("cnot", a, (a + 1 + static_cast<int>(rng.below(2))) % 3));
    }
    auto dag = dependency_dag(c, CommutationRules({}, {}));
    for (std::size_t h = 0; h < c.size(); ++h)
      for (std::size_t g = 0; g < c.size(); ++g)
        EXPECT_EQ(dag.has_edge(static_cast<int>(h), static_cast<int>(g)), h < g && share_qubit(c[h], c[g]));
  }
}

TEST(IsValidSchedule, EmptyCircuitIsValid) {
  Schedule s(Circuit(2), MachineProperties::defaults(2), {});
  EXPECT_TRUE(is_valid_schedule(s, CommutationRules::none()).valid);
  EXPECT_EQ(s.makespan(), 0);
}

TEST(IsValidSchedule, ReversedNonCommutingPairGivesOneOrderingViolation) {
  Circuit c(1, {gate("x", 0), gate("h", 0)});
  Schedule s(c, MachineProperties::defaults(1), {1, 0});
  auto check = is_valid_schedule(s, CommutationRules::none());
  EXPECT_FALSE(check.valid);
  ASSERT_EQ(check.violations.size(), 1u);
  EXPECT_EQ(check.violations[0], (Violation{ViolationKind::Ordering, 0, 1}));
}

TEST(IsValidSchedule, XCnotCommutedScheduleIsValid) {
  // X moved after the CNOT; the two measurements do not overlap.
  Schedule s(testing::x_cnot_circuit(), MachineProperties::defaults(2), {5, 0, 2, 6});
  EXPECT_TRUE(is_valid_schedule(s, testing::x_cnot_rule()).valid);
  EXPECT_EQ(s.makespan(), 10);
  EXPECT_FALSE(is_valid_schedule(s, CommutationRules::none()).valid);
}

TEST(IsValidSchedule, DetectsOverlapAndExclusion) {
  Circuit c(2, {gate("measure", 0), gate("measure", 1), gate("x", 0)});
  Schedule s(c, MachineProperties::defaults(2), {0, 2, 3});
  auto check = is_valid_schedule(s, CommutationRules::none());
  EXPECT_EQ(std::count_if(check.violations.begin(), check.violations.end(),
                          [](const Violation& v) { return v.kind == ViolationKind::Exclusion; }),
            1);
  EXPECT_EQ(std::count_if(check.violations.begin(), check.violations.end(),
                          [](const Violation& v) { return v.kind == ViolationKind::QubitOverlap; }),
            1);
}

TEST(IsValidSchedule, SerialScheduleAlwaysValid) {
  RngStream rng(8);
  auto props = MachineProperties::defaults(3);
  const char* names[] = {"x", "z", "h", "cnot", "measure", "swap"};
  for (int trial = 0; trial < 100; ++trial) {
    Circuit c(3);
    for (int k = 0, len = 1 + static_cast<int>(rng.below(8)); k < len; ++k) {
      std::string name = names[rng.below(6)];
      int a = static_cast<int>(rng.below(3));
      if (name == "cnot" || name == "swap") c.add(gate(name, a, (a + 1) % 3));
      else c.add(gate(name, a));
    }
    std::vector<int> start;
    int t = 0;
    for (const auto& g : c.gates()) {
      start.push_back(t);
      t += props.duration(g);
    }
    Schedule s(c, props, start);
    EXPECT_TRUE(is_valid_schedule(s, CommutationRules::none()).valid);
    EXPECT_EQ(s.makespan(), t);
  }
}

TEST(Formats, ParseCircuit) {
  auto c = parse_circuit("# x before cnot\nqubits 2\nx q[1]\ncnot q[0] ,q[1]  # ctrl first\n\nmeasure q[0]\nmeasure q[1]\n");
  EXPECT_EQ(c, testing::x_cnot_circuit());
  EXPECT_EQ(parse_circuit(write_circuit(c)), c);
}

TEST(Formats, CircuitErrorsCarryLineNumbers) {
  try {
    parse_circuit("qubits 2\nx q[0]\ncnot q[0], q[5]\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse_circuit("x q[0]\n"), ParseError);
  EXPECT_THROW(parse_circuit("qubits 2\nX q[0]\n"), ParseError);
  EXPECT_THROW(parse_circuit(""), ParseError);
}

TEST(Formats, ParseGraph) {
  auto g = parse_graph("nodes 4\nedge 0 1\nedge 0 2\n# star\nedge 0 3\n");
  EXPECT_EQ(g, CouplingGraph::star(4));
  EXPECT_EQ(parse_graph(write_graph(g)), g);
  EXPECT_THROW(parse_graph("nodes 2\nedge 0 0\n"), ParseError);
  EXPECT_THROW(parse_graph("edge 0 1\n"), ParseError);
}

TEST(Rng, IdenticalSeedsGiveIdenticalStreams) {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  // mt19937_64 default-seed check value from the standard.
  RngStream d(5489);
  for (int i = 0; i < 9999; ++i) d.next_u64();
  EXPECT_EQ(d.next_u64(), 9981545732273789042ULL);
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
  RngStream r(1);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) ++counts[r.below(6)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
  for (int i = 0; i < 1000; ++i) {
    double x = r.uniform_real();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

}  // namespace
}  // namespace qcgym
