#include <gtest/gtest.h>

#include "qcgym/oracles.hpp"
#include "qcgym/scheduling.hpp"
#include "reference_oracles.hpp"

namespace qcgym {
namespace {

TEST(AlapSchedule, XCnotWithoutRulesSerializesXAndCnot) {
  auto props = MachineProperties::defaults(2);
  auto s = alap_schedule(testing::x_cnot_circuit(), props);
  EXPECT_EQ(s.start_cycles(), (std::vector<int>{0, 1, 3, 7}));
  EXPECT_EQ(s.makespan(), 11);
  EXPECT_LE(s.finish(0), s.start(1));
  EXPECT_TRUE(is_valid_schedule(s, CommutationRules::none()).valid);
  EXPECT_EQ(testing::brute_force_makespan(testing::x_cnot_circuit(), props, CommutationRules::none(), 14), 11);
}

TEST(AlapSchedule, EmptyAndDisjoint) {
  auto props = MachineProperties(2, {{"x", 1}, {"h", 3}});
  EXPECT_EQ(alap_schedule(Circuit(2), props).makespan(), 0);
  auto s = alap_schedule(Circuit(2, {gate("x", 0), gate("h", 1)}), props);
  EXPECT_EQ(s.finish(0), s.finish(1));
  EXPECT_EQ(s.makespan(), 3);
}

TEST(OptimalMapping, Examples) {
  RngStream rng(3);
  for (int n = 1; n <= 6; ++n) {
    auto g = testing::random_connected_graph(rng, n, 0.5);
    auto r = optimal_mapping(g, g);
    EXPECT_EQ(r.objective, 0);
    EXPECT_EQ(r.witness, Mapping::identity(n));
  }
  EXPECT_EQ(optimal_mapping(InteractionGraph(3, {{0, 1}, {1, 2}, {0, 2}}), CouplingGraph::line(3)).objective, 1);
  EXPECT_EQ(optimal_mapping(CouplingGraph::complete(4), CouplingGraph::star(4)).objective, 3);
  EXPECT_THROW(optimal_mapping(InteractionGraph(9, {}), CouplingGraph::line(9)), OracleBoundError);
  EXPECT_THROW(optimal_mapping(InteractionGraph(3, {}), CouplingGraph::line(4)), std::invalid_argument);
}

TEST(OptimalMapping, TieBreaksToLexicographicallySmallest) {
  // Path 0-1-2 onto line 0-1-2: bijections {0,1,2} and {2,1,0} are perfect.
  auto r = optimal_mapping(InteractionGraph(3, {{0, 1}, {1, 2}}), CouplingGraph::line(3));
  EXPECT_EQ(r.witness.assignment(), (std::vector<int>{0, 1, 2}));
  auto r2 = optimal_mapping(InteractionGraph(3, {{0, 2}, {1, 2}}), CouplingGraph::line(3));
  EXPECT_EQ(r2.witness.assignment(), (std::vector<int>{0, 2, 1}));
}

TEST(OptimalMapping, AgreesWithIndependentEnumeration) {
  RngStream rng(50);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(5));
    auto ig = testing::random_graph(rng, n, 0.5);
    auto cg = testing::random_connected_graph(rng, n, 0.4);
    auto fast = optimal_mapping(ig, cg);
    auto slow = testing::brute_force_mapping(ig, cg);
    EXPECT_EQ(fast.objective, slow.cost);
    EXPECT_EQ(mapping_cost(fast.witness, ig, cg), fast.objective);
    EXPECT_EQ(mapping_cost(Mapping(slow.witness), ig, cg), slow.cost);
  }
}

TEST(OptimalSchedule, Examples) {
  auto props = MachineProperties::defaults(2);
  auto best = optimal_schedule(testing::x_cnot_circuit(), props, testing::x_cnot_rule());
  EXPECT_EQ(best.objective, 10);
  EXPECT_LT(best.objective, alap_schedule(testing::x_cnot_circuit(), props).makespan());
  EXPECT_TRUE(is_valid_schedule(best.witness, testing::x_cnot_rule()).valid);
  EXPECT_EQ(best.witness.makespan(), 10);
  EXPECT_EQ(testing::brute_force_makespan(testing::x_cnot_circuit(), props, testing::x_cnot_rule(), 14), 10);

  EXPECT_EQ(optimal_schedule(Circuit(2, {gate("measure", 1)}), props, CommutationRules::defaults()).objective, 4);
  Circuit chain(1, {gate("x", 0), gate("h", 0), gate("measure", 0), gate("y", 0)});
  EXPECT_EQ(optimal_schedule(chain, MachineProperties::defaults(1), CommutationRules::none()).objective, 7);
  EXPECT_EQ(optimal_schedule(Circuit(2), props, CommutationRules::none()).objective, 0);

  Circuit seven(1);
  for (int k = 0; k < 7; ++k) seven.add(gate("x", 0));
  EXPECT_THROW(optimal_schedule(seven, MachineProperties::defaults(1), CommutationRules::none()), OracleBoundError);
}

TEST(OptimalSchedule, MatchesExhaustiveStartEnumeration) {
  RngStream rng(77);
  auto props = MachineProperties::defaults(3);
  auto specs = gate_specs({"x", "z", "h", "cnot", "measure"});
  for (int trial = 0; trial < 60; ++trial) {
    const int nq = 2 + static_cast<int>(rng.below(2));
    auto c = generate_random_circuit(rng, nq, 4, specs);
    for (const auto& rules : {CommutationRules::none(), CommutationRules::defaults()}) {
      auto res = optimal_schedule(c, props, rules);
      const int horizon = alap_schedule(c, props).makespan();
      EXPECT_EQ(res.objective, testing::brute_force_makespan(c, props, rules, horizon)) << write_circuit(c);
      EXPECT_TRUE(is_valid_schedule(res.witness, rules).valid);
      EXPECT_EQ(res.witness.makespan(), res.objective);
    }
  }
}

TEST(OptimalSchedule, DominatesAlapUnderAnyRules) {
  RngStream rng(5);
  auto props = MachineProperties::defaults(3);
  auto specs = gate_specs({"x", "z", "h", "cnot", "measure"});
  for (int trial = 0; trial < 100; ++trial) {
    auto c = generate_random_circuit(rng, 3, 6, specs);
    const auto rules = CommutationRules::defaults();
    auto best = optimal_schedule(c, props, rules).objective;
    EXPECT_LE(best, alap_schedule(c, props).makespan());
    EXPECT_LE(best, alap_schedule(c, props, rules).makespan());
    EXPECT_TRUE(is_valid_schedule(alap_schedule(c, props, rules), rules).valid);
  }
}

}  // namespace
}  // namespace qcgym
