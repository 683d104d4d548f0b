#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qcgym/agents.hpp"
#include "qcgym/initial_mapping.hpp"
#include "qcgym/routing.hpp"
#include "qcgym/scheduling.hpp"
#include "qcgym/trace.hpp"
#include "reference_oracles.hpp"

namespace qcgym {
namespace {

/// One step, then done; reward depends only on the action.
class OneStepEnv {
 public:
  struct Observation {
    int state = 0;
    [[nodiscard]] std::string key() const { return std::to_string(state); }
  };
  using Instance = int;

  Observation reset(std::optional<std::uint64_t> = std::nullopt, std::optional<Instance> = std::nullopt) {
    clock_.start(1, false);
    return {};
  }
  StepResult<Observation> step(int action) {
    clock_.require_active();
    clock_.tick(true);
    return {{1}, rewards_[action], true, false, {}};
  }
  [[nodiscard]] int action_count() const { return 3; }
  [[nodiscard]] ActionMask action_mask() const { return {1, 1, 1}; }
  [[nodiscard]] bool done() const { return clock_.done(); }
  [[nodiscard]] std::string instance_descriptor() const { return "one-step"; }

 private:
  std::vector<double> rewards_{-1.0, 2.0, 0.5};
  EpisodeClock clock_;
};

static_assert(Environment<OneStepEnv>);
static_assert(Environment<InitialMappingEnv>);
static_assert(Environment<RoutingEnv>);
static_assert(Environment<SchedulingEnv>);

TEST(EpisodeClock, LifecycleErrors) {
  EpisodeClock clock;
  EXPECT_THROW(clock.require_active(), EpisodeError);
  clock.start(2, false);
  clock.tick(false);
  EXPECT_FALSE(clock.truncated());
  clock.tick(false);
  EXPECT_TRUE(clock.truncated());
  EXPECT_THROW(clock.require_active(), EpisodeError);
  clock.start(1, false);
  clock.tick(true);
  EXPECT_TRUE(clock.terminated());
  EXPECT_FALSE(clock.truncated());
}

TEST(RunEpisode, StepBeforeResetIsAnError) {
  SchedulingEnv env;
  EXPECT_THROW(env.step(0), EpisodeError);
}

TEST(RunEpisode, MappingBudgetTruncatesOnRepeatedIllegalActions) {
  InitialMappingEnv env(0.5, CouplingGraph::line(3));
  env.reset(0);
  env.step(0);
  StepResult<MappingObservation> r;
  for (int k = 1; k < 30; ++k) {
    r = env.step(0);
    EXPECT_EQ(r.truncated, k == 29);
  }
  EXPECT_THROW(env.step(1), EpisodeError);
}

TEST(RunEpisode, TotalsAndDeterminism) {
  SchedulingEnv env;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto a = run_episode(env, MaskedRandomPolicy(seed), seed);
    auto b = run_episode(env, MaskedRandomPolicy(seed), seed);
    double sum = 0;
    for (const auto& s : a.steps()) sum += s.result.reward;
    EXPECT_EQ(a.total_reward(), sum);
    ASSERT_EQ(a.length(), b.length());
    for (std::size_t i = 0; i < a.length(); ++i) {
      EXPECT_EQ(a.steps()[i].action, b.steps()[i].action);
      EXPECT_EQ(a.steps()[i].result.observation, b.steps()[i].result.observation);
      EXPECT_EQ(a.steps()[i].result.reward, b.steps()[i].result.reward);
    }
    for (const auto& s : a.steps()) EXPECT_FALSE(s.result.terminated && s.result.truncated);
  }
}

TEST(RunEpisode, GreedyOnXCnotGivesValidSchedule) {
  SchedulingConfig cfg;
  cfg.rules = testing::x_cnot_rule();
  SchedulingEnv env(cfg);
  auto trace = run_episode(env, GreedySchedulingPolicy{}, 0, testing::x_cnot_circuit());
  EXPECT_TRUE(trace.terminated());
  EXPECT_TRUE(is_valid_schedule(env.finalize_schedule(), cfg.rules).valid);
}

TEST(Liveness, EveryEnvEndsWithinBudget) {
  InitialMappingEnv mapping(0.5, CouplingGraph::star(4));
  RoutingEnv routing(CouplingGraph::line(4));
  SchedulingEnv scheduling;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto mt = run_episode(mapping, RandomPolicy(seed, mapping.action_count()), seed);
    EXPECT_LE(static_cast<long>(mt.length()), mapping.step_budget());
    auto rt = run_episode(routing, RandomPolicy(seed, routing.action_count()), seed);
    EXPECT_LE(static_cast<long>(rt.length()), routing.step_budget());
    auto st = run_episode(scheduling, RandomPolicy(seed, scheduling.action_count()), seed);
    EXPECT_LE(static_cast<long>(st.length()), scheduling.step_budget());
    EXPECT_TRUE(mt.terminated() || mt.truncated());
    EXPECT_TRUE(rt.terminated() || rt.truncated());
    EXPECT_TRUE(st.terminated() || st.truncated());
  }
}

TEST(Trace, SerializationIsStableAndSummarizesSteps) {
  InitialMappingEnv env(0.5, CouplingGraph::star(4));
  std::vector<int> script{0, 0, 5, 10, 15};
  auto scripted = [&] {
    std::size_t i = 0;
    return [script, i](const MappingObservation&, const ActionMask&) mutable { return script[i++]; };
  };
  auto a = run_episode(env, scripted(), 7);
  auto b = run_episode(env, scripted(), 7);
  std::ostringstream sa, sb;
  write_trace(sa, "mapping", a);
  write_trace(sb, "mapping", b);
  EXPECT_EQ(sa.str(), sb.str());

  std::istringstream in(sa.str());
  std::string header, line;
  std::getline(in, header);
  auto j = nlohmann::json::parse(header);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["env"], "mapping");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 4), "0 0 ");
  std::getline(in, line);
  EXPECT_EQ(line, "1 0 -5 0 0");
  std::string last;
  while (std::getline(in, line)) last = line;
  EXPECT_EQ(last.substr(last.size() - 3), "1 0");
}

TEST(TrainingLog, RollingWindowUsesAvailableRecords) {
  TrainingLog log;
  for (int e = 0; e < 5; ++e) log.add(10 - e, -e);
  EXPECT_EQ(log.rolling_length(0, 3), 10.0);
  EXPECT_EQ(log.rolling_length(1, 3), 9.5);
  EXPECT_EQ(log.rolling_length(4, 3), 7.0);
  EXPECT_EQ(log.rolling_reward(4, 3), -3.0);
  std::ostringstream csv;
  log.write_csv(csv, 2);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "episode,length,total_reward,rolling_length,rolling_reward");
  EXPECT_NE(csv.str().find("\n1,9,-1,9.5,-0.5\n"), std::string::npos);
}

TEST(QLearning, DegenerateCaseLearnsImmediateRewards) {
  OneStepEnv env;
  QLearningParams p;
  p.alpha = 1.0;
  p.gamma = 0.0;
  auto res = q_learning_train(env, 200, p, 3);
  const auto* q = res.policy.find("0");
  ASSERT_NE(q, nullptr);
  EXPECT_EQ(*q, (std::vector<double>{-1.0, 2.0, 0.5}));
  EXPECT_EQ(res.policy(OneStepEnv::Observation{}, {}), 1);
}

TEST(QLearning, FixedSeedGivesIdenticalLogs) {
  SchedulingEnv a, b;
  auto ra = q_learning_train(a, 300, {}, 9);
  auto rb = q_learning_train(b, 300, {}, 9);
  EXPECT_TRUE(ra.log == rb.log);
  for (const auto& [key, values] : ra.policy.table())
    for (double v : values) EXPECT_TRUE(std::isfinite(v));
}

TEST(QLearning, PolicyRoundTripsThroughText) {
  SchedulingEnv env;
  auto res = q_learning_train(env, 200, {}, 4);
  std::stringstream ss;
  res.policy.save(ss);
  auto loaded = QPolicy::load(ss);
  EXPECT_EQ(loaded.state_count(), res.policy.state_count());
  for (const auto& [key, values] : res.policy.table()) EXPECT_EQ(*loaded.find(key), values);
}

TEST(QLearning, EpsilonSchedule) {
  QLearningParams p;
  EXPECT_DOUBLE_EQ(p.epsilon(0, 100), 1.0);
  EXPECT_DOUBLE_EQ(p.epsilon(25, 100), 0.525);
  EXPECT_DOUBLE_EQ(p.epsilon(50, 100), 0.05);
  EXPECT_DOUBLE_EQ(p.epsilon(99, 100), 0.05);
}

TEST(GreedyPolicy, PicksLowestLegalGateElseAdvance) {
  SchedulingObservation obs;
  obs.legal_mask = {0, 1, 1, 0};
  EXPECT_EQ(greedy_scheduling_policy(obs), 1);
  obs.legal_mask = {0, 0, 0, 0};
  EXPECT_EQ(greedy_scheduling_policy(obs), 4);
}

TEST(MaskedRandom, Examples) {
  RngStream rng(6);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(masked_random_action({0, 0, 1, 0}, rng), 2);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 6000; ++i) ++counts[masked_random_action(ActionMask(6, 1), rng)];
  for (int c : counts) EXPECT_NEAR(c, 1000, 100);

  // Scheduling: no legal gate leaves only the advance action.
  SchedulingEnv env;
  env.reset(0, Circuit(2, {gate("measure", 0), gate("measure", 1)}));
  env.step(0);
  auto mask = env.action_mask();
  for (int i = 0; i < 20; ++i) EXPECT_EQ(masked_random_action(mask, rng), env.advance_action());
}

}  // namespace
}  // namespace qcgym
