#pragma once

#include <charconv>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qcgym {

/// 0/1 flag per action code.
using ActionMask = std::vector<std::uint8_t>;

using InfoValue = std::variant<bool, std::int64_t, double, std::vector<int>>;
using Info = std::map<std::string, InfoValue>;

template <class Observation>
struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  Info info;
};

/// Thrown for lifecycle misuse: stepping before reset or after the episode ended.
class EpisodeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Step counter and termination flags shared by every environment.
class EpisodeClock {
 public:
  void start(long budget, bool terminated_at_start) {
    started_ = true;
    steps_ = 0;
    budget_ = budget;
    terminated_ = terminated_at_start;
    truncated_ = false;
  }

  void require_active() const {
    if (!started_) throw EpisodeError("step() called before reset()");
    if (terminated_) throw EpisodeError("step() called after the episode terminated");
    if (truncated_) throw EpisodeError("step() called after the episode was truncated");
  }

  /// Counts one step. Termination takes precedence over truncation.
  void tick(bool terminated) {
    ++steps_;
    terminated_ = terminated;
    truncated_ = !terminated && steps_ >= budget_;
  }

  [[nodiscard]] long steps() const { return steps_; }
  [[nodiscard]] long budget() const { return budget_; }
  [[nodiscard]] bool terminated() const { return terminated_; }
  [[nodiscard]] bool truncated() const { return truncated_; }
  [[nodiscard]] bool done() const { return terminated_ || truncated_; }

 private:
  bool started_ = false;
  long steps_ = 0;
  long budget_ = 0;
  bool terminated_ = false;
  bool truncated_ = false;
};

template <class E>
concept Environment = requires(E env, const E cenv, int action) {
  typename E::Observation;
  typename E::Instance;
  { env.reset(std::optional<std::uint64_t>{}, std::optional<typename E::Instance>{}) }
      -> std::same_as<typename E::Observation>;
  { env.step(action) } -> std::same_as<StepResult<typename E::Observation>>;
  { cenv.action_count() } -> std::convertible_to<int>;
  { cenv.action_mask() } -> std::same_as<ActionMask>;
  { cenv.done() } -> std::same_as<bool>;
  { cenv.instance_descriptor() } -> std::convertible_to<std::string>;
};

template <class P, class Obs>
concept PolicyFor = requires(P p, const Obs& obs, const ActionMask& mask) {
  { p(obs, mask) } -> std::convertible_to<int>;
};

template <class Observation>
struct TraceStep {
  int action;
  StepResult<Observation> result;
};

template <class Observation>
class EpisodeTrace {
 public:
  EpisodeTrace(std::uint64_t seed, std::string instance, Observation initial)
      : seed_(seed), instance_(std::move(instance)), initial_(std::move(initial)) {}

  void record(int action, StepResult<Observation> r) {
    total_ += r.reward;
    steps_.push_back({action, std::move(r)});
  }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] const std::string& instance() const { return instance_; }
  [[nodiscard]] const Observation& initial_observation() const { return initial_; }
  [[nodiscard]] const std::vector<TraceStep<Observation>>& steps() const { return steps_; }
  [[nodiscard]] double total_reward() const { return total_; }
  [[nodiscard]] std::size_t length() const { return steps_.size(); }
  [[nodiscard]] bool terminated() const { return !steps_.empty() && steps_.back().result.terminated; }
  [[nodiscard]] bool truncated() const { return !steps_.empty() && steps_.back().result.truncated; }

 private:
  std::uint64_t seed_;
  std::string instance_;
  Observation initial_;
  std::vector<TraceStep<Observation>> steps_;
  double total_ = 0.0;
};

/// Resets with `seed` (and `instance`, if given) then rolls `policy` until the
/// episode terminates or truncates.
template <Environment E, PolicyFor<typename E::Observation> P>
EpisodeTrace<typename E::Observation> run_episode(E& env, P&& policy, std::uint64_t seed,
                                                  std::optional<typename E::Instance> instance = std::nullopt) {
  auto obs = env.reset(seed, std::move(instance));
  EpisodeTrace<typename E::Observation> trace(seed, env.instance_descriptor(), obs);
  while (!env.done()) {
    const int action = policy(obs, env.action_mask());
    auto r = env.step(action);
    obs = r.observation;
    trace.record(action, std::move(r));
  }
  return trace;
}

/// Shortest decimal text that round-trips to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

/// One line per step: `step_idx action reward terminated truncated`.
template <class Observation>
void write_trace_steps(std::ostream& out, const EpisodeTrace<Observation>& trace) {
  std::size_t idx = 0;
  for (const auto& s : trace.steps()) {
    out << idx++ << ' ' << s.action << ' ' << format_number(s.result.reward) << ' '
        << (s.result.terminated ? 1 : 0) << ' ' << (s.result.truncated ? 1 : 0) << '\n';
  }
}

inline bool info_flag(const Info& info, const std::string& key) {
  auto it = info.find(key);
  return it != info.end() && std::holds_alternative<bool>(it->second) && std::get<bool>(it->second);
}

}  // namespace qcgym
