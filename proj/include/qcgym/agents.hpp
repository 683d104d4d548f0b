#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "qcgym/env.hpp"
#include "qcgym/rng.hpp"
#include "qcgym/scheduling.hpp"

namespace qcgym {

// ---------------------------------------------------------------------------
// Training log
// ---------------------------------------------------------------------------

struct EpisodeRecord {
  long episode;
  long length;
  double total_reward;
};

class TrainingLog {
 public:
  void add(long length, double total_reward) {
    records_.push_back({static_cast<long>(records_.size()), length, total_reward});
  }

  [[nodiscard]] const std::vector<EpisodeRecord>& records() const { return records_; }
  [[nodiscard]] std::size_t size() const { return records_.size(); }

  /// Mean over the min(window, e + 1) records ending at episode e.
  [[nodiscard]] double rolling_length(std::size_t e, std::size_t window) const {
    return rolling(e, window, [](const EpisodeRecord& r) { return static_cast<double>(r.length); });
  }
  [[nodiscard]] double rolling_reward(std::size_t e, std::size_t window) const {
    return rolling(e, window, [](const EpisodeRecord& r) { return r.total_reward; });
  }

  /// Mean length / reward over records [first, last).
  [[nodiscard]] double mean_length(std::size_t first, std::size_t last) const {
    return mean(first, last, [](const EpisodeRecord& r) { return static_cast<double>(r.length); });
  }
  [[nodiscard]] double mean_reward(std::size_t first, std::size_t last) const {
    return mean(first, last, [](const EpisodeRecord& r) { return r.total_reward; });
  }

  void write_csv(std::ostream& out, std::size_t window = 100) const {
    out << "episode,length,total_reward,rolling_length,rolling_reward\n";
    for (std::size_t e = 0; e < records_.size(); ++e) {
      const auto& r = records_[e];
      out << r.episode << ',' << r.length << ',' << format_number(r.total_reward) << ','
          << format_number(rolling_length(e, window)) << ',' << format_number(rolling_reward(e, window)) << '\n';
    }
  }

  friend bool operator==(const TrainingLog& a, const TrainingLog& b) {
    return std::equal(a.records_.begin(), a.records_.end(), b.records_.begin(), b.records_.end(),
                      [](const EpisodeRecord& x, const EpisodeRecord& y) {
                        return x.episode == y.episode && x.length == y.length && x.total_reward == y.total_reward;
                      });
  }

 private:
  template <class F>
  double rolling(std::size_t e, std::size_t window, F f) const {
    const std::size_t first = e + 1 >= window ? e + 1 - window : 0;
    return mean(first, e + 1, f);
  }

  template <class F>
  double mean(std::size_t first, std::size_t last, F f) const {
    if (last > records_.size() || first >= last) throw std::out_of_range("TrainingLog: empty or invalid range");
    double s = 0.0;
    for (std::size_t i = first; i < last; ++i) s += f(records_[i]);
    return s / static_cast<double>(last - first);
  }

  std::vector<EpisodeRecord> records_;
};

// ---------------------------------------------------------------------------
// Tabular Q-learning
// ---------------------------------------------------------------------------

/// Greedy policy over a Q-table keyed by canonical observation keys.
/// Ties and unseen states resolve to the lowest action code.
class QPolicy {
 public:
  QPolicy() = default;
  explicit QPolicy(int action_count) : actions_(action_count) {}

  [[nodiscard]] int action_count() const { return actions_; }
  [[nodiscard]] std::size_t state_count() const { return table_.size(); }
  [[nodiscard]] const std::unordered_map<std::string, std::vector<double>>& table() const { return table_; }

  std::vector<double>& values(const std::string& key) {
    auto it = table_.find(key);
    if (it == table_.end()) it = table_.emplace(key, std::vector<double>(actions_, 0.0)).first;
    return it->second;
  }

  [[nodiscard]] const std::vector<double>* find(const std::string& key) const {
    auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  [[nodiscard]] int best_action(const std::string& key) const {
    const auto* q = find(key);
    if (!q) return 0;
    return static_cast<int>(std::max_element(q->begin(), q->end()) - q->begin());
  }

  template <class Observation>
  int operator()(const Observation& obs, const ActionMask& /*mask*/) const {
    return best_action(obs.key());
  }

  /// `qtable <actions> <states>` then one `key<TAB>q0 q1 ...` line per state, sorted by key.
  void save(std::ostream& out) const {
    std::vector<const std::pair<const std::string, std::vector<double>>*> rows;
    for (const auto& kv : table_) rows.push_back(&kv);
    std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->first < b->first; });
    out << "qtable " << actions_ << ' ' << rows.size() << '\n';
    for (const auto* row : rows) {
      out << row->first << '\t';
      for (std::size_t a = 0; a < row->second.size(); ++a) out << (a ? " " : "") << format_number(row->second[a]);
      out << '\n';
    }
  }

  static QPolicy load(std::istream& in) {
    std::string tag;
    int actions = 0;
    std::size_t rows = 0;
    if (!(in >> tag >> actions >> rows) || tag != "qtable" || actions <= 0)
      throw std::runtime_error("QPolicy::load: missing 'qtable <actions> <states>' header");
    in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    QPolicy p(actions);
    std::string line;
    for (std::size_t r = 0; r < rows; ++r) {
      if (!std::getline(in, line)) throw std::runtime_error("QPolicy::load: truncated table");
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw std::runtime_error("QPolicy::load: malformed row");
      std::istringstream vals(line.substr(tab + 1));
      auto& q = p.values(line.substr(0, tab));
      for (int a = 0; a < actions; ++a)
        if (!(vals >> q[a])) throw std::runtime_error("QPolicy::load: row has too few values");
    }
    return p;
  }

 private:
  int actions_ = 0;
  std::unordered_map<std::string, std::vector<double>> table_;
};

/// Epsilon anneals linearly from `epsilon_start` to `epsilon_end` over the
/// first `anneal_fraction` of episodes, then stays at `epsilon_end`.
struct QLearningParams {
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double anneal_fraction = 0.5;

  [[nodiscard]] double epsilon(long episode, long episodes) const {
    const double horizon = anneal_fraction * static_cast<double>(episodes);
    const double t = horizon <= 0.0 ? 1.0 : std::min(1.0, static_cast<double>(episode) / horizon);
    if (t >= 1.0) return epsilon_end;
    return epsilon_start + (epsilon_end - epsilon_start) * t;
  }
};

struct QLearningResult {
  QPolicy policy;
  TrainingLog log;
};

/// Standard one-step Q-learning with epsilon-greedy exploration over the
/// full action space. The environment is seeded once with `seed`; passing
/// `instance` replays that instance on every episode.
template <Environment E>
QLearningResult q_learning_train(E& env, long episodes, const QLearningParams& params, std::uint64_t seed,
                                 const std::optional<typename E::Instance>& instance = std::nullopt) {
  QLearningResult out{QPolicy(env.action_count()), {}};
  RngStream rng(RngStream::mix(seed));
  const int actions = env.action_count();
  for (long e = 0; e < episodes; ++e) {
    auto obs = env.reset(e == 0 ? std::optional<std::uint64_t>(seed) : std::nullopt, instance);
    std::string key = obs.key();
    const double eps = params.epsilon(e, episodes);
    long length = 0;
    double total = 0.0;
    while (!env.done()) {
      const int a = rng.uniform_real() < eps ? static_cast<int>(rng.below(actions)) : out.policy.best_action(key);
      auto r = env.step(a);
      const std::string next_key = r.observation.key();
      double target = r.reward;
      if (!r.terminated) {
        const auto& next_q = out.policy.values(next_key);
        target += params.gamma * *std::max_element(next_q.begin(), next_q.end());
      }
      auto& q = out.policy.values(key);
      q[a] += params.alpha * (target - q[a]);
      key = next_key;
      total += r.reward;
      ++length;
    }
    out.log.add(length, total);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

/// Lowest-index legal gate; advances only when nothing is legal.
inline int greedy_scheduling_policy(const SchedulingObservation& obs) {
  for (std::size_t i = 0; i < obs.legal_mask.size(); ++i)
    if (obs.legal_mask[i]) return static_cast<int>(i);
  return static_cast<int>(obs.legal_mask.size());
}

struct GreedySchedulingPolicy {
  int operator()(const SchedulingObservation& obs, const ActionMask& /*mask*/) const {
    return greedy_scheduling_policy(obs);
  }
};

/// Uniform over the legal actions of `mask`; uniform over all of them when
/// nothing is marked legal.
inline int masked_random_action(const ActionMask& mask, RngStream& rng) {
  std::vector<int> legal;
  for (std::size_t a = 0; a < mask.size(); ++a)
    if (mask[a]) legal.push_back(static_cast<int>(a));
  if (legal.empty()) {
    if (mask.empty()) throw std::invalid_argument("masked_random_action: empty action space");
    return static_cast<int>(rng.below(mask.size()));
  }
  return legal[rng.below(legal.size())];
}

class MaskedRandomPolicy {
 public:
  explicit MaskedRandomPolicy(std::uint64_t seed) : rng_(seed) {}

  template <class Observation>
  int operator()(const Observation& /*obs*/, const ActionMask& mask) {
    return masked_random_action(mask, rng_);
  }

 private:
  RngStream rng_;
};

/// Uniform over every action code, legal or not.
class RandomPolicy {
 public:
  RandomPolicy(std::uint64_t seed, int action_count) : rng_(seed), actions_(action_count) {}

  template <class Observation>
  int operator()(const Observation& /*obs*/, const ActionMask& /*mask*/) {
    return static_cast<int>(rng_.below(actions_));
  }

 private:
  RngStream rng_;
  int actions_;
};

}  // namespace qcgym
