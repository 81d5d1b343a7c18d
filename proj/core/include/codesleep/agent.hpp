#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <vector>

#include "codesleep/types.hpp"

namespace codesleep {

enum class Action : std::uint8_t { Overhear = 0, Sleep = 1 };
inline constexpr std::size_t kActionCount = 2;

const char* to_string(Action a) noexcept;

/// Quantized (residual energy, mean coding degree) observation.
struct AgentState {
  int e_level = 1;
  int g_level = 1;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

/// Maps raw node observations onto the discrete state grid.
struct StateQuantizer {
  int energy_levels = 8;
  int degree_levels = 10;
  /// Number of most recent coding degrees averaged into g.
  std::size_t degree_window = 15;

  AgentState observe(double residual, double capacity, std::span<const int> recent_degrees) const;
  std::size_t index(AgentState s) const noexcept;
  AgentState from_index(std::size_t i) const noexcept;
  std::size_t state_count() const noexcept {
    return static_cast<std::size_t>(energy_levels) * static_cast<std::size_t>(degree_levels);
  }
};

/// Linear epsilon decay from `start` to `end` over `horizon` epochs, then flat.
struct ExplorationSchedule {
  double start = 0.3;
  double end = 0.02;
  std::int64_t horizon = 4000;

  double at(std::int64_t epoch) const noexcept;
};

struct LearningParams {
  double beta = 0.5;
  double gamma = 0.9;
  int theta_max = 8;
  ExplorationSchedule exploration;
  /// Elapsed slots are divided by this before discounting.
  double time_unit = 1.0;

  void validate() const;
};

/// Dense value[state][action][theta] table.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t states, int theta_max);

  std::size_t state_count() const noexcept { return states_; }
  int theta_max() const noexcept { return theta_max_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& at(std::size_t state, Action a, int theta);
  double at(std::size_t state, Action a, int theta) const;

  /// max over (action, theta) for one state.
  double max_value(std::size_t state) const;

  /// Writes one `state,action,theta,value` row per entry (hexfloat values,
  /// so a dump/load cycle is exact).
  void dump(std::ostream& os) const;
  static QTable load(std::istream& is);

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t offset(std::size_t state, Action a, int theta) const;

  std::size_t states_ = 0;
  int theta_max_ = 0;
  std::vector<double> values_;
};

struct Selection {
  Action action = Action::Overhear;
  int theta = 0;

  friend bool operator==(const Selection&, const Selection&) = default;
};

/// Greedy pick: theta* is the theta coordinate of the largest entry over
/// (action, theta) for the state (ties: smallest theta, then Overhear);
/// the action is the best within that theta slice (ties: Overhear).
Selection greedy_selection(const QTable& q, std::size_t state);

/// greedy_selection with the action replaced by a uniform draw with
/// probability epsilon. Always consumes exactly one uniform variate, plus one
/// more when exploring.
Selection select(const QTable& q, std::size_t state, double epsilon, Rng& rng);

/// exp(-gamma * (late - early)); throws std::invalid_argument when late < early.
double elapsed_discount(double late, double early, double gamma);

struct DecisionRecord {
  std::int64_t epoch = 0;
  std::size_t state = 0;
  Action action = Action::Overhear;
  double timestamp = 0.0;
  int theta = 0;
};

/// Reward credited to an agent. `origin_epoch` identifies the decision that
/// earned it; the learner itself only sees the per-interval sum.
struct RewardEvent {
  double amount = 0.0;
  std::int64_t origin_epoch = 0;
  Slot arrival_slot = 0;
};

/// Split of a decision's net reward into what is known at the decision and
/// what arrives later.
struct RewardComposition {
  /// Charged at the next epoch.
  double immediate = 0.0;
  /// Paid once per coded packet the overheard packet ends up in.
  double per_use = 0.0;
};

RewardComposition compose_reward(Action a, double transmit_energy, double receive_energy) noexcept;

/// Delayed-reward continuous-time Q-learner. Each epoch the summed reward of
/// the last interval is credited, for every delay hypothesis theta, to the
/// decision taken theta epochs earlier.
class SleepAgent {
 public:
  SleepAgent(std::size_t state_count, LearningParams params);

  /// Runs the update for the interval ending at this epoch, then picks and
  /// records the action for the new state. `timestamp` is in slots.
  Selection on_epoch(std::size_t state, double timestamp, double reward_total, Rng& rng);

  /// Same, but with a fixed action (used when an outside policy drives the
  /// node while the table keeps learning).
  void on_epoch_forced(std::size_t state, double timestamp, double reward_total, Selection forced);

  const QTable& table() const noexcept { return table_; }
  QTable& table() noexcept { return table_; }
  const LearningParams& params() const noexcept { return params_; }
  std::int64_t epochs() const noexcept { return next_epoch_; }
  double current_epsilon() const noexcept { return params_.exploration.at(next_epoch_); }
  const std::deque<DecisionRecord>& history() const noexcept { return history_; }

 private:
  void update(std::size_t state, double timestamp, double reward_total);
  void push(std::size_t state, double timestamp, Selection sel);

  QTable table_;
  LearningParams params_;
  std::deque<DecisionRecord> history_;
  std::int64_t next_epoch_ = 0;
};

}  // namespace codesleep
