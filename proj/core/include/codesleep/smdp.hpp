#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "codesleep/agent.hpp"
#include "codesleep/types.hpp"

namespace codesleep {

/// Explicit semi-Markov decision process used as ground truth for the
/// learner. Indexing is [state][action] (and [state][action][next] for P).
struct SyntheticSmdp {
  std::size_t states = 0;
  std::size_t actions = 0;
  std::vector<std::vector<std::vector<double>>> transition;
  std::vector<std::vector<double>> sojourn;
  std::vector<std::vector<double>> reward;

  /// Throws std::invalid_argument on shape errors, rows that do not sum to
  /// 1, or non-positive sojourns.
  void validate() const;

  /// Uniformly random instance: Dirichlet(1) rows, sojourns in
  /// [min_sojourn, max_sojourn], rewards in [-1, 1].
  static SyntheticSmdp random(std::size_t states, std::size_t actions, std::uint64_t seed,
                              double min_sojourn = 0.5, double max_sojourn = 2.0);
};

struct ValueIterationResult {
  std::vector<std::vector<double>> q;
  std::vector<std::size_t> policy;
  int sweeps = 0;
  /// Max-norm change of each sweep (contraction diagnostics).
  std::vector<double> residuals;
};

/// Q(s,a) <- R(s,a) + sum_s' P(s'|s,a) exp(-gamma F(s,a)) max_a' Q(s',a')
/// until the max change drops below `tolerance`. Greedy ties pick the lowest
/// action index. Throws std::runtime_error past `max_sweeps`.
ValueIterationResult value_iteration(const SyntheticSmdp& m, double gamma, double tolerance,
                                     int max_sweeps = 100000);

enum class DelayKind { Fixed, Poisson };

struct DelayModel {
  DelayKind kind = DelayKind::Fixed;
  /// Epochs for Fixed, the mean for Poisson.
  double epochs = 0.0;
};

/// Runs a SleepAgent (2-action SMDPs only) against `m`. The reward of the
/// decision at epoch t is delivered in the interval that closes at epoch
/// t + 1 + delay. Sojourns are deterministic, equal to F(s,a), so the
/// learner's fixed point is the value-iteration solution.
struct SyntheticRun {
  QTable table;
  std::vector<Action> greedy_policy;
  /// argmax over theta of Q(s, greedy_policy[s], theta).
  std::vector<int> greedy_theta;
  /// Visits per (state, action) over the run.
  std::vector<std::array<std::int64_t, 2>> visits;
};

SyntheticRun train_on_smdp(const SyntheticSmdp& m, const LearningParams& params, DelayModel delay,
                           std::int64_t epochs, std::uint64_t seed);

/// argmax_theta Q(s, a, theta), ties to the smallest theta.
int best_theta(const QTable& q, std::size_t state, Action a);

}  // namespace codesleep
