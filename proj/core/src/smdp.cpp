#include "codesleep/smdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace codesleep {

void SyntheticSmdp::validate() const {
  if (states == 0 || actions == 0) throw std::invalid_argument("smdp: empty state or action set");
  if (transition.size() != states || sojourn.size() != states || reward.size() != states) {
    throw std::invalid_argument("smdp: table shape mismatch");
  }
  for (std::size_t s = 0; s < states; ++s) {
    if (transition[s].size() != actions || sojourn[s].size() != actions || reward[s].size() != actions) {
      throw std::invalid_argument("smdp: table shape mismatch");
    }
    for (std::size_t a = 0; a < actions; ++a) {
      const auto& row = transition[s][a];
      if (row.size() != states) throw std::invalid_argument("smdp: transition row length");
      double sum = 0.0;
      for (double p : row) {
        if (p < 0.0) throw std::invalid_argument("smdp: negative probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("smdp: transition row does not sum to 1");
      if (!(sojourn[s][a] > 0.0)) throw std::invalid_argument("smdp: sojourn must be > 0");
      if (!std::isfinite(reward[s][a])) throw std::invalid_argument("smdp: non-finite reward");
    }
  }
}

SyntheticSmdp SyntheticSmdp::random(std::size_t states, std::size_t actions, std::uint64_t seed,
                                    double min_sojourn, double max_sojourn) {
  Rng rng(seed);
  std::gamma_distribution<double> g1(1.0, 1.0);
  std::uniform_real_distribution<double> soj(min_sojourn, max_sojourn);
  std::uniform_real_distribution<double> rew(-1.0, 1.0);
  SyntheticSmdp m;
  m.states = states;
  m.actions = actions;
  m.transition.assign(states, std::vector<std::vector<double>>(actions, std::vector<double>(states)));
  m.sojourn.assign(states, std::vector<double>(actions));
  m.reward.assign(states, std::vector<double>(actions));
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t a = 0; a < actions; ++a) {
      double sum = 0.0;
      for (auto& p : m.transition[s][a]) sum += (p = g1(rng));
      for (auto& p : m.transition[s][a]) p /= sum;
      m.sojourn[s][a] = soj(rng);
      m.reward[s][a] = rew(rng);
    }
  }
  return m;
}

ValueIterationResult value_iteration(const SyntheticSmdp& m, double gamma, double tolerance, int max_sweeps) {
  m.validate();
  if (!(gamma > 0.0)) throw std::invalid_argument("value_iteration: gamma must be > 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("value_iteration: tolerance must be > 0");

  ValueIterationResult out;
  out.q.assign(m.states, std::vector<double>(m.actions, 0.0));
  std::vector<double> v(m.states, 0.0);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double delta = 0.0;
    auto next = out.q;
    for (std::size_t s = 0; s < m.states; ++s) {
      for (std::size_t a = 0; a < m.actions; ++a) {
        double expect = 0.0;
        for (std::size_t s2 = 0; s2 < m.states; ++s2) expect += m.transition[s][a][s2] * v[s2];
        next[s][a] = m.reward[s][a] + std::exp(-gamma * m.sojourn[s][a]) * expect;
        delta = std::max(delta, std::abs(next[s][a] - out.q[s][a]));
      }
    }
    out.q = std::move(next);
    for (std::size_t s = 0; s < m.states; ++s) v[s] = *std::max_element(out.q[s].begin(), out.q[s].end());
    out.residuals.push_back(delta);
    out.sweeps = sweep;
    if (delta < tolerance) {
      out.policy.resize(m.states);
      for (std::size_t s = 0; s < m.states; ++s) {
        out.policy[s] = static_cast<std::size_t>(
            std::distance(out.q[s].begin(), std::max_element(out.q[s].begin(), out.q[s].end())));
      }
      return out;
    }
  }
  throw std::runtime_error("value_iteration: no convergence within the sweep cap");
}

int best_theta(const QTable& q, std::size_t state, Action a) {
  int best = 0;
  for (int th = 1; th <= q.theta_max(); ++th) {
    if (q.at(state, a, th) > q.at(state, a, best)) best = th;
  }
  return best;
}

SyntheticRun train_on_smdp(const SyntheticSmdp& m, const LearningParams& params, DelayModel delay,
                           std::int64_t epochs, std::uint64_t seed) {
  m.validate();
  if (m.actions != kActionCount) throw std::invalid_argument("train_on_smdp: needs a 2-action SMDP");
  if (delay.epochs < 0.0) throw std::invalid_argument("train_on_smdp: negative delay");

  Rng agent_rng(derive_seed(seed, 1));
  Rng env_rng(derive_seed(seed, 2));
  SleepAgent agent(m.states, params);
  SyntheticRun run;
  run.visits.assign(m.states, {0, 0});

  // pending[k] = reward total to be delivered at epoch k.
  std::map<std::int64_t, double> pending;
  std::poisson_distribution<int> poisson(delay.kind == DelayKind::Poisson && delay.epochs > 0.0 ? delay.epochs
                                                                                                 : 1.0);
  std::size_t state = 0;
  double now = 0.0;
  for (std::int64_t k = 0; k < epochs; ++k) {
    double r_total = 0.0;
    if (auto it = pending.find(k); it != pending.end()) {
      r_total = it->second;
      pending.erase(it);
    }
    const Selection sel = agent.on_epoch(state, now, r_total, agent_rng);
    const auto a = static_cast<std::size_t>(sel.action);
    ++run.visits[state][a];

    std::int64_t lag = 0;
    if (delay.kind == DelayKind::Fixed) {
      lag = static_cast<std::int64_t>(std::llround(delay.epochs));
    } else if (delay.epochs > 0.0) {
      lag = poisson(env_rng);
    }
    pending[k + 1 + lag] += m.reward[state][a];

    std::discrete_distribution<std::size_t> next(m.transition[state][a].begin(), m.transition[state][a].end());
    now += m.sojourn[state][a];
    state = next(env_rng);
  }

  run.table = agent.table();
  run.greedy_policy.resize(m.states);
  run.greedy_theta.resize(m.states);
  for (std::size_t s = 0; s < m.states; ++s) {
    const Selection g = greedy_selection(run.table, s);
    run.greedy_policy[s] = g.action;
    run.greedy_theta[s] = best_theta(run.table, s, g.action);
  }
  return run;
}

}  // namespace codesleep
