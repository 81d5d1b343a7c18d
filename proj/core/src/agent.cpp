#include "codesleep/agent.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace codesleep {

const char* to_string(Action a) noexcept {
  return a == Action::Overhear ? "overhear" : "sleep";
}

AgentState StateQuantizer::observe(double residual, double capacity,
                                   std::span<const int> recent_degrees) const {
  AgentState s;
  if (capacity > 0.0) {
    const double frac = std::clamp(residual / capacity, 0.0, 1.0);
    s.e_level = std::clamp(static_cast<int>(std::ceil(energy_levels * frac)), 1, energy_levels);
  } else {
    s.e_level = 1;
  }

  const std::size_t n = std::min(recent_degrees.size(), degree_window);
  if (n == 0) {
    s.g_level = 1;
    return s;
  }
  // Degrees are integers, so bin membership of the mean is decided exactly:
  // mean in (1 + (k-1)/G, 1 + k/G]  <=>  G*(sum - n) in ((k-1)*n, k*n].
  std::int64_t sum = 0;
  for (std::size_t i = recent_degrees.size() - n; i < recent_degrees.size(); ++i) {
    sum += recent_degrees[i];
  }
  const std::int64_t num = static_cast<std::int64_t>(degree_levels) * (sum - static_cast<std::int64_t>(n));
  const auto den = static_cast<std::int64_t>(n);
  std::int64_t k = num <= 0 ? 0 : (num + den - 1) / den;
  s.g_level = static_cast<int>(std::clamp<std::int64_t>(k, 1, degree_levels));
  return s;
}

std::size_t StateQuantizer::index(AgentState s) const noexcept {
  return static_cast<std::size_t>(s.e_level - 1) * static_cast<std::size_t>(degree_levels) +
         static_cast<std::size_t>(s.g_level - 1);
}

AgentState StateQuantizer::from_index(std::size_t i) const noexcept {
  const auto g = static_cast<std::size_t>(degree_levels);
  return AgentState{static_cast<int>(i / g) + 1, static_cast<int>(i % g) + 1};
}

double ExplorationSchedule::at(std::int64_t epoch) const noexcept {
  if (horizon <= 0 || epoch >= horizon) return end;
  const double frac = static_cast<double>(std::max<std::int64_t>(epoch, 0)) / static_cast<double>(horizon);
  return start + (end - start) * frac;
}

void LearningParams::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must be in (0, 1]");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (theta_max < 0) throw std::invalid_argument("theta_max must be >= 0");
  if (!(time_unit > 0.0)) throw std::invalid_argument("time_unit must be > 0");
  const auto& e = exploration;
  if (e.start < 0.0 || e.start > 1.0 || e.end < 0.0 || e.end > 1.0) {
    throw std::invalid_argument("exploration rates must be in [0, 1]");
  }
}

QTable::QTable(std::size_t states, int theta_max)
    : states_(states),
      theta_max_(theta_max),
      values_(states * kActionCount * static_cast<std::size_t>(theta_max + 1), 0.0) {
  if (theta_max < 0) throw std::invalid_argument("theta_max must be >= 0");
}

std::size_t QTable::offset(std::size_t state, Action a, int theta) const {
  if (state >= states_ || theta < 0 || theta > theta_max_) {
    throw std::out_of_range("QTable index out of range");
  }
  const auto slices = static_cast<std::size_t>(theta_max_ + 1);
  return (state * kActionCount + static_cast<std::size_t>(a)) * slices + static_cast<std::size_t>(theta);
}

double& QTable::at(std::size_t state, Action a, int theta) { return values_[offset(state, a, theta)]; }

double QTable::at(std::size_t state, Action a, int theta) const { return values_[offset(state, a, theta)]; }

double QTable::max_value(std::size_t state) const {
  const auto width = kActionCount * static_cast<std::size_t>(theta_max_ + 1);
  const auto first = values_.begin() + static_cast<std::ptrdiff_t>(state * width);
  return *std::max_element(first, first + static_cast<std::ptrdiff_t>(width));
}

void QTable::dump(std::ostream& os) const {
  os << "state,action,theta,value\n";
  for (std::size_t s = 0; s < states_; ++s) {
    for (std::size_t a = 0; a < kActionCount; ++a) {
      for (int th = 0; th <= theta_max_; ++th) {
        std::ostringstream v;
        v << std::hexfloat << at(s, static_cast<Action>(a), th);
        os << s << ',' << a << ',' << th << ',' << v.str() << '\n';
      }
    }
  }
}

QTable QTable::load(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "state,action,theta,value") {
    throw std::runtime_error("q-table dump: missing header");
  }
  struct Row {
    std::size_t s, a;
    int th;
    double v;
  };
  std::vector<Row> rows;
  std::size_t max_s = 0;
  int max_th = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Row r{};
    char c1 = 0, c2 = 0, c3 = 0;
    std::string value;
    if (!(ls >> r.s >> c1 >> r.a >> c2 >> r.th >> c3) || c1 != ',' || c2 != ',' || c3 != ',' ||
        !(ls >> value) || r.a >= kActionCount || r.th < 0) {
      throw std::runtime_error("q-table dump: malformed row: " + line);
    }
    r.v = std::strtod(value.c_str(), nullptr);
    max_s = std::max(max_s, r.s);
    max_th = std::max(max_th, r.th);
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("q-table dump: no rows");
  QTable q(max_s + 1, max_th);
  if (rows.size() != q.size()) throw std::runtime_error("q-table dump: incomplete table");
  for (const auto& r : rows) q.at(r.s, static_cast<Action>(r.a), r.th) = r.v;
  return q;
}

Selection greedy_selection(const QTable& q, std::size_t state) {
  Selection best{Action::Overhear, 0};
  double best_value = q.at(state, Action::Overhear, 0);
  // Scan theta-major so that strict '>' keeps the smallest theta, then Overhear.
  for (int th = 0; th <= q.theta_max(); ++th) {
    for (std::size_t a = 0; a < kActionCount; ++a) {
      const double v = q.at(state, static_cast<Action>(a), th);
      if (v > best_value) {
        best_value = v;
        best = {static_cast<Action>(a), th};
      }
    }
  }
  const int th = best.theta;
  const Action a = q.at(state, Action::Sleep, th) > q.at(state, Action::Overhear, th) ? Action::Sleep
                                                                                       : Action::Overhear;
  return {a, th};
}

Selection select(const QTable& q, std::size_t state, double epsilon, Rng& rng) {
  Selection sel = greedy_selection(q, state);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(kActionCount) - 1);
    sel.action = static_cast<Action>(pick(rng));
  }
  return sel;
}

double elapsed_discount(double late, double early, double gamma) {
  if (late < early) throw std::invalid_argument("elapsed_discount: negative interval");
  return std::exp(-gamma * (late - early));
}

RewardComposition compose_reward(Action a, double transmit_energy, double receive_energy) noexcept {
  if (a == Action::Sleep) return {};
  return {-receive_energy, transmit_energy};
}

SleepAgent::SleepAgent(std::size_t state_count, LearningParams params)
    : table_(state_count, params.theta_max), params_(params) {
  params_.validate();
}

void SleepAgent::update(std::size_t state, double timestamp, double reward_total) {
  if (history_.empty()) return;
  const double unit = params_.time_unit;
  const double beta = params_.beta;
  const double gamma = params_.gamma;
  // history_.back() is record t; history_[size-1-theta] is record t - theta.
  const int depth = static_cast<int>(history_.size());
  for (int th = 0; th <= params_.theta_max && th < depth; ++th) {
    const DecisionRecord& rec = history_[static_cast<std::size_t>(depth - 1 - th)];
    std::size_t next_state = state;
    double next_time = timestamp;
    if (th > 0) {
      const DecisionRecord& nxt = history_[static_cast<std::size_t>(depth - th)];
      next_state = nxt.state;
      next_time = nxt.timestamp;
    }
    const double disc = elapsed_discount(next_time / unit, rec.timestamp / unit, gamma);
    double& v = table_.at(rec.state, rec.action, th);
    v += beta * (reward_total + disc * table_.max_value(next_state) - v);
  }
}

void SleepAgent::push(std::size_t state, double timestamp, Selection sel) {
  history_.push_back(DecisionRecord{next_epoch_, state, sel.action, timestamp, sel.theta});
  while (history_.size() > static_cast<std::size_t>(params_.theta_max + 1)) history_.pop_front();
  ++next_epoch_;
}

Selection SleepAgent::on_epoch(std::size_t state, double timestamp, double reward_total, Rng& rng) {
  update(state, timestamp, reward_total);
  const Selection sel = select(table_, state, params_.exploration.at(next_epoch_), rng);
  push(state, timestamp, sel);
  return sel;
}

void SleepAgent::on_epoch_forced(std::size_t state, double timestamp, double reward_total, Selection forced) {
  update(state, timestamp, reward_total);
  push(state, timestamp, forced);
}

}  // namespace codesleep
