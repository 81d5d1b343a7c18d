#include "codesleep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace codesleep {

MetricValue coding_gain(const MetricsReport& r) {
  if (r.transmissions <= 0) return {1.0, false};
  return {static_cast<double>(r.native_equivalent) / static_cast<double>(r.transmissions), true};
}

MetricValue energy_per_bit(const MetricsReport& r) {
  if (!(r.delivered_bits > 0.0)) return {0.0, false};
  return {r.energy.total() / r.delivered_bits, true};
}

MetricValue avg_delay(const MetricsReport& r) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& p : r.packets) {
    if (p.delivered && p.first_transmission) {
      sum += static_cast<double>(*p.delivered - *p.first_transmission);
      ++n;
    }
  }
  if (n == 0) return {0.0, false};
  return {sum / static_cast<double>(n), true};
}

std::int64_t undelivered(const MetricsReport& r) {
  return static_cast<std::int64_t>(std::count_if(r.packets.begin(), r.packets.end(),
                                                 [](const PacketRecord& p) { return !p.delivered; }));
}

std::vector<std::pair<std::int64_t, double>> reward_curve(const std::vector<std::vector<double>>& per_node,
                                                          std::size_t window) {
  if (window == 0) throw std::invalid_argument("reward_curve: window must be >= 1");
  std::size_t longest = 0;
  for (const auto& v : per_node) longest = std::max(longest, v.size());
  std::vector<double> mean(longest, 0.0);
  std::vector<std::size_t> count(longest, 0);
  for (const auto& v : per_node) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      mean[k] += v[k];
      ++count[k];
    }
  }
  for (std::size_t k = 0; k < longest; ++k) mean[k] /= static_cast<double>(count[k]);

  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(longest);
  double run = 0.0;
  for (std::size_t k = 0; k < longest; ++k) {
    run += mean[k];
    if (k >= window) run -= mean[k - window];
    const std::size_t n = std::min(k + 1, window);
    out.emplace_back(static_cast<std::int64_t>(k), run / static_cast<double>(n));
  }
  return out;
}

std::vector<std::pair<std::int64_t, double>> reward_curve(const MetricsReport& r, std::size_t window) {
  return reward_curve(r.epoch_rewards, window);
}

namespace {

// Least-squares slope of points [lo, hi] of the curve.
double slope(const std::vector<std::pair<std::int64_t, double>>& c, std::size_t lo, std::size_t hi) {
  const double n = static_cast<double>(hi - lo + 1);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    sx += static_cast<double>(c[i].first);
    sy += c[i].second;
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double dx = static_cast<double>(c[i].first) - mx;
    sxy += dx * (c[i].second - my);
    sxx += dx * dx;
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

std::optional<std::int64_t> detect_plateau(const std::vector<std::pair<std::int64_t, double>>& curve,
                                           const PlateauDetector& d) {
  if (curve.size() < 2 || d.step < 1) return std::nullopt;
  auto [lo_it, hi_it] = std::minmax_element(curve.begin(), curve.end(),
                                            [](const auto& a, const auto& b) { return a.second < b.second; });
  const double range = hi_it->second - lo_it->second;
  if (range <= 0.0) return std::max<std::int64_t>(d.min_epoch, 0);

  std::optional<std::int64_t> since;
  const auto last = static_cast<std::int64_t>(curve.size()) - 1;
  for (std::int64_t e = std::max<std::int64_t>(d.min_epoch, d.step); e <= last; e += d.step) {
    const auto hi = static_cast<std::size_t>(e);
    const auto lo = static_cast<std::size_t>(e - e / 4);
    const double drift = std::abs(slope(curve, lo, hi)) * static_cast<double>(hi - lo);
    if (drift < d.tolerance * range) {
      if (!since) since = e;
    } else {
      since.reset();
    }
  }
  return since;
}

std::optional<Slot> lifetime(const MetricsReport& r) {
  std::optional<Slot> first;
  for (const auto& d : r.death_slots) {
    if (d && (!first || *d < *first)) first = d;
  }
  return first;
}

}  // namespace codesleep
