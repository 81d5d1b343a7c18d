#include "codesleep/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "codesleep/simulator.hpp"

namespace codesleep {

const std::vector<std::string> kRunColumns{
    "scenario",        "policy",           "flows",          "nodes",         "rep",
    "seed",            "transmissions",    "native_equivalent", "coded_transmissions", "generated",
    "delivered",       "undelivered",      "coding_gain",    "energy_per_bit", "delay_mean_slots",
    "energy_total",    "lifetime_slots",   "converged_epoch", "epochs",       "useful_overhears",
    "useless_overhears", "decode_failures", "collisions",    "trace_hash"};

const std::vector<std::string> kAggregateColumns{
    "scenario",         "policy",           "flows",           "nodes",
    "seed_count",       "coding_gain_mean", "coding_gain_sd",  "energy_per_bit_mean",
    "delay_mean_slots", "lifetime_min_slots", "converged_epoch"};

std::uint64_t repetition_seed(std::uint64_t seed, std::size_t rep) noexcept { return derive_seed(seed, rep); }

RunSummary summarize(const MetricsReport& r, std::size_t rep, const ExperimentOptions& opt) {
  RunSummary s;
  s.scenario = r.scenario;
  s.policy = r.policy;
  s.flows = r.flows;
  s.nodes = r.nodes;
  s.rep = rep;
  s.seed = r.seed;
  s.transmissions = r.transmissions;
  s.native_equivalent = r.native_equivalent;
  s.coded_transmissions = r.coded_transmissions;
  s.generated = r.generated;
  s.delivered_packets = r.delivered_packets;
  s.undelivered = undelivered(r);
  auto opt_of = [](MetricValue m) { return m.defined ? std::optional<double>(m.value) : std::nullopt; };
  s.coding_gain = opt_of(coding_gain(r));
  s.energy_per_bit = opt_of(energy_per_bit(r));
  s.delay_mean = opt_of(avg_delay(r));
  s.energy_total = r.energy.total();
  s.lifetime = lifetime(r);
  s.converged_epoch = detect_plateau(reward_curve(r, opt.reward_window), opt.plateau);
  s.epochs = r.epochs;
  s.useful_overhears = r.useful_overhears;
  s.useless_overhears = r.useless_overhears;
  s.decode_failures = r.decode_failures;
  s.collisions = r.collisions;
  s.trace_hash = r.trace_hash;
  return s;
}

std::vector<RunSummary> run_repetitions(const ScenarioConfig& config, const ExperimentOptions& opt,
                                        const std::function<void(std::size_t, const MetricsReport&)>& inspect) {
  config.validate();
  std::vector<RunSummary> out(opt.reps);
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(opt.reps, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= opt.reps) return;
      try {
        const MetricsReport r = run(config, repetition_seed(opt.seed, rep));
        out[rep] = summarize(r, rep, opt);
        if (inspect) inspect(rep, r);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

AggregateRow aggregate(std::span<const RunSummary> runs) {
  AggregateRow a;
  if (runs.empty()) return a;
  a.scenario = runs.front().scenario;
  a.policy = runs.front().policy;
  a.flows = runs.front().flows;
  a.nodes = runs.front().nodes;
  a.seed_count = runs.size();

  auto mean_of = [&](auto field) -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : runs) {
      if (const auto v = field(r)) {
        sum += static_cast<double>(*v);
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  a.coding_gain_mean = mean_of([](const RunSummary& r) { return r.coding_gain; });
  a.energy_per_bit_mean = mean_of([](const RunSummary& r) { return r.energy_per_bit; });
  a.delay_mean_slots = mean_of([](const RunSummary& r) { return r.delay_mean; });
  a.converged_epoch = mean_of([](const RunSummary& r) { return r.converged_epoch; });

  if (a.coding_gain_mean) {
    double ss = 0.0;
    std::size_t n = 0;
    for (const auto& r : runs) {
      if (r.coding_gain) {
        ss += (*r.coding_gain - *a.coding_gain_mean) * (*r.coding_gain - *a.coding_gain_mean);
        ++n;
      }
    }
    a.coding_gain_sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  }
  for (const auto& r : runs) {
    if (r.lifetime && (!a.lifetime_min_slots || *r.lifetime < *a.lifetime_min_slots)) a.lifetime_min_slots = r.lifetime;
  }
  return a;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

namespace {

std::string field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

template <class I>
std::string field(const std::optional<I>& v) {
  return v ? std::to_string(*v) : "";
}

void header(std::ostream& os, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

}  // namespace

void write_runs_csv(std::ostream& os, std::span<const RunSummary> runs) {
  header(os, kRunColumns);
  for (const auto& r : runs) {
    os << r.scenario << ',' << r.policy << ',' << r.flows << ',' << r.nodes << ',' << r.rep << ',' << r.seed << ','
       << r.transmissions << ',' << r.native_equivalent << ',' << r.coded_transmissions << ',' << r.generated << ','
       << r.delivered_packets << ',' << r.undelivered << ',' << field(r.coding_gain) << ','
       << field(r.energy_per_bit) << ',' << field(r.delay_mean) << ',' << format_double(r.energy_total) << ','
       << field(r.lifetime) << ',' << field(r.converged_epoch) << ',' << r.epochs << ',' << r.useful_overhears
       << ',' << r.useless_overhears << ',' << r.decode_failures << ',' << r.collisions << ',' << r.trace_hash
       << '\n';
  }
}

void write_aggregate_csv(std::ostream& os, std::span<const AggregateRow> rows) {
  header(os, kAggregateColumns);
  for (const auto& a : rows) {
    os << a.scenario << ',' << a.policy << ',' << a.flows << ',' << a.nodes << ',' << a.seed_count << ','
       << field(a.coding_gain_mean) << ',' << field(a.coding_gain_sd) << ',' << field(a.energy_per_bit_mean) << ','
       << field(a.delay_mean_slots) << ',' << field(a.lifetime_min_slots) << ',' << field(a.converged_epoch)
       << '\n';
  }
}

}  // namespace codesleep
