#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "codesleep/metrics.hpp"
#include "codesleep/scenario.hpp"

namespace codesleep {

/// One per-run CSV row.
struct RunSummary {
  std::string scenario;
  std::string policy;
  std::size_t flows = 0;
  std::size_t nodes = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::int64_t transmissions = 0;
  std::int64_t native_equivalent = 0;
  std::int64_t coded_transmissions = 0;
  std::int64_t generated = 0;
  std::int64_t delivered_packets = 0;
  std::int64_t undelivered = 0;
  std::optional<double> coding_gain;
  std::optional<double> energy_per_bit;
  std::optional<double> delay_mean;
  double energy_total = 0.0;
  std::optional<Slot> lifetime;
  std::optional<std::int64_t> converged_epoch;
  std::int64_t epochs = 0;
  std::int64_t useful_overhears = 0;
  std::int64_t useless_overhears = 0;
  std::int64_t decode_failures = 0;
  std::int64_t collisions = 0;
  std::uint64_t trace_hash = 0;
};

/// One aggregate CSV row (one scenario x policy x flow count).
struct AggregateRow {
  std::string scenario;
  std::string policy;
  std::size_t flows = 0;
  std::size_t nodes = 0;
  std::size_t seed_count = 0;
  std::optional<double> coding_gain_mean;
  std::optional<double> coding_gain_sd;
  std::optional<double> energy_per_bit_mean;
  std::optional<double> delay_mean_slots;
  std::optional<Slot> lifetime_min_slots;
  std::optional<double> converged_epoch;
};

struct ExperimentOptions {
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
  std::size_t reward_window = 200;
  PlateauDetector plateau;
};

RunSummary summarize(const MetricsReport& r, std::size_t rep, const ExperimentOptions& opt);

/// Seed of repetition `rep` under master seed `seed`.
std::uint64_t repetition_seed(std::uint64_t seed, std::size_t rep) noexcept;

/// Runs opt.reps repetitions in parallel. Results are ordered by repetition
/// index; `inspect`, when given, sees each full report (called from worker
/// threads, one call per repetition).
std::vector<RunSummary> run_repetitions(const ScenarioConfig& config, const ExperimentOptions& opt,
                                        const std::function<void(std::size_t, const MetricsReport&)>& inspect = {});

/// Means are taken over the runs where the metric is defined.
AggregateRow aggregate(std::span<const RunSummary> runs);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

extern const std::vector<std::string> kRunColumns;
extern const std::vector<std::string> kAggregateColumns;

void write_runs_csv(std::ostream& os, std::span<const RunSummary> runs);
void write_aggregate_csv(std::ostream& os, std::span<const AggregateRow> rows);

}  // namespace codesleep
