// Command-line runner: one scenario, one policy, optional flow-count sweep.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "codesleep/experiment.hpp"
#include "codesleep/scenario.hpp"
#include "codesleep/simulator.hpp"

namespace fs = std::filesystem;
using namespace codesleep;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("codesleep");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("CODESLEEP_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

// Repetition 0 once more, with the event trace and/or Q-table dumps attached.
void inspect_first_run(const ScenarioConfig& cfg, std::uint64_t seed, const fs::path& dir, const std::string& tag,
                       bool trace, bool dump) {
  const std::uint64_t run_seed = repetition_seed(seed, 0);
  Simulator sim(cfg, materialize(cfg, run_seed), run_seed);
  std::ofstream trace_os;
  if (trace) {
    trace_os = open_out(dir / ("trace_" + tag + ".txt"));
    sim.set_trace(&trace_os);
  }
  sim.run();
  if (!dump) return;
  int written = 0;
  for (const auto& node : sim.nodes()) {
    if (!node.agent) continue;
    auto os = open_out(dir / ("qtable_" + tag + "_node" + std::to_string(node.id) + ".csv"));
    node.agent->table().dump(os);
    ++written;
  }
  if (written == 0) spdlog::warn("--dump-qtable: policy {} keeps no Q-tables", to_string(cfg.policy));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slotted wireless network-coding simulator with learned sleep scheduling"};
  std::string config_path, scenario, policy, out_dir;
  std::vector<std::size_t> flows;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<Slot> duration;
  unsigned threads = 0;
  bool trace = false, dump = false;

  auto* cfg_opt = app.add_option("--config", config_path, "scenario file (INI)")->check(CLI::ExistingFile);
  app.add_option("--scenario", scenario, "canonical scenario name")->excludes(cfg_opt);
  app.add_option("--policy", policy, "learned | always-overhear | always-sleep | random:P");
  app.add_option("--flows", flows, "random flow counts to sweep")->delimiter(',');
  app.add_option("--reps", reps, "repetitions per point");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--duration", duration, "slots per run");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--trace", trace, "write the event trace of repetition 0");
  app.add_flag("--dump-qtable", dump, "write the Q-tables of repetition 0");
  CLI11_PARSE(app, argc, argv);

  setup_logging();
  try {
    ScenarioConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (!scenario.empty()) {
      cfg = canonical_scenario(scenario);
    } else {
      spdlog::error("one of --config or --scenario is required");
      return 2;
    }
    if (!policy.empty()) cfg.policy = parse_policy(policy);
    if (reps) cfg.reps = *reps;
    if (seed) cfg.seed = *seed;
    if (duration) cfg.duration = *duration;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();

    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);

    std::vector<std::optional<std::size_t>> points;
    if (flows.empty()) {
      points.push_back(std::nullopt);
    } else {
      for (std::size_t f : flows) points.emplace_back(f);
    }

    ExperimentOptions opt;
    opt.reps = cfg.reps;
    opt.seed = cfg.seed;
    opt.threads = threads;

    std::vector<RunSummary> all_runs;
    std::vector<AggregateRow> rows;
    for (const auto& point : points) {
      ScenarioConfig c = cfg;
      if (point) {
        c.traffic.flows.clear();
        c.traffic.flow_count = *point;
      }
      c.validate();
      spdlog::info("{} / {} / flows={} : {} reps x {} slots", c.name, to_string(c.policy), c.flow_total(), opt.reps,
                   c.duration);
      auto runs = run_repetitions(c, opt);
      rows.push_back(aggregate(runs));
      all_runs.insert(all_runs.end(), runs.begin(), runs.end());
      if (trace || dump) inspect_first_run(c, opt.seed, dir, "f" + std::to_string(c.flow_total()), trace, dump);
      const auto& a = rows.back();
      spdlog::info("  coding gain {:.4f}, delay {:.2f} slots", a.coding_gain_mean.value_or(1.0),
                   a.delay_mean_slots.value_or(0.0));
    }

    auto runs_os = open_out(dir / "runs.csv");
    write_runs_csv(runs_os, all_runs);
    auto agg_os = open_out(dir / "aggregate.csv");
    write_aggregate_csv(agg_os, rows);
    spdlog::info("wrote {}", (dir / "aggregate.csv").string());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
