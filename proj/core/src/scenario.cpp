#include "codesleep/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace codesleep {

namespace {

namespace pt = boost::property_tree;

constexpr double kPi = 3.14159265358979323846;

std::vector<Point> fig1_positions(bool with_bystander) {
  // Links of length 150 under radius 200: n1-R, n2-R, n3-R, n1-n3.
  const double c = 150.0 * std::cos(kPi / 6.0);
  std::vector<Point> p{{c, 75.0}, {-150.0, 0.0}, {c, -75.0}, {0.0, 0.0}};
  if (with_bystander) p.push_back({2.0 * c, 150.0});
  return p;
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  try {
    return boost::lexical_cast<T>(boost::trim_copy(text));
  } catch (const boost::bad_lexical_cast&) {
    throw std::invalid_argument("config: bad value for " + key + ": '" + text + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(";"));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::vector<Point> parse_positions(const std::string& text) {
  std::vector<Point> out;
  for (const auto& item : split_list(text)) {
    std::vector<std::string> xy;
    boost::split(xy, item, boost::is_any_of(","));
    if (xy.size() != 2) throw std::invalid_argument("config: position '" + item + "' is not x,y");
    out.push_back({parse_value<double>("topology.positions", xy[0]), parse_value<double>("topology.positions", xy[1])});
  }
  return out;
}

std::vector<FlowSpec> parse_flows(const std::string& text) {
  std::vector<FlowSpec> out;
  for (const auto& item : split_list(text)) {
    const auto arrow = item.find('>');
    if (arrow == std::string::npos) throw std::invalid_argument("config: flow '" + item + "' is not src>dst");
    out.push_back({parse_value<NodeId>("traffic.flows", item.substr(0, arrow)),
                   parse_value<NodeId>("traffic.flows", item.substr(arrow + 1))});
  }
  return out;
}

ArrivalPattern parse_pattern(const std::string& text) {
  const auto t = boost::trim_copy(text);
  if (t == "poisson") return ArrivalPattern::Poisson;
  if (t == "periodic") return ArrivalPattern::Periodic;
  throw std::invalid_argument("config: unknown arrival pattern '" + text + "'");
}

class SectionReader {
 public:
  SectionReader(const pt::ptree& root, std::string section) : section_(std::move(section)) {
    if (auto child = root.get_child_optional(section_)) node_ = &*child;
  }

  std::optional<std::string> raw(const std::string& key) {
    seen_.insert(key);
    if (!node_) return std::nullopt;
    auto v = node_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return boost::trim_copy(*v);
  }

  template <class T>
  void read(const std::string& key, T& target) {
    if (auto v = raw(key)) target = parse_value<T>(section_ + "." + key, *v);
  }

  void reject_unknown() const {
    if (!node_) return;
    for (const auto& [key, unused] : *node_) {
      if (!seen_.count(key)) throw std::invalid_argument("config: unknown key " + section_ + "." + key);
    }
  }

 private:
  std::string section_;
  const pt::ptree* node_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

std::size_t ScenarioConfig::node_count() const noexcept {
  return topology.kind == TopologySpec::Kind::Explicit ? topology.positions.size() : topology.nodes;
}

std::size_t ScenarioConfig::flow_total() const noexcept {
  return traffic.flows.empty() ? traffic.flow_count : traffic.flows.size();
}

void ScenarioConfig::validate() const {
  if (duration < 1) throw std::invalid_argument("config: duration must be >= 1");
  if (!(topology.radius > 0.0)) throw std::invalid_argument("config: radius must be > 0");
  if (topology.kind == TopologySpec::Kind::Explicit) {
    if (topology.positions.empty()) throw std::invalid_argument("config: explicit topology needs positions");
  } else {
    if (topology.nodes == 0) throw std::invalid_argument("config: random topology needs nodes >= 1");
    if (!(topology.width > 0.0) || !(topology.height > 0.0)) throw std::invalid_argument("config: empty area");
  }
  const std::size_t n = node_count();
  for (const auto& f : traffic.flows) {
    if (f.source >= n || f.destination >= n) throw std::invalid_argument("config: flow endpoint out of range");
    if (f.source == f.destination) throw std::invalid_argument("config: flow source equals destination");
  }
  if (!traffic.flows.empty() && traffic.flow_count != 0) {
    throw std::invalid_argument("config: give either explicit flows or a flow count, not both");
  }
  if (traffic.flow_count > 0 && n < 2) throw std::invalid_argument("config: random flows need >= 2 nodes");
  if (!(traffic.mean_interarrival > 0.0)) throw std::invalid_argument("config: mean inter-arrival must be > 0");
  if (traffic.packet_bits == 0) throw std::invalid_argument("config: packet size must be > 0");
  if (traffic.end && *traffic.end < traffic.start) throw std::invalid_argument("config: traffic ends before it starts");
  energy.validate();
  coding.validate();
  learning.validate();
  if (quantizer.energy_levels < 1 || quantizer.degree_levels < 1 || quantizer.degree_window < 1) {
    throw std::invalid_argument("config: quantizer sizes must be >= 1");
  }
  policy.validate();
  if (reps < 1) throw std::invalid_argument("config: reps must be >= 1");
}

ScenarioConfig parse_config(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  for (const auto& [section, unused] : root) {
    static const std::set<std::string> known{"scenario", "topology", "traffic", "energy",
                                             "coding",   "learning", "output"};
    if (!known.count(section)) throw std::invalid_argument("config: unknown section [" + section + "]");
  }

  ScenarioConfig c;
  SectionReader sc(root, "scenario");
  bool has_base = false;
  if (auto base = sc.raw("base")) {
    c = canonical_scenario(*base);
    has_base = true;
  }
  sc.read("name", c.name);
  if (auto d = sc.raw("duration")) {
    c.duration = parse_value<Slot>("scenario.duration", *d);
  } else if (!has_base) {
    throw std::invalid_argument("config: missing required key scenario.duration");
  }
  sc.read("seed", c.seed);
  sc.read("reps", c.reps);
  if (auto p = sc.raw("policy")) c.policy = parse_policy(*p);
  sc.reject_unknown();

  SectionReader tp(root, "topology");
  if (auto kind = tp.raw("kind")) {
    if (*kind == "explicit") {
      c.topology.kind = TopologySpec::Kind::Explicit;
    } else if (*kind == "random") {
      c.topology.kind = TopologySpec::Kind::Random;
    } else {
      throw std::invalid_argument("config: unknown topology kind '" + *kind + "'");
    }
  }
  if (auto pos = tp.raw("positions")) {
    c.topology.positions = parse_positions(*pos);
    c.topology.kind = TopologySpec::Kind::Explicit;
  }
  tp.read("nodes", c.topology.nodes);
  tp.read("width", c.topology.width);
  tp.read("height", c.topology.height);
  tp.read("radius", c.topology.radius);
  if (auto s = tp.raw("seed")) c.topology.seed = parse_value<std::uint64_t>("topology.seed", *s);
  tp.reject_unknown();
  if (!has_base && c.topology.positions.empty() && c.topology.nodes == 0) {
    throw std::invalid_argument("config: missing required key topology.positions or topology.nodes");
  }
  if (c.topology.nodes > 0 && c.topology.positions.empty()) c.topology.kind = TopologySpec::Kind::Random;

  SectionReader tr(root, "traffic");
  if (auto f = tr.raw("flows")) {
    c.traffic.flows = parse_flows(*f);
    c.traffic.flow_count = 0;
  }
  if (auto n = tr.raw("count")) {
    c.traffic.flow_count = parse_value<std::size_t>("traffic.count", *n);
    if (c.traffic.flow_count > 0) c.traffic.flows.clear();
  }
  if (auto m = tr.raw("mean_interarrival")) {
    c.traffic.mean_interarrival =
        *m == "inf" ? std::numeric_limits<double>::infinity() : parse_value<double>("traffic.mean_interarrival", *m);
  }
  if (auto p = tr.raw("pattern")) c.traffic.pattern = parse_pattern(*p);
  tr.read("start", c.traffic.start);
  if (auto e = tr.raw("end")) c.traffic.end = parse_value<Slot>("traffic.end", *e);
  tr.read("packet_bits", c.traffic.packet_bits);
  tr.reject_unknown();

  SectionReader en(root, "energy");
  en.read("transmit_power", c.energy.transmit_power);
  en.read("receive_power", c.energy.receive_power);
  en.read("idle_power", c.energy.idle_power);
  if (auto r = en.raw("bit_rate")) {
    c.energy.slot_seconds = EnergyModel::slot_for(c.traffic.packet_bits, parse_value<double>("energy.bit_rate", *r));
  }
  en.read("slot_seconds", c.energy.slot_seconds);
  en.read("capacity", c.energy.capacity);
  en.read("recharge", c.energy.recharge_per_slot);
  en.reject_unknown();

  SectionReader co(root, "coding");
  co.read("alpha", c.coding.alpha);
  co.read("pool_capacity", c.coding.pool_capacity);
  co.read("report_period", c.coding.report_period);
  co.read("hold", c.coding.hold);
  co.read("queue_capacity", c.coding.queue_capacity);
  co.reject_unknown();

  SectionReader le(root, "learning");
  le.read("beta", c.learning.beta);
  le.read("gamma", c.learning.gamma);
  le.read("theta_max", c.learning.theta_max);
  le.read("epsilon_start", c.learning.exploration.start);
  le.read("epsilon_end", c.learning.exploration.end);
  le.read("epsilon_horizon", c.learning.exploration.horizon);
  le.read("energy_levels", c.quantizer.energy_levels);
  le.read("degree_levels", c.quantizer.degree_levels);
  le.read("degree_window", c.quantizer.degree_window);
  if (auto t = le.raw("time_unit")) {
    if (*t == "auto") {
      c.auto_time_unit = true;
    } else {
      c.auto_time_unit = false;
      c.learning.time_unit = parse_value<double>("learning.time_unit", *t);
    }
  }
  le.reject_unknown();

  SectionReader out(root, "output");
  out.read("dir", c.out_dir);
  out.reject_unknown();

  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  return parse_config(in);
}

std::vector<std::string> canonical_scenario_names() {
  return {"chain-fig1", "two-way-relay", "bystander-cross", "desk"};
}

ScenarioConfig canonical_scenario(std::string_view name) {
  ScenarioConfig c;
  c.name = std::string(name);
  c.topology.kind = TopologySpec::Kind::Explicit;
  c.topology.radius = 200.0;
  c.traffic.pattern = ArrivalPattern::Periodic;
  c.traffic.mean_interarrival = 20.0;
  c.duration = 40000;
  if (name == "chain-fig1" || name == "bystander-cross") {
    c.topology.positions = fig1_positions(name == "bystander-cross");
    c.traffic.flows = {{0, 1}, {1, 2}};
  } else if (name == "two-way-relay") {
    c.topology.positions = {{-150.0, 0.0}, {0.0, 0.0}, {150.0, 0.0}};
    c.traffic.flows = {{0, 2}, {2, 0}};
  } else if (name == "desk") {
    // 30 nodes at an average degree of about 5.
    c.topology.kind = TopologySpec::Kind::Random;
    c.topology.nodes = 30;
    c.topology.width = 800.0;
    c.topology.height = 800.0;
    c.traffic.pattern = ArrivalPattern::Poisson;
    c.traffic.flow_count = 8;
    c.traffic.mean_interarrival = 20.0;
    c.duration = 40000;
  } else {
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
  }
  return c;
}

std::vector<Flow> random_flows(const Topology& topo, std::size_t count, const TrafficSpec& traffic, Slot last_slot,
                               std::uint64_t seed) {
  std::vector<Flow> flows;
  if (count == 0) return flows;
  const auto n = static_cast<NodeId>(topo.size());
  Rng rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  // Dead-end pairs are redrawn; a bounded number of attempts keeps
  // disconnected layouts from spinning forever.
  const std::size_t max_attempts = 1000 * count;
  for (std::size_t attempt = 0; flows.size() < count && attempt < max_attempts; ++attempt) {
    const NodeId s = pick(rng);
    const NodeId d = pick(rng);
    if (s == d || !greedy_route(topo, s, d)) continue;
    Flow f;
    f.id = static_cast<FlowId>(flows.size());
    f.source = s;
    f.destination = d;
    f.packet_bits = traffic.packet_bits;
    f.mean_interarrival = traffic.mean_interarrival;
    f.start = traffic.start;
    f.end = traffic.end.value_or(last_slot);
    f.pattern = traffic.pattern;
    flows.push_back(f);
  }
  return flows;
}

World materialize(const ScenarioConfig& config, std::uint64_t run_seed) {
  World w;
  if (config.topology.kind == TopologySpec::Kind::Explicit) {
    w.topology = build_topology(config.topology.positions, config.topology.radius);
  } else {
    const std::uint64_t tseed = config.topology.seed.value_or(derive_seed(run_seed, 11));
    w.topology = random_topology(config.topology.nodes, config.topology.width, config.topology.height,
                                 config.topology.radius, tseed);
  }
  const Slot last = config.traffic.end.value_or(config.duration - 1);
  if (!config.traffic.flows.empty()) {
    FlowId id = 0;
    for (const auto& fs : config.traffic.flows) {
      Flow f;
      f.id = id++;
      f.source = fs.source;
      f.destination = fs.destination;
      f.packet_bits = config.traffic.packet_bits;
      f.mean_interarrival = config.traffic.mean_interarrival;
      f.start = config.traffic.start;
      f.end = last;
      f.pattern = config.traffic.pattern;
      w.flows.push_back(f);
    }
  } else {
    w.flows = random_flows(w.topology, config.traffic.flow_count, config.traffic, last, derive_seed(run_seed, 12));
  }
  return w;
}

}  // namespace codesleep
