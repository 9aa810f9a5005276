#include "swiftsarsa/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace swiftsarsa {
namespace {

const std::vector<std::string>& key_registry() {
  static const std::vector<std::string> keys = {
      "env.n",
      "env.d",
      "env.m",
      "env.isi_min",
      "env.isi_max",
      "env.iti_min",
      "env.iti_max",
      "env.reward_magnitude",
      "env.mu_init",
      "env.mu_min",
      "env.mu_max",
      "env.walk_std",
      "agent.theta",
      "agent.eta",
      "agent.eta_min",
      "agent.alpha_init",
      "agent.gamma",
      "agent.lambda",
      "agent.decay_rate",
      "agent.prune_threshold",
      "policy.kind",
      "policy.temperature",
      "policy.explore_prob",
      "run.steps",
      "run.seed",
      "run.record_interval",
      "run.append_reward_feature",
      "run.bias_feature",
      "sweep.theta",
      "sweep.alpha_init",
      "sweep.seeds",
  };
  return keys;
}

bool known_key(const std::string& key) {
  for (const std::string& k : key_registry()) {
    if (k == key) return true;
  }
  return false;
}

[[noreturn]] void reject_unknown(const std::string& key, std::size_t line) {
  std::string message = "unknown config key '" + key + "'";
  if (line > 0) message += " at line " + std::to_string(line);
  message += "; valid keys are:";
  for (const std::string& k : key_registry()) message += "\n  " + k;
  throw std::invalid_argument(message);
}

std::string trim(const std::string& text) {
  const std::size_t first = text.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const std::size_t last = text.find_last_not_of(" \t");
  return text.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const ConfigEntry& entry,
                            const std::string& expected) {
  std::string message = "config key '" + key + "'";
  if (entry.line > 0) message += " (line " + std::to_string(entry.line) + ")";
  message += ": cannot parse '" + entry.value + "' as " + expected;
  throw std::invalid_argument(message);
}

double parse_double(const std::string& key, const ConfigEntry& entry,
                    const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  auto [ptr, ec] = std::from_chars(begin, begin + text.size(), value);
  if (ec != std::errc() || ptr != begin + text.size()) {
    bad_value(key, entry, "a number");
  }
  return value;
}

template <typename Int>
Int parse_int(const std::string& key, const ConfigEntry& entry,
              const std::string& text, const char* kind) {
  Int value = 0;
  const char* begin = text.data();
  auto [ptr, ec] = std::from_chars(begin, begin + text.size(), value);
  if (ec != std::errc() || ptr != begin + text.size()) {
    bad_value(key, entry, kind);
  }
  return value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::istringstream in(text);
  std::string item;
  while (in >> item) items.push_back(item);
  return items;
}

// Pulls typed values out of the map, tracking which keys were consumed.
struct Reader {
  const ConfigMap& config;

  const ConfigEntry* find(const std::string& key) const {
    const auto it = config.find(key);
    return it == config.end() ? nullptr : &it->second;
  }
  void get(const std::string& key, double& target) const {
    if (const ConfigEntry* e = find(key)) {
      target = parse_double(key, *e, e->value);
    }
  }
  void get(const std::string& key, std::uint32_t& target) const {
    if (const ConfigEntry* e = find(key)) {
      target = parse_int<std::uint32_t>(key, *e, e->value,
                                        "a non-negative integer");
    }
  }
  void get(const std::string& key, std::int64_t& target) const {
    if (const ConfigEntry* e = find(key)) {
      target = parse_int<std::int64_t>(key, *e, e->value, "an integer");
    }
  }
  void get(const std::string& key, std::uint64_t& target) const {
    if (const ConfigEntry* e = find(key)) {
      target = parse_int<std::uint64_t>(key, *e, e->value,
                                        "a non-negative integer");
    }
  }
  void get(const std::string& key, bool& target) const {
    if (const ConfigEntry* e = find(key)) {
      if (e->value == "true") {
        target = true;
      } else if (e->value == "false") {
        target = false;
      } else {
        bad_value(key, *e, "true or false");
      }
    }
  }
  void get(const std::string& key, std::vector<double>& target) const {
    if (const ConfigEntry* e = find(key)) {
      target.clear();
      for (const std::string& item : split_list(e->value)) {
        target.push_back(parse_double(key, *e, item));
      }
      if (target.empty()) bad_value(key, *e, "a non-empty list of numbers");
    }
  }
  void get(const std::string& key, std::vector<std::uint64_t>& target) const {
    if (const ConfigEntry* e = find(key)) {
      target.clear();
      for (const std::string& item : split_list(e->value)) {
        target.push_back(parse_int<std::uint64_t>(key, *e, item,
                                                  "a non-negative integer"));
      }
      if (target.empty()) bad_value(key, *e, "a non-empty list of integers");
    }
  }
};

void insert_pair(ConfigMap& config, const std::string& key,
                 const std::string& value, std::size_t line) {
  if (!known_key(key)) reject_unknown(key, line);
  const auto [it, inserted] = config.insert({key, {value, line}});
  if (!inserted) {
    // Later assignments win; command-line overrides replace file values.
    it->second = {value, line};
  }
}

}  // namespace

ConfigMap load_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("cannot open config file " + path);
  ConfigMap config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + " line " + std::to_string(line_no) +
                                  ": expected 'key = value', got '" +
                                  stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument(path + " line " + std::to_string(line_no) +
                                  ": empty key");
    }
    insert_pair(config, key, value, line_no);
  }
  return config;
}

void apply_overrides(ConfigMap& config,
                     const std::vector<std::string>& overrides) {
  for (const std::string& text : overrides) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("override '" + text +
                                  "' must look like key=value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    insert_pair(config, key, value, 0);
  }
}

ResolvedConfig resolve_config(const ConfigMap& config) {
  Reader reader{config};
  ResolvedConfig out;
  RunConfig& run = out.run;

  reader.get("env.n", run.env.n);
  reader.get("env.d", run.env.d);
  reader.get("env.m", run.env.m);
  reader.get("env.isi_min", run.env.isi_min);
  reader.get("env.isi_max", run.env.isi_max);
  reader.get("env.iti_min", run.env.iti_min);
  reader.get("env.iti_max", run.env.iti_max);
  reader.get("env.reward_magnitude", run.env.reward_magnitude);
  reader.get("env.mu_init", run.env.mu_init);
  reader.get("env.mu_min", run.env.mu_min);
  reader.get("env.mu_max", run.env.mu_max);
  reader.get("env.walk_std", run.env.walk_std);

  reader.get("agent.theta", run.agent.meta_step_size);
  reader.get("agent.eta", run.agent.rate_bound);
  reader.get("agent.eta_min", run.agent.step_size_floor);
  reader.get("agent.alpha_init", run.agent.init_step_size);
  reader.get("agent.gamma", run.agent.discount);
  reader.get("agent.lambda", run.agent.trace_decay);
  reader.get("agent.decay_rate", run.agent.decay_rate);
  reader.get("agent.prune_threshold", run.agent.prune_threshold);

  if (const ConfigEntry* e = reader.find("policy.kind")) {
    if (e->value == "softmax") {
      run.agent.policy = PolicyKind::kSoftmax;
    } else if (e->value == "egreedy") {
      run.agent.policy = PolicyKind::kEpsilonGreedy;
    } else {
      bad_value("policy.kind", *e, "softmax or egreedy");
    }
  }
  reader.get("policy.temperature", run.agent.temperature);
  reader.get("policy.explore_prob", run.agent.explore_prob);

  reader.get("run.steps", run.steps);
  reader.get("run.seed", run.seed);
  reader.get("run.record_interval", run.record_interval);
  reader.get("run.append_reward_feature", run.append_reward_feature);
  reader.get("run.bias_feature", run.bias_feature);

  run.validate();

  SweepGrid& sweep = out.sweep;
  sweep.meta_step_sizes = {run.agent.meta_step_size};
  sweep.init_step_sizes = {run.agent.init_step_size};
  sweep.seeds = {run.seed};
  reader.get("sweep.theta", sweep.meta_step_sizes);
  reader.get("sweep.alpha_init", sweep.init_step_sizes);
  reader.get("sweep.seeds", sweep.seeds);
  sweep.base = run;
  // Keep the base itself constructible regardless of which axis values the
  // file chose.
  sweep.base.agent.meta_step_size = sweep.meta_step_sizes.front();
  sweep.base.agent.init_step_size = sweep.init_step_sizes.front();
  sweep.validate();
  return out;
}

std::vector<std::string> valid_config_keys() { return key_registry(); }

std::vector<std::pair<std::string, std::string>> config_key_values(
    const ResolvedConfig& resolved) {
  const RunConfig& run = resolved.run;
  auto join_doubles = [](const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
      if (!out.empty()) out += ' ';
      out += format_double(v);
    }
    return out;
  };
  auto join_u64s = [](const std::vector<std::uint64_t>& values) {
    std::string out;
    for (std::uint64_t v : values) {
      if (!out.empty()) out += ' ';
      out += std::to_string(v);
    }
    return out;
  };
  return {
      {"env.n", std::to_string(run.env.n)},
      {"env.d", std::to_string(run.env.d)},
      {"env.m", std::to_string(run.env.m)},
      {"env.isi_min", std::to_string(run.env.isi_min)},
      {"env.isi_max", std::to_string(run.env.isi_max)},
      {"env.iti_min", std::to_string(run.env.iti_min)},
      {"env.iti_max", std::to_string(run.env.iti_max)},
      {"env.reward_magnitude", format_double(run.env.reward_magnitude)},
      {"env.mu_init", format_double(run.env.mu_init)},
      {"env.mu_min", format_double(run.env.mu_min)},
      {"env.mu_max", format_double(run.env.mu_max)},
      {"env.walk_std", format_double(run.env.walk_std)},
      {"agent.theta", format_double(run.agent.meta_step_size)},
      {"agent.eta", format_double(run.agent.rate_bound)},
      {"agent.eta_min", format_double(run.agent.step_size_floor)},
      {"agent.alpha_init", format_double(run.agent.init_step_size)},
      {"agent.gamma", format_double(run.agent.discount)},
      {"agent.lambda", format_double(run.agent.trace_decay)},
      {"agent.decay_rate", format_double(run.agent.decay_rate)},
      {"agent.prune_threshold", format_double(run.agent.prune_threshold)},
      {"policy.kind", run.agent.policy == PolicyKind::kSoftmax ? "softmax"
                                                               : "egreedy"},
      {"policy.temperature", format_double(run.agent.temperature)},
      {"policy.explore_prob", format_double(run.agent.explore_prob)},
      {"run.steps", std::to_string(run.steps)},
      {"run.seed", std::to_string(run.seed)},
      {"run.record_interval", std::to_string(run.record_interval)},
      {"run.append_reward_feature",
       run.append_reward_feature ? "true" : "false"},
      {"run.bias_feature", run.bias_feature ? "true" : "false"},
      {"sweep.theta", join_doubles(resolved.sweep.meta_step_sizes)},
      {"sweep.alpha_init", join_doubles(resolved.sweep.init_step_sizes)},
      {"sweep.seeds", join_u64s(resolved.sweep.seeds)},
  };
}

}  // namespace swiftsarsa
