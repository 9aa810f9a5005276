#include "swiftsarsa/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace swiftsarsa {
namespace {

// Stream labels so the environment and the learner never share draws even
// though they share one run seed.
constexpr std::uint64_t kEnvStream = 0x656e76;    // "env"
constexpr std::uint64_t kAgentStream = 0x61676e;  // "agn"

void check(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("run config: " + what);
}

std::string sanitize_field(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

double parse_double_field(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("csv line " + std::to_string(line_no) +
                                ": bad numeric field '" + field + "'");
  }
  return value;
}

std::uint64_t parse_u64_field(const std::string& field, std::size_t line_no) {
  std::uint64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("csv line " + std::to_string(line_no) +
                                ": bad seed field '" + field + "'");
  }
  return value;
}

}  // namespace

std::int64_t RunConfig::effective_record_interval() const {
  if (record_interval > 0) return record_interval;
  return std::max<std::int64_t>(1, steps / 100);
}

void RunConfig::validate() const {
  env.validate();
  agent.validate();
  check(steps >= 1, "steps must be >= 1");
  check(record_interval >= 0, "record_interval must be >= 0");
}

RunResult run_lifetime(const RunConfig& config, const StepTraceSink& sink) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  OperantEnv env(config.env, mix_seed(config.seed, kEnvStream));
  Learner learner(config.env.num_discrete_actions(), config.feature_count(),
                  config.agent, mix_seed(config.seed, kAgentStream));

  const std::int64_t total_steps = config.steps;
  const std::int64_t every = config.effective_record_interval();
  const bool extend =
      config.append_reward_feature || config.bias_feature;

  RunResult out;
  out.steps = total_steps;
  double total = 0.0;
  double rate_sum = 0.0;
  double live_sum = 0.0;

  std::vector<SparseFeatures::Entry> scratch;
  for (std::int64_t t = 0; t < total_steps; ++t) {
    const Observation& obs = env.current();
    StepDiagnostics diag;
    if (!extend) {
      diag = learner.step(obs.features, obs.reward);
    } else {
      scratch.assign(obs.features.entries().begin(),
                     obs.features.entries().end());
      std::uint32_t idx = config.env.n;
      if (config.append_reward_feature) {
        if (obs.reward != 0.0) scratch.push_back({idx, obs.reward});
        ++idx;
      }
      if (config.bias_feature) scratch.push_back({idx, 1.0});
      const SparseFeatures phi(scratch, config.feature_count());
      diag = learner.step(phi, obs.reward);
    }

    total += obs.reward;
    rate_sum += diag.effective_rate;
    live_sum += static_cast<double>(diag.active_trace_count);
    out.summary.decay_trigger_count += diag.decay_triggered ? 1 : 0;
    out.summary.peak_active_traces =
        std::max(out.summary.peak_active_traces, diag.active_trace_count);

    if (sink) {
      sink({t, env.current_cue(), diag.chosen_action, obs.reward, env.mu(),
            diag.td_error, diag.effective_rate});
    }
    const std::int64_t done = t + 1;
    if (done % every == 0 || done == total_steps) {
      if (out.curve.empty() || out.curve.back().step != done) {
        out.curve.push_back({done, total / static_cast<double>(done)});
      }
    }
    if (done < total_steps) {
      env.step(action_decode(static_cast<std::uint32_t>(diag.chosen_action),
                             config.env.d));
    }
  }

  out.total_reward = total;
  out.lifetime_reward = total / static_cast<double>(total_steps);
  out.summary.mean_effective_rate =
      rate_sum / static_cast<double>(total_steps);
  out.summary.mean_active_traces = live_sum / static_cast<double>(total_steps);
  out.summary.final_mu = env.mu();
  out.summary.trial_count = env.trial_count();
  out.summary.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

double oracle_policy_run(const EnvConfig& env_config, std::int64_t steps,
                         std::uint64_t seed) {
  env_config.validate();
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  OperantEnv env(env_config, mix_seed(seed, kEnvStream));
  const std::vector<std::uint8_t> null_action(env_config.d, 0);
  double total = 0.0;
  for (std::int64_t t = 0; t < steps; ++t) {
    total += env.current().reward;
    if (t + 1 == steps) break;
    const int cue = env.current_cue();
    if (cue >= 0) {
      std::vector<std::uint8_t> action(env_config.d, 0);
      action[static_cast<std::size_t>(cue)] = 1;
      env.step(action);
    } else {
      env.step(null_action);
    }
  }
  return total / static_cast<double>(steps);
}

double random_policy_run(const EnvConfig& env_config, std::int64_t steps,
                         std::uint64_t seed) {
  env_config.validate();
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  OperantEnv env(env_config, mix_seed(seed, kEnvStream));
  Rng rng(mix_seed(seed, kAgentStream));
  double total = 0.0;
  for (std::int64_t t = 0; t < steps; ++t) {
    total += env.current().reward;
    if (t + 1 == steps) break;
    const std::uint32_t index =
        static_cast<std::uint32_t>(rng.below(env_config.num_discrete_actions()));
    env.step(action_decode(index, env_config.d));
  }
  return total / static_cast<double>(steps);
}

void SweepGrid::validate() const {
  if (meta_step_sizes.empty() || init_step_sizes.empty() || seeds.empty()) {
    throw std::invalid_argument("sweep grid: every axis needs at least one value");
  }
  for (double v : meta_step_sizes) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("sweep grid: meta step sizes must be finite and >= 0");
    }
  }
  for (double v : init_step_sizes) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument("sweep grid: init step sizes must be finite and > 0");
    }
  }
  base.validate();
}

SweepTable run_sweep(const SweepGrid& grid, unsigned parallelism,
                     const std::function<void(std::size_t, std::size_t)>&
                         progress) {
  grid.validate();
  const std::size_t num_alphas = grid.init_step_sizes.size();
  const std::size_t num_seeds = grid.seeds.size();
  const std::size_t total = grid.cell_count();
  SweepTable rows(total);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> finished{0};
  auto worker = [&] {
    while (true) {
      const std::size_t cell = next.fetch_add(1);
      if (cell >= total) return;
      const std::size_t ti = cell / (num_alphas * num_seeds);
      const std::size_t ai = (cell / num_seeds) % num_alphas;
      const std::size_t si = cell % num_seeds;

      SweepRow row;
      row.meta_step_size = grid.meta_step_sizes[ti];
      row.init_step_size = grid.init_step_sizes[ai];
      row.seed = grid.seeds[si];

      RunConfig cfg = grid.base;
      cfg.agent.meta_step_size = row.meta_step_size;
      cfg.agent.init_step_size = row.init_step_size;
      cfg.seed = derive_seed(grid.base.seed, ti, ai, si);
      try {
        row.lifetime_reward = run_lifetime(cfg).lifetime_reward;
      } catch (const std::exception& e) {
        row.lifetime_reward = std::numeric_limits<double>::quiet_NaN();
        row.error = sanitize_field(e.what());
      }
      rows[cell] = std::move(row);
      const std::size_t done = finished.fetch_add(1) + 1;
      if (progress) progress(done, total);  // may fire from several threads
    }
  };

  unsigned workers = parallelism != 0 ? parallelism
                                      : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers,
                                            static_cast<unsigned>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

std::string csv_to_string(const SweepTable& table) {
  std::string out = "theta,alpha_init,seed,lifetime_reward,error\n";
  for (const SweepRow& row : table) {
    out += format_double(row.meta_step_size);
    out += ',';
    out += format_double(row.init_step_size);
    out += ',';
    out += std::to_string(row.seed);
    out += ',';
    if (!std::isnan(row.lifetime_reward)) {
      out += format_double(row.lifetime_reward);
    }
    out += ',';
    out += sanitize_field(row.error);
    out += '\n';
  }
  return out;
}

void write_csv(const SweepTable& table, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << csv_to_string(table);
  if (!file) throw std::runtime_error("write to " + path + " failed");
}

SweepTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "theta,alpha_init,seed,lifetime_reward,error") {
    throw std::invalid_argument(
        "csv: expected header 'theta,alpha_init,seed,lifetime_reward,error'");
  }
  SweepTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (fields.size() != 5) {
      throw std::invalid_argument("csv line " + std::to_string(line_no) +
                                  ": expected 5 fields, got " +
                                  std::to_string(fields.size()));
    }
    SweepRow row;
    row.meta_step_size = parse_double_field(fields[0], line_no);
    row.init_step_size = parse_double_field(fields[1], line_no);
    row.seed = parse_u64_field(fields[2], line_no);
    row.lifetime_reward =
        fields[3].empty() ? std::numeric_limits<double>::quiet_NaN()
                          : parse_double_field(fields[3], line_no);
    row.error = fields[4];
    table.push_back(std::move(row));
  }
  return table;
}

SweepTable read_csv(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_csv(buffer.str());
}

bool sweep_tables_equal(const SweepTable& a, const SweepTable& b) {
  if (a.size() != b.size()) return false;
  auto same = [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same(a[i].meta_step_size, b[i].meta_step_size) ||
        !same(a[i].init_step_size, b[i].init_step_size) ||
        a[i].seed != b[i].seed ||
        !same(a[i].lifetime_reward, b[i].lifetime_reward) ||
        a[i].error != b[i].error) {
      return false;
    }
  }
  return true;
}

}  // namespace swiftsarsa
