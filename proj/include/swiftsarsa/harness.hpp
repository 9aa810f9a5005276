#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swiftsarsa/env.hpp"
#include "swiftsarsa/learner.hpp"

namespace swiftsarsa {

// One lifetime: a learner coupled to an operant stream for a fixed number of
// steps, scored by average reward per step.
struct RunConfig {
  EnvConfig env;
  Hyperparams agent;
  std::int64_t steps = 300000;
  std::uint64_t seed = 0;
  std::int64_t record_interval = 0;   // 0 -> steps / 100, at least 1
  bool append_reward_feature = false; // expose last reward as an extra feature
  bool bias_feature = false;          // always-on trailing feature

  std::uint32_t feature_count() const {
    return env.n + (append_reward_feature ? 1u : 0u) + (bias_feature ? 1u : 0u);
  }
  std::int64_t effective_record_interval() const;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

struct RunSummary {
  double mean_effective_rate = 0.0;
  std::int64_t decay_trigger_count = 0;
  double mean_active_traces = 0.0;
  std::size_t peak_active_traces = 0;
  double final_mu = 0.0;
  std::int64_t trial_count = 0;
  double seconds = 0.0;
};

struct CurvePoint {
  std::int64_t step;
  double average_reward;  // cumulative reward / step
};

struct RunResult {
  double lifetime_reward = 0.0;  // total_reward / steps
  double total_reward = 0.0;
  std::int64_t steps = 0;
  std::vector<CurvePoint> curve;
  RunSummary summary;
};

// Per-step hook for debugging traces (CLI --trace).
struct StepTraceRow {
  std::int64_t t;
  int cue;  // -1 when none
  int action;
  double reward;
  double mu;
  double td_error;
  double effective_rate;
};
using StepTraceSink = std::function<void(const StepTraceRow&)>;

RunResult run_lifetime(const RunConfig& config,
                       const StepTraceSink& sink = nullptr);

/// Average reward of the hard-wired optimal responder (one-hot action on
/// every cue, null action otherwise) on the same stream seeding as
/// run_lifetime. The learner's ceiling for a given environment.
double oracle_policy_run(const EnvConfig& env, std::int64_t steps,
                         std::uint64_t seed);

/// Average reward of a uniformly random action sequence; the floor any
/// learner should beat.
double random_policy_run(const EnvConfig& env, std::int64_t steps,
                         std::uint64_t seed);

// Grid sweep over (meta step size, initial step size, seed).
struct SweepGrid {
  std::vector<double> meta_step_sizes;
  std::vector<double> init_step_sizes;
  std::vector<std::uint64_t> seeds;
  RunConfig base;

  void validate() const;
  std::size_t cell_count() const {
    return meta_step_sizes.size() * init_step_sizes.size() * seeds.size();
  }
};

struct SweepRow {
  double meta_step_size = 0.0;
  double init_step_size = 0.0;
  std::uint64_t seed = 0;
  double lifetime_reward = 0.0;  // NaN when the cell errored
  std::string error;             // empty when the cell ran clean
};
using SweepTable = std::vector<SweepRow>;

/// Runs every grid cell; each cell draws an independent seed derived from
/// (base seed, axis indices, seed value), so results do not depend on
/// parallelism or on which other cells are present. A cell that throws is
/// recorded with its error message instead of aborting the sweep.
/// parallelism 0 means hardware concurrency.
SweepTable run_sweep(const SweepGrid& grid, unsigned parallelism = 0,
                     const std::function<void(std::size_t, std::size_t)>&
                         progress = nullptr);

// CSV with header `theta,alpha_init,seed,lifetime_reward,error`. Doubles are
// rendered shortest-round-trip so read_csv(write_csv(t)) == t exactly.
std::string csv_to_string(const SweepTable& table);
void write_csv(const SweepTable& table, const std::string& path);
SweepTable read_csv(const std::string& path);
SweepTable parse_csv(const std::string& text);
bool sweep_tables_equal(const SweepTable& a, const SweepTable& b);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace swiftsarsa
