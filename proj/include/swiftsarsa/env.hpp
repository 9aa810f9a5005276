#pragma once

#include <cstdint>
#include <vector>

#include "swiftsarsa/rng.hpp"
#include "swiftsarsa/sparse.hpp"

namespace swiftsarsa {

// Operant conditioning stream: n binary observation components, the first m
// of which are cue lines (exactly one fires every iti_min..iti_max steps,
// all bounds inclusive) while the remaining n - m flicker independently at a
// slowly drifting rate mu. Emitting the action pattern paired with cue i
// while that cue is on yields reward isi_min..isi_max steps later.
struct EnvConfig {
  std::uint32_t n = 30000;  // observation components
  std::uint32_t d = 2;      // action components; 2^d discrete actions
  std::uint32_t m = 2;      // cue components (and rewarding action patterns)
  std::int64_t isi_min = 4;
  std::int64_t isi_max = 6;
  std::int64_t iti_min = 50;
  std::int64_t iti_max = 70;
  double reward_magnitude = 1.0;
  double mu_init = 0.05;
  double mu_min = 0.01;
  double mu_max = 0.1;
  double walk_std = 1e-4;

  std::uint32_t num_discrete_actions() const { return 1u << d; }

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

struct Observation {
  SparseFeatures features;
  double reward = 0.0;
};

/// clip(mu + noise, lo, hi).
double mu_update(double mu, double noise, double lo, double hi);

/// Discrete action index -> d-component bit pattern. Component j carries
/// bit (d - 1 - j), so index 2 with d = 2 is (1, 0).
std::vector<std::uint8_t> action_decode(std::uint32_t index, std::uint32_t d);
std::uint32_t action_encode(const std::vector<std::uint8_t>& bits);

class OperantEnv {
 public:
  /// Seeds the stream and emits the first observation (never cued; the
  /// first cue lands iti_min..iti_max steps later).
  OperantEnv(const EnvConfig& config, std::uint64_t seed);

  const Observation& current() const { return obs_; }

  /// Pairs `action` with the current observation (a one-hot match on an
  /// active cue schedules a reward), then advances one step and returns the
  /// new observation.
  ///
  /// Per-step draw order is fixed: reward delay if earned, then cue index
  /// and next cue gap if due, then distractor gaps, then the rate-walk
  /// noise sample.
  const Observation& step(const std::vector<std::uint8_t>& action);

  const EnvConfig& config() const { return config_; }
  std::int64_t t() const { return t_; }
  int current_cue() const { return active_cue_; }  // -1 when none
  double mu() const { return mu_for_obs_; }
  double emitted_reward_total() const { return emitted_total_; }
  std::int64_t trial_count() const { return trial_count_; }
  std::size_t pending_reward_count() const { return pending_.size(); }

 private:
  struct Pending {
    std::int64_t due;
    double magnitude;
  };

  void emit_observation(double reward, bool allow_cue);

  EnvConfig config_;
  Rng rng_;
  std::int64_t t_ = 0;
  std::int64_t cue_countdown_ = 0;
  int active_cue_ = -1;
  double mu_;           // rate used for the *next* observation
  double mu_for_obs_;   // rate the current observation was drawn with
  std::vector<Pending> pending_;
  Observation obs_;
  double emitted_total_ = 0.0;
  std::int64_t trial_count_ = 0;
};

}  // namespace swiftsarsa
