#include "swiftsarsa/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swiftsarsa {
namespace {

void check(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("env config: " + what);
}

bool is_one_hot_at(const std::vector<std::uint8_t>& bits, int position) {
  int ones = 0;
  for (std::uint8_t b : bits) ones += (b != 0);
  return ones == 1 && bits[static_cast<std::size_t>(position)] != 0;
}

}  // namespace

void EnvConfig::validate() const {
  check(d >= 1 && d <= 16, "d must be in [1, 16]");
  check(m >= 1, "m must be >= 1");
  check(m <= d, "m must be <= d");
  check(n > d, "n must be > d");
  check(m <= n, "m must be <= n");
  check(isi_min >= 1 && isi_min <= isi_max,
        "need 1 <= isi_min <= isi_max");
  check(iti_min >= 1 && iti_min <= iti_max,
        "need 1 <= iti_min <= iti_max");
  check(std::isfinite(reward_magnitude) && reward_magnitude > 0.0,
        "reward_magnitude must be finite and > 0");
  check(mu_min >= 0.0 && mu_min <= mu_init && mu_init <= mu_max &&
            mu_max < 1.0,
        "need 0 <= mu_min <= mu_init <= mu_max < 1");
  check(std::isfinite(walk_std) && walk_std >= 0.0,
        "walk_std must be finite and >= 0");
}

double mu_update(double mu, double noise, double lo, double hi) {
  return std::clamp(mu + noise, lo, hi);
}

std::vector<std::uint8_t> action_decode(std::uint32_t index,
                                        std::uint32_t d) {
  if (d == 0 || d > 31 || index >= (1u << d)) {
    throw std::invalid_argument("action index " + std::to_string(index) +
                                " does not fit " + std::to_string(d) +
                                " bits");
  }
  std::vector<std::uint8_t> bits(d);
  for (std::uint32_t j = 0; j < d; ++j) {
    bits[j] = static_cast<std::uint8_t>((index >> (d - 1 - j)) & 1u);
  }
  return bits;
}

std::uint32_t action_encode(const std::vector<std::uint8_t>& bits) {
  if (bits.empty() || bits.size() > 31) {
    throw std::invalid_argument("action pattern must have 1..31 components");
  }
  std::uint32_t index = 0;
  for (std::uint8_t b : bits) {
    index = (index << 1) | (b != 0 ? 1u : 0u);
  }
  return index;
}

OperantEnv::OperantEnv(const EnvConfig& config, std::uint64_t seed)
    : config_(config), rng_(seed), mu_(config.mu_init),
      mu_for_obs_(config.mu_init) {
  config_.validate();
  cue_countdown_ = rng_.uniform_int(config_.iti_min, config_.iti_max);
  emit_observation(0.0, /*allow_cue=*/false);
}

const Observation& OperantEnv::step(const std::vector<std::uint8_t>& action) {
  if (action.size() != config_.d) {
    throw std::invalid_argument("action has " + std::to_string(action.size()) +
                                " components, expected " +
                                std::to_string(config_.d));
  }
  if (active_cue_ >= 0 && is_one_hot_at(action, active_cue_)) {
    const std::int64_t delay = rng_.uniform_int(config_.isi_min,
                                                config_.isi_max);
    pending_.push_back({t_ + delay, config_.reward_magnitude});
  }
  ++t_;
  double reward = 0.0;
  for (std::size_t i = 0; i < pending_.size();) {
    if (pending_[i].due == t_) {
      reward += pending_[i].magnitude;
      pending_[i] = pending_.back();
      pending_.pop_back();
    } else {
      ++i;
    }
  }
  emit_observation(reward, /*allow_cue=*/true);
  return obs_;
}

void OperantEnv::emit_observation(double reward, bool allow_cue) {
  if (allow_cue) {
    --cue_countdown_;
    if (cue_countdown_ == 0) {
      active_cue_ = static_cast<int>(rng_.below(config_.m));
      cue_countdown_ = rng_.uniform_int(config_.iti_min, config_.iti_max);
      ++trial_count_;
    } else {
      active_cue_ = -1;
    }
  } else {
    active_cue_ = -1;
  }

  std::vector<std::uint32_t> indices;
  if (active_cue_ >= 0) indices.push_back(static_cast<std::uint32_t>(active_cue_));

  // Each of the n - m distractor components fires independently with
  // probability mu; sampling the gaps between firing components draws the
  // same distribution in O(active) instead of O(n).
  if (mu_ > 0.0) {
    const double log_quiet = std::log1p(-mu_);
    std::int64_t idx = static_cast<std::int64_t>(config_.m) - 1;
    const std::int64_t limit = static_cast<std::int64_t>(config_.n);
    while (true) {
      const double u = rng_.uniform_pos();
      idx += 1 + static_cast<std::int64_t>(std::floor(std::log(u) / log_quiet));
      if (idx >= limit) break;
      indices.push_back(static_cast<std::uint32_t>(idx));
    }
  }

  mu_for_obs_ = mu_;
  mu_ = mu_update(mu_, rng_.gaussian(config_.walk_std), config_.mu_min,
                  config_.mu_max);

  obs_.features = SparseFeatures::binary(std::move(indices), config_.n);
  obs_.reward = reward;
  emitted_total_ += reward;
}

}  // namespace swiftsarsa
