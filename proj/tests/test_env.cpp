#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "swiftsarsa/env.hpp"
#include "swiftsarsa/sparse.hpp"

using swiftsarsa::action_decode;
using swiftsarsa::action_encode;
using swiftsarsa::EnvConfig;
using swiftsarsa::mu_update;
using swiftsarsa::Observation;
using swiftsarsa::OperantEnv;

namespace {

using Action = std::vector<std::uint8_t>;

EnvConfig small_config() {
  EnvConfig cfg;
  cfg.n = 40;
  cfg.d = 2;
  cfg.m = 2;
  cfg.isi_min = 4;
  cfg.isi_max = 6;
  cfg.iti_min = 10;
  cfg.iti_max = 14;
  cfg.mu_init = 0.05;
  cfg.walk_std = 0.0;
  return cfg;
}

int cue_of(const Observation& obs, const EnvConfig& cfg) {
  for (const auto& entry : obs.features.entries()) {
    if (entry.index < cfg.m) return static_cast<int>(entry.index);
    break;  // entries are sorted, so cues come first
  }
  return -1;
}

Action matching_action(int cue, const EnvConfig& cfg) {
  Action action(cfg.d, 0);
  if (cue >= 0) action[static_cast<std::size_t>(cue)] = 1;
  return action;
}

}  // namespace

TEST_CASE("config validation rejects each broken constraint") {
  EnvConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());

  cfg.d = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.m = cfg.d + 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.n = cfg.d;  // need room for non-cue components
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.isi_min = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.iti_max = cfg.iti_min - 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.mu_init = cfg.mu_max + 0.01;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.reward_magnitude = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.walk_std = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("distractor rate walk clips at both rails") {
  CHECK(mu_update(0.05, 0.0, 0.01, 0.1) == 0.05);
  CHECK(mu_update(0.0999, 0.0005, 0.01, 0.1) == 0.1);
  CHECK(mu_update(0.0101, -0.0005, 0.01, 0.1) == 0.01);
}

TEST_CASE("action codes map to component patterns and back") {
  CHECK(action_decode(0, 2) == Action{0, 0});
  CHECK(action_decode(2, 2) == Action{1, 0});
  CHECK(action_decode(3, 2) == Action{1, 1});
  for (std::uint32_t d = 1; d <= 4; ++d) {
    for (std::uint32_t k = 0; k < (1u << d); ++k) {
      CHECK(action_encode(action_decode(k, d)) == k);
    }
  }
  CHECK_THROWS_AS(action_decode(4, 2), std::invalid_argument);
}

TEST_CASE("initial observation carries no cue and no reward") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    OperantEnv env(small_config(), seed);
    const Observation& obs = env.current();
    CHECK(obs.reward == 0.0);
    CHECK(cue_of(obs, env.config()) == -1);
    CHECK(env.trial_count() == 0);
  }
}

TEST_CASE("first cue lands inside the inter-trial window") {
  const EnvConfig cfg = small_config();
  std::set<std::int64_t> observed;
  const Action null_action(cfg.d, 0);
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    OperantEnv env(cfg, seed);
    std::int64_t t = 0;
    while (cue_of(env.current(), cfg) < 0) {
      env.step(null_action);
      ++t;
      REQUIRE(t <= cfg.iti_max + 1);
    }
    CHECK(t >= cfg.iti_min);
    CHECK(t <= cfg.iti_max);
    observed.insert(t);
  }
  // Every gap in the inclusive window shows up given enough seeds.
  CHECK(observed.count(cfg.iti_min) == 1);
  CHECK(observed.count(cfg.iti_max) == 1);
  CHECK(observed.size() ==
        static_cast<std::size_t>(cfg.iti_max - cfg.iti_min + 1));
}

TEST_CASE("cue steps present exactly one cue component") {
  const EnvConfig cfg = small_config();
  OperantEnv env(cfg, 101);
  const Action null_action(cfg.d, 0);
  int cue_steps = 0;
  for (int t = 0; t < 2000; ++t) {
    const Observation& obs = env.step(null_action);
    int cues_active = 0;
    for (const auto& entry : obs.features.entries()) {
      if (entry.index < cfg.m) ++cues_active;
      CHECK(entry.value == 1.0);
    }
    CHECK(cues_active <= 1);
    cue_steps += cues_active;
  }
  CHECK(cue_steps > 100);  // ~2000 / 13 trials
}

TEST_CASE("matching the cue pays one reward after the signalled delay") {
  const EnvConfig cfg = small_config();
  OperantEnv env(cfg, 202);
  std::set<std::int64_t> delays;
  int rewards_seen = 0;
  std::int64_t cue_time = 0;
  bool waiting = false;
  for (int t = 0; t < 40000; ++t) {
    const int cue = cue_of(env.current(), cfg);
    const Observation& obs = env.step(matching_action(cue, cfg));
    if (cue >= 0) {
      cue_time = env.t() - 1;  // the step consumed the cue observation
      waiting = true;
    }
    if (obs.reward != 0.0) {
      CHECK(obs.reward == cfg.reward_magnitude);
      REQUIRE(waiting);
      const std::int64_t delay = env.t() - cue_time;
      CHECK(delay >= cfg.isi_min);
      CHECK(delay <= cfg.isi_max);
      delays.insert(delay);
      waiting = false;
      ++rewards_seen;
    }
  }
  // The final trial's payout may still be pending when the loop ends.
  CHECK(rewards_seen <= static_cast<int>(env.trial_count()));
  CHECK(rewards_seen >= static_cast<int>(env.trial_count()) - 2);
  CHECK(rewards_seen > 1000);
  CHECK(env.emitted_reward_total() == rewards_seen * cfg.reward_magnitude);
  CHECK(delays.size() ==
        static_cast<std::size_t>(cfg.isi_max - cfg.isi_min + 1));
}

TEST_CASE("wrong, extra, or null responses earn nothing") {
  const EnvConfig cfg = small_config();
  auto run = [&](auto pick_action) {
    OperantEnv env(cfg, 303);
    for (int t = 0; t < 5000; ++t) {
      const int cue = cue_of(env.current(), cfg);
      const Observation& obs = env.step(pick_action(cue));
      CHECK(obs.reward == 0.0);
    }
    CHECK(env.trial_count() > 100);
  };
  run([&](int) { return Action(cfg.d, 0); });  // idle
  run([&](int) { return Action(cfg.d, 1); });  // every component at once
  run([&](int cue) {                           // the other cue's pattern
    Action action(cfg.d, 0);
    if (cue >= 0) action[static_cast<std::size_t>(1 - cue)] = 1;
    return action;
  });
}

TEST_CASE("rewards stack when trials overlap") {
  EnvConfig cfg = small_config();
  cfg.iti_min = 1;
  cfg.iti_max = 2;
  cfg.isi_min = 4;
  cfg.isi_max = 6;
  OperantEnv env(cfg, 404);
  double banked = 0.0;
  bool stacked = false;
  for (int t = 0; t < 20000; ++t) {
    const int cue = cue_of(env.current(), cfg);
    const Observation& obs = env.step(matching_action(cue, cfg));
    banked += obs.reward;
    if (obs.reward > cfg.reward_magnitude) stacked = true;
  }
  CHECK(banked == env.emitted_reward_total());
  // With cue gaps of 1-2 steps and payout delays spanning 4-6, two trials'
  // payouts eventually land on the same step.
  CHECK(stacked);
}

TEST_CASE("distractor rate stays inside its band and tracks frequency") {
  EnvConfig cfg = small_config();
  cfg.n = 400;
  cfg.walk_std = 1e-3;
  OperantEnv env(cfg, 505);
  const Action null_action(cfg.d, 0);
  for (int t = 0; t < 20000; ++t) {
    env.step(null_action);
    CHECK(env.mu() >= cfg.mu_min);
    CHECK(env.mu() <= cfg.mu_max);
  }

  // With the walk frozen, the observed per-component firing frequency
  // concentrates on the configured rate.
  cfg.walk_std = 0.0;
  cfg.mu_init = 0.05;
  OperantEnv frozen(cfg, 606);
  std::uint64_t active = 0;
  const std::uint64_t steps = 30000;
  const auto slots = static_cast<std::uint64_t>(cfg.n - cfg.m);
  for (std::uint64_t t = 0; t < steps; ++t) {
    const Observation& obs = frozen.step(null_action);
    for (const auto& entry : obs.features.entries()) {
      if (entry.index >= cfg.m) ++active;
    }
  }
  const double freq =
      static_cast<double>(active) / static_cast<double>(steps * slots);
  CHECK(freq == doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("identical seeds replay the identical episode") {
  const EnvConfig cfg = small_config();
  OperantEnv a(cfg, 707);
  OperantEnv b(cfg, 707);
  const Action null_action(cfg.d, 0);
  for (int t = 0; t < 3000; ++t) {
    const Observation& oa = a.step(null_action);
    const Observation& ob = b.step(null_action);
    REQUIRE(oa.reward == ob.reward);
    REQUIRE(oa.features.entries().size() == ob.features.entries().size());
    for (std::size_t i = 0; i < oa.features.entries().size(); ++i) {
      REQUIRE(oa.features.entries()[i].index == ob.features.entries()[i].index);
    }
    REQUIRE(a.mu() == b.mu());
  }
}

TEST_CASE("action width must match the configured components") {
  OperantEnv env(small_config(), 808);
  const Action wrong(3, 0);
  CHECK_THROWS_AS(env.step(wrong), std::invalid_argument);
}

TEST_CASE("the reported rate stays within rails under a live walk") {
  EnvConfig cfg = small_config();
  cfg.n = 400;
  cfg.walk_std = 5e-3;
  OperantEnv env(cfg, 909);
  const Action null_action(cfg.d, 0);
  for (int t = 0; t < 200; ++t) {
    env.step(null_action);
    CHECK(env.mu() >= cfg.mu_min);
    CHECK(env.mu() <= cfg.mu_max);
  }
}
