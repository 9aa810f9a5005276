#include "swiftsarsa/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "swiftsarsa/env.hpp"
#include "swiftsarsa/harness.hpp"
#include "swiftsarsa/learner.hpp"

namespace swiftsarsa {
namespace {

SparseFeatures random_binary_features(Rng& rng, std::uint32_t n,
                                      double density) {
  std::vector<std::uint32_t> indices;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (rng.bernoulli(density)) indices.push_back(i);
  }
  return SparseFeatures::binary(std::move(indices), n);
}

bool close_rel(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a),
                                                std::abs(b)});
}

}  // namespace

CheckResult check_rate_bound_fuzz(std::uint64_t seed, std::int64_t steps) {
  CheckResult result{"rate-bound-fuzz", true, ""};
  Rng fuzz(seed);
  constexpr double kTol = 1e-12;

  std::int64_t done = 0;
  double worst_gap = 0.0;
  double worst_excess = 0.0;
  while (done < steps) {
    const std::uint32_t n =
        static_cast<std::uint32_t>(fuzz.uniform_int(8, 500));
    const std::uint32_t actions =
        static_cast<std::uint32_t>(fuzz.uniform_int(1, 16));
    Hyperparams hp;
    hp.meta_step_size = std::vector<double>{0.0, 1e-3, 1e-2,
                                            1e-1}[fuzz.below(4)];
    hp.rate_bound = std::vector<double>{0.05, 0.1, 0.5, 1.0}[fuzz.below(4)];
    hp.step_size_floor = 1e-8;
    hp.init_step_size = 1e-4;
    hp.discount = fuzz.uniform() * 0.99;
    hp.trace_decay = fuzz.uniform();
    hp.decay_rate = fuzz.bernoulli(0.5) ? 1.0 : 0.999;
    hp.policy = fuzz.bernoulli(0.5) ? PolicyKind::kSoftmax
                                    : PolicyKind::kEpsilonGreedy;
    Learner learner(actions, n, hp, fuzz.next_u64());

    // Scatter the step sizes across their whole legal range so both the
    // scaled and unscaled branches of the update get exercised.
    for (std::uint32_t a = 0; a < actions; ++a) {
      auto& slab = learner.mutable_table().slab(a);
      for (std::uint32_t i = 0; i < n; ++i) {
        slab.alpha[i] = std::exp(fuzz.uniform() * (std::log(hp.rate_bound) -
                                                   std::log(1e-8)) +
                                 std::log(1e-8));
      }
    }

    const std::int64_t burst = std::min<std::int64_t>(steps - done, 250);
    for (std::int64_t t = 0; t < burst; ++t) {
      const double density = 0.002 + fuzz.uniform() * 0.2;
      const SparseFeatures phi = random_binary_features(fuzz, n, density);
      const double reward = fuzz.bernoulli(0.1) ? fuzz.uniform() : 0.0;
      const StepDiagnostics diag = learner.step(phi, reward);

      double traced_mass = 0.0;
      const auto& slab = learner.table().slab(
          static_cast<std::uint32_t>(diag.chosen_action));
      for (const auto& e : phi.entries()) {
        const std::uint32_t slot = slab.position[e.index];
        if (slot != PerFeatureTable::kNotLive) {
          traced_mass += slab.z_delta[slot] * e.value;
        }
      }
      const double expected = phi.empty()
                                  ? 0.0
                                  : std::min(diag.tau, hp.rate_bound);
      worst_gap = std::max(worst_gap, std::abs(traced_mass - expected));
      worst_excess =
          std::max(worst_excess, traced_mass - hp.rate_bound);
      if (std::abs(traced_mass - expected) > kTol ||
          traced_mass > hp.rate_bound + kTol ||
          std::abs(diag.effective_rate - expected) > kTol) {
        result.passed = false;
        std::ostringstream msg;
        msg << "step " << done + t << ": traced mass " << traced_mass
            << " vs min(tau, eta) " << expected << " (eta "
            << hp.rate_bound << ")";
        result.detail = msg.str();
        return result;
      }
    }
    done += burst;
  }
  std::ostringstream msg;
  msg << steps << " steps; worst |mass - min(tau, eta)| " << worst_gap
      << "; worst mass - eta " << worst_excess;
  result.detail = msg.str();
  return result;
}

CheckResult check_sparse_dense_equivalence(std::uint64_t seed,
                                           std::int64_t steps,
                                           double rel_tol) {
  CheckResult result{"sparse-dense-equivalence", true, ""};

  EnvConfig env_config;
  env_config.n = 200;
  env_config.d = 4;
  env_config.m = 4;
  env_config.iti_min = 20;
  env_config.iti_max = 40;
  Hyperparams hp;
  hp.meta_step_size = 1e-2;
  hp.rate_bound = 0.1;
  hp.step_size_floor = 1e-8;
  hp.init_step_size = 5e-3;  // high enough that the rate bound engages
  hp.decay_rate = 0.999;

  const std::uint32_t actions = env_config.num_discrete_actions();
  OperantEnv env(env_config, mix_seed(seed, 1));
  Learner sparse(actions, env_config.n, hp, mix_seed(seed, 2));
  DenseReferenceLearner dense(actions, env_config.n, hp, mix_seed(seed, 2));

  for (std::int64_t t = 0; t < steps; ++t) {
    const Observation& obs = env.current();
    const StepDiagnostics a = sparse.step(obs.features, obs.reward);
    const StepDiagnostics b = dense.step(obs.features, obs.reward);
    if (a.chosen_action != b.chosen_action) {
      result.passed = false;
      result.detail = "action choice diverged at step " + std::to_string(t);
      return result;
    }
    if (t + 1 < steps) {
      env.step(action_decode(static_cast<std::uint32_t>(a.chosen_action),
                             env_config.d));
    }
  }

  double worst_w = 0.0;
  double worst_alpha = 0.0;
  for (std::uint32_t a = 0; a < actions; ++a) {
    const auto w = sparse.table().weights(a);
    const auto alpha = sparse.table().alphas(a);
    for (std::uint32_t i = 0; i < env_config.n; ++i) {
      const double wd = dense.w(a, i);
      const double ad = std::exp(dense.beta(a, i));
      const double w_gap =
          std::abs(w[i] - wd) / std::max({1.0, std::abs(w[i]), std::abs(wd)});
      const double a_gap = std::abs(alpha[i] - ad) /
                           std::max({1.0, std::abs(alpha[i]), std::abs(ad)});
      worst_w = std::max(worst_w, w_gap);
      worst_alpha = std::max(worst_alpha, a_gap);
      if (!close_rel(w[i], wd, rel_tol) || !close_rel(alpha[i], ad, rel_tol)) {
        result.passed = false;
        std::ostringstream msg;
        msg << "action " << a << " feature " << i << ": w " << w[i] << " vs "
            << wd << ", alpha " << alpha[i] << " vs " << ad;
        result.detail = msg.str();
        return result;
      }
    }
  }
  std::ostringstream msg;
  msg << steps << " steps; worst relative gap: w " << worst_w << ", alpha "
      << worst_alpha << " (tolerance " << rel_tol << ")";
  result.detail = msg.str();
  return result;
}

CheckResult check_env_statistics(std::uint64_t seed, std::int64_t trials,
                                 std::int64_t mu_steps) {
  CheckResult result{"env-statistics", true, ""};
  std::ostringstream why;

  EnvConfig config;
  config.n = 200;

  // Cue gaps and reward delays, measured with the always-correct responder
  // (inter-trial gaps dwarf reward delays, so at most one reward is in
  // flight and delay attribution is unambiguous).
  {
    OperantEnv env(config, mix_seed(seed, 11));
    std::int64_t last_cue_t = -1;
    std::int64_t gap_min = 1 << 30, gap_max = 0;
    std::int64_t delay_min = 1 << 30, delay_max = 0;
    std::int64_t rewards_seen = 0;
    std::int64_t pending_cue_t = -1;
    const std::int64_t step_cap = (trials + 2) * (config.iti_max + 2);
    while (env.trial_count() < trials || rewards_seen < trials) {
      if (env.t() > step_cap) {
        result.passed = false;
        why << "only " << env.trial_count() << " trials and " << rewards_seen
            << " rewards within " << step_cap << " steps; ";
        break;
      }
      const int cue = env.current_cue();
      if (env.current().reward > 0.0) {
        ++rewards_seen;
        if (pending_cue_t >= 0) {
          const std::int64_t delay = env.t() - pending_cue_t;
          delay_min = std::min(delay_min, delay);
          delay_max = std::max(delay_max, delay);
          pending_cue_t = -1;
        }
      }
      std::vector<std::uint8_t> action(config.d, 0);
      if (cue >= 0) {
        if (last_cue_t >= 0) {
          const std::int64_t gap = env.t() - last_cue_t;
          gap_min = std::min(gap_min, gap);
          gap_max = std::max(gap_max, gap);
        }
        last_cue_t = env.t();
        pending_cue_t = env.t();
        action[static_cast<std::size_t>(cue)] = 1;
      }
      env.step(action);
    }
    if (gap_min < config.iti_min || gap_max > config.iti_max ||
        gap_min != config.iti_min || gap_max != config.iti_max) {
      result.passed = false;
      why << "cue gaps [" << gap_min << ", " << gap_max
          << "] should cover exactly [" << config.iti_min << ", "
          << config.iti_max << "]; ";
    }
    if (delay_min != config.isi_min || delay_max > config.isi_max ||
        delay_max != config.isi_max) {
      result.passed = false;
      why << "reward delays [" << delay_min << ", " << delay_max
          << "] should cover exactly [" << config.isi_min << ", "
          << config.isi_max << "]; ";
    }
    if (result.passed) {
      why << trials << " trials: gaps [" << gap_min << ", " << gap_max
          << "], delays [" << delay_min << ", " << delay_max << "]; ";
    }
  }

  // The distractor rate never leaves its bounds while walking.
  {
    OperantEnv env(config, mix_seed(seed, 12));
    const std::vector<std::uint8_t> idle(config.d, 0);
    double mu_lo = 1.0, mu_hi = 0.0;
    for (std::int64_t t = 0; t < mu_steps; ++t) {
      mu_lo = std::min(mu_lo, env.mu());
      mu_hi = std::max(mu_hi, env.mu());
      env.step(idle);
    }
    if (mu_lo < config.mu_min || mu_hi > config.mu_max) {
      result.passed = false;
      why << "rate left [" << config.mu_min << ", " << config.mu_max
          << "]: saw [" << mu_lo << ", " << mu_hi << "]; ";
    } else {
      why << "rate stayed in [" << mu_lo << ", " << mu_hi << "]; ";
    }
  }

  // With the walk frozen, distractors fire at exactly the configured rate.
  {
    EnvConfig frozen = config;
    frozen.walk_std = 0.0;
    OperantEnv env(frozen, mix_seed(seed, 13));
    const std::vector<std::uint8_t> idle(frozen.d, 0);
    const std::int64_t sample_steps = std::max<std::int64_t>(mu_steps / 10, 1);
    double active_sum = 0.0;
    for (std::int64_t t = 0; t < sample_steps; ++t) {
      double actives = static_cast<double>(env.current().features.active_count());
      if (env.current_cue() >= 0) actives -= 1.0;
      active_sum += actives;
      env.step(idle);
    }
    const double observed =
        active_sum / (static_cast<double>(sample_steps) *
                      static_cast<double>(frozen.n - frozen.m));
    if (std::abs(observed - frozen.mu_init) > 0.002) {
      result.passed = false;
      why << "frozen-rate frequency " << observed << " vs " << frozen.mu_init
          << " (tolerance 0.002); ";
    } else {
      why << "frozen-rate frequency " << observed << " ~ " << frozen.mu_init;
    }
  }

  result.detail = why.str();
  return result;
}

std::vector<CheckResult> run_verification(std::uint64_t seed, bool quick) {
  std::vector<CheckResult> results;
  results.push_back(
      check_rate_bound_fuzz(mix_seed(seed, 101), quick ? 20000 : 100000));
  results.push_back(check_sparse_dense_equivalence(
      mix_seed(seed, 102), quick ? 2000 : 10000, 1e-8));
  results.push_back(check_env_statistics(mix_seed(seed, 103),
                                         quick ? 2000 : 10000,
                                         quick ? 100000 : 1000000));
  return results;
}

}  // namespace swiftsarsa
