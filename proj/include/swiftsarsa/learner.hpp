#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "swiftsarsa/policy.hpp"
#include "swiftsarsa/rng.hpp"
#include "swiftsarsa/sparse.hpp"

namespace swiftsarsa {

// Learner hyperparameters. rate_bound caps the effective learning rate of a
// single update: when the summed step-size mass tau of the active features
// exceeds it, the update is rescaled and step sizes decay multiplicatively
// by decay_rate. decay_rate = 1 leaves step sizes untouched.
struct Hyperparams {
  double meta_step_size = 0.01;  // learning rate of the step-size updates
  double rate_bound = 0.1;       // eta
  double step_size_floor;        // eta_min; exp(-15) by default (see ctor)
  double init_step_size = 1e-6;  // alpha_init
  double discount = 0.9;          // gamma
  double trace_decay = 0.9;       // lambda
  double decay_rate = 0.999;      // multiplicative step-size decay
  double prune_threshold = 1e-12; // trace magnitude below which entries drop
  PolicyKind policy = PolicyKind::kSoftmax;
  double temperature = 0.1;
  double explore_prob = 0.05;

  Hyperparams();

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

struct StepDiagnostics {
  int chosen_action = 0;
  double td_error = 0.0;
  double tau = 0.0;             // step-size mass of the active features
  double effective_rate = 0.0;  // min(tau, rate_bound)
  bool decay_triggered = false;
  std::size_t active_trace_count = 0;
};

/// r + discount * v_now - v_old.
double td_error(double reward, double discount, double v_now, double v_old);

// On-policy linear control with true-online traces, per-feature step-size
// optimization, a bound on the per-step effective learning rate, and
// step-size decay. Step sizes are stored as alpha = e^beta; all per-feature
// state lives in a PerFeatureTable whose trace sweep touches only entries
// with live trace state.
class Learner {
 public:
  Learner(std::uint32_t num_actions, std::uint32_t num_features,
          const Hyperparams& hp, std::uint64_t seed);

  /// One interaction step: perceive (phi, reward), pick an action, apply
  /// the trace sweep and the active-feature update.
  StepDiagnostics step(const SparseFeatures& phi, double reward);

  std::vector<double> action_values(const SparseFeatures& phi) const;

  std::uint32_t num_actions() const { return num_actions_; }
  std::uint32_t num_features() const { return table_.num_features(); }
  const Hyperparams& hyperparams() const { return hp_; }
  const PerFeatureTable& table() const { return table_; }
  PerFeatureTable& mutable_table() { return table_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

  double value_delta() const { return v_delta_; }
  double value_old() const { return v_old_; }
  std::optional<int> last_action() const { return last_action_; }
  std::int64_t step_count() const { return step_count_; }

  // Checkpoint restore hooks; see checkpoint.cpp.
  void restore_scalars(double v_delta, double v_old,
                       std::optional<int> last_action,
                       std::int64_t step_count);

 private:
  void trace_sweep(double td);
  // Returns (tau, b) for the chosen action's active features.
  std::pair<double, double> active_feature_update(const SparseFeatures& phi,
                                                  int chosen);
  int select_action(const std::vector<double>& values);

  std::uint32_t num_actions_;
  Hyperparams hp_;
  PerFeatureTable table_;
  Rng rng_;
  double v_delta_ = 0.0;
  double v_old_ = 0.0;
  std::optional<int> last_action_;
  std::int64_t step_count_ = 0;
};

// Reference implementation that carries beta explicitly and iterates every
// (action, feature) pair in the trace sweep. Slow on purpose; the sparse
// learner is validated against it.
class DenseReferenceLearner {
 public:
  DenseReferenceLearner(std::uint32_t num_actions, std::uint32_t num_features,
                        const Hyperparams& hp, std::uint64_t seed);

  StepDiagnostics step(const SparseFeatures& phi, double reward);
  std::vector<double> action_values(const SparseFeatures& phi) const;

  double w(std::uint32_t action, std::uint32_t feature) const {
    return w_[action][feature];
  }
  double beta(std::uint32_t action, std::uint32_t feature) const {
    return beta_[action][feature];
  }
  double h(std::uint32_t action, std::uint32_t feature) const {
    return h_[action][feature];
  }
  std::uint32_t num_actions() const { return num_actions_; }
  Rng& rng() { return rng_; }

 private:
  std::uint32_t num_actions_;
  std::uint32_t num_features_;
  Hyperparams hp_;
  Rng rng_;
  std::vector<std::vector<double>> w_, beta_, z_, z_delta_, p_, z_bar_, h_,
      h_old_, h_temp_, dw_;
  double v_delta_ = 0.0;
  double v_old_ = 0.0;
};

}  // namespace swiftsarsa
