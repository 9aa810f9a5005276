#include "swiftsarsa/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swiftsarsa {
namespace {

// exp(x) for the meta update. Step-size multipliers are overwhelmingly
// within a hair of 1, so a degree-7 Taylor series (relative error < 1 ulp
// for |x| <= 1/32) covers the hot path.
inline double exp_fast(double x) {
  if (std::abs(x) <= 0.03125) {
    return 1.0 + x * (1.0 + x * (1.0 / 2 + x * (1.0 / 6 + x * (1.0 / 24 +
           x * (1.0 / 120 + x * (1.0 / 720 + x * (1.0 / 5040)))))));
  }
  return std::exp(x);
}

void check(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("hyperparams: " + what);
}

}  // namespace

Hyperparams::Hyperparams() : step_size_floor(std::exp(-15.0)) {}

void Hyperparams::validate() const {
  check(std::isfinite(meta_step_size) && meta_step_size >= 0.0,
        "meta_step_size must be finite and >= 0");
  check(std::isfinite(rate_bound) && rate_bound > 0.0,
        "rate_bound must be finite and > 0");
  check(std::isfinite(step_size_floor) && step_size_floor > 0.0,
        "step_size_floor must be finite and > 0");
  check(step_size_floor <= init_step_size && init_step_size <= rate_bound,
        "need step_size_floor <= init_step_size <= rate_bound");
  check(discount >= 0.0 && discount <= 1.0, "discount must be in [0, 1]");
  check(trace_decay >= 0.0 && trace_decay <= 1.0,
        "trace_decay must be in [0, 1]");
  check(discount * trace_decay < 1.0, "discount * trace_decay must be < 1");
  check(decay_rate > 0.0 && decay_rate <= 1.0, "decay_rate must be in (0, 1]");
  check(std::isfinite(prune_threshold) && prune_threshold >= 0.0,
        "prune_threshold must be finite and >= 0");
  if (policy == PolicyKind::kSoftmax) {
    check(std::isfinite(temperature) && temperature > 0.0,
          "temperature must be finite and > 0");
  } else {
    check(explore_prob >= 0.0 && explore_prob <= 1.0,
          "explore_prob must be in [0, 1]");
  }
}

double td_error(double reward, double discount, double v_now, double v_old) {
  return reward + discount * v_now - v_old;
}

Learner::Learner(std::uint32_t num_actions, std::uint32_t num_features,
                 const Hyperparams& hp, std::uint64_t seed)
    : num_actions_(num_actions),
      hp_(hp),
      table_(num_actions, num_features, hp.init_step_size),
      rng_(seed) {
  if (num_actions == 0) throw std::invalid_argument("need at least 1 action");
  hp_.validate();
}

std::vector<double> Learner::action_values(const SparseFeatures& phi) const {
  std::vector<double> values(num_actions_);
  for (std::uint32_t a = 0; a < num_actions_; ++a) {
    values[a] = sparse_dot(table_.weights(a), phi);
  }
  return values;
}

int Learner::select_action(const std::vector<double>& values) {
  if (hp_.policy == PolicyKind::kSoftmax) {
    return softmax_select(values, hp_.temperature, rng_);
  }
  return epsilon_greedy_select(values, hp_.explore_prob, rng_);
}

StepDiagnostics Learner::step(const SparseFeatures& phi, double reward) {
  if (phi.size() != table_.num_features()) {
    throw std::invalid_argument("feature vector size " +
                                std::to_string(phi.size()) + " != " +
                                std::to_string(table_.num_features()));
  }
  const std::vector<double> values = action_values(phi);
  const int chosen = select_action(values);
  const double td =
      td_error(reward, hp_.discount, values[chosen], v_old_);
  if (!std::isfinite(td)) {
    throw std::runtime_error("td error diverged at step " +
                             std::to_string(step_count_));
  }

  trace_sweep(td);
  v_delta_ = 0.0;
  const auto [tau, b] = active_feature_update(phi, chosen);
  v_old_ = values[chosen];
  last_action_ = chosen;
  ++step_count_;

  StepDiagnostics diag;
  diag.chosen_action = chosen;
  diag.td_error = td;
  diag.tau = tau;
  diag.effective_rate = std::min(tau, hp_.rate_bound);
  diag.decay_triggered = tau > hp_.rate_bound;
  diag.active_trace_count = table_.live_count();
  return diag;
}

void Learner::trace_sweep(double td) {
  const double vd = v_delta_;
  const double meta = hp_.meta_step_size * (td - vd);
  const double fade = hp_.discount * hp_.trace_decay;
  const double threshold = hp_.prune_threshold;
  const double floor = hp_.step_size_floor;
  const double cap = hp_.rate_bound;
  const double theta = hp_.meta_step_size;

  for (std::uint32_t a = 0; a < num_actions_; ++a) {
    auto& slab = table_.slab(a);
    double* w = slab.w.data();
    double* alpha = slab.alpha.data();
    std::size_t s = 0;
    while (s < slab.index.size()) {
      const std::uint32_t i = slab.index[s];
      const double zd = slab.z_delta[s];
      const double p = slab.p[s];
      const double dw = td * slab.z[s] - zd * vd;
      slab.dw[s] = dw;
      w[i] += dw;

      double al = alpha[i];
      if (meta != 0.0 && p != 0.0) al *= exp_fast(meta * p / al);
      // Clamping every visit also lifts step sizes the decay pushed below
      // the floor back onto it.
      alpha[i] = std::clamp(al, floor, cap);

      const double h_prev = slab.h[s];
      const double h_new = slab.h_temp[s] + td * slab.z_bar[s] - zd * vd;
      slab.h[s] = h_new;
      slab.h_temp[s] = h_new;
      slab.h_old[s] = h_prev;
      slab.z_delta[s] = 0.0;
      const double z = slab.z[s] * fade;
      const double pf = p * fade;
      const double zb = slab.z_bar[s] * fade;
      slab.z[s] = z;
      slab.p[s] = pf;
      slab.z_bar[s] = zb;

      // Drop the entry once every transient is below threshold, including
      // after amplification by the step-size update (theta / alpha can reach
      // theta * e^15, large enough to turn a sub-threshold p into visible
      // step-size drift).
      if (std::abs(z) < threshold && std::abs(pf) < threshold &&
          std::abs(zb) < threshold) {
        const double amp = theta / alpha[i];
        if (std::abs(pf) * amp <= threshold &&
            std::abs(zb) * amp <= threshold) {
          slab.settle_slot(s);
          continue;  // a swapped-in, not-yet-visited entry now sits at s
        }
      }
      ++s;
    }
  }
}

std::pair<double, double> Learner::active_feature_update(
    const SparseFeatures& phi, int chosen) {
  auto& slab = table_.slab(static_cast<std::uint32_t>(chosen));
  const double eta = hp_.rate_bound;

  double tau = 0.0;
  double b = 0.0;
  for (const auto& e : phi.entries()) {
    tau += slab.alpha[e.index] * e.value * e.value;
    const std::uint32_t slot = slab.position[e.index];
    if (slot != PerFeatureTable::kNotLive) b += slab.z[slot] * e.value;
  }
  if (phi.empty()) return {0.0, 0.0};
  if (!std::isfinite(tau) || tau <= 0.0) {
    throw std::runtime_error("step-size mass " + std::to_string(tau) +
                             " is not usable at step " +
                             std::to_string(step_count_));
  }

  const double scale = std::min(1.0, eta / tau);
  const bool decay_now = tau > eta;
  const double decay = hp_.decay_rate;
  const double log_decay = std::log(decay);
  double vd = 0.0;

  for (const auto& e : phi.entries()) {
    const double f = e.value;
    const std::uint32_t i = e.index;
    // dw of an entry without live trace state is zero by definition, which
    // insert_trace preserves, so inserting first reads the same value.
    const std::uint32_t slot =
        table_.insert_trace(static_cast<std::uint32_t>(chosen), i);
    vd += slab.dw[slot] * f;

    const double zd = scale * slab.alpha[i] * f;
    slab.z_delta[slot] = zd;
    const double z_new = slab.z[slot] + zd * (1.0 - b);
    slab.z[slot] = z_new;
    slab.p[slot] += f * slab.h_old[slot];
    const double zb = slab.z_bar[slot];
    slab.z_bar[slot] = zb + zd * (1.0 - b - f * zb);
    const double h = slab.h[slot];
    slab.h_temp[slot] =
        h - zd * f * h - slab.h_old[slot] * f * (z_new - zd);
    if (decay_now) {
      // Deliberately not re-clamped here; the next sweep's clamp restores
      // the floor.
      slab.alpha[i] *= (f == 1.0) ? decay : std::exp(f * f * log_decay);
      slab.h_temp[slot] = 0.0;
      slab.h[slot] = 0.0;
      slab.z_bar[slot] = 0.0;
    }
  }
  v_delta_ = vd;
  return {tau, b};
}

void Learner::restore_scalars(double v_delta, double v_old,
                              std::optional<int> last_action,
                              std::int64_t step_count) {
  v_delta_ = v_delta;
  v_old_ = v_old;
  last_action_ = last_action;
  step_count_ = step_count;
}

DenseReferenceLearner::DenseReferenceLearner(std::uint32_t num_actions,
                                             std::uint32_t num_features,
                                             const Hyperparams& hp,
                                             std::uint64_t seed)
    : num_actions_(num_actions),
      num_features_(num_features),
      hp_(hp),
      rng_(seed) {
  if (num_actions == 0) throw std::invalid_argument("need at least 1 action");
  hp_.validate();
  auto zeros = [&] {
    return std::vector<std::vector<double>>(
        num_actions, std::vector<double>(num_features, 0.0));
  };
  w_ = zeros();
  beta_ = std::vector<std::vector<double>>(
      num_actions,
      std::vector<double>(num_features, std::log(hp.init_step_size)));
  z_ = zeros();
  z_delta_ = zeros();
  p_ = zeros();
  z_bar_ = zeros();
  h_ = zeros();
  h_old_ = zeros();
  h_temp_ = zeros();
  dw_ = zeros();
}

std::vector<double> DenseReferenceLearner::action_values(
    const SparseFeatures& phi) const {
  std::vector<double> values(num_actions_);
  for (std::uint32_t a = 0; a < num_actions_; ++a) {
    values[a] = sparse_dot(w_[a], phi);
  }
  return values;
}

StepDiagnostics DenseReferenceLearner::step(const SparseFeatures& phi,
                                            double reward) {
  const std::vector<double> values = action_values(phi);
  int chosen;
  if (hp_.policy == PolicyKind::kSoftmax) {
    chosen = softmax_select(values, hp_.temperature, rng_);
  } else {
    chosen = epsilon_greedy_select(values, hp_.explore_prob, rng_);
  }
  const double td =
      td_error(reward, hp_.discount, values[chosen], v_old_);

  const double fade = hp_.discount * hp_.trace_decay;
  const double beta_floor = std::log(hp_.step_size_floor);
  const double beta_cap = std::log(hp_.rate_bound);
  for (std::uint32_t a = 0; a < num_actions_; ++a) {
    for (std::uint32_t i = 0; i < num_features_; ++i) {
      const double dw = td * z_[a][i] - z_delta_[a][i] * v_delta_;
      dw_[a][i] = dw;
      w_[a][i] += dw;
      beta_[a][i] += hp_.meta_step_size / std::exp(beta_[a][i]) *
                     (td - v_delta_) * p_[a][i];
      beta_[a][i] = std::clamp(beta_[a][i], beta_floor, beta_cap);
      const double h_prev = h_[a][i];
      h_[a][i] = h_temp_[a][i] + td * z_bar_[a][i] - z_delta_[a][i] * v_delta_;
      h_temp_[a][i] = h_[a][i];
      h_old_[a][i] = h_prev;
      z_delta_[a][i] = 0.0;
      z_[a][i] *= fade;
      p_[a][i] *= fade;
      z_bar_[a][i] *= fade;
    }
  }

  v_delta_ = 0.0;
  const std::uint32_t k = static_cast<std::uint32_t>(chosen);
  double tau = 0.0;
  double b = 0.0;
  for (const auto& e : phi.entries()) {
    tau += std::exp(beta_[k][e.index]) * e.value * e.value;
    b += z_[k][e.index] * e.value;
  }
  const bool decay_now = tau > hp_.rate_bound;
  const double scale = phi.empty() ? 0.0 : std::min(1.0, hp_.rate_bound / tau);
  for (const auto& e : phi.entries()) {
    const double f = e.value;
    const std::uint32_t i = e.index;
    v_delta_ += dw_[k][i] * f;
    const double zd = scale * std::exp(beta_[k][i]) * f;
    z_delta_[k][i] = zd;
    z_[k][i] += zd * (1.0 - b);
    p_[k][i] += f * h_old_[k][i];
    z_bar_[k][i] += zd * (1.0 - b - f * z_bar_[k][i]);
    h_temp_[k][i] =
        h_[k][i] - zd * f * h_[k][i] - h_old_[k][i] * f * (z_[k][i] - zd);
    if (decay_now) {
      beta_[k][i] += f * f * std::log(hp_.decay_rate);
      h_temp_[k][i] = 0.0;
      h_[k][i] = 0.0;
      z_bar_[k][i] = 0.0;
    }
  }
  v_old_ = values[chosen];

  StepDiagnostics diag;
  diag.chosen_action = chosen;
  diag.td_error = td;
  diag.tau = tau;
  diag.effective_rate = std::min(tau, hp_.rate_bound);
  diag.decay_triggered = decay_now;
  diag.active_trace_count = 0;
  return diag;
}

}  // namespace swiftsarsa
