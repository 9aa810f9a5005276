#include "swiftsarsa/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace swiftsarsa {

int argmax_lowest_index(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<double> softmax_probabilities(std::span<const double> values,
                                          double temperature) {
  if (values.empty()) throw std::invalid_argument("softmax: no actions");
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("softmax: temperature must be > 0");
  }
  double max_v = values[0];
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("softmax: non-finite action value");
    }
    max_v = std::max(max_v, v);
  }
  std::vector<double> probs(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    probs[i] = std::exp((values[i] - max_v) / temperature);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

int softmax_select(std::span<const double> values, double temperature,
                   Rng& rng) {
  std::vector<double> probs = softmax_probabilities(values, temperature);
  double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

int epsilon_greedy_select(std::span<const double> values, double explore_prob,
                          Rng& rng) {
  if (values.empty()) throw std::invalid_argument("egreedy: no actions");
  if (explore_prob < 0.0 || explore_prob > 1.0) {
    throw std::invalid_argument("egreedy: explore_prob outside [0, 1]");
  }
  if (rng.bernoulli(explore_prob)) {
    return static_cast<int>(rng.below(values.size()));
  }
  return argmax_lowest_index(values);
}

}  // namespace swiftsarsa
