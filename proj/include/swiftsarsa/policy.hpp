#pragma once

#include <span>
#include <vector>

#include "swiftsarsa/rng.hpp"

namespace swiftsarsa {

enum class PolicyKind { kSoftmax, kEpsilonGreedy };

/// Boltzmann distribution over action values at the given temperature,
/// computed with max-subtraction so extreme values cannot overflow.
/// Throws on non-finite values or temperature <= 0.
std::vector<double> softmax_probabilities(std::span<const double> values,
                                          double temperature);

int softmax_select(std::span<const double> values, double temperature,
                   Rng& rng);

/// Argmax with probability 1 - explore_prob (ties broken by lowest index),
/// otherwise a uniformly random action.
int epsilon_greedy_select(std::span<const double> values, double explore_prob,
                          Rng& rng);

int argmax_lowest_index(std::span<const double> values);

}  // namespace swiftsarsa
