#pragma once

#include <string>

#include "swiftsarsa/learner.hpp"

namespace swiftsarsa {

// Versioned JSON snapshot of a learner: hyperparameters, RNG state, scalar
// carries, per-feature tables, and live trace entries (canonically sorted).
// Loading reproduces the learner exactly; continuing a restored learner
// yields bit-identical results to never having snapshotted.
std::string checkpoint_to_json(const Learner& learner);
Learner checkpoint_from_json(const std::string& text);

void save_checkpoint(const Learner& learner, const std::string& path);
Learner load_checkpoint(const std::string& path);

}  // namespace swiftsarsa
