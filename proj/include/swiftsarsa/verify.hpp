#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace swiftsarsa {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Randomized learners (feature counts <= 500, up to 16 actions, step sizes
/// scattered across their full range) stepped `steps` times; on every step
/// the traced update mass must equal min(tau, eta) to 1e-12 and never exceed
/// eta + 1e-12.
CheckResult check_rate_bound_fuzz(std::uint64_t seed, std::int64_t steps);

/// Sparse learner vs the dense reference on the same stream and seed;
/// weight and step-size tables must agree within `rel_tol` relative.
CheckResult check_sparse_dense_equivalence(std::uint64_t seed,
                                           std::int64_t steps,
                                           double rel_tol);

/// Cue gaps and reward delays stay inside their configured inclusive ranges
/// (and reach both endpoints), the distractor rate stays inside its bounds,
/// and with the rate walk frozen the observed distractor frequency matches.
CheckResult check_env_statistics(std::uint64_t seed, std::int64_t trials,
                                 std::int64_t mu_steps);

/// The CLI `verify` suite. quick = smaller step counts (seconds, not
/// minutes); the acceptance harness runs the full sizes.
std::vector<CheckResult> run_verification(std::uint64_t seed, bool quick);

}  // namespace swiftsarsa
