#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace swiftsarsa {

/// Active entries of a feature vector: strictly increasing indices in
/// [0, size), no zero values stored.
class SparseFeatures {
 public:
  struct Entry {
    std::uint32_t index;
    double value;
  };

  SparseFeatures() = default;
  SparseFeatures(std::vector<Entry> entries, std::uint32_t size);

  /// Convenience for binary feature vectors: every listed index gets 1.0.
  static SparseFeatures binary(std::vector<std::uint32_t> indices,
                               std::uint32_t size);

  std::span<const Entry> entries() const { return entries_; }
  std::uint32_t size() const { return size_; }
  bool empty() const { return entries_.empty(); }
  std::size_t active_count() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
  std::uint32_t size_ = 0;
};

/// w[i]*phi[i] summed over the active entries of phi.
double sparse_dot(std::span<const double> weights, const SparseFeatures& phi);

// Per-(action, feature) learner state. Two storage tiers:
//
//  - dense, persistent per feature: weight w, step size alpha = e^beta, and
//    the settled activation-trace value h kept for features whose traces
//    have died out;
//  - packed, transient: the trace-driven quantities (z, z_delta, p, z_bar,
//    h/h_old/h_temp, dw) of entries whose traces are live, stored
//    contiguously per action so the per-step trace sweep streams memory.
//
// An entry never written reads back as its initialization value: 0 for
// everything except alpha, which starts at alpha_init.
class PerFeatureTable {
 public:
  static constexpr std::uint32_t kNotLive = 0xffffffffu;

  // Live-trace record; h_old/h/h_temp collapse into the dense settled value
  // when the entry is dropped.
  struct Traces {
    double z = 0.0;       // eligibility trace
    double z_delta = 0.0; // this step's trace increment
    double p = 0.0;       // step-size gradient trace
    double z_bar = 0.0;   // true-online correction trace
    double h = 0.0;       // activation trace of recent weight updates
    double h_old = 0.0;
    double h_temp = 0.0;
    double dw = 0.0;      // last weight delta, consumed by the next update
  };

  PerFeatureTable(std::uint32_t num_actions, std::uint32_t num_features,
                  double alpha_init);

  std::uint32_t num_actions() const { return num_actions_; }
  std::uint32_t num_features() const { return num_features_; }

  std::span<const double> weights(std::uint32_t action) const {
    return actions_[action].w;
  }
  std::span<double> mutable_weights(std::uint32_t action) {
    return actions_[action].w;
  }
  std::span<const double> alphas(std::uint32_t action) const {
    return actions_[action].alpha;
  }
  std::span<double> mutable_alphas(std::uint32_t action) {
    return actions_[action].alpha;
  }

  double w(std::uint32_t action, std::uint32_t feature) const {
    return actions_[action].w[feature];
  }
  double alpha(std::uint32_t action, std::uint32_t feature) const {
    return actions_[action].alpha[feature];
  }
  /// Log step size; alpha is the stored representation.
  double beta(std::uint32_t action, std::uint32_t feature) const;

  bool trace_live(std::uint32_t action, std::uint32_t feature) const {
    return actions_[action].position[feature] != kNotLive;
  }
  /// Trace-quantity view with init-value semantics for dead entries.
  Traces traces(std::uint32_t action, std::uint32_t feature) const;

  std::size_t live_count() const;
  std::size_t live_count(std::uint32_t action) const {
    return actions_[action].index.size();
  }

  /// Idempotent. A fresh record starts with zero traces and the settled h
  /// replicated into h/h_old/h_temp. Returns the packed slot.
  std::uint32_t insert_trace(std::uint32_t action, std::uint32_t feature);

  /// Drops every live entry whose |z|, |z_delta|, |p| and |z_bar| are all
  /// below threshold. Returns the number removed.
  std::size_t prune_traces(double threshold);

  /// Visits live entries ordered by (action, feature).
  void visit_traces(
      const std::function<void(std::uint32_t action, std::uint32_t feature,
                               const Traces&)>& fn) const;

  struct ActionSlab {
    std::vector<double> w;
    std::vector<double> alpha;
    std::vector<double> settled_h;
    std::vector<std::uint32_t> position;  // feature -> packed slot or kNotLive

    // Packed parallel arrays over live entries.
    std::vector<std::uint32_t> index;  // packed slot -> feature
    std::vector<double> z, z_delta, p, z_bar, h, h_old, h_temp, dw;

    void erase_slot(std::uint32_t slot);
    void settle_slot(std::uint32_t slot);  // fold h into settled_h, then erase
  };

  ActionSlab& slab(std::uint32_t action) { return actions_[action]; }
  const ActionSlab& slab(std::uint32_t action) const {
    return actions_[action];
  }

 private:
  std::uint32_t num_actions_;
  std::uint32_t num_features_;
  std::vector<ActionSlab> actions_;
};

}  // namespace swiftsarsa
