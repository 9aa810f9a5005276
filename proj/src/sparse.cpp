#include "swiftsarsa/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swiftsarsa {

SparseFeatures::SparseFeatures(std::vector<Entry> entries, std::uint32_t size)
    : entries_(std::move(entries)), size_(size) {
  std::uint32_t prev = 0;
  bool first = true;
  for (const Entry& e : entries_) {
    if (!first && e.index <= prev) {
      throw std::invalid_argument(
          "SparseFeatures: indices must be strictly increasing");
    }
    if (e.index >= size_) {
      throw std::invalid_argument("SparseFeatures: index " +
                                  std::to_string(e.index) +
                                  " out of range [0, " +
                                  std::to_string(size_) + ")");
    }
    if (e.value == 0.0) {
      throw std::invalid_argument("SparseFeatures: zero value stored at " +
                                  std::to_string(e.index));
    }
    prev = e.index;
    first = false;
  }
}

SparseFeatures SparseFeatures::binary(std::vector<std::uint32_t> indices,
                                      std::uint32_t size) {
  std::vector<Entry> entries;
  entries.reserve(indices.size());
  for (std::uint32_t i : indices) entries.push_back({i, 1.0});
  return SparseFeatures(std::move(entries), size);
}

double sparse_dot(std::span<const double> weights, const SparseFeatures& phi) {
  if (phi.size() > weights.size()) {
    throw std::out_of_range("sparse_dot: feature space wider than weights");
  }
  double acc = 0.0;
  for (const auto& e : phi.entries()) acc += weights[e.index] * e.value;
  return acc;
}

PerFeatureTable::PerFeatureTable(std::uint32_t num_actions,
                                 std::uint32_t num_features,
                                 double alpha_init)
    : num_actions_(num_actions), num_features_(num_features) {
  actions_.resize(num_actions_);
  for (ActionSlab& a : actions_) {
    a.w.assign(num_features_, 0.0);
    a.alpha.assign(num_features_, alpha_init);
    a.settled_h.assign(num_features_, 0.0);
    a.position.assign(num_features_, kNotLive);
  }
}

double PerFeatureTable::beta(std::uint32_t action,
                             std::uint32_t feature) const {
  return std::log(actions_[action].alpha[feature]);
}

PerFeatureTable::Traces PerFeatureTable::traces(std::uint32_t action,
                                                std::uint32_t feature) const {
  const ActionSlab& a = actions_[action];
  std::uint32_t slot = a.position[feature];
  Traces t;
  if (slot == kNotLive) {
    t.h = t.h_old = t.h_temp = a.settled_h[feature];
    return t;
  }
  t.z = a.z[slot];
  t.z_delta = a.z_delta[slot];
  t.p = a.p[slot];
  t.z_bar = a.z_bar[slot];
  t.h = a.h[slot];
  t.h_old = a.h_old[slot];
  t.h_temp = a.h_temp[slot];
  t.dw = a.dw[slot];
  return t;
}

std::size_t PerFeatureTable::live_count() const {
  std::size_t n = 0;
  for (const ActionSlab& a : actions_) n += a.index.size();
  return n;
}

std::uint32_t PerFeatureTable::insert_trace(std::uint32_t action,
                                            std::uint32_t feature) {
  ActionSlab& a = actions_[action];
  std::uint32_t slot = a.position[feature];
  if (slot != kNotLive) return slot;
  slot = static_cast<std::uint32_t>(a.index.size());
  a.index.push_back(feature);
  a.z.push_back(0.0);
  a.z_delta.push_back(0.0);
  a.p.push_back(0.0);
  a.z_bar.push_back(0.0);
  double settled = a.settled_h[feature];
  a.h.push_back(settled);
  a.h_old.push_back(settled);
  a.h_temp.push_back(settled);
  a.dw.push_back(0.0);
  a.position[feature] = slot;
  return slot;
}

void PerFeatureTable::ActionSlab::erase_slot(std::uint32_t slot) {
  std::uint32_t last = static_cast<std::uint32_t>(index.size()) - 1;
  position[index[slot]] = kNotLive;
  if (slot != last) {
    index[slot] = index[last];
    z[slot] = z[last];
    z_delta[slot] = z_delta[last];
    p[slot] = p[last];
    z_bar[slot] = z_bar[last];
    h[slot] = h[last];
    h_old[slot] = h_old[last];
    h_temp[slot] = h_temp[last];
    dw[slot] = dw[last];
    position[index[slot]] = slot;
  }
  index.pop_back();
  z.pop_back();
  z_delta.pop_back();
  p.pop_back();
  z_bar.pop_back();
  h.pop_back();
  h_old.pop_back();
  h_temp.pop_back();
  dw.pop_back();
}

void PerFeatureTable::ActionSlab::settle_slot(std::uint32_t slot) {
  settled_h[index[slot]] = h[slot];
  erase_slot(slot);
}

std::size_t PerFeatureTable::prune_traces(double threshold) {
  std::size_t removed = 0;
  for (ActionSlab& a : actions_) {
    std::uint32_t slot = 0;
    while (slot < a.index.size()) {
      if (std::abs(a.z[slot]) < threshold &&
          std::abs(a.z_delta[slot]) < threshold &&
          std::abs(a.p[slot]) < threshold &&
          std::abs(a.z_bar[slot]) < threshold) {
        a.settle_slot(slot);
        ++removed;
      } else {
        ++slot;
      }
    }
  }
  return removed;
}

void PerFeatureTable::visit_traces(
    const std::function<void(std::uint32_t, std::uint32_t, const Traces&)>& fn)
    const {
  std::vector<std::uint32_t> order;
  for (std::uint32_t j = 0; j < num_actions_; ++j) {
    const ActionSlab& a = actions_[j];
    order.assign(a.index.begin(), a.index.end());
    std::sort(order.begin(), order.end());
    for (std::uint32_t i : order) fn(j, i, traces(j, i));
  }
}

}  // namespace swiftsarsa
