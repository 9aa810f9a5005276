#include "swiftsarsa/checkpoint.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace swiftsarsa {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "swiftsarsa-checkpoint";
constexpr int kVersion = 1;

json finite_array(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::runtime_error(std::string("checkpoint: non-finite ") + what);
    }
  }
  return json(values);
}

json hyperparams_to_json(const Hyperparams& hp) {
  return json{
      {"meta_step_size", hp.meta_step_size},
      {"rate_bound", hp.rate_bound},
      {"step_size_floor", hp.step_size_floor},
      {"init_step_size", hp.init_step_size},
      {"discount", hp.discount},
      {"trace_decay", hp.trace_decay},
      {"decay_rate", hp.decay_rate},
      {"prune_threshold", hp.prune_threshold},
      {"policy", hp.policy == PolicyKind::kSoftmax ? "softmax" : "egreedy"},
      {"temperature", hp.temperature},
      {"explore_prob", hp.explore_prob},
  };
}

Hyperparams hyperparams_from_json(const json& j) {
  Hyperparams hp;
  hp.meta_step_size = j.at("meta_step_size").get<double>();
  hp.rate_bound = j.at("rate_bound").get<double>();
  hp.step_size_floor = j.at("step_size_floor").get<double>();
  hp.init_step_size = j.at("init_step_size").get<double>();
  hp.discount = j.at("discount").get<double>();
  hp.trace_decay = j.at("trace_decay").get<double>();
  hp.decay_rate = j.at("decay_rate").get<double>();
  hp.prune_threshold = j.at("prune_threshold").get<double>();
  const std::string policy = j.at("policy").get<std::string>();
  if (policy == "softmax") {
    hp.policy = PolicyKind::kSoftmax;
  } else if (policy == "egreedy") {
    hp.policy = PolicyKind::kEpsilonGreedy;
  } else {
    throw std::invalid_argument("checkpoint: unknown policy '" + policy + "'");
  }
  hp.temperature = j.at("temperature").get<double>();
  hp.explore_prob = j.at("explore_prob").get<double>();
  return hp;
}

Learner checkpoint_from_parsed(const json& root);

}  // namespace

std::string checkpoint_to_json(const Learner& learner) {
  const PerFeatureTable& table = learner.table();
  json actions = json::array();
  for (std::uint32_t a = 0; a < learner.num_actions(); ++a) {
    const auto& slab = table.slab(a);
    json entry;
    entry["w"] = finite_array(slab.w, "weight");
    entry["alpha"] = finite_array(slab.alpha, "step size");
    entry["settled_h"] = finite_array(slab.settled_h, "settled correction");

    // Live trace entries in feature order, so equal learners always
    // serialize to equal bytes regardless of insertion history.
    std::vector<std::uint32_t> order(slab.index.size());
    for (std::uint32_t s = 0; s < order.size(); ++s) order[s] = s;
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t x, std::uint32_t y) {
                return slab.index[x] < slab.index[y];
              });
    json live;
    auto gather = [&](const std::vector<double>& src) {
      std::vector<double> out;
      out.reserve(order.size());
      for (std::uint32_t s : order) out.push_back(src[s]);
      return finite_array(out, "trace field");
    };
    std::vector<std::uint32_t> features;
    features.reserve(order.size());
    for (std::uint32_t s : order) features.push_back(slab.index[s]);
    live["feature"] = features;
    live["z"] = gather(slab.z);
    live["z_delta"] = gather(slab.z_delta);
    live["p"] = gather(slab.p);
    live["z_bar"] = gather(slab.z_bar);
    live["h"] = gather(slab.h);
    live["h_old"] = gather(slab.h_old);
    live["h_temp"] = gather(slab.h_temp);
    live["dw"] = gather(slab.dw);
    entry["live"] = live;
    actions.push_back(std::move(entry));
  }

  json root{
      {"format", kFormat},
      {"version", kVersion},
      {"num_actions", learner.num_actions()},
      {"num_features", learner.num_features()},
      {"hyperparams", hyperparams_to_json(learner.hyperparams())},
      {"rng",
       {{"seed", learner.rng().seed()},
        {"counter", learner.rng().counter()}}},
      {"scalars",
       {{"v_delta", learner.value_delta()},
        {"v_old", learner.value_old()},
        {"step_count", learner.step_count()}}},
      {"actions", std::move(actions)},
  };
  if (learner.last_action().has_value()) {
    root["scalars"]["last_action"] = *learner.last_action();
  } else {
    root["scalars"]["last_action"] = nullptr;
  }
  return root.dump(2) + "\n";
}

Learner checkpoint_from_json(const std::string& text) {
  try {
    return checkpoint_from_parsed(json::parse(text));
  } catch (const json::exception& err) {
    throw std::invalid_argument(std::string("checkpoint: ") + err.what());
  }
}

namespace {

Learner checkpoint_from_parsed(const json& root) {
  if (root.at("format").get<std::string>() != kFormat) {
    throw std::invalid_argument("checkpoint: unrecognized format field");
  }
  if (root.at("version").get<int>() != kVersion) {
    throw std::invalid_argument("checkpoint: unsupported version " +
                                root.at("version").dump());
  }
  const auto num_actions = root.at("num_actions").get<std::uint32_t>();
  const auto num_features = root.at("num_features").get<std::uint32_t>();
  const Hyperparams hp = hyperparams_from_json(root.at("hyperparams"));
  Learner learner(num_actions, num_features, hp, 0);

  const json& rng = root.at("rng");
  learner.rng().restore(rng.at("seed").get<std::uint64_t>(),
                        rng.at("counter").get<std::uint64_t>());

  const json& actions = root.at("actions");
  if (actions.size() != num_actions) {
    throw std::invalid_argument("checkpoint: expected " +
                                std::to_string(num_actions) +
                                " action tables, found " +
                                std::to_string(actions.size()));
  }
  for (std::uint32_t a = 0; a < num_actions; ++a) {
    const json& entry = actions.at(a);
    auto& slab = learner.mutable_table().slab(a);
    auto load_dense = [&](const char* name, std::vector<double>& dst) {
      const auto values = entry.at(name).get<std::vector<double>>();
      if (values.size() != num_features) {
        throw std::invalid_argument(std::string("checkpoint: field ") + name +
                                    " has wrong length");
      }
      dst = values;
    };
    load_dense("w", slab.w);
    load_dense("alpha", slab.alpha);
    load_dense("settled_h", slab.settled_h);

    const json& live = entry.at("live");
    const auto features = live.at("feature").get<std::vector<std::uint32_t>>();
    auto field = [&](const char* name) {
      const auto values = live.at(name).get<std::vector<double>>();
      if (values.size() != features.size()) {
        throw std::invalid_argument(std::string("checkpoint: live field ") +
                                    name + " has wrong length");
      }
      return values;
    };
    const auto z = field("z");
    const auto z_delta = field("z_delta");
    const auto p = field("p");
    const auto z_bar = field("z_bar");
    const auto h = field("h");
    const auto h_old = field("h_old");
    const auto h_temp = field("h_temp");
    const auto dw = field("dw");
    for (std::size_t k = 0; k < features.size(); ++k) {
      if (features[k] >= num_features) {
        throw std::invalid_argument("checkpoint: live feature out of range");
      }
      const std::uint32_t slot = learner.mutable_table().insert_trace(
          a, features[k]);
      slab.z[slot] = z[k];
      slab.z_delta[slot] = z_delta[k];
      slab.p[slot] = p[k];
      slab.z_bar[slot] = z_bar[k];
      slab.h[slot] = h[k];
      slab.h_old[slot] = h_old[k];
      slab.h_temp[slot] = h_temp[k];
      slab.dw[slot] = dw[k];
    }
  }

  const json& scalars = root.at("scalars");
  std::optional<int> last_action;
  if (!scalars.at("last_action").is_null()) {
    last_action = scalars.at("last_action").get<int>();
  }
  learner.restore_scalars(scalars.at("v_delta").get<double>(),
                          scalars.at("v_old").get<double>(), last_action,
                          scalars.at("step_count").get<std::int64_t>());
  return learner;
}

}  // namespace

void save_checkpoint(const Learner& learner, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << checkpoint_to_json(learner);
  if (!file) throw std::runtime_error("write to " + path + " failed");
}

Learner load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return checkpoint_from_json(buffer.str());
}

}  // namespace swiftsarsa
