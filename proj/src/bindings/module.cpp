#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swiftsarsa/checkpoint.hpp"
#include "swiftsarsa/config.hpp"
#include "swiftsarsa/env.hpp"
#include "swiftsarsa/harness.hpp"
#include "swiftsarsa/heatmap.hpp"
#include "swiftsarsa/learner.hpp"
#include "swiftsarsa/verify.hpp"

namespace py = pybind11;
using namespace swiftsarsa;

PYBIND11_MODULE(_swiftsarsa, m) {
  m.doc() = "Linear on-policy control with per-feature step-size "
            "optimization, plus the operant conditioning stream it is "
            "benchmarked on";

  py::class_<SparseFeatures>(m, "SparseFeatures")
      .def(py::init([](const std::vector<std::pair<std::uint32_t, double>>&
                           entries,
                       std::uint32_t size) {
             std::vector<SparseFeatures::Entry> converted;
             converted.reserve(entries.size());
             for (const auto& [index, value] : entries) {
               converted.push_back({index, value});
             }
             return SparseFeatures(std::move(converted), size);
           }),
           py::arg("entries"), py::arg("size"))
      .def_static("binary", &SparseFeatures::binary, py::arg("indices"),
                  py::arg("size"))
      .def_property_readonly("size", &SparseFeatures::size)
      .def("active_count", &SparseFeatures::active_count)
      .def("entries", [](const SparseFeatures& phi) {
        std::vector<std::pair<std::uint32_t, double>> out;
        for (const auto& e : phi.entries()) out.emplace_back(e.index, e.value);
        return out;
      });

  py::enum_<PolicyKind>(m, "PolicyKind")
      .value("SOFTMAX", PolicyKind::kSoftmax)
      .value("EPSILON_GREEDY", PolicyKind::kEpsilonGreedy);

  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init<>())
      .def_readwrite("meta_step_size", &Hyperparams::meta_step_size)
      .def_readwrite("rate_bound", &Hyperparams::rate_bound)
      .def_readwrite("step_size_floor", &Hyperparams::step_size_floor)
      .def_readwrite("init_step_size", &Hyperparams::init_step_size)
      .def_readwrite("discount", &Hyperparams::discount)
      .def_readwrite("trace_decay", &Hyperparams::trace_decay)
      .def_readwrite("decay_rate", &Hyperparams::decay_rate)
      .def_readwrite("prune_threshold", &Hyperparams::prune_threshold)
      .def_readwrite("policy", &Hyperparams::policy)
      .def_readwrite("temperature", &Hyperparams::temperature)
      .def_readwrite("explore_prob", &Hyperparams::explore_prob)
      .def("validate", &Hyperparams::validate);

  py::class_<StepDiagnostics>(m, "StepDiagnostics")
      .def_readonly("chosen_action", &StepDiagnostics::chosen_action)
      .def_readonly("td_error", &StepDiagnostics::td_error)
      .def_readonly("tau", &StepDiagnostics::tau)
      .def_readonly("effective_rate", &StepDiagnostics::effective_rate)
      .def_readonly("decay_triggered", &StepDiagnostics::decay_triggered)
      .def_readonly("active_trace_count",
                    &StepDiagnostics::active_trace_count);

  py::class_<Learner>(m, "Learner")
      .def(py::init<std::uint32_t, std::uint32_t, const Hyperparams&,
                    std::uint64_t>(),
           py::arg("num_actions"), py::arg("num_features"),
           py::arg("hyperparams"), py::arg("seed"))
      .def("step", &Learner::step, py::arg("features"), py::arg("reward"))
      .def("action_values", &Learner::action_values, py::arg("features"))
      .def_property_readonly("num_actions", &Learner::num_actions)
      .def_property_readonly("num_features", &Learner::num_features)
      .def_property_readonly("step_count", &Learner::step_count)
      .def("weight", [](const Learner& learner, std::uint32_t action,
                        std::uint32_t feature) {
        return learner.table().w(action, feature);
      })
      .def("step_size", [](const Learner& learner, std::uint32_t action,
                           std::uint32_t feature) {
        return learner.table().alpha(action, feature);
      })
      .def("live_trace_count",
           [](const Learner& learner) { return learner.table().live_count(); });

  m.def("checkpoint_to_json", &checkpoint_to_json);
  m.def("checkpoint_from_json", &checkpoint_from_json);

  py::class_<EnvConfig>(m, "EnvConfig")
      .def(py::init<>())
      .def_readwrite("n", &EnvConfig::n)
      .def_readwrite("d", &EnvConfig::d)
      .def_readwrite("m", &EnvConfig::m)
      .def_readwrite("isi_min", &EnvConfig::isi_min)
      .def_readwrite("isi_max", &EnvConfig::isi_max)
      .def_readwrite("iti_min", &EnvConfig::iti_min)
      .def_readwrite("iti_max", &EnvConfig::iti_max)
      .def_readwrite("reward_magnitude", &EnvConfig::reward_magnitude)
      .def_readwrite("mu_init", &EnvConfig::mu_init)
      .def_readwrite("mu_min", &EnvConfig::mu_min)
      .def_readwrite("mu_max", &EnvConfig::mu_max)
      .def_readwrite("walk_std", &EnvConfig::walk_std)
      .def_property_readonly("num_discrete_actions",
                             &EnvConfig::num_discrete_actions)
      .def("validate", &EnvConfig::validate);

  py::class_<Observation>(m, "Observation")
      .def_readonly("features", &Observation::features)
      .def_readonly("reward", &Observation::reward);

  py::class_<OperantEnv>(m, "OperantEnv")
      .def(py::init<const EnvConfig&, std::uint64_t>(), py::arg("config"),
           py::arg("seed"))
      .def("step", &OperantEnv::step, py::arg("action"),
           py::return_value_policy::reference_internal)
      .def_property_readonly("current", &OperantEnv::current,
                             py::return_value_policy::reference_internal)
      .def_property_readonly("t", &OperantEnv::t)
      .def_property_readonly("current_cue", &OperantEnv::current_cue)
      .def_property_readonly("mu", &OperantEnv::mu)
      .def_property_readonly("trial_count", &OperantEnv::trial_count)
      .def_property_readonly("emitted_reward_total",
                             &OperantEnv::emitted_reward_total);

  m.def("mu_update", &mu_update, py::arg("mu"), py::arg("noise"),
        py::arg("lo") = 0.01, py::arg("hi") = 0.1);
  m.def("action_decode", &action_decode, py::arg("index"), py::arg("d"));
  m.def("action_encode", &action_encode, py::arg("bits"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("env", &RunConfig::env)
      .def_readwrite("agent", &RunConfig::agent)
      .def_readwrite("steps", &RunConfig::steps)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("record_interval", &RunConfig::record_interval)
      .def_readwrite("append_reward_feature", &RunConfig::append_reward_feature)
      .def_readwrite("bias_feature", &RunConfig::bias_feature);

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("mean_effective_rate", &RunSummary::mean_effective_rate)
      .def_readonly("decay_trigger_count", &RunSummary::decay_trigger_count)
      .def_readonly("mean_active_traces", &RunSummary::mean_active_traces)
      .def_readonly("peak_active_traces", &RunSummary::peak_active_traces)
      .def_readonly("final_mu", &RunSummary::final_mu)
      .def_readonly("trial_count", &RunSummary::trial_count)
      .def_readonly("seconds", &RunSummary::seconds);

  py::class_<CurvePoint>(m, "CurvePoint")
      .def_readonly("step", &CurvePoint::step)
      .def_readonly("average_reward", &CurvePoint::average_reward);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("lifetime_reward", &RunResult::lifetime_reward)
      .def_readonly("total_reward", &RunResult::total_reward)
      .def_readonly("steps", &RunResult::steps)
      .def_readonly("curve", &RunResult::curve)
      .def_readonly("summary", &RunResult::summary);

  m.def(
      "run_lifetime",
      [](const RunConfig& config) {
        py::gil_scoped_release release;
        return run_lifetime(config);
      },
      py::arg("config"));
  m.def("oracle_policy_run", &oracle_policy_run, py::arg("env"),
        py::arg("steps"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("random_policy_run", &random_policy_run, py::arg("env"),
        py::arg("steps"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<SweepGrid>(m, "SweepGrid")
      .def(py::init<>())
      .def_readwrite("meta_step_sizes", &SweepGrid::meta_step_sizes)
      .def_readwrite("init_step_sizes", &SweepGrid::init_step_sizes)
      .def_readwrite("seeds", &SweepGrid::seeds)
      .def_readwrite("base", &SweepGrid::base);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("meta_step_size", &SweepRow::meta_step_size)
      .def_readonly("init_step_size", &SweepRow::init_step_size)
      .def_readonly("seed", &SweepRow::seed)
      .def_readonly("lifetime_reward", &SweepRow::lifetime_reward)
      .def_readonly("error", &SweepRow::error);

  m.def(
      "run_sweep",
      [](const SweepGrid& grid, unsigned parallelism) {
        py::gil_scoped_release release;
        return run_sweep(grid, parallelism);
      },
      py::arg("grid"), py::arg("parallelism") = 0);
  m.def("csv_to_string", &csv_to_string);
  m.def("parse_csv", &parse_csv);
  m.def("write_csv", &write_csv, py::arg("table"), py::arg("path"));
  m.def("read_csv", &read_csv, py::arg("path"));
  m.def("render_heatmap_svg",
        [](const SweepTable& table) { return render_heatmap_svg(table); });

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("passed", &CheckResult::passed)
      .def_readonly("detail", &CheckResult::detail);
  m.def(
      "run_verification",
      [](std::uint64_t seed, bool quick) {
        py::gil_scoped_release release;
        return run_verification(seed, quick);
      },
      py::arg("seed") = 2024, py::arg("quick") = true);
}
