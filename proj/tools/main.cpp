#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "swiftsarsa/checkpoint.hpp"
#include "swiftsarsa/config.hpp"
#include "swiftsarsa/harness.hpp"
#include "swiftsarsa/heatmap.hpp"
#include "swiftsarsa/verify.hpp"

namespace {

namespace fs = std::filesystem;
using swiftsarsa::format_double;
using ordered_json = nlohmann::ordered_json;

std::string sha1_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha1(),
                 nullptr) != 1) {
    throw std::runtime_error("sha1 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

// Same object id `git hash-object` would assign the file.
std::string git_blob_sha1(const std::string& content) {
  return sha1_hex("blob " + std::to_string(content.size()) + '\0' + content);
}

std::string slurp(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

void spill(const fs::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  file << content;
  if (!file) throw std::runtime_error("write to " + path.string() + " failed");
}

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool seed_given = false;
  std::uint64_t seed = 0;
};

fs::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("SWIFTSARSA_OUT_DIR");
      env != nullptr && *env != '\0') {
    return env;
  }
  return ".";
}

swiftsarsa::ResolvedConfig load_resolved(const CommonArgs& args) {
  swiftsarsa::ConfigMap map;
  if (!args.config_path.empty()) {
    map = swiftsarsa::load_config_file(args.config_path);
  }
  swiftsarsa::apply_overrides(map, args.overrides);
  if (args.seed_given) {
    swiftsarsa::apply_overrides(map, {"run.seed=" + std::to_string(args.seed)});
  }
  return swiftsarsa::resolve_config(map);
}

ordered_json config_json(const swiftsarsa::ResolvedConfig& resolved) {
  ordered_json out;
  for (const auto& [key, value] : swiftsarsa::config_key_values(resolved)) {
    out[key] = value;
  }
  return out;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const swiftsarsa::ResolvedConfig& resolved,
                    const std::vector<fs::path>& artifacts) {
  ordered_json manifest;
  manifest["command"] = command;
  manifest["config"] = config_json(resolved);
  ordered_json files = ordered_json::array();
  for (const fs::path& path : artifacts) {
    const std::string content = slurp(path);
    files.push_back({{"name", path.filename().string()},
                     {"sha1", git_blob_sha1(content)},
                     {"bytes", content.size()}});
  }
  manifest["artifacts"] = files;
  spill(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

int cmd_run(const CommonArgs& args, bool trace) {
  const swiftsarsa::ResolvedConfig resolved = load_resolved(args);
  const fs::path out_dir = resolve_out_dir(args.out_dir);
  fs::create_directories(out_dir);

  std::ofstream trace_file;
  swiftsarsa::StepTraceSink sink;
  if (trace) {
    trace_file.open(out_dir / "trace.csv", std::ios::binary);
    if (!trace_file) throw std::runtime_error("cannot open trace.csv");
    trace_file << "t,cue,action,reward,mu,td_error,effective_rate\n";
    sink = [&trace_file](const swiftsarsa::StepTraceRow& row) {
      trace_file << row.t << ',' << row.cue << ',' << row.action << ','
                 << format_double(row.reward) << ',' << format_double(row.mu)
                 << ',' << format_double(row.td_error) << ','
                 << format_double(row.effective_rate) << '\n';
    };
  }

  const swiftsarsa::RunResult result =
      swiftsarsa::run_lifetime(resolved.run, sink);
  if (trace_file.is_open()) trace_file.close();

  ordered_json out;
  out["lifetime_reward"] = result.lifetime_reward;
  out["total_reward"] = result.total_reward;
  out["steps"] = result.steps;
  out["trial_count"] = result.summary.trial_count;
  out["mean_effective_rate"] = result.summary.mean_effective_rate;
  out["decay_trigger_count"] = result.summary.decay_trigger_count;
  out["mean_active_traces"] = result.summary.mean_active_traces;
  out["peak_active_traces"] = result.summary.peak_active_traces;
  out["final_mu"] = result.summary.final_mu;
  ordered_json curve = ordered_json::array();
  for (const auto& point : result.curve) {
    curve.push_back({{"step", point.step},
                     {"average_reward", point.average_reward}});
  }
  out["curve"] = curve;
  spill(out_dir / "result.json", out.dump(2) + "\n");

  std::vector<fs::path> artifacts{out_dir / "result.json"};
  if (trace) artifacts.push_back(out_dir / "trace.csv");
  write_manifest(out_dir, "run", resolved, artifacts);

  std::cout << "lifetime reward " << format_double(result.lifetime_reward)
            << " over " << result.steps << " steps ("
            << result.summary.trial_count << " trials)\n";
  std::cerr << "took " << result.summary.seconds << "s\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args, unsigned parallelism, bool quiet) {
  const swiftsarsa::ResolvedConfig resolved = load_resolved(args);
  const fs::path out_dir = resolve_out_dir(args.out_dir);
  fs::create_directories(out_dir);

  std::function<void(std::size_t, std::size_t)> progress;
  if (!quiet) {
    progress = [](std::size_t done, std::size_t total) {
      std::cerr << "\rcell " << done << "/" << total << std::flush;
      if (done == total) std::cerr << '\n';
    };
  }
  const swiftsarsa::SweepTable table =
      swiftsarsa::run_sweep(resolved.sweep, parallelism, progress);

  swiftsarsa::write_csv(table, (out_dir / "sweep.csv").string());
  swiftsarsa::write_heatmap(table, (out_dir / "heatmap.svg").string());
  write_manifest(out_dir, "sweep", resolved,
                 {out_dir / "sweep.csv", out_dir / "heatmap.svg"});

  std::size_t failed = 0;
  for (const auto& row : table) {
    if (!row.error.empty()) ++failed;
  }
  std::cout << table.size() << " cells (" << failed << " failed) -> "
            << (out_dir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_plot(const std::string& from, const std::string& out,
             const std::string& title) {
  const swiftsarsa::SweepTable table = swiftsarsa::read_csv(from);
  swiftsarsa::HeatmapOptions options;
  if (!title.empty()) options.title = title;
  swiftsarsa::write_heatmap(table, out, options);
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_verify(std::uint64_t seed, bool full) {
  const std::vector<swiftsarsa::CheckResult> results =
      swiftsarsa::run_verification(seed, !full);
  bool all_passed = true;
  for (const auto& result : results) {
    std::cout << (result.passed ? "PASS " : "FAIL ") << result.name << ": "
              << result.detail << "\n";
    all_passed = all_passed && result.passed;
  }
  return all_passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear on-policy control with per-feature step-size "
               "optimization, on an operant conditioning stream"};
  app.require_subcommand(1);

  CommonArgs args;
  unsigned parallelism = 0;
  bool trace = false;
  bool quiet = false;
  bool full = false;
  std::string plot_from, plot_out = "heatmap.svg", plot_title;
  std::uint64_t verify_seed = 2024;

  auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* opt = cmd->add_option("--config", args.config_path,
                                "config file (key = value lines)");
    if (config_required) opt->required();
    cmd->add_option("--set", args.overrides,
                    "override a config key, e.g. --set run.steps=1000");
    cmd->add_option("--out-dir", args.out_dir,
                    "output directory (default: $SWIFTSARSA_OUT_DIR or .)");
    cmd->add_option("--seed", args.seed, "override run.seed")
        ->each([&](const std::string&) { args.seed_given = true; });
  };

  CLI::App* run = app.add_subcommand("run", "one lifetime, write result.json");
  add_common(run, false);
  run->add_flag("--trace", trace, "also write a per-step trace.csv");

  CLI::App* sweep =
      app.add_subcommand("sweep", "grid sweep, write sweep.csv + heatmap.svg");
  add_common(sweep, false);
  sweep->add_option("--parallelism", parallelism,
                    "worker threads (default: all cores)");
  sweep->add_flag("--quiet", quiet, "no progress output");

  CLI::App* plot =
      app.add_subcommand("plot", "re-render a heatmap from a sweep CSV");
  plot->add_option("--from", plot_from, "sweep CSV to read")->required();
  plot->add_option("--out", plot_out, "output SVG path");
  plot->add_option("--title", plot_title, "heatmap title");

  CLI::App* verify =
      app.add_subcommand("verify", "run the invariant and oracle checks");
  verify->add_option("--seed", verify_seed, "verification seed");
  verify->add_flag("--full", full, "full-size checks (slower)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed()) return cmd_run(args, trace);
    if (sweep->parsed()) return cmd_sweep(args, parallelism, quiet);
    if (plot->parsed()) return cmd_plot(plot_from, plot_out, plot_title);
    if (verify->parsed()) return cmd_verify(verify_seed, full);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
