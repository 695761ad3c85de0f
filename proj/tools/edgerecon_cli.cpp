// edgerecon: trace generation, single runs and policy comparisons.
//
//   edgerecon gen-traces [--config F] [--seed S] [--frames N] --out DIR
//   edgerecon run        [--config F] [--seed S] [--frames N] --out DIR
//   edgerecon compare    [--config F] [--seed S] [--frames N] --axis camera|server --out DIR
//
// Exit codes: 0 ok, 1 usage, 2 config error, 3 trace error, 4 runtime error.

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "edgerecon/config.hpp"
#include "edgerecon/report.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kTrace = 3, kRuntime = 4 };

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> frames;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "experiment JSON file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "policy seed (also the trace seed unless the config pins one)");
  cmd->add_option("--frames", c.frames, "number of frames")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output directory")->required();
}

edgerecon::ExperimentConfig resolve(const Common& c, edgerecon::ExperimentConfig fallback) {
  edgerecon::ExperimentConfig cfg = c.config.empty() ? std::move(fallback) : edgerecon::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.frames) cfg.n_frames = *c.frames;
  cfg.validate();
  return cfg;
}

int gen_traces(const Common& c) {
  const auto cfg = resolve(c, edgerecon::ExperimentConfig{});
  const auto traces = edgerecon::build_traces(cfg);
  edgerecon::save_traces(traces, c.out);
  edgerecon::write_json(edgerecon::events_json(traces), (std::filesystem::path(c.out) / "events.json").string());
  std::cout << "wrote " << traces.cameras.frames << " frames to " << c.out << "\n";
  return kOk;
}

int run(const Common& c) {
  const auto cfg = resolve(c, edgerecon::ExperimentConfig{});
  const auto res = edgerecon::run_episode(cfg);
  edgerecon::write_run_outputs(cfg, res, c.out);
  std::cout << edgerecon::display_name(cfg.camera_policy) << " / " << edgerecon::display_name(cfg.server_policy)
            << ": reliability " << edgerecon::csv::format_fixed(res.stats.reliability_pct(), 2) << "% over "
            << res.stats.frames << " frames\n";
  return kOk;
}

int compare(const Common& c, const std::string& axis_name) {
  const auto axis = edgerecon::parse_axis(axis_name);
  const auto cfg = resolve(c, axis == edgerecon::Axis::kCamera ? edgerecon::camera_axis_scenario()
                                                               : edgerecon::server_axis_scenario());
  const auto bundle = edgerecon::compare(cfg, axis);
  edgerecon::write_bundle(bundle, c.out);
  std::cout << edgerecon::render_table(bundle);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camera and server selection for edge multi-view reconstruction"};
  app.require_subcommand(1);

  Common gen_opts, run_opts, cmp_opts;
  std::string axis;
  auto* gen = app.add_subcommand("gen-traces", "write cameras.csv, servers.csv and events.json");
  add_common(gen, gen_opts);
  auto* run_cmd = app.add_subcommand("run", "run one episode and write its log, summary and Q-tables");
  add_common(run_cmd, run_opts);
  auto* cmp = app.add_subcommand("compare", "run every policy on one axis against the same traces");
  add_common(cmp, cmp_opts);
  cmp->add_option("--axis", axis, "camera or server")->required()->check(CLI::IsMember({"camera", "server"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return gen_traces(gen_opts);
    if (*run_cmd) return run(run_opts);
    return compare(cmp_opts, axis);
  } catch (const edgerecon::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const edgerecon::TraceError& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return kTrace;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
