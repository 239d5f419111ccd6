#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qvc/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"entanglement-keyed cipher scenario runner"};
  app.get_formatter()->column_width(30);

  std::string config_path, protocol, channel, format, out_path;
  int n = 0, r = 0, trials = 0, threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "config file (key = value lines)");
  auto* opt_protocol = app.add_option("--protocol", protocol, "scenario protocol");
  auto* opt_channel = app.add_option("--channel", channel,
                                     "channel preset or inline 'i:p,x:p,z:p,xz:p'");
  auto* opt_n = app.add_option("--n", n, "message size / qubits per round");
  auto* opt_r = app.add_option("--r", r, "test subsets / test qubits per side");
  auto* opt_trials = app.add_option("--trials", trials, "Monte Carlo trials");
  auto* opt_seed = app.add_option("--seed", seed, "root RNG seed (required)");
  auto* opt_format = app.add_option("--format", format, "output format: json or csv");
  auto* opt_out = app.add_option("--out", out_path, "output path (default stdout)");
  auto* opt_threads = app.add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  qvc::ScenarioConfig cfg;
  std::vector<std::string> diags;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::fprintf(stderr, "config error: cannot open '%s'\n", config_path.c_str());
      return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    diags = qvc::apply_config_text(buf.str(), cfg);
  }
  if (opt_protocol->count()) cfg.protocol = protocol;
  if (opt_channel->count()) cfg.channel = channel;
  if (opt_n->count()) cfg.n = n;
  if (opt_r->count()) cfg.r = r;
  if (opt_trials->count()) cfg.trials = trials;
  if (opt_seed->count()) {
    cfg.seed = seed;
    cfg.seed_set = true;
  }
  if (opt_format->count()) cfg.format = format;
  if (opt_out->count()) cfg.out_path = out_path;
  if (opt_threads->count()) cfg.threads = threads;

  for (const auto& d : qvc::validate_config(cfg)) diags.push_back(d);
  if (!diags.empty()) {
    for (const auto& d : diags) std::fprintf(stderr, "config error: %s\n", d.c_str());
    return 1;
  }

  try {
    auto start = std::chrono::steady_clock::now();
    qvc::RunSummary summary = qvc::run_scenario(cfg);
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string rendered = summary.render();
    if (cfg.out_path.empty()) {
      std::fputs(rendered.c_str(), stdout);
    } else {
      std::ofstream out(cfg.out_path, std::ios::binary);
      if (!out) {
        std::fprintf(stderr, "config error: cannot write '%s'\n", cfg.out_path.c_str());
        return 1;
      }
      out << rendered;
    }
    std::fprintf(stderr, "wall time: %.3f s\n", summary.wall_seconds);
    return summary.all_bounds_pass() ? 0 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}
