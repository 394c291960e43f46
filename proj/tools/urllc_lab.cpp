// Copyright 2026 The urllc_lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "urllc/errors.hpp"
#include "urllc/experiments.hpp"

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_trials;
  std::optional<std::uint64_t> target_events;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, Common& c, bool needs_out) {
  cmd->add_option("--config", c.config, "JSON spec file (may hold a presets section)");
  cmd->add_option("--preset", c.preset, "preset name");
  auto* out = cmd->add_option("--out", c.out, "output path");
  if (needs_out) out->required();
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--max-trials", c.max_trials, "trial cap per Monte Carlo estimate");
  cmd->add_option("--target-events", c.target_events, "outage events before stopping");
}

urllc::SweepSpec resolve(const Common& c, urllc::RunOptions opts) {
  urllc::SweepSpec spec;
  if (!c.config.empty()) {
    spec = urllc::load_spec(c.config, c.preset);
  } else if (!c.preset.empty()) {
    spec = urllc::preset(c.preset);
  } else {
    throw urllc::ConfigError("give --config or --preset");
  }
  opts.workers = c.workers;
  opts.seed = c.seed;
  opts.max_trials = c.max_trials;
  opts.target_events = c.target_events;
  return urllc::apply_options(spec, opts);
}

void set_log_level() {
  const char* env = std::getenv("URLLC_LAB_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
}

}  // namespace

int main(int argc, char** argv) {
  set_log_level();
  CLI::App app{"URLLC lab: proactive multi-cell association analysis and simulation"};
  app.require_subcommand(1);

  Common analyze_opts, simulate_opts, sweep_opts, fit_opts;
  std::vector<double> at;
  std::vector<std::string> report_paths;
  double gap = 0.3;
  std::string presets_out;

  auto* analyze = app.add_subcommand("analyze", "analytic rows only");
  add_common(analyze, analyze_opts, true);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo at selected grid values");
  add_common(simulate, simulate_opts, true);
  simulate->add_option("--at", at, "grid values to run (default: whole grid)");
  auto* sweep = app.add_subcommand("sweep", "full sweep with analysis and Monte Carlo");
  add_common(sweep, sweep_opts, true);
  auto* fit = app.add_subcommand("fit-zeta", "fit load shapes for every grid point");
  add_common(fit, fit_opts, true);
  auto* rep = app.add_subcommand("report", "compare simulation against analysis");
  rep->add_option("csv", report_paths, "result CSVs")->required();
  rep->add_option("--gap", gap, "allowed gap in decades for approximations");
  auto* presets = app.add_subcommand("presets", "write the built-in presets as JSON");
  presets->add_option("--out", presets_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      urllc::RunOptions o;
      o.analytic_only = true;
      return urllc::run_sweep(resolve(analyze_opts, o), analyze_opts.out, analyze_opts.workers);
    }
    if (*simulate) {
      urllc::RunOptions o;
      if (!at.empty()) o.only_values = at;
      auto spec = resolve(simulate_opts, o);
      if (spec.plans.empty()) throw urllc::ConfigError("the spec has no simulation plans");
      return urllc::run_sweep(spec, simulate_opts.out, simulate_opts.workers);
    }
    if (*sweep) {
      return urllc::run_sweep(resolve(sweep_opts, {}), sweep_opts.out, sweep_opts.workers);
    }
    if (*fit) {
      auto spec = resolve(fit_opts, {});
      spec.zeta.fit = true;
      spec.zeta.table_path = fit_opts.out;
      urllc::ZetaProvider provider(spec.zeta, spec.seed, fit_opts.workers);
      const auto series = spec.xi_bytes.empty() ? std::vector<double>{spec.packet.payload}
                                                : std::vector<double>{spec.xi_bytes.front()};
      for (double v : spec.grid) {
        provider.ensure(urllc::grid_point(spec, v, series.front()).network);
      }
      provider.save();
      spdlog::info("wrote {} zeta entries to {}", provider.table().entries().size(), fit_opts.out);
      return 0;
    }
    if (*rep) {
      const auto r = urllc::report(report_paths, gap);
      std::cout << r.text;
      return r.exit_code;
    }
    if (*presets) {
      const auto text = urllc::presets_json().dump(2) + "\n";
      if (presets_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(presets_out) << text;
      }
      return 0;
    }
  } catch (const urllc::ConfigError& e) {
    spdlog::error("invalid configuration: {}", e.what());
    return 2;
  } catch (const urllc::SimulationFailure& e) {
    spdlog::error("simulation failed: {}", e.what());
    return 3;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
