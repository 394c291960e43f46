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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "urllc/analysis.hpp"
#include "urllc/config.hpp"
#include "urllc/fitting.hpp"
#include "urllc/montecarlo.hpp"
#include "urllc/shortpacket.hpp"

namespace urllc {

enum class Quantity { uplink, downlink, delay, load_pmf };
enum class SweepVar { mu_over_lambda2, K, xi, delta, theta };

struct ZetaSettings {
  bool fit = true;                   // fit on a cache miss; otherwise use `seed`
  double seed = 3.5;
  std::uint64_t realizations = 400;
  double window_km = 0.6;
  std::string table_path;            // optional CSV cache
};

struct SweepSpec {
  std::string name = "custom";
  Quantity quantity = Quantity::uplink;
  Collaboration collaboration = Collaboration::non_collaborative;
  NetworkConfig network = reference_config();
  ShortPacketParams packet;
  DelayModel delay;
  double budget_ms = 1.0;
  SweepVar variable = SweepVar::mu_over_lambda2;
  std::vector<double> grid;
  std::vector<double> xi_bytes;      // one series per payload; empty: packet.payload only
  std::vector<SimPlan> plans;        // empty: analytic rows only
  ZetaSettings zeta;
  LoadWeighting weighting = LoadWeighting::per_ap;
  std::uint64_t seed = 1;
  std::size_t load_pmf_max_n = 15;

  // Throws ConfigError.
  void validate() const;
};

SweepSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepSpec& spec);

// FNV-1a over the canonical JSON of the spec.
std::uint64_t config_hash(const SweepSpec& spec);

std::vector<std::string> preset_names();
SweepSpec preset(const std::string& name);
// {"presets": {name: spec, ...}} for every built-in preset.
nlohmann::json presets_json();

// Loads a spec file. A file with a "presets" object needs `preset_name`.
SweepSpec load_spec(const std::string& path, const std::string& preset_name = "");

// Configuration at one grid point; returns the payload in use.
struct GridPoint {
  NetworkConfig network;
  ShortPacketParams packet;
  double theta = 0.0;
};
GridPoint grid_point(const SweepSpec& spec, double value, double xi_bytes);

// Lazily fills a zeta table for every tier and link view of the configs it is asked about.
class ZetaProvider {
 public:
  explicit ZetaProvider(ZetaSettings settings, std::uint64_t seed = 1, std::size_t workers = 0);

  const ZetaTable& table() const { return table_; }
  void ensure(const NetworkConfig& config);
  void save() const;

 private:
  void ensure_view(const NetworkConfig& view);

  ZetaSettings settings_;
  std::uint64_t seed_;
  std::size_t workers_;
  ZetaTable table_;
};

struct ResultRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  int K = 1;
  double xi_bytes = 0.0;
  double theta = 0.0;
  std::string quantity;
  std::string collaboration;
  std::string mode;
  std::string fading;
  std::optional<double> analytic;
  std::string analytic_kind;
  std::optional<double> simulated;
  std::optional<double> std_error;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> events;
  std::string terminated_by;
  std::string config_hash;
};

std::string csv_header();
std::string format_row(const ResultRow& row);
std::vector<ResultRow> read_results_csv(std::istream& in);

struct RunOptions {
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_trials;
  std::optional<std::uint64_t> target_events;
  std::optional<std::vector<double>> only_values;  // restrict the grid
  bool analytic_only = false;
};

// Applies overrides from `options` to a copy of the spec.
SweepSpec apply_options(SweepSpec spec, const RunOptions& options);

// Computes all rows. Throws ConfigError or SimulationFailure; `partial` receives the rows
// completed before a failure.
std::vector<ResultRow> compute_sweep(const SweepSpec& spec, std::size_t workers,
                                     std::vector<ResultRow>* partial = nullptr,
                                     nlohmann::json* summary = nullptr);

// Writes `out_path` atomically and a JSON summary next to it.
// Exit codes: 0 success, 2 invalid configuration, 3 simulation failure (rows so far in
// `<out_path>.partial`).
int run_sweep(const SweepSpec& spec, const std::string& out_path, std::size_t workers);

struct ReportResult {
  std::string text;
  int violations = 0;
  int exit_code = 0;
};

// Compares simulation and analysis in result CSVs; exit_code is nonzero on bound
// violations, schema mismatches or mixed configurations.
ReportResult report(const std::vector<std::string>& csv_paths, double gap_threshold = 0.3);

std::string to_string(Quantity q);
std::string to_string(SweepVar v);

}  // namespace urllc
