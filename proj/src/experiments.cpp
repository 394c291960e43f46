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

#include "urllc/experiments.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "urllc/errors.hpp"
#include "urllc/geometry.hpp"

namespace urllc {

using nlohmann::json;

namespace {

// ---- enum names ----------------------------------------------------------------

template <class E>
struct Names;

#define URLLC_NAMES(E, ...)                                              \
  template <>                                                            \
  struct Names<E> {                                                      \
    static const std::vector<std::pair<E, std::string>>& list() {        \
      static const std::vector<std::pair<E, std::string>> v{__VA_ARGS__}; \
      return v;                                                          \
    }                                                                    \
  };

URLLC_NAMES(Quantity, {Quantity::uplink, "uplink"}, {Quantity::downlink, "downlink"},
            {Quantity::delay, "delay"}, {Quantity::load_pmf, "load_pmf"})
URLLC_NAMES(SweepVar, {SweepVar::mu_over_lambda2, "mu_over_lambda2"}, {SweepVar::K, "K"},
            {SweepVar::xi, "xi"}, {SweepVar::delta, "delta"}, {SweepVar::theta, "theta"})
URLLC_NAMES(Collaboration, {Collaboration::non_collaborative, "non_collaborative"},
            {Collaboration::collaborative, "collaborative"})
URLLC_NAMES(SimMode, {SimMode::model_matched, "model_matched"},
            {SimMode::system_level, "system_level"})
URLLC_NAMES(Fading, {Fading::independent, "independent"},
            {Fading::distance_correlated, "distance_correlated"})
URLLC_NAMES(UplinkCopies, {UplinkCopies::per_member, "per_member"},
            {UplinkCopies::single, "single"})
URLLC_NAMES(MemberGeometry, {MemberGeometry::marginal, "marginal"},
            {MemberGeometry::joint, "joint"})
URLLC_NAMES(LoadWeighting, {LoadWeighting::per_ap, "per_ap"},
            {LoadWeighting::size_biased, "size_biased"})
URLLC_NAMES(PayloadUnit, {PayloadUnit::bytes, "bytes"}, {PayloadUnit::bits, "bits"})

#undef URLLC_NAMES

template <class E>
std::string name_of(E e) {
  for (const auto& [v, s] : Names<E>::list()) {
    if (v == e) return s;
  }
  return "?";
}

template <class E>
E parse_enum(const json& j, const char* field) {
  const auto s = j.get<std::string>();
  for (const auto& [v, name] : Names<E>::list()) {
    if (name == s) return v;
  }
  throw ConfigError(std::string("unknown value '") + s + "' for " + field);
}

// ---- JSON helpers -------------------------------------------------------------

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return item.key() == a; }) == allowed.end()) {
      throw ConfigError(std::string("unknown key '") + item.key() + "' in " + where);
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json plan_json(const SimPlan& p) {
  return {{"mode", name_of(p.mode)},
          {"fading", name_of(p.fading)},
          {"target_events", p.stop.target_events},
          {"max_trials", p.stop.max_trials},
          {"window_km", p.window_km},
          {"copies", name_of(p.copies)},
          {"member_geometry", name_of(p.member_geometry)},
          {"correlation_length_km", p.correlation_length_km}};
}

SimPlan plan_from_json(const json& j) {
  check_keys(j,
             {"mode", "fading", "target_events", "max_trials", "window_km", "copies",
              "member_geometry", "correlation_length_km"},
             "plan");
  SimPlan p;
  if (j.contains("mode")) p.mode = parse_enum<SimMode>(j["mode"], "mode");
  if (j.contains("fading")) p.fading = parse_enum<Fading>(j["fading"], "fading");
  if (j.contains("copies")) p.copies = parse_enum<UplinkCopies>(j["copies"], "copies");
  if (j.contains("member_geometry")) {
    p.member_geometry = parse_enum<MemberGeometry>(j["member_geometry"], "member_geometry");
  }
  read(j, "target_events", p.stop.target_events);
  read(j, "max_trials", p.stop.max_trials);
  read(j, "window_km", p.window_km);
  read(j, "correlation_length_km", p.correlation_length_km);
  return p;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_atomically(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out << body;
    if (!out) throw ConfigError("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

double tier2_density(const NetworkConfig& c) {
  return c.tiers.size() > 1 ? c.tiers[1].density : c.tiers.at(0).density;
}

double inner_radius(const NetworkConfig& c, double window_km) {
  return window_km - association_guard_km(c);
}

}  // namespace

std::string to_string(Quantity q) { return name_of(q); }
std::string to_string(SweepVar v) { return name_of(v); }

// ---- spec -----------------------------------------------------------------------

void SweepSpec::validate() const {
  network.validate();
  packet.validate();
  delay.validate();
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  const bool up = grid.size() < 2 || grid[1] > grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1])) {
      throw ConfigError("sweep grid must be strictly monotone");
    }
  }
  for (double v : grid) {
    if (!std::isfinite(v) || v <= 0.0) throw ConfigError("sweep values must be positive");
    if (variable == SweepVar::K && (v != std::floor(v) || v < 1.0)) {
      throw ConfigError("K values must be positive integers");
    }
    if (variable == SweepVar::delta) {
      NetworkConfig c = network;
      c.delta = v;
      c.validate();
    }
  }
  for (double x : xi_bytes) {
    if (!(x > 0.0)) throw ConfigError("payload sizes must be positive");
  }
  for (const auto& p : plans) p.validate();
  if (!(budget_ms > 0.0)) throw ConfigError("delay budget must be positive");
  if (quantity == Quantity::load_pmf && plans.size() > 1) {
    throw ConfigError("load_pmf sweeps take at most one plan");
  }
  if (!(zeta.seed > 0.0)) throw ConfigError("zeta seed must be positive");
  if (zeta.fit && !(zeta.window_km > 0.0 && zeta.realizations > 0)) {
    throw ConfigError("zeta fitting needs a window and realizations");
  }
}

SweepSpec spec_from_json(const json& j) {
  try {
    check_keys(j,
               {"name", "quantity", "collaboration", "network", "packet", "delay", "budget_ms",
                "sweep", "xi_bytes", "plans", "zeta", "weighting", "seed", "load_pmf_max_n"},
               "spec");
    SweepSpec s;
    read(j, "name", s.name);
    if (j.contains("quantity")) s.quantity = parse_enum<Quantity>(j["quantity"], "quantity");
    if (j.contains("collaboration")) {
      s.collaboration = parse_enum<Collaboration>(j["collaboration"], "collaboration");
    }
    if (j.contains("network")) {
      const auto& n = j["network"];
      check_keys(n, {"tiers", "user_density", "alpha", "delta", "K"}, "network");
      if (n.contains("tiers")) {
        s.network.tiers.clear();
        for (const auto& t : n["tiers"]) {
          check_keys(t, {"power_w", "density", "bias"}, "tier");
          Tier tier;
          read(t, "power_w", tier.power_w);
          read(t, "density", tier.density);
          read(t, "bias", tier.bias);
          s.network.tiers.push_back(tier);
        }
      }
      read(n, "user_density", s.network.user_density);
      read(n, "alpha", s.network.alpha);
      read(n, "delta", s.network.delta);
      read(n, "K", s.network.K);
    }
    if (j.contains("packet")) {
      const auto& p = j["packet"];
      check_keys(p, {"payload", "unit", "duration_ms", "bandwidth_hz", "error_prob"}, "packet");
      read(p, "payload", s.packet.payload);
      if (p.contains("unit")) s.packet.unit = parse_enum<PayloadUnit>(p["unit"], "unit");
      read(p, "duration_ms", s.packet.duration_ms);
      read(p, "bandwidth_hz", s.packet.bandwidth_hz);
      read(p, "error_prob", s.packet.error_prob);
    }
    if (j.contains("delay")) {
      const auto& d = j["delay"];
      check_keys(d, {"beta", "slot_ms"}, "delay");
      read(d, "beta", s.delay.beta);
      read(d, "slot_ms", s.delay.slot_ms);
    }
    read(j, "budget_ms", s.budget_ms);
    if (j.contains("sweep")) {
      const auto& w = j["sweep"];
      check_keys(w, {"variable", "values"}, "sweep");
      if (w.contains("variable")) s.variable = parse_enum<SweepVar>(w["variable"], "variable");
      read(w, "values", s.grid);
    }
    read(j, "xi_bytes", s.xi_bytes);
    if (j.contains("plans")) {
      for (const auto& p : j["plans"]) s.plans.push_back(plan_from_json(p));
    }
    if (j.contains("zeta")) {
      const auto& z = j["zeta"];
      check_keys(z, {"fit", "seed", "realizations", "window_km", "table_path"}, "zeta");
      read(z, "fit", s.zeta.fit);
      read(z, "seed", s.zeta.seed);
      read(z, "realizations", s.zeta.realizations);
      read(z, "window_km", s.zeta.window_km);
      read(z, "table_path", s.zeta.table_path);
    }
    if (j.contains("weighting")) s.weighting = parse_enum<LoadWeighting>(j["weighting"], "weighting");
    read(j, "seed", s.seed);
    read(j, "load_pmf_max_n", s.load_pmf_max_n);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
}

json to_json(const SweepSpec& s) {
  json tiers = json::array();
  for (const auto& t : s.network.tiers) {
    tiers.push_back({{"power_w", t.power_w}, {"density", t.density}, {"bias", t.bias}});
  }
  json plans = json::array();
  for (const auto& p : s.plans) plans.push_back(plan_json(p));
  return {{"name", s.name},
          {"quantity", name_of(s.quantity)},
          {"collaboration", name_of(s.collaboration)},
          {"network",
           {{"tiers", tiers},
            {"user_density", s.network.user_density},
            {"alpha", s.network.alpha},
            {"delta", s.network.delta},
            {"K", s.network.K}}},
          {"packet",
           {{"payload", s.packet.payload},
            {"unit", name_of(s.packet.unit)},
            {"duration_ms", s.packet.duration_ms},
            {"bandwidth_hz", s.packet.bandwidth_hz},
            {"error_prob", s.packet.error_prob}}},
          {"delay", {{"beta", s.delay.beta}, {"slot_ms", s.delay.slot_ms}}},
          {"budget_ms", s.budget_ms},
          {"sweep", {{"variable", name_of(s.variable)}, {"values", s.grid}}},
          {"xi_bytes", s.xi_bytes},
          {"plans", plans},
          {"zeta",
           {{"fit", s.zeta.fit},
            {"seed", s.zeta.seed},
            {"realizations", s.zeta.realizations},
            {"window_km", s.zeta.window_km},
            {"table_path", s.zeta.table_path}}},
          {"weighting", name_of(s.weighting)},
          {"seed", s.seed},
          {"load_pmf_max_n", s.load_pmf_max_n}};
}

std::uint64_t config_hash(const SweepSpec& spec) {
  auto j = to_json(spec);
  j["zeta"].erase("table_path");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---- presets --------------------------------------------------------------------

namespace {

std::vector<double> range(double from, double to, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::lround((to - from) / step));
  for (int i = 0; i <= n; ++i) v.push_back(std::round((from + i * step) * 1e9) / 1e9);
  return v;
}

SimPlan capped_plan(SimMode mode, double window_km, std::uint64_t max_trials,
                    Fading fading = Fading::independent) {
  SimPlan p;
  p.mode = mode;
  p.fading = fading;
  p.window_km = window_km;
  p.stop = {200, max_trials};
  return p;
}

SweepSpec reliability_preset(const std::string& name, Quantity q, Collaboration c, bool vs_K) {
  SweepSpec s;
  s.name = name;
  s.quantity = q;
  s.collaboration = c;
  s.network = reference_config(250.0, 0.5, 4);
  s.xi_bytes = {8, 32, 64};
  if (vs_K) {
    s.variable = SweepVar::K;
    s.grid = range(1, 6, 1);
  } else {
    s.variable = SweepVar::mu_over_lambda2;
    s.grid = range(0.1, 1.0, 0.1);
  }
  const double window = q == Quantity::uplink ? 1.2 : 0.8;
  s.plans = {capped_plan(SimMode::system_level, window, 20'000)};
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig2",  "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b",
          "fig7a", "fig7b", "fig8a", "fig8b", "fig9"};
}

SweepSpec preset(const std::string& name) {
  using C = Collaboration;
  if (name == "fig2") {
    SweepSpec s;
    s.name = name;
    s.quantity = Quantity::load_pmf;
    // Reference densities mu = 50, lambda_1 = 1, with lambda_2 = mu / 2.
    s.network = reference_config(25.0, 2.0, 1);
    s.variable = SweepVar::K;
    s.grid = range(1, 5, 1);
    s.plans = {capped_plan(SimMode::system_level, 1.9, 2'000)};
    s.zeta.fit = false;
    return s;
  }
  if (name == "fig4a") return reliability_preset(name, Quantity::uplink, C::non_collaborative, false);
  if (name == "fig4b") return reliability_preset(name, Quantity::uplink, C::non_collaborative, true);
  if (name == "fig5a") return reliability_preset(name, Quantity::uplink, C::collaborative, false);
  if (name == "fig5b") return reliability_preset(name, Quantity::uplink, C::collaborative, true);
  if (name == "fig6a") return reliability_preset(name, Quantity::downlink, C::non_collaborative, false);
  if (name == "fig6b") return reliability_preset(name, Quantity::downlink, C::non_collaborative, true);
  if (name == "fig7a") return reliability_preset(name, Quantity::downlink, C::collaborative, false);
  if (name == "fig7b") return reliability_preset(name, Quantity::downlink, C::collaborative, true);
  if (name == "fig8a" || name == "fig8b") {
    auto s = reliability_preset(name, Quantity::downlink,
                                name == "fig8a" ? C::non_collaborative : C::collaborative, false);
    s.plans = {capped_plan(SimMode::system_level, 0.8, 20'000, Fading::distance_correlated),
               capped_plan(SimMode::system_level, 0.8, 20'000, Fading::independent)};
    return s;
  }
  if (name == "fig9") {
    SweepSpec s;
    s.name = name;
    s.quantity = Quantity::delay;
    s.network = reference_config(250.0, 0.2, 1);
    s.variable = SweepVar::K;
    s.grid = range(1, 5, 1);
    s.delay.beta = 5.0;
    s.budget_ms = 1.0;
    s.plans = {capped_plan(SimMode::model_matched, 0.0, 200'000)};
    return s;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

json presets_json() {
  json all = json::object();
  for (const auto& n : preset_names()) all[n] = to_json(preset(n));
  return {{"presets", all}};
}

SweepSpec load_spec(const std::string& path, const std::string& preset_name) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (j.contains("presets")) {
    if (preset_name.empty()) throw ConfigError(path + " holds presets; choose one with --preset");
    if (!j["presets"].contains(preset_name)) {
      throw ConfigError("preset '" + preset_name + "' not found in " + path);
    }
    return spec_from_json(j["presets"][preset_name]);
  }
  return spec_from_json(j);
}

GridPoint grid_point(const SweepSpec& spec, double value, double xi_bytes) {
  GridPoint g;
  g.network = spec.network;
  g.packet = spec.packet;
  g.packet.payload = xi_bytes;
  g.packet.unit = PayloadUnit::bytes;
  switch (spec.variable) {
    case SweepVar::mu_over_lambda2:
      g.network.user_density = value * tier2_density(g.network);
      break;
    case SweepVar::K:
      g.network.K = static_cast<int>(value);
      break;
    case SweepVar::xi:
      g.packet.payload = value;
      break;
    case SweepVar::delta:
      g.network.delta = value;
      break;
    case SweepVar::theta:
      break;
  }
  g.network.validate();
  g.theta = spec.variable == SweepVar::theta ? value : sir_threshold(g.packet);
  return g;
}

// ---- zeta provider ---------------------------------------------------------------

ZetaProvider::ZetaProvider(ZetaSettings settings, std::uint64_t seed, std::size_t workers)
    : settings_(std::move(settings)), seed_(seed), workers_(workers), table_(settings_.seed) {
  if (!settings_.table_path.empty() && std::filesystem::exists(settings_.table_path)) {
    std::ifstream in(settings_.table_path);
    table_ = read_zeta_csv(in, settings_.seed);
  }
}

void ZetaProvider::ensure(const NetworkConfig& config) {
  ensure_view(config.with_link_biases(Link::uplink));
  ensure_view(config.with_link_biases(Link::downlink));
}

void ZetaProvider::ensure_view(const NetworkConfig& view) {
  if (!settings_.fit) return;
  const auto g = tier_geometry(view);
  std::vector<std::size_t> missing;
  for (std::size_t m = 0; m < view.tiers.size(); ++m) {
    if (g.lambda_tilde_m[m] <= 0.0) continue;
    if (!table_.find(m, view.K, view.user_density / g.lambda_tilde_m[m])) missing.push_back(m);
  }
  if (missing.empty()) return;

  const double inner = inner_radius(view, settings_.window_km);
  std::optional<LoadPmfEstimate> est;
  if (inner > 0.0 && view.user_density > 0.0) {
    const std::uint64_t key =
        derive_seed(seed_, std::bit_cast<std::uint64_t>(view.user_density) ^
                               (static_cast<std::uint64_t>(view.K) << 56) ^
                               std::bit_cast<std::uint64_t>(view.tiers[0].bias));
    est = estimate_load_pmf(view, settings_.realizations, key, settings_.window_km, inner,
                            workers_);
  }
  for (std::size_t m : missing) {
    ZetaEntry e;
    e.tier = m;
    e.K = view.K;
    e.mu_over_lambda_tilde = view.user_density / g.lambda_tilde_m[m];
    e.zeta = settings_.seed;
    if (est) {
      const auto& h = est->tiers[m];
      e.samples = static_cast<std::uint64_t>(h.total());
      try {
        const auto fit = fit_zeta(h, m, view);
        e.zeta = fit.zeta;
        e.tv_distance = fit.tv_distance;
      } catch (const FitFailure& f) {
        spdlog::debug("zeta fit for tier {} K={} fell back to {}: {}", m + 1, view.K,
                     settings_.seed, f.what());
      }
    } else {
      spdlog::warn("zeta window too small for tier {} K={}; using {}", m + 1, view.K,
                   settings_.seed);
    }
    table_.insert(e);
  }
}

void ZetaProvider::save() const {
  if (settings_.table_path.empty()) return;
  std::ostringstream out;
  write_zeta_csv(out, table_);
  write_atomically(settings_.table_path, out.str());
}

// ---- rows -----------------------------------------------------------------------

std::string csv_header() {
  return "sweep_var,sweep_value,K,xi_bytes,theta,quantity,collaboration,mode,fading,analytic,"
         "analytic_kind,simulated,std_error,trials,events,terminated_by,config_hash";
}

std::string format_row(const ResultRow& r) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); };
  auto opt_u = [](const std::optional<std::uint64_t>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  std::ostringstream o;
  o << r.sweep_var << ',' << fmt_double(r.sweep_value) << ',' << r.K << ','
    << fmt_double(r.xi_bytes) << ',' << fmt_double(r.theta) << ',' << r.quantity << ','
    << r.collaboration << ',' << r.mode << ',' << r.fading << ',' << opt(r.analytic) << ','
    << r.analytic_kind << ',' << opt(r.simulated) << ',' << opt(r.std_error) << ','
    << opt_u(r.trials) << ',' << opt_u(r.events) << ',' << r.terminated_by << ','
    << r.config_hash;
  return o.str();
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) {
    throw SchemaMismatch("result CSV header does not match the schema");
  }
  std::vector<ResultRow> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 17) throw SchemaMismatch("row " + std::to_string(number) + " has wrong arity");
    try {
      auto opt = [](const std::string& s) {
        return s.empty() ? std::optional<double>() : std::optional<double>(std::stod(s));
      };
      auto opt_u = [](const std::string& s) {
        return s.empty() ? std::optional<std::uint64_t>()
                         : std::optional<std::uint64_t>(std::stoull(s));
      };
      ResultRow r;
      r.sweep_var = f[0];
      r.sweep_value = std::stod(f[1]);
      r.K = std::stoi(f[2]);
      r.xi_bytes = std::stod(f[3]);
      r.theta = std::stod(f[4]);
      r.quantity = f[5];
      r.collaboration = f[6];
      r.mode = f[7];
      r.fading = f[8];
      r.analytic = opt(f[9]);
      r.analytic_kind = f[10];
      r.simulated = opt(f[11]);
      r.std_error = opt(f[12]);
      r.trials = opt_u(f[13]);
      r.events = opt_u(f[14]);
      r.terminated_by = f[15];
      r.config_hash = f[16];
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw SchemaMismatch("row " + std::to_string(number) + " is not numeric where expected");
    }
  }
  return rows;
}

// ---- sweeps ---------------------------------------------------------------------

SweepSpec apply_options(SweepSpec spec, const RunOptions& o) {
  if (o.seed) spec.seed = *o.seed;
  for (auto& p : spec.plans) {
    if (o.max_trials) p.stop.max_trials = *o.max_trials;
    if (o.target_events) p.stop.target_events = *o.target_events;
    if (p.stop.max_trials < p.stop.target_events) p.stop.target_events = p.stop.max_trials;
  }
  if (o.analytic_only) spec.plans.clear();
  if (o.only_values) {
    std::vector<double> kept;
    for (double v : spec.grid) {
      for (double w : *o.only_values) {
        if (std::abs(v - w) <= 1e-9 * std::max(1.0, std::abs(v))) kept.push_back(v);
      }
    }
    if (kept.empty()) throw ConfigError("none of the requested values lie on the sweep grid");
    spec.grid = kept;
  }
  return spec;
}

namespace {

struct Analytic {
  std::optional<double> value;
  std::string kind;
};

Analytic reliability_analytic(const SweepSpec& spec, const GridPoint& g, const ZetaTable& z) {
  const auto& n = g.network;
  const bool collab = spec.collaboration == Collaboration::collaborative;
  if (spec.quantity == Quantity::uplink) {
    const auto link = uplink_link_params(n, g.theta, z, spec.weighting);
    if (collab) return {1.0 - uplink_reliability_collab_bound(link), "reliability_upper_bound"};
    return {1.0 - uplink_reliability_noncollab(link), "approximation"};
  }
  if (collab) {
    return {1.0 - downlink_reliability_collab_bound(n.K, g.theta, n, z), "reliability_upper_bound"};
  }
  return {1.0 - downlink_reliability_noncollab_bound(n.K, g.theta, n, z), "reliability_upper_bound"};
}

DelayModel delay_inputs(const SweepSpec& spec, const GridPoint& g, const ZetaTable& z) {
  const auto& n = g.network;
  const auto link = uplink_link_params(n, g.theta, z, spec.weighting);
  DelayModel d = spec.delay;
  d.rho_ul_K = uplink_noncollision_user(link.rho_ul, n.K);
  d.eta_ul_K = uplink_reliability_noncollab(link);
  d.eta_dl_K = downlink_reliability_noncollab_bound(n.K, g.theta, n, z);
  d.q = default_backhaul_success(link);
  return d;
}

}  // namespace

std::vector<ResultRow> compute_sweep(const SweepSpec& spec, std::size_t workers,
                                     std::vector<ResultRow>* partial, json* summary) {
  spec.validate();
  const std::string hash = hex64(config_hash(spec));
  ZetaProvider zeta(spec.zeta, spec.seed, workers);
  std::vector<ResultRow> rows;
  json timings = json::array();
  std::uint64_t job = 0;

  std::vector<double> series = spec.xi_bytes;
  if (series.empty() || spec.variable == SweepVar::xi) series = {spec.packet.payload};

  auto fail = [&](const std::string& what) {
    if (partial) *partial = rows;
    throw SimulationFailure(what);
  };

  for (double value : spec.grid) {
    for (double xi : series) {
      try {
        const double payload = spec.variable == SweepVar::xi ? value : xi;
        const auto g = grid_point(spec, value, payload);
        zeta.ensure(g.network);
        const auto& z = zeta.table();

        ResultRow base;
        base.sweep_var = name_of(spec.variable);
        base.sweep_value = value;
        base.K = g.network.K;
        base.xi_bytes = g.packet.payload;
        base.theta = g.theta;
        base.collaboration = name_of(spec.collaboration);
        base.config_hash = hash;

        auto timed = [&](const std::string& label, auto&& fn) {
          const auto t0 = std::chrono::steady_clock::now();
          try {
            fn();
          } catch (const ConfigError&) {
            throw;
          } catch (const Error& e) {
            fail(label + " at " + base.sweep_var + "=" + fmt_double(value) + ": " + e.what());
          }
          const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          timings.push_back({{"row", rows.size()}, {"what", label}, {"sweep_value", value},
                             {"xi_bytes", payload}, {"runtime_s", dt}});
        };

        if (spec.quantity == Quantity::uplink || spec.quantity == Quantity::downlink) {
          const auto an = reliability_analytic(spec, g, z);
          base.quantity = spec.quantity == Quantity::uplink ? "uplink_outage" : "downlink_outage";
          base.analytic = an.value;
          base.analytic_kind = an.kind;
          if (spec.plans.empty()) {
            ResultRow r = base;
            r.mode = "analytic";
            rows.push_back(r);
            continue;
          }
          const auto inputs = model_inputs(g.network, z, spec.weighting);
          for (const auto& plan : spec.plans) {
            SimPlan p = plan;
            p.link = spec.quantity == Quantity::uplink ? Link::uplink : Link::downlink;
            p.collaboration = spec.collaboration;
            p.seed = derive_seed(spec.seed, job++);
            p.workers = workers;
            ResultRow r = base;
            r.mode = name_of(p.mode);
            r.fading = name_of(p.fading);
            timed(r.quantity, [&] {
              const auto e = p.link == Link::uplink
                                 ? estimate_uplink_reliability(g.network, p, g.theta, inputs)
                                 : estimate_downlink_reliability(g.network, p, g.theta, inputs);
              r.simulated = e.outage;
              r.std_error = e.std_error;
              r.trials = e.trials;
              r.events = e.events;
              r.terminated_by = to_string(e.terminated_by);
            });
            rows.push_back(r);
          }
        } else if (spec.quantity == Quantity::delay) {
          const auto d = delay_inputs(spec, g, z);
          for (auto mode : {Collaboration::non_collaborative, Collaboration::collaborative}) {
            ResultRow mean = base, out = base;
            mean.collaboration = out.collaboration = name_of(mode);
            mean.quantity = "mean_delay_ms";
            mean.analytic = mean_uplink_delay(d, g.network.K, mode) +
                            mean_downlink_delay(d, g.network.K, mode);
            mean.analytic_kind = "closed_form";
            out.quantity = "delay_outage";
            out.analytic_kind = "none";
            mean.mode = out.mode = "analytic";
            if (!spec.plans.empty()) {
              const auto trials = spec.plans.front().stop.max_trials;
              const auto seed = derive_seed(spec.seed, job++);
              mean.mode = out.mode = "monte_carlo";
              timed("delay", [&] {
                const auto e = estimate_delay(d, g.network.K, mode, spec.budget_ms, trials, seed, workers);
                mean.simulated = e.mean_ms;
                mean.std_error = e.mean_se;
                out.simulated = e.outage;
                out.std_error = e.outage_se;
                mean.trials = out.trials = e.trials;
              });
            }
            rows.push_back(mean);
            rows.push_back(out);
          }
        } else {
          const auto& n = g.network;
          std::optional<LoadPmfEstimate> est;
          if (!spec.plans.empty()) {
            const auto& plan = spec.plans.front();
            const double window = plan.window_km > 0.0 ? plan.window_km : default_window(n).radius_km;
            const double inner = inner_radius(n, window);
            if (!(inner > 0.0)) throw ConfigError("load window is smaller than the association guard");
            timed("load_pmf", [&] {
              est = estimate_load_pmf(n, plan.stop.max_trials, derive_seed(spec.seed, job++), window,
                                      inner, workers);
            });
          }
          const auto geo = tier_geometry(n);
          for (std::size_t m = 0; m < n.tiers.size(); ++m) {
            if (geo.lambda_tilde_m[m] <= 0.0) continue;
            const std::string tag = ":m=" + std::to_string(m + 1);
            const double mean = load_mean(m, n);
            double zeta_m = z.get(m, n);
            ResultRow zr = base;
            zr.quantity = "load_zeta" + tag;
            zr.mode = est ? "system_level" : "analytic";
            if (est) {
              try {
                const auto fit = fit_zeta(est->tiers[m], mean, {.seed = spec.zeta.seed});
                zeta_m = fit.zeta;
                zr.simulated = fit.zeta;
              } catch (const FitFailure& f) {
                spdlog::warn("load fit for tier {} K={} failed: {}", m + 1, n.K, f.what());
              }
            }
            zr.analytic = spec.zeta.seed;
            zr.analytic_kind = "seed";
            rows.push_back(zr);
            for (std::size_t k = 0; k <= spec.load_pmf_max_n; ++k) {
              ResultRow r = base;
              r.quantity = "load_pmf" + tag + ":n=" + std::to_string(k);
              r.mode = zr.mode;
              r.analytic = nb_pmf(k, mean, zeta_m);
              r.analytic_kind = "fitted_pmf";
              if (est) {
                const auto& h = est->tiers[m];
                const double total = h.total();
                if (total > 0.0) {
                  r.simulated = (k < h.counts.size() ? h.counts[k] : 0.0) / total;
                  r.trials = static_cast<std::uint64_t>(total);
                }
              }
              rows.push_back(r);
            }
            ResultRow mr = base;
            mr.quantity = "load_mean" + tag;
            mr.mode = zr.mode;
            mr.analytic = mean;
            mr.analytic_kind = "closed_form";
            ResultRow tv = base;
            tv.quantity = "load_tv" + tag;
            tv.mode = zr.mode;
            tv.analytic_kind = "none";
            if (est && est->tiers[m].total() > 0.0) {
              const auto& h = est->tiers[m];
              mr.simulated = h.mean();
              mr.trials = tv.trials = static_cast<std::uint64_t>(h.total());
              tv.simulated = tv_distance(h, [&](std::size_t k) { return nb_pmf(k, mean, zeta_m); });
            }
            rows.push_back(mr);
            rows.push_back(tv);
          }
        }
      } catch (const ConfigError&) {
        throw;
      } catch (const SimulationFailure&) {
        throw;
      } catch (const Error& e) {
        fail(name_of(spec.variable) + "=" + fmt_double(value) + ": " + e.what());
      }
    }
  }
  zeta.save();
  if (summary) {
    *summary = {{"spec", to_json(spec)}, {"config_hash", hash}, {"rows", rows.size()},
                {"timings", timings}};
  }
  return rows;
}

int run_sweep(const SweepSpec& spec, const std::string& out_path, std::size_t workers) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ResultRow> rows, partial;
  json summary;
  auto body = [](const std::vector<ResultRow>& rs) {
    std::string s = csv_header() + "\n";
    for (const auto& r : rs) s += format_row(r) + "\n";
    return s;
  };
  try {
    rows = compute_sweep(spec, workers, &partial, &summary);
  } catch (const ConfigError& e) {
    spdlog::error("invalid configuration: {}", e.what());
    return 2;
  } catch (const SimulationFailure& e) {
    spdlog::error("simulation failed: {}", e.what());
    try {
      write_atomically(out_path + ".partial", body(partial));
    } catch (const std::exception& w) {
      spdlog::error("could not save partial results: {}", w.what());
    }
    return 3;
  }
  try {
    write_atomically(out_path, body(rows));
    summary["total_runtime_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    summary["workers"] = workers;
    write_atomically(out_path + ".json", summary.dump(2) + "\n");
  } catch (const std::exception& e) {
    spdlog::error("cannot write results: {}", e.what());
    return 2;
  }
  spdlog::info("wrote {} rows to {}", rows.size(), out_path);
  return 0;
}

// ---- report ---------------------------------------------------------------------

ReportResult report(const std::vector<std::string>& paths, double gap_threshold) {
  ReportResult res;
  std::ostringstream o;
  char line[512];
  for (const auto& path : paths) {
    std::vector<ResultRow> rows;
    try {
      std::ifstream in(path);
      if (!in) throw SchemaMismatch("cannot open " + path);
      rows = read_results_csv(in);
    } catch (const SchemaMismatch& e) {
      o << path << ": schema mismatch: " << e.what() << "\n";
      res.exit_code = 2;
      continue;
    }
    o << "== " << path << " (" << rows.size() << " rows)\n";
    if (!rows.empty()) {
      const auto& h = rows.front().config_hash;
      if (std::any_of(rows.begin(), rows.end(), [&](const ResultRow& r) { return r.config_hash != h; })) {
        o << "  mixed configurations in one file\n";
        res.exit_code = 2;
        continue;
      }
    }
    struct Group {
      int rows = 0, simulated = 0, compared = 0, violations = 0, no_events = 0;
      double max_gap = 0.0;
      double max_abs = 0.0;
      std::string kind;
    };
    std::map<std::string, Group> groups;
    for (const auto& r : rows) {
      std::string q = r.quantity;
      if (q.rfind("load_pmf", 0) == 0) q = q.substr(0, q.find(":n="));
      const std::string key = q + " | " + r.collaboration + " | " + r.mode +
                              (r.fading.empty() ? "" : " | " + r.fading);
      auto& g = groups[key];
      g.kind = r.analytic_kind;
      ++g.rows;
      if (!r.simulated) continue;
      ++g.simulated;
      if (!r.analytic) continue;
      const double sim = *r.simulated, an = *r.analytic;
      if (r.analytic_kind == "approximation") {
        if (sim > 0.0 && an > 0.0) {
          ++g.compared;
          g.max_gap = std::max(g.max_gap, std::abs(std::log10(sim / an)));
        } else {
          ++g.no_events;
        }
      } else if (r.analytic_kind == "reliability_upper_bound") {
        // Outage must not fall below the analytic floor by more than 3 standard errors.
        ++g.compared;
        const double n = r.trials ? static_cast<double>(*r.trials) : 1.0;
        const double se = std::max(r.std_error.value_or(0.0), std::sqrt(an * (1.0 - an) / n));
        if (sim + 3.0 * se < an) ++g.violations;
        if (sim > 0.0 && an > 0.0) g.max_gap = std::max(g.max_gap, std::abs(std::log10(sim / an)));
      } else {
        ++g.compared;
        g.max_abs = std::max(g.max_abs, std::abs(sim - an));
      }
    }
    for (const auto& [key, g] : groups) {
      if (g.simulated == 0) {
        std::snprintf(line, sizeof line, "  %-60s rows=%d simulation=absent\n", key.c_str(), g.rows);
      } else if (g.kind == "approximation") {
        std::snprintf(line, sizeof line,
                      "  %-60s rows=%d compared=%d no_events=%d max_gap_decades=%.3f %s\n",
                      key.c_str(), g.rows, g.compared, g.no_events, g.max_gap,
                      g.max_gap <= gap_threshold ? "PASS" : "FAIL");
      } else if (g.kind == "reliability_upper_bound") {
        std::snprintf(line, sizeof line,
                      "  %-60s rows=%d compared=%d bound_violations=%d max_gap_decades=%.3f %s\n",
                      key.c_str(), g.rows, g.compared, g.violations, g.max_gap,
                      g.violations == 0 ? "PASS" : "FAIL");
      } else {
        std::snprintf(line, sizeof line, "  %-60s rows=%d compared=%d max_abs_diff=%.4g\n",
                      key.c_str(), g.rows, g.compared, g.max_abs);
      }
      o << line;
      res.violations += g.violations;
    }
  }
  o << "bound violations: " << res.violations << "\n";
  if (res.violations > 0 && res.exit_code == 0) res.exit_code = 1;
  res.text = o.str();
  return res;
}

}  // namespace urllc
