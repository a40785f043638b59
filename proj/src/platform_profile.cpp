#include "simrt/platform_profile.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "simrt/error.hpp"

namespace simrt {

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::CPU: return "CPU";
    case UnitKind::MGPU: return "MGPU";
    case UnitKind::DSP: return "DSP";
    case UnitKind::GPU: return "GPU";
    case UnitKind::FPGA: return "FPGA";
    case UnitKind::CLOUD: return "CLOUD";
  }
  return "?";
}

std::optional<UnitKind> parse_unit_kind(std::string_view text) {
  std::string upper(text);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (auto k : kAllUnitKinds) {
    if (upper == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string_view to_string(SetupMode mode) {
  return mode == SetupMode::Amortized ? "amortized" : "per-offload";
}

std::optional<SetupMode> parse_setup_mode(std::string_view text) {
  if (text == "amortized") return SetupMode::Amortized;
  if (text == "per-offload" || text == "peroffload" || text == "per_offload") return SetupMode::PerOffload;
  return std::nullopt;
}

Micros derive_kernel_us(std::uint64_t ops, double gops) {
  const auto ops_per_sec = static_cast<std::uint64_t>(std::llround(gops * 1e9));
  if (ops_per_sec == 0) throw Error(ErrorCode::MissingCost, "theoretical throughput rounds to zero");
  __extension__ using u128 = unsigned __int128;
  const u128 scaled = static_cast<u128>(ops) * 1'000'000u;
  return static_cast<Micros>((scaled + ops_per_sec - 1) / ops_per_sec);
}

namespace {

std::string cost_label(std::string_view workload, UnitKind unit) {
  return std::string(workload) + "@" + std::string(to_string(unit));
}

}  // namespace

PlatformProfile::PlatformProfile(std::string name, std::vector<UnitSpec> units,
                                 std::vector<WorkloadSpec> workloads, std::map<CostKey, CostEntry> costs,
                                 std::optional<CloudSpec> cloud)
    : name_(std::move(name)),
      units_(std::move(units)),
      workloads_(std::move(workloads)),
      costs_(std::move(costs)),
      cloud_(std::move(cloud)) {
  std::set<UnitKind> kinds;
  for (const auto& u : units_) {
    if (!kinds.insert(u.kind).second) {
      throw Error(ErrorCode::ParseError, "unit " + std::string(to_string(u.kind)) + " declared twice");
    }
    if (u.gops && !(*u.gops > 0.0)) {
      throw Error(ErrorCode::NegativeValue, "units." + std::string(to_string(u.kind)) + ".gops");
    }
    if (u.idle_power_w < 0.0 || !std::isfinite(u.idle_power_w)) {
      throw Error(ErrorCode::NegativeValue, "units." + std::string(to_string(u.kind)) + ".idle_power_w");
    }
  }
  if (kinds.contains(UnitKind::GPU) && kinds.contains(UnitKind::MGPU)) {
    throw Error(ErrorCode::ParseError, "a profile declares at most one of GPU and MGPU");
  }
  if (kinds.contains(UnitKind::CLOUD) && !cloud_) {
    throw Error(ErrorCode::ParseError, "CLOUD unit declared without a cloud section");
  }
  if (cloud_ && cloud_->latency_lo_us > cloud_->latency_hi_us) {
    throw Error(ErrorCode::BadInterval, "cloud latency [" + std::to_string(cloud_->latency_lo_us) + ", " +
                                            std::to_string(cloud_->latency_hi_us) + "]");
  }

  std::set<std::string> names;
  for (const auto& w : workloads_) {
    if (w.name.empty()) throw Error(ErrorCode::ParseError, "workload with empty name");
    if (!names.insert(w.name).second) throw Error(ErrorCode::ParseError, "workload '" + w.name + "' declared twice");
  }

  for (const auto& [key, entry] : costs_) {
    const auto& [wl, kind] = key;
    if (!names.contains(wl)) throw Error(ErrorCode::ParseError, "cost for undeclared workload '" + wl + "'");
    if (kind == UnitKind::CLOUD) {
      throw Error(ErrorCode::ParseError, cost_label(wl, kind) + ": cloud costs come from the cloud section");
    }
    if (!kinds.contains(kind)) {
      throw Error(ErrorCode::ParseError, cost_label(wl, kind) + ": unit not declared");
    }
    if (!entry.kernel_us) {
      const auto* w = workload(wl);
      const auto* u = unit(kind);
      if (!w->ops || !u->gops) throw Error(ErrorCode::MissingCost, cost_label(wl, kind));
    }
  }
}

std::vector<UnitKind> PlatformProfile::local_units() const {
  std::vector<UnitKind> out;
  for (const auto& u : units_) {
    if (u.kind != UnitKind::CLOUD) out.push_back(u.kind);
  }
  return out;
}

const UnitSpec* PlatformProfile::unit(UnitKind kind) const {
  auto it = std::find_if(units_.begin(), units_.end(), [&](const UnitSpec& u) { return u.kind == kind; });
  return it == units_.end() ? nullptr : &*it;
}

const WorkloadSpec* PlatformProfile::workload(std::string_view name) const {
  auto it = std::find_if(workloads_.begin(), workloads_.end(),
                         [&](const WorkloadSpec& w) { return w.name == name; });
  return it == workloads_.end() ? nullptr : &*it;
}

const CostEntry* PlatformProfile::cost(std::string_view workload, UnitKind unit) const {
  auto it = costs_.find(CostKey{std::string(workload), unit});
  return it == costs_.end() ? nullptr : &it->second;
}

bool PlatformProfile::resolvable(std::string_view workload, UnitKind unit) const {
  if (unit == UnitKind::CLOUD) return cloud_.has_value();
  return cost(workload, unit) != nullptr;
}

const CostEntry& PlatformProfile::require_cost(std::string_view workload, UnitKind unit) const {
  const auto* entry = cost(workload, unit);
  if (!entry) throw Error(ErrorCode::MissingCost, cost_label(workload, unit));
  return *entry;
}

Micros PlatformProfile::kernel_time(std::string_view workload, UnitKind unit) const {
  const auto& entry = require_cost(workload, unit);
  if (entry.kernel_us) return *entry.kernel_us;
  // The constructor guarantees ops and gops exist when kernel_us is absent.
  return derive_kernel_us(*this->workload(workload)->ops, *this->unit(unit)->gops);
}

OffloadBreakdown PlatformProfile::offload_time(std::string_view workload, UnitKind unit, SetupMode mode,
                                               bool unit_initialized) const {
  const auto& entry = require_cost(workload, unit);
  OffloadBreakdown b;
  const bool charge_setup = mode == SetupMode::PerOffload || !unit_initialized;
  b.setup_us = charge_setup ? entry.setup_us : 0;
  b.xfer_in_us = entry.xfer_in_us;
  b.kernel_us = kernel_time(workload, unit);
  b.xfer_out_us = entry.xfer_out_us;
  return b;
}

std::uint64_t PlatformProfile::energy_of(std::string_view workload, UnitKind unit) const {
  if (unit == UnitKind::CLOUD) {
    if (!cloud_) throw Error(ErrorCode::MissingCost, cost_label(workload, unit));
    return cloud_->energy_uj;
  }
  return require_cost(workload, unit).energy_uj;
}

Micros PlatformProfile::cloud_latency(Rng& rng) const {
  if (!cloud_) throw Error(ErrorCode::MissingCost, "profile has no cloud endpoint");
  return rng.uniform(cloud_->latency_lo_us, cloud_->latency_hi_us);
}

PlatformProfile PlatformProfile::restricted_to(std::span<const UnitKind> keep) const {
  auto kept = [&](UnitKind k) {
    return k == UnitKind::CLOUD || std::find(keep.begin(), keep.end(), k) != keep.end();
  };
  std::vector<UnitSpec> units;
  for (const auto& u : units_) {
    if (kept(u.kind)) units.push_back(u);
  }
  std::map<CostKey, CostEntry> costs;
  for (const auto& [key, entry] : costs_) {
    if (kept(key.second)) costs.emplace(key, entry);
  }
  return PlatformProfile(name_, std::move(units), workloads_, std::move(costs), cloud_);
}

// --- JSON loading ----------------------------------------------------------

namespace {

using detail::expect;
using detail::json;

std::uint64_t read_count(const json& j, const std::string& where) {
  if (j.is_number_integer() && j.get<std::int64_t>() < 0) throw Error(ErrorCode::NegativeValue, where);
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v < 0) throw Error(ErrorCode::NegativeValue, where);
    if (v != std::floor(v) || v > 1.8e19) throw Error(ErrorCode::ParseError, where + ": expected an integer");
    return static_cast<std::uint64_t>(v);
  }
  expect(j.is_number_unsigned(), where, "a non-negative integer");
  return j.get<std::uint64_t>();
}

double read_real(const json& j, const std::string& where) {
  expect(j.is_number(), where, "a number");
  const double v = j.get<double>();
  if (v < 0) throw Error(ErrorCode::NegativeValue, where);
  return v;
}

UnitSpec parse_unit(const json& j, std::size_t pos) {
  const std::string where = "units[" + std::to_string(pos) + "]";
  expect(j.is_object(), where, "an object");
  detail::reject_unknown_keys(j, {"kind", "weight", "gops", "idle_power_w"}, where);
  const auto& kind = detail::require(j, "kind", where);
  expect(kind.is_string(), where + ".kind", "a string");
  auto parsed = parse_unit_kind(kind.get<std::string>());
  if (!parsed) throw Error(ErrorCode::ParseError, where + ".kind: unknown unit '" + kind.get<std::string>() + "'");
  UnitSpec u;
  u.kind = *parsed;
  if (u.kind != UnitKind::CLOUD) {
    const auto w = read_count(detail::require(j, "weight", where), where + ".weight");
    if (w > std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorCode::ParseError, where + ".weight: too large");
    u.weight = static_cast<std::uint32_t>(w);
  } else if (auto it = j.find("weight"); it != j.end()) {
    u.weight = static_cast<std::uint32_t>(read_count(*it, where + ".weight"));
  } else {
    u.weight = 0;
  }
  if (auto it = j.find("gops"); it != j.end()) u.gops = read_real(*it, where + ".gops");
  if (auto it = j.find("idle_power_w"); it != j.end()) u.idle_power_w = read_real(*it, where + ".idle_power_w");
  return u;
}

WorkloadSpec parse_workload(const json& j, std::size_t pos) {
  const std::string where = "workloads[" + std::to_string(pos) + "]";
  expect(j.is_object(), where, "an object");
  detail::reject_unknown_keys(j, {"name", "ops"}, where);
  const auto& name = detail::require(j, "name", where);
  expect(name.is_string(), where + ".name", "a string");
  WorkloadSpec w{name.get<std::string>(), std::nullopt};
  if (auto it = j.find("ops"); it != j.end()) w.ops = read_count(*it, where + ".ops");
  return w;
}

std::pair<CostKey, CostEntry> parse_cost(const std::string& key, const json& j) {
  const std::string where = "costs." + key;
  const auto at = key.rfind('@');
  if (at == std::string::npos || at == 0 || at + 1 == key.size()) {
    throw Error(ErrorCode::ParseError, where + ": key must be '<workload>@<unit>'");
  }
  auto kind = parse_unit_kind(std::string_view(key).substr(at + 1));
  if (!kind) throw Error(ErrorCode::ParseError, where + ": unknown unit");
  expect(j.is_object(), where, "an object");
  detail::reject_unknown_keys(j, {"kernel_us", "setup_us", "xfer_in_us", "xfer_out_us", "energy_uj"}, where);
  CostEntry e;
  if (auto it = j.find("kernel_us"); it != j.end()) e.kernel_us = read_count(*it, where + ".kernel_us");
  if (auto it = j.find("setup_us"); it != j.end()) e.setup_us = read_count(*it, where + ".setup_us");
  if (auto it = j.find("xfer_in_us"); it != j.end()) e.xfer_in_us = read_count(*it, where + ".xfer_in_us");
  if (auto it = j.find("xfer_out_us"); it != j.end()) e.xfer_out_us = read_count(*it, where + ".xfer_out_us");
  if (auto it = j.find("energy_uj"); it != j.end()) e.energy_uj = read_count(*it, where + ".energy_uj");
  return {CostKey{key.substr(0, at), *kind}, e};
}

}  // namespace

PlatformProfile load_profile(std::string_view json_text) {
  json doc = detail::parse_json(json_text);
  expect(doc.is_object(), "profile", "an object");
  detail::reject_unknown_keys(doc, {"name", "units", "workloads", "costs", "cloud"}, "profile");

  std::string name = "custom";
  if (auto it = doc.find("name"); it != doc.end()) {
    expect(it->is_string(), "profile.name", "a string");
    name = it->get<std::string>();
  }

  const auto& units_j = detail::require(doc, "units", "profile");
  expect(units_j.is_array(), "profile.units", "an array");
  std::vector<UnitSpec> units;
  for (std::size_t i = 0; i < units_j.size(); ++i) units.push_back(parse_unit(units_j[i], i));

  std::vector<WorkloadSpec> workloads;
  if (auto it = doc.find("workloads"); it != doc.end()) {
    expect(it->is_array(), "profile.workloads", "an array");
    for (std::size_t i = 0; i < it->size(); ++i) workloads.push_back(parse_workload((*it)[i], i));
  }

  std::map<CostKey, CostEntry> costs;
  if (auto it = doc.find("costs"); it != doc.end()) {
    expect(it->is_object(), "profile.costs", "an object");
    for (const auto& [key, value] : it->items()) {
      auto [k, e] = parse_cost(key, value);
      if (!costs.emplace(k, e).second) throw Error(ErrorCode::ParseError, "costs." + key + ": duplicate entry");
    }
  }

  std::optional<CloudSpec> cloud;
  if (auto it = doc.find("cloud"); it != doc.end()) {
    expect(it->is_object(), "profile.cloud", "an object");
    detail::reject_unknown_keys(*it, {"latency_us", "energy_uj"}, "profile.cloud");
    const auto& lat = detail::require(*it, "latency_us", "profile.cloud");
    expect(lat.is_array() && lat.size() == 2, "profile.cloud.latency_us", "a [lo, hi] pair");
    CloudSpec c;
    c.latency_lo_us = read_count(lat[0], "profile.cloud.latency_us[0]");
    c.latency_hi_us = read_count(lat[1], "profile.cloud.latency_us[1]");
    c.energy_uj = read_count(detail::require(*it, "energy_uj", "profile.cloud"), "profile.cloud.energy_uj");
    cloud = c;
  }

  return PlatformProfile(std::move(name), std::move(units), std::move(workloads), std::move(costs), cloud);
}

PlatformProfile load_profile_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "profile file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_profile(buf.str());
}

std::vector<Preference> preference_matrix(const PlatformProfile& profile) {
  std::vector<Preference> rows;
  const auto locals = profile.local_units();
  for (const auto& w : profile.workloads()) {
    Preference p{w.name, std::nullopt, std::nullopt};
    Micros best_time = 0;
    std::uint64_t best_energy = 0;
    for (auto u : locals) {
      if (!profile.resolvable(w.name, u)) continue;
      const auto t = profile.kernel_time(w.name, u);
      const auto e = profile.energy_of(w.name, u);
      if (!p.perf || t < best_time) {
        p.perf = u;
        best_time = t;
      }
      if (!p.energy || e < best_energy) {
        p.energy = u;
        best_energy = e;
      }
    }
    if (p.perf) rows.push_back(std::move(p));
  }
  return rows;
}

}  // namespace simrt
