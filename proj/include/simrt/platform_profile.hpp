#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simrt/rng.hpp"
#include "simrt/task_model.hpp"

namespace simrt {

enum class UnitKind : std::uint8_t { CPU, MGPU, DSP, GPU, FPGA, CLOUD };

inline constexpr std::array<UnitKind, 6> kAllUnitKinds = {
    UnitKind::CPU, UnitKind::MGPU, UnitKind::DSP, UnitKind::GPU, UnitKind::FPGA, UnitKind::CLOUD};

std::string_view to_string(UnitKind kind);
/// Case-insensitive; also accepts "mgpu"/"mGPU".
std::optional<UnitKind> parse_unit_kind(std::string_view text);

struct UnitSpec {
  UnitKind kind = UnitKind::CPU;
  /// Queue weight W used by the basic policies; 0 removes the unit from them.
  std::uint32_t weight = 1;
  /// Theoretical throughput in GOPS (decimal giga).
  std::optional<double> gops;
  double idle_power_w = 0.0;
};

struct CostEntry {
  std::optional<Micros> kernel_us;
  Micros setup_us = 0;
  Micros xfer_in_us = 0;
  Micros xfer_out_us = 0;
  std::uint64_t energy_uj = 0;
};

struct WorkloadSpec {
  std::string name;
  std::optional<std::uint64_t> ops;
};

struct CloudSpec {
  Micros latency_lo_us = 0;
  Micros latency_hi_us = 0;
  std::uint64_t energy_uj = 0;
};

enum class SetupMode { Amortized, PerOffload };
std::string_view to_string(SetupMode mode);
std::optional<SetupMode> parse_setup_mode(std::string_view text);

struct OffloadBreakdown {
  Micros setup_us = 0;
  Micros xfer_in_us = 0;
  Micros kernel_us = 0;
  Micros xfer_out_us = 0;

  Micros total_us() const noexcept { return setup_us + xfer_in_us + kernel_us + xfer_out_us; }
  bool operator==(const OffloadBreakdown&) const = default;
};

/// ceil(ops / (gops * 1e9)) seconds, expressed in microseconds.
Micros derive_kernel_us(std::uint64_t ops, double gops);

using CostKey = std::pair<std::string, UnitKind>;

/// Processing units plus the per-(workload, unit) cost table. Immutable once
/// constructed; the constructor enforces every invariant and throws Error.
class PlatformProfile {
 public:
  PlatformProfile(std::string name, std::vector<UnitSpec> units, std::vector<WorkloadSpec> workloads,
                  std::map<CostKey, CostEntry> costs, std::optional<CloudSpec> cloud);

  const std::string& name() const noexcept { return name_; }
  const std::vector<UnitSpec>& units() const noexcept { return units_; }
  const std::vector<WorkloadSpec>& workloads() const noexcept { return workloads_; }
  const std::map<CostKey, CostEntry>& costs() const noexcept { return costs_; }
  const std::optional<CloudSpec>& cloud() const noexcept { return cloud_; }

  /// Units that execute tasks locally (everything except CLOUD), in declaration order.
  std::vector<UnitKind> local_units() const;
  const UnitSpec* unit(UnitKind kind) const;
  const WorkloadSpec* workload(std::string_view name) const;
  const CostEntry* cost(std::string_view workload, UnitKind unit) const;

  /// True when `unit` can run `workload`: a cost entry exists for a local
  /// unit, or the profile has a cloud endpoint for CLOUD.
  bool resolvable(std::string_view workload, UnitKind unit) const;

  Micros kernel_time(std::string_view workload, UnitKind unit) const;
  OffloadBreakdown offload_time(std::string_view workload, UnitKind unit, SetupMode mode,
                                bool unit_initialized) const;
  std::uint64_t energy_of(std::string_view workload, UnitKind unit) const;
  Micros cloud_latency(Rng& rng) const;

  /// Copy keeping only the listed local units (and their costs). The cloud
  /// endpoint is kept.
  PlatformProfile restricted_to(std::span<const UnitKind> keep) const;

 private:
  const CostEntry& require_cost(std::string_view workload, UnitKind unit) const;

  std::string name_;
  std::vector<UnitSpec> units_;
  std::vector<WorkloadSpec> workloads_;
  std::map<CostKey, CostEntry> costs_;
  std::optional<CloudSpec> cloud_;
};

PlatformProfile load_profile(std::string_view json_text);
PlatformProfile load_profile_file(const std::string& path);

struct Preference {
  std::string workload;
  std::optional<UnitKind> perf;    ///< argmin kernel_time over local units
  std::optional<UnitKind> energy;  ///< argmin energy_of over local units
};

/// One row per workload with at least one local cost entry. Ties go to the
/// unit declared first.
std::vector<Preference> preference_matrix(const PlatformProfile& profile);

std::vector<std::string> builtin_profile_names();
std::optional<std::string_view> builtin_profile_text(std::string_view name);
PlatformProfile builtin_profile(std::string_view name);
std::map<std::string, PlatformProfile> builtin_profiles();

}  // namespace simrt
