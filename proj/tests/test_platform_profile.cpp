#include <doctest.h>

#include <array>
#include <set>

#include "simrt/error.hpp"
#include "simrt/platform_profile.hpp"
#include "simrt/rng.hpp"
#include "support/generators.hpp"

using namespace simrt;

namespace {

ErrorCode load_error(std::string_view text) {
  try {
    load_profile(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("profile loaded without error");
  return ErrorCode::NotFound;
}

// Smallest whole microsecond count t with t * ops_per_sec >= ops * 1e6,
// found by bisection rather than division.
Micros ceil_micros_by_search(std::uint64_t ops, std::uint64_t ops_per_sec) {
  __extension__ using u128 = unsigned __int128;
  const u128 work = static_cast<u128>(ops) * 1'000'000u;
  Micros lo = 0;
  Micros hi = Micros{1} << 50;
  while (lo < hi) {
    const Micros mid = lo + (hi - lo) / 2;
    if (static_cast<u128>(mid) * ops_per_sec >= work) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

constexpr std::string_view kMinimal = R"({
  "units": [{"kind": "CPU", "weight": 1}],
  "workloads": [{"name": "blur"}],
  "costs": {"blur@CPU": {"kernel_us": 100, "energy_uj": 7}}
})";

}  // namespace

TEST_CASE("load_profile minimal and malformed documents") {
  const auto p = load_profile(kMinimal);
  CHECK(p.units().size() == 1);
  CHECK(p.kernel_time("blur", UnitKind::CPU) == 100);
  CHECK(p.energy_of("blur", UnitKind::CPU) == 7);

  CHECK(load_error(R"({"units":[{"kind":"CPU","weight":1}],"workloads":[{"name":"convolution"}],
                       "costs":{"convolution@CPU":{"energy_uj":1}}})") == ErrorCode::MissingCost);
  CHECK(load_error(R"({"units":[{"kind":"CPU","weight":1}],"workloads":[{"name":"a"}],
                       "costs":{"a@CPU":{"kernel_us":-1}}})") == ErrorCode::NegativeValue);
  CHECK(load_error(R"({"units":[{"kind":"CPU","weight":1},{"kind":"CLOUD"}],
                       "cloud":{"latency_us":[5,2],"energy_uj":1}})") == ErrorCode::BadInterval);
  CHECK(load_error(R"({"units":[{"kind":"CPU","weight":1,"speed":3}]})") == ErrorCode::ParseError);
  CHECK(load_error(R"({"units":[{"kind":"GPU","weight":1},{"kind":"MGPU","weight":1}]})") == ErrorCode::ParseError);
  CHECK(load_error(R"({"units":[{"kind":"CPU","weight":1}],"workloads":[{"name":"a"}],
                       "costs":{"a@DSP":{"kernel_us":1}}})") == ErrorCode::ParseError);
  CHECK(load_error("{\n  \"units\": [\n    {\"kind\": \"CPU\" \"weight\": 1}\n  ]\n}") == ErrorCode::ParseError);
  try {
    load_profile("{\n  \"units\": [\n    {\"kind\": \"CPU\" \"weight\": 1}\n  ]\n}");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("builtin sd820 carries the measured DSP and mGPU throughput") {
  const auto p = builtin_profile("sd820");
  REQUIRE(p.unit(UnitKind::DSP) != nullptr);
  CHECK(*p.unit(UnitKind::DSP)->gops == doctest::Approx(4.0));
  CHECK(*p.unit(UnitKind::MGPU)->gops == doctest::Approx(160.0));
  CHECK(p.cost("convolution", UnitKind::DSP)->setup_us < p.cost("convolution", UnitKind::MGPU)->setup_us);
}

TEST_CASE("kernel_time: explicit value or ceiling of ops over throughput") {
  CHECK(ceil_micros_by_search(15'400'000, 4'000'000'000) == 3850);
  CHECK(derive_kernel_us(15'400'000, 4.0) == ceil_micros_by_search(15'400'000, 4'000'000'000));
  CHECK(derive_kernel_us(895'500'000, 256.0) == ceil_micros_by_search(895'500'000, 256'000'000'000));

  const auto tx1 = builtin_profile("tx1-cloud");
  CHECK(tx1.kernel_time("conv2", UnitKind::GPU) == ceil_micros_by_search(895'500'000, 256'000'000'000));
  CHECK(tx1.kernel_time("alexnet", UnitKind::CPU) == 400000);
  CHECK(tx1.kernel_time("alexnet", UnitKind::GPU) == 33000);

  const auto both = load_profile(R"({
    "units": [{"kind": "DSP", "weight": 1, "gops": 4.0}],
    "workloads": [{"name": "gaussian_blur", "ops": 15400000}, {"name": "fixed", "ops": 15400000}],
    "costs": {"gaussian_blur@DSP": {}, "fixed@DSP": {"kernel_us": 100}}
  })");
  CHECK(both.kernel_time("gaussian_blur", UnitKind::DSP) == 3850);
  CHECK(both.kernel_time("fixed", UnitKind::DSP) == 100);
}

TEST_CASE("derived kernel time agrees with the search oracle") {
  testing::Gen g(3);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t ops = g.range(0, 5'000'000'000ull);
    const std::uint64_t gops_milli = g.range(1, 500'000);
    const double gops = static_cast<double>(gops_milli) / 1000.0;
    CHECK(derive_kernel_us(ops, gops) == ceil_micros_by_search(ops, gops_milli * 1'000'000));
  }
}

TEST_CASE("offload_time examples") {
  const auto p = load_profile(R"({
    "units": [{"kind": "GPU", "weight": 1}],
    "workloads": [{"name": "k"}],
    "costs": {"k@GPU": {"setup_us": 5000, "xfer_in_us": 100, "kernel_us": 900, "xfer_out_us": 200}}
  })");
  const auto am = p.offload_time("k", UnitKind::GPU, SetupMode::Amortized, true);
  CHECK(am.setup_us == 0);
  CHECK(am.xfer_in_us == 100);
  CHECK(am.kernel_us == 900);
  CHECK(am.xfer_out_us == 200);
  CHECK(am.total_us() == 1200);
  CHECK(p.offload_time("k", UnitKind::GPU, SetupMode::PerOffload, true).total_us() == 6200);
  CHECK(p.offload_time("k", UnitKind::GPU, SetupMode::Amortized, false).total_us() == 6200);
  CHECK_THROWS_AS(p.offload_time("k", UnitKind::CPU, SetupMode::Amortized, true), Error);
}

TEST_CASE("offload totals add up and amortization never costs more") {
  testing::Gen g(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = testing::random_profile(g);
    for (const auto& [key, entry] : p.costs()) {
      for (bool init : {false, true}) {
        const auto am = p.offload_time(key.first, key.second, SetupMode::Amortized, init);
        const auto po = p.offload_time(key.first, key.second, SetupMode::PerOffload, init);
        for (const auto& b : {am, po}) {
          CHECK(b.total_us() == b.setup_us + b.xfer_in_us + b.kernel_us + b.xfer_out_us);
        }
        CHECK(am.total_us() <= po.total_us());
        if (!init) CHECK(am.total_us() == po.total_us());
        if (init && entry.setup_us > 0) CHECK(am.total_us() < po.total_us());
      }
    }
  }
}

TEST_CASE("setup overhead reverses the GPU/DSP convolution ranking") {
  const auto p = builtin_profile("sd820");
  const auto gpu_po = p.offload_time("convolution", UnitKind::MGPU, SetupMode::PerOffload, true);
  const auto dsp_po = p.offload_time("convolution", UnitKind::DSP, SetupMode::PerOffload, true);
  CHECK(gpu_po.kernel_us < dsp_po.kernel_us);
  CHECK(gpu_po.total_us() > dsp_po.total_us());
  CHECK(gpu_po.setup_us > gpu_po.kernel_us);
  const auto gpu_am = p.offload_time("convolution", UnitKind::MGPU, SetupMode::Amortized, true);
  const auto dsp_am = p.offload_time("convolution", UnitKind::DSP, SetupMode::Amortized, true);
  CHECK(gpu_am.total_us() < dsp_am.total_us());
}

TEST_CASE("energy_of: local entries and the cloud scalar") {
  const auto p = builtin_profile("tx1-cloud");
  CHECK(p.energy_of("alexnet", UnitKind::CPU) == 800000);
  CHECK(p.energy_of("alexnet", UnitKind::GPU) == 132000);
  CHECK(p.energy_of("alexnet", UnitKind::CLOUD) == 10000);
  CHECK_THROWS_AS(builtin_profile("sd820").energy_of("sobel", UnitKind::CLOUD), Error);
}

TEST_CASE("cloud_latency stays in range and is a function of the seed") {
  const auto p = builtin_profile("tx1-cloud");
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    for (int i = 0; i < 20; ++i) {
      const auto v = p.cloud_latency(rng);
      CHECK(v >= 2'000'000);
      CHECK(v <= 5'000'000);
    }
  }
  Rng a(42), b(42);
  const auto a1 = p.cloud_latency(a), a2 = p.cloud_latency(a);
  CHECK(a1 == p.cloud_latency(b));
  CHECK(a2 == p.cloud_latency(b));

  const auto point = load_profile(R"({"units":[{"kind":"CLOUD"}],
                                      "cloud":{"latency_us":[3000000,3000000],"energy_uj":1}})");
  Rng r(9);
  CHECK(point.cloud_latency(r) == 3'000'000);
}

TEST_CASE("uniform draws cover both interval ends") {
  Rng rng(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 4000; ++i) seen.insert(rng.uniform(10, 13));
  CHECK(seen == std::set<std::uint64_t>{10, 11, 12, 13});
}

TEST_CASE("sd820 preference matrix") {
  const auto rows = preference_matrix(builtin_profile("sd820"));
  std::map<std::string, std::pair<UnitKind, UnitKind>> got;
  for (const auto& r : rows) got[r.workload] = {*r.perf, *r.energy};
  CHECK(got.at("gaussian_blur") == std::pair{UnitKind::CPU, UnitKind::MGPU});
  CHECK(got.at("convolution") == std::pair{UnitKind::MGPU, UnitKind::MGPU});
  CHECK(got.at("sobel") == std::pair{UnitKind::MGPU, UnitKind::DSP});
  CHECK(got.at("undistort") == std::pair{UnitKind::MGPU, UnitKind::MGPU});
  CHECK(got.at("feature_detect") == std::pair{UnitKind::DSP, UnitKind::DSP});
}

TEST_CASE("builtin profiles") {
  const auto names = builtin_profile_names();
  for (auto n : {"sd820", "tx1-cloud", "sd820-robot"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  CHECK(builtin_profiles().size() == names.size());
  CHECK_THROWS_AS(builtin_profile("nope"), Error);
}

TEST_CASE("restricted_to keeps only the named local units and the cloud") {
  const auto p = builtin_profile("tx1-cloud");
  const std::array keep{UnitKind::CPU};
  const auto cpu = p.restricted_to(keep);
  CHECK(cpu.local_units() == std::vector<UnitKind>{UnitKind::CPU});
  CHECK_FALSE(cpu.resolvable("alexnet", UnitKind::GPU));
  CHECK(cpu.resolvable("alexnet", UnitKind::CLOUD));
  CHECK(cpu.cost("alexnet", UnitKind::CPU) != nullptr);
}

TEST_CASE("unit kind names") {
  for (auto k : kAllUnitKinds) CHECK(parse_unit_kind(to_string(k)) == k);
  CHECK(parse_unit_kind("mgpu") == UnitKind::MGPU);
  CHECK_FALSE(parse_unit_kind("TPU").has_value());
}
