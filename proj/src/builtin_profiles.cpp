#include <string>

#include "simrt/error.hpp"
#include "simrt/platform_profile.hpp"

namespace simrt {

namespace {

// Snapdragon 820 class SoC: host CPU, mobile GPU (160 GOPS) and DSP (4 GOPS).
// CV kernel times/energies are calibrated so the per-workload argmins give
// the published preference table; convolution carries the large-GPU-setup /
// small-DSP-setup split and the totals used for the policy comparison.
constexpr const char* kSd820 = R"json({
  "name": "sd820",
  "units": [
    {"kind": "CPU", "weight": 2},
    {"kind": "MGPU", "weight": 4, "gops": 160.0},
    {"kind": "DSP", "weight": 2, "gops": 4.0}
  ],
  "workloads": [
    {"name": "gaussian_blur", "ops": 15400000},
    {"name": "convolution", "ops": 30100000},
    {"name": "sobel", "ops": 74700000},
    {"name": "undistort"},
    {"name": "feature_detect"}
  ],
  "costs": {
    "gaussian_blur@CPU":  {"kernel_us": 1100, "energy_uj": 2900},
    "gaussian_blur@MGPU": {"setup_us": 9000, "xfer_in_us": 350, "kernel_us": 1200, "xfer_out_us": 350, "energy_uj": 1100},
    "gaussian_blur@DSP":  {"setup_us": 450, "xfer_in_us": 300, "kernel_us": 2400, "xfer_out_us": 300, "energy_uj": 1400},

    "convolution@CPU":  {"kernel_us": 1340, "energy_uj": 4760},
    "convolution@MGPU": {"setup_us": 12000, "xfer_in_us": 1900, "kernel_us": 600, "xfer_out_us": 1780, "energy_uj": 3000},
    "convolution@DSP":  {"setup_us": 500, "xfer_in_us": 700, "kernel_us": 3000, "xfer_out_us": 800, "energy_uj": 3360},

    "sobel@CPU":  {"kernel_us": 9000, "energy_uj": 12000},
    "sobel@MGPU": {"setup_us": 11000, "xfer_in_us": 900, "kernel_us": 2100, "xfer_out_us": 900, "energy_uj": 5200},
    "sobel@DSP":  {"setup_us": 600, "xfer_in_us": 800, "kernel_us": 6500, "xfer_out_us": 800, "energy_uj": 3900},

    "undistort@CPU":  {"kernel_us": 5200, "energy_uj": 8000},
    "undistort@MGPU": {"setup_us": 9500, "xfer_in_us": 400, "kernel_us": 1500, "xfer_out_us": 400, "energy_uj": 2400},
    "undistort@DSP":  {"setup_us": 450, "xfer_in_us": 350, "kernel_us": 4100, "xfer_out_us": 350, "energy_uj": 3100},

    "feature_detect@CPU":  {"kernel_us": 6300, "energy_uj": 9500},
    "feature_detect@MGPU": {"setup_us": 10000, "xfer_in_us": 400, "kernel_us": 4800, "xfer_out_us": 300, "energy_uj": 6100},
    "feature_detect@DSP":  {"setup_us": 400, "xfer_in_us": 350, "kernel_us": 1900, "xfer_out_us": 200, "energy_uj": 1700}
  }
})json";

// Jetson TX1 class board with a cloud endpoint. AlexNet inference values are
// the measured local-vs-cloud figures; the per-layer entries carry no
// kernel_us so their times derive from layer op counts and 256 GOPS.
constexpr const char* kTx1Cloud = R"json({
  "name": "tx1-cloud",
  "units": [
    {"kind": "CPU", "weight": 1},
    {"kind": "GPU", "weight": 1, "gops": 256.0},
    {"kind": "CLOUD"}
  ],
  "workloads": [
    {"name": "alexnet"},
    {"name": "conv1", "ops": 210800000},
    {"name": "conv2", "ops": 895500000},
    {"name": "conv3", "ops": 299000000},
    {"name": "conv4", "ops": 448600000},
    {"name": "conv5", "ops": 299000000},
    {"name": "fc6", "ops": 75500000},
    {"name": "fc7", "ops": 33600000},
    {"name": "fc8", "ops": 8000000}
  ],
  "costs": {
    "alexnet@CPU": {"kernel_us": 400000, "energy_uj": 800000},
    "alexnet@GPU": {"setup_us": 180000, "kernel_us": 33000, "energy_uj": 132000},
    "conv1@GPU": {"energy_uj": 12258},
    "conv2@GPU": {"energy_uj": 52073},
    "conv3@GPU": {"energy_uj": 17387},
    "conv4@GPU": {"energy_uj": 26086},
    "conv5@GPU": {"energy_uj": 17387},
    "fc6@GPU": {"energy_uj": 4390},
    "fc7@GPU": {"energy_uj": 1954},
    "fc8@GPU": {"energy_uj": 465}
  },
  "cloud": {"latency_us": [2000000, 5000000], "energy_uj": 10000}
})json";

// Full robot workload on the Snapdragon 820 class SoC: sensor-side image
// stages on the DSP (undistort may also use the mobile GPU), the CNN layers
// on the mobile GPU, and localization/planning on the CPU. Scene
// understanding and map generation have no local implementation.
constexpr const char* kSd820Robot = R"json({
  "name": "sd820-robot",
  "units": [
    {"kind": "CPU", "weight": 2},
    {"kind": "MGPU", "weight": 4, "gops": 160.0},
    {"kind": "DSP", "weight": 2, "gops": 4.0},
    {"kind": "CLOUD"}
  ],
  "workloads": [
    {"name": "capture"},
    {"name": "propagate"},
    {"name": "undistort"},
    {"name": "gaussian_blur", "ops": 15400000},
    {"name": "feature_detect"},
    {"name": "optical_flow"},
    {"name": "update"},
    {"name": "planning"},
    {"name": "conv1", "ops": 210800000},
    {"name": "conv2", "ops": 895500000},
    {"name": "conv3", "ops": 299000000},
    {"name": "conv4", "ops": 448600000},
    {"name": "conv5", "ops": 299000000},
    {"name": "fc6", "ops": 75500000},
    {"name": "fc7", "ops": 33600000},
    {"name": "fc8", "ops": 8000000},
    {"name": "scene_understanding"},
    {"name": "map_generation"}
  ],
  "costs": {
    "capture@CPU":   {"kernel_us": 300, "energy_uj": 250},
    "propagate@CPU": {"kernel_us": 50, "energy_uj": 40},
    "update@CPU":    {"kernel_us": 2000, "energy_uj": 2600},
    "planning@CPU":  {"kernel_us": 2500, "energy_uj": 3200},

    "undistort@MGPU":     {"setup_us": 9500, "xfer_in_us": 400, "kernel_us": 1500, "xfer_out_us": 400, "energy_uj": 2400},
    "undistort@DSP":      {"setup_us": 450, "xfer_in_us": 350, "kernel_us": 4100, "xfer_out_us": 350, "energy_uj": 3100},
    "gaussian_blur@DSP":  {"setup_us": 450, "xfer_in_us": 300, "kernel_us": 2400, "xfer_out_us": 300, "energy_uj": 1400},
    "feature_detect@DSP": {"setup_us": 400, "xfer_in_us": 350, "kernel_us": 1900, "xfer_out_us": 200, "energy_uj": 1700},
    "optical_flow@DSP":   {"setup_us": 400, "xfer_in_us": 300, "kernel_us": 2600, "xfer_out_us": 200, "energy_uj": 2100},

    "conv1@MGPU": {"setup_us": 15000, "xfer_in_us": 1200, "kernel_us": 9000, "xfer_out_us": 300, "energy_uj": 14000},
    "conv2@MGPU": {"setup_us": 15000, "xfer_in_us": 300, "kernel_us": 30000, "xfer_out_us": 300, "energy_uj": 42000},
    "conv3@MGPU": {"setup_us": 15000, "xfer_in_us": 300, "kernel_us": 14000, "xfer_out_us": 300, "energy_uj": 19000},
    "conv4@MGPU": {"setup_us": 15000, "xfer_in_us": 300, "kernel_us": 20000, "xfer_out_us": 300, "energy_uj": 27000},
    "conv5@MGPU": {"setup_us": 15000, "xfer_in_us": 300, "kernel_us": 14000, "xfer_out_us": 300, "energy_uj": 19000},
    "fc6@MGPU":   {"setup_us": 15000, "xfer_in_us": 300, "kernel_us": 6000, "xfer_out_us": 100, "energy_uj": 8000},
    "fc7@MGPU":   {"setup_us": 15000, "xfer_in_us": 100, "kernel_us": 3000, "xfer_out_us": 100, "energy_uj": 4000},
    "fc8@MGPU":   {"setup_us": 15000, "xfer_in_us": 100, "kernel_us": 1000, "xfer_out_us": 100, "energy_uj": 1500}
  },
  "cloud": {"latency_us": [2000000, 5000000], "energy_uj": 10000}
})json";

struct Builtin {
  const char* name;
  const char* text;
};

constexpr Builtin kBuiltins[] = {
    {"sd820", kSd820},
    {"tx1-cloud", kTx1Cloud},
    {"sd820-robot", kSd820Robot},
};

}  // namespace

std::vector<std::string> builtin_profile_names() {
  std::vector<std::string> out;
  for (const auto& b : kBuiltins) out.emplace_back(b.name);
  return out;
}

std::optional<std::string_view> builtin_profile_text(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (name == b.name) return std::string_view(b.text);
  }
  return std::nullopt;
}

PlatformProfile builtin_profile(std::string_view name) {
  auto text = builtin_profile_text(name);
  if (!text) throw Error(ErrorCode::NotFound, "builtin profile '" + std::string(name) + "'");
  return load_profile(*text);
}

std::map<std::string, PlatformProfile> builtin_profiles() {
  std::map<std::string, PlatformProfile> out;
  for (const auto& b : kBuiltins) out.emplace(b.name, load_profile(b.text));
  return out;
}

}  // namespace simrt
