#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "simrt/platform_profile.hpp"
#include "simrt/task_model.hpp"

namespace simrt {

/// ⌊duration_s × rate⌋, tolerant of binary rounding (10 × 0.3 counts 3).
std::size_t periodic_count(double duration_s, double rate_hz);
/// Release time of the k-th periodic instance, floored to the microsecond.
Micros periodic_release(std::size_t k, double rate_hz);

/// `n` independent real-time, non-image convolution tasks released at 0.
TaskGraph convolution_batch(std::size_t n);

struct RobotParams {
  double duration_s = 10.0;
  double camera_fps = 25.0;
  double imu_hz = 200.0;
  double dl_fps = 3.0;
  double plan_hz = 10.0;
};

/// Per camera frame: capture → undistort → gaussian_blur → feature_detect →
/// optical_flow → update (updates chained frame to frame). Per IMU sample a
/// propagate task, per DL frame a conv1…fc8 chain fed by the latest captured
/// frame, periodic planning, and the two non-real-time jobs
/// (scene_understanding, map_generation). Throws InvalidRate.
TaskGraph robot_pipeline(const RobotParams& params);

struct InferenceVariant {
  std::string name;  ///< "cpu", "gpu" or "cloud"
  TaskGraph graph;
  /// Local unit the profile should be restricted to; unset for the cloud run.
  std::optional<UnitKind> pin;
};

/// Single AlexNet inference pinned to the CPU, pinned to the GPU, and tagged
/// non-real-time for the cloud.
std::vector<InferenceVariant> inference_comparison();

struct BufferPressureParams {
  double duration_s = 1.0;
  double camera_fps = 25.0;
  std::size_t flood = 40;
  std::string flood_workload = "conv2";
  std::string consumer_workload = "conv1";
};

/// A backlog of non-image tasks released at 0 plus a camera stream whose
/// frames each feed one image-consuming task.
TaskGraph buffer_pressure(const BufferPressureParams& params);

}  // namespace simrt
