#include "simrt/scenarios.hpp"

#include <cmath>

#include "simrt/error.hpp"

namespace simrt {

namespace {

void check_rate(double rate, const char* what) {
  if (!std::isfinite(rate) || rate <= 0.0) {
    throw Error(ErrorCode::InvalidRate, std::string(what) + " must be positive, got " + std::to_string(rate));
  }
}

void check_duration(double duration_s) {
  if (!std::isfinite(duration_s) || duration_s < 0.0) {
    throw Error(ErrorCode::InvalidRate, "duration must be non-negative, got " + std::to_string(duration_s));
  }
}

class Builder {
 public:
  TaskId add(std::string workload, bool real_time, bool image_input, std::vector<TaskId> deps, Micros release) {
    const TaskId id{next_++};
    graph_.add(Task{id, std::move(workload), TaskTags{real_time, image_input}, std::move(deps), release});
    return id;
  }
  TaskGraph take() { return std::move(graph_); }

 private:
  std::uint64_t next_ = 1;
  TaskGraph graph_;
};

constexpr const char* kCnnLayers[] = {"conv1", "conv2", "conv3", "conv4", "conv5", "fc6", "fc7", "fc8"};

}  // namespace

std::size_t periodic_count(double duration_s, double rate_hz) {
  return static_cast<std::size_t>(std::floor(duration_s * rate_hz + 1e-9));
}

Micros periodic_release(std::size_t k, double rate_hz) {
  return static_cast<Micros>(std::floor(static_cast<double>(k) * 1e6 / rate_hz + 1e-6));
}

TaskGraph convolution_batch(std::size_t n) {
  Builder b;
  for (std::size_t i = 0; i < n; ++i) b.add("convolution", true, false, {}, 0);
  return b.take();
}

TaskGraph robot_pipeline(const RobotParams& p) {
  check_duration(p.duration_s);
  check_rate(p.camera_fps, "camera_fps");
  check_rate(p.imu_hz, "imu_hz");
  check_rate(p.dl_fps, "dl_fps");
  check_rate(p.plan_hz, "plan_hz");

  Builder b;
  const std::size_t frames = periodic_count(p.duration_s, p.camera_fps);
  std::vector<TaskId> captures;
  std::optional<TaskId> last_update;
  for (std::size_t k = 0; k < frames; ++k) {
    const Micros t = periodic_release(k, p.camera_fps);
    const TaskId cap = b.add("capture", true, false, {}, t);
    captures.push_back(cap);
    const TaskId und = b.add("undistort", true, true, {cap}, t);
    const TaskId blur = b.add("gaussian_blur", true, true, {und}, t);
    const TaskId feat = b.add("feature_detect", true, true, {blur}, t);
    const TaskId flow = b.add("optical_flow", true, true, {feat}, t);
    std::vector<TaskId> deps{flow};
    if (last_update) deps.push_back(*last_update);
    last_update = b.add("update", true, false, std::move(deps), t);
  }

  const std::size_t samples = periodic_count(p.duration_s, p.imu_hz);
  for (std::size_t j = 0; j < samples; ++j) b.add("propagate", true, false, {}, periodic_release(j, p.imu_hz));

  const std::size_t inferences = periodic_count(p.duration_s, p.dl_fps);
  for (std::size_t m = 0; m < inferences; ++m) {
    const Micros t = periodic_release(m, p.dl_fps);
    std::vector<TaskId> deps;
    if (!captures.empty()) {
      auto frame = static_cast<std::size_t>(std::floor(static_cast<double>(m) * p.camera_fps / p.dl_fps + 1e-9));
      deps.push_back(captures[std::min(frame, captures.size() - 1)]);
    }
    TaskId prev = b.add(kCnnLayers[0], true, true, std::move(deps), t);
    for (std::size_t l = 1; l < std::size(kCnnLayers); ++l) prev = b.add(kCnnLayers[l], true, false, {prev}, t);
  }

  const std::size_t plans = periodic_count(p.duration_s, p.plan_hz);
  for (std::size_t q = 0; q < plans; ++q) b.add("planning", true, false, {}, periodic_release(q, p.plan_hz));

  b.add("scene_understanding", false, false, {}, 0);
  b.add("map_generation", false, false, {}, static_cast<Micros>(std::floor(p.duration_s * 1e6 / 2.0)));
  return b.take();
}

std::vector<InferenceVariant> inference_comparison() {
  auto single = [](bool real_time) {
    Builder b;
    b.add("alexnet", real_time, false, {}, 0);
    return b.take();
  };
  return {
      {"cpu", single(true), UnitKind::CPU},
      {"gpu", single(true), UnitKind::GPU},
      {"cloud", single(false), std::nullopt},
  };
}

TaskGraph buffer_pressure(const BufferPressureParams& p) {
  check_duration(p.duration_s);
  check_rate(p.camera_fps, "camera_fps");
  Builder b;
  for (std::size_t i = 0; i < p.flood; ++i) b.add(p.flood_workload, true, false, {}, 0);
  const std::size_t frames = periodic_count(p.duration_s, p.camera_fps);
  for (std::size_t k = 0; k < frames; ++k) {
    const Micros t = periodic_release(k, p.camera_fps);
    const TaskId cap = b.add("capture", true, false, {}, t);
    b.add(p.consumer_workload, true, true, {cap}, t);
  }
  return b.take();
}

}  // namespace simrt
