#include "loopsfm/simulate.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loopsfm/error.h"

namespace loopsfm {
namespace {

// Decorrelates the noise stream from the pose stream for the same seed.
constexpr std::uint64_t kNoiseStreamSalt = 0x9e3779b97f4a7c15ULL;
constexpr double kTranslationExtent = 10.0;

Pose SamplePose(const LoopShape& shape, std::mt19937_64& rng) {
  if (shape.size() == 4) return SynthesizePose(shape, SampleDof(shape, rng));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double rx = angle(rng), ry = angle(rng), rz = angle(rng);
  return SynthesizeTrianglePose(shape, rx, ry, rz);
}

Eigen::Vector3d SampleTranslation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kTranslationExtent,
                                           kTranslationExtent);
  const double x = u(rng), y = u(rng), z = u(rng);
  return {x, y, z};
}

std::vector<double> MeasureDistances(const Pose& pose, const NoiseModel& noise,
                                     NoiseTarget target, std::mt19937_64& rng) {
  const std::size_t n = pose.points.size();
  std::vector<double> distances(n);
  if (target == NoiseTarget::kPoints) {
    std::vector<Eigen::Vector2d> projected(n);
    for (std::size_t k = 0; k < n; ++k) {
      projected[k] = {noise.Apply(pose.points[k].x(), rng),
                      noise.Apply(pose.points[k].y(), rng)};
    }
    for (std::size_t k = 0; k < n; ++k) {
      distances[k] = (projected[(k + 1) % n] - projected[k]).norm();
    }
    return distances;
  }
  const FrameObservation exact = ProjectOrthographic(pose);
  for (std::size_t k = 0; k < n; ++k) {
    distances[k] = std::max(0.0, noise.Apply(std::sqrt(exact.sq_proj[k]), rng));
  }
  return distances;
}

}  // namespace

MotionKind ParseMotionKind(std::string_view text) {
  if (text == "free") return MotionKind::kFree;
  if (text == "static") return MotionKind::kStatic;
  if (text == "translation") return MotionKind::kTranslation;
  if (text == "rotate-z") return MotionKind::kRotationZ;
  throw LoopError(ErrorCode::kInvalidArgument,
                  "motion must be free, static, translation or rotate-z");
}

std::string_view MotionKindName(MotionKind kind) {
  switch (kind) {
    case MotionKind::kFree:
      return "free";
    case MotionKind::kStatic:
      return "static";
    case MotionKind::kTranslation:
      return "translation";
    case MotionKind::kRotationZ:
      return "rotate-z";
  }
  return "free";
}

Simulation Simulate(const LoopShape& shape, int frame_count,
                    const NoiseModel& noise, std::uint64_t seed,
                    const SimulationOptions& options) {
  if (frame_count < 1) {
    throw LoopError(ErrorCode::kInvalidArgument, "frame_count must be >= 1");
  }
  if (shape.size() != 3 && shape.size() != 4) {
    throw LoopError(ErrorCode::kInvalidArgument,
                    "simulation supports three- and four-link loops");
  }
  noise.Validate();
  if (shape.size() == 4) FeasibleDofRanges(shape);

  std::mt19937_64 pose_rng(seed);
  std::mt19937_64 noise_rng(seed ^ kNoiseStreamSalt ^ noise.seed);

  Pose base;
  if (options.motion != MotionKind::kFree) base = SamplePose(shape, pose_rng);

  Simulation sim;
  sim.records.reserve(static_cast<std::size_t>(frame_count));
  sim.frames.reserve(static_cast<std::size_t>(frame_count));
  sim.poses.reserve(static_cast<std::size_t>(frame_count));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < frame_count; ++i) {
    Pose pose;
    switch (options.motion) {
      case MotionKind::kFree:
        pose = SamplePose(shape, pose_rng);
        break;
      case MotionKind::kStatic:
        pose = base;
        break;
      case MotionKind::kTranslation: {
        const Eigen::Vector3d t = SampleTranslation(pose_rng);
        pose = base;
        for (auto& p : pose.points) p += t;
        break;
      }
      case MotionKind::kRotationZ: {
        const Eigen::Matrix3d r = RotationXYZ(0.0, 0.0, angle(pose_rng));
        const Eigen::Vector3d t = SampleTranslation(pose_rng);
        pose = base;
        for (auto& p : pose.points) p = r * p + t;
        break;
      }
    }
    FrameRecord record{i + 1,
                       MeasureDistances(pose, noise, options.noise_target,
                                        noise_rng)};
    sim.frames.push_back(record.ToObservation());
    sim.records.push_back(std::move(record));
    sim.poses.push_back(std::move(pose));
  }
  return sim;
}

}  // namespace loopsfm
