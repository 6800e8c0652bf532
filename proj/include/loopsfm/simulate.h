#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "loopsfm/frames_io.h"
#include "loopsfm/geometry.h"
#include "loopsfm/noise.h"

namespace loopsfm {

// kFree samples an independent pose per frame. The other kinds reuse a single
// sampled pose and move it rigidly in ways an orthographic camera cannot
// distinguish: not at all, by translation, or by rotation about the viewing
// axis plus translation.
enum class MotionKind { kFree, kStatic, kTranslation, kRotationZ };

MotionKind ParseMotionKind(std::string_view text);
std::string_view MotionKindName(MotionKind kind);

struct SimulationOptions {
  NoiseTarget noise_target = NoiseTarget::kDistances;
  MotionKind motion = MotionKind::kFree;
};

struct Simulation {
  std::vector<FrameRecord> records;  // possibly noisy distances
  std::vector<FrameObservation> frames;  // records squared
  std::vector<Pose> poses;  // ground truth
};

// Deterministic for a given (shape, frame_count, noise, seed, options).
// Four-link shapes sample PoseDof; three-link shapes are rigid triangles under
// random rotations. Throws kInvalidArgument for frame_count < 1 and
// kInfeasibleShape for shapes that cannot close.
Simulation Simulate(const LoopShape& shape, int frame_count,
                    const NoiseModel& noise, std::uint64_t seed,
                    const SimulationOptions& options = {});

}  // namespace loopsfm
