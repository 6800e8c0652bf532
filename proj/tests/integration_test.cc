#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "loopsfm/experiments.h"
#include "loopsfm/frames_io.h"
#include "loopsfm/simulate.h"
#include "loopsfm/solver.h"

namespace loopsfm {
namespace {

std::filesystem::path TempCsv(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         (name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
          ".csv");
}

TEST(Pipeline, SimulateWriteReadSolveValidate) {
  const LoopShape truth = LoopShape::FromLengths(std::vector<double>{1.5, 2.5, 3.0, 2.0});
  const Simulation sim = Simulate(truth, 40, NoiseModel::None(), 77);
  const auto path = TempCsv("pipeline");
  WriteFramesCsvFile(path, sim.records);
  const auto records = ReadFramesCsvFile(path);
  std::filesystem::remove(path);

  const auto frames = ToObservations(records);
  const RecoveryResult result = Solve(Assemble(frames));
  const LoopShape recovered = RecoverShape(result);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(recovered.length(k), truth.length(k), 1e-6 * truth.length(k));
  }
  EXPECT_TRUE(ValidateAgainstFrames(recovered, frames).consistent);

  // Depths of every frame agree with the simulated pose up to reflection.
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto depths = ReconstructDepths(recovered, frames[i]);
    const auto& pts = sim.poses[i].points;
    double best = INFINITY;
    for (const DepthAssignment& d : depths) {
      for (double sign : {1.0, -1.0}) {
        double err = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
          err = std::max(err, std::abs(d.z_offsets[k] - sign * (pts[k].z() - pts[0].z())));
        }
        best = std::min(best, err);
      }
    }
    EXPECT_LE(best, 1e-5) << "frame " << i + 1;
  }
}

TEST(Pipeline, PointNoiseDegradesGracefully) {
  SimulationOptions options;
  options.noise_target = NoiseTarget::kPoints;
  const LoopShape truth({4, 9, 16, 1});
  const Simulation sim = Simulate(truth, 60, NoiseModel::Gaussian(1e-6), 12, options);
  const RecoveryResult result = Solve(Assemble(sim.frames));
  ASSERT_TRUE(result.lengths.has_value());
  const std::array<double, 4> expected = {2, 3, 4, 1};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR((*result.lengths)[k], expected[k], 1e-2 * expected[k]);
  }
}

TEST(Pipeline, TriangleEndToEnd) {
  const LoopShape truth({9, 16, 25});
  const Simulation sim = Simulate(truth, 10, NoiseModel::None(), 31);
  const RecoveryResult3 result = Solve3(sim.frames);
  ASSERT_TRUE(result.lengths.has_value());
  EXPECT_NEAR((*result.lengths)[2], 5.0, 1e-6);
  const nlohmann::json json = ToJson(result);
  EXPECT_TRUE(json.contains("lengths"));
}

TEST(Pipeline, RoundedPublishedDataStaysClose) {
  ReproductionOptions options;
  options.round3 = true;
  const ReproductionReport report = RunReproduction(options);
  ASSERT_TRUE(report.result.lengths.has_value());
  const std::array<double, 4> expected = {2, 3, 4, 1};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR((*report.result.lengths)[k], expected[k], 0.1 * expected[k]);
  }
}

}  // namespace
}  // namespace loopsfm
