#include "loopsfm/geometry.h"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "loopsfm/error.h"
#include "loopsfm/fixtures.h"

namespace loopsfm {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

LoopShape Shape4(double a, double b, double c, double d) {
  return LoopShape({a, b, c, d});
}

Pose Transform(const Pose& pose, const Eigen::Matrix3d& r,
               const Eigen::Vector3d& t) {
  Pose out = pose;
  for (auto& p : out.points) p = r * p + t;
  return out;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const LoopError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected LoopError";
  return ErrorCode::kIo;
}

TEST(LoopShape, RejectsInvalidEntries) {
  EXPECT_EQ(CodeOf([] { LoopShape({1, 1}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { LoopShape({1, 0, 1, 1}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { LoopShape({1, -2, 1}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { LoopShape({1, NAN, 1}); }), ErrorCode::kInvalidArgument);
  const std::vector<double> lengths = {2, 3, 4, 1};
  const LoopShape shape = LoopShape::FromLengths(lengths);
  EXPECT_EQ(shape.sq_length(2), 16.0);
  EXPECT_DOUBLE_EQ(shape.perimeter(), 10.0);
}

TEST(FeasibleDofRanges, TriangleInequalityInterval) {
  const DofRanges ranges = FeasibleDofRanges(Shape4(4, 9, 16, 1));
  EXPECT_DOUBLE_EQ(ranges.diag_pr().lo, 3.0);
  EXPECT_DOUBLE_EQ(ranges.diag_pr().hi, 5.0);
}

TEST(FeasibleDofRanges, UnitSquare) {
  const DofRanges ranges = FeasibleDofRanges(Shape4(1, 1, 1, 1));
  EXPECT_DOUBLE_EQ(ranges.diag_pr().lo, 0.0);
  EXPECT_DOUBLE_EQ(ranges.diag_pr().hi, 2.0);
  const Interval qs = ranges.DiagQsRange(kSqrt2);
  // Folded (dihedral 0) puts S onto Q; flat gives the planar square.
  EXPECT_NEAR(qs.lo, 0.0, 1e-15);
  EXPECT_NEAR(qs.hi, kSqrt2, 1e-15);
}

TEST(FeasibleDofRanges, EmptyIntervalIsInfeasible) {
  EXPECT_EQ(CodeOf([] { FeasibleDofRanges(Shape4(1, 1, 1, 100)); }),
            ErrorCode::kInfeasibleShape);
  EXPECT_EQ(CodeOf([] { FeasibleDofRanges(LoopShape({1, 1, 1})); }),
            ErrorCode::kInvalidArgument);
}

TEST(SynthesizePose, PlanarUnitSquare) {
  PoseDof dof;
  dof.diag_pr = kSqrt2;
  dof.diag_qs = kSqrt2;
  const Pose pose = SynthesizePose(Shape4(1, 1, 1, 1), dof);
  ASSERT_EQ(pose.points.size(), 4u);
  for (const auto& p : pose.points) EXPECT_NEAR(p.z(), 0.0, 1e-15);
  const std::vector<double> sq = CyclicSqDistances(pose);
  for (double v : sq) EXPECT_NEAR(v, 1.0, 1e-15);
  EXPECT_NEAR((pose.points[1] - pose.points[3]).norm(), kSqrt2, 1e-15);
  EXPECT_NEAR((pose.points[0] - pose.points[2]).norm(), kSqrt2, 1e-15);
}

TEST(SynthesizePose, RandomDofsKeepLinkLengths) {
  const LoopShape shape = Shape4(4, 9, 16, 1);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const PoseDof dof = SampleDof(shape, rng);
    const Pose pose = SynthesizePose(shape, dof);
    const std::vector<double> sq = CyclicSqDistances(pose);
    for (std::size_t k = 0; k < 4; ++k) {
      ASSERT_NEAR(sq[k], shape.sq_length(k), 1e-9 * shape.sq_length(k));
    }
    EXPECT_NEAR((pose.points[0] - pose.points[2]).norm(), dof.diag_pr, 1e-9);
    EXPECT_NEAR((pose.points[1] - pose.points[3]).norm(), dof.diag_qs, 1e-9);
  }
}

TEST(SynthesizePose, UnreachableDiagonalIsInfeasible) {
  PoseDof dof;
  dof.diag_pr = kSqrt2;
  dof.diag_qs = 2.1;
  EXPECT_EQ(CodeOf([&] { SynthesizePose(Shape4(1, 1, 1, 1), dof); }),
            ErrorCode::kInfeasibleDof);
  dof.diag_pr = 5.5;
  dof.diag_qs = 1.0;
  EXPECT_EQ(CodeOf([&] { SynthesizePose(Shape4(4, 9, 16, 1), dof); }),
            ErrorCode::kInfeasibleDof);
}

TEST(SynthesizePose, CollinearTrilaterationAtIntervalEnd) {
  // diag_pr = 2 + 3 = 4 + 1 puts Q and S on the P-R axis at x = 2 and 1.
  PoseDof dof;
  dof.diag_pr = 5.0;
  dof.diag_qs = 1.0;
  const Pose pose = SynthesizePose(Shape4(4, 9, 16, 1), dof);
  EXPECT_NEAR(pose.points[1].x(), 2.0, 1e-12);
  EXPECT_NEAR(pose.points[1].y(), 0.0, 1e-12);
  const std::vector<double> sq = CyclicSqDistances(pose);
  EXPECT_NEAR(sq[0], 4.0, 1e-9);
  EXPECT_NEAR(sq[1], 9.0, 1e-9);
  EXPECT_NEAR(sq[2], 16.0, 1e-9);
  EXPECT_NEAR(sq[3], 1.0, 1e-9);
}

TEST(SynthesizePose, DihedralSignsGiveMirrorImages) {
  const LoopShape shape = Shape4(4, 9, 16, 1);
  PoseDof dof;
  dof.diag_pr = 4.0;
  const Interval qs = DofRanges(shape).DiagQsRange(dof.diag_pr);
  dof.diag_qs = 0.5 * (qs.lo + qs.hi);
  dof.dihedral_sign = 1;
  const Pose up = SynthesizePose(shape, dof);
  dof.dihedral_sign = -1;
  const Pose down = SynthesizePose(shape, dof);
  EXPECT_GT((up.points[3] - down.points[3]).norm(), 1e-3);
  EXPECT_NEAR(up.points[3].z(), -down.points[3].z(), 1e-15);
  for (const Pose* pose : {&up, &down}) {
    const std::vector<double> sq = CyclicSqDistances(*pose);
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(sq[k], shape.sq_length(k), 1e-12 * shape.sq_length(k));
    }
  }
}

TEST(ProjectOrthographic, PlanarSquareKeepsLengths) {
  PoseDof dof;
  dof.diag_pr = kSqrt2;
  dof.diag_qs = kSqrt2;
  const FrameObservation obs =
      ProjectOrthographic(SynthesizePose(Shape4(1, 1, 1, 1), dof), 3);
  EXPECT_EQ(obs.frame_index, 3);
  for (double v : obs.sq_proj) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(ProjectOrthographic, EdgeOnSquareCollapsesTwoLinks) {
  Pose square;
  square.points = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const Pose edge_on =
      Transform(square, RotationXYZ(std::numbers::pi / 2, 0, 0), Eigen::Vector3d::Zero());
  const FrameObservation obs = ProjectOrthographic(edge_on);
  EXPECT_NEAR(obs.sq_proj[0], 1.0, 1e-15);
  EXPECT_NEAR(obs.sq_proj[1], 0.0, 1e-15);
  EXPECT_NEAR(obs.sq_proj[2], 1.0, 1e-15);
  EXPECT_NEAR(obs.sq_proj[3], 0.0, 1e-15);
}

TEST(ProjectOrthographic, ProjectionShrinksAndIgnoresViewAxisMotion) {
  const LoopShape shape = Shape4(4, 9, 16, 1);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    const Pose pose = SynthesizePose(shape, SampleDof(shape, rng));
    const FrameObservation obs = ProjectOrthographic(pose);
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_LE(obs.sq_proj[k], shape.sq_length(k) * (1 + 1e-12));
    }
    const Pose moved = Transform(pose, RotationXYZ(0, 0, u(rng)),
                                 Eigen::Vector3d(u(rng), u(rng), u(rng)));
    const FrameObservation moved_obs = ProjectOrthographic(moved);
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(moved_obs.sq_proj[k], obs.sq_proj[k],
                  1e-12 * std::max(1.0, shape.sq_length(k)));
    }
  }
}

TEST(LoopResidual, AllRadicandsZero) {
  const FrameObservation obs{{1, 1, 1, 1}, 1};
  EXPECT_EQ(LoopResidual(Shape4(1, 1, 1, 1), obs), 0.0);
}

TEST(LoopResidual, SimulatorRoundTrip) {
  const LoopShape shape = Shape4(4, 9, 16, 1);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const FrameObservation obs =
        ProjectOrthographic(SynthesizePose(shape, SampleDof(shape, rng)));
    ASSERT_LE(LoopResidual(shape, obs), 1e-9);
  }
}

TEST(LoopResidual, PublishedFrameOne) {
  const auto& d = fixtures::kPublishedDistances[0];
  const FrameObservation obs{{d[0] * d[0], d[1] * d[1], d[2] * d[2], d[3] * d[3]}, 1};
  EXPECT_LE(LoopResidual(Shape4(4, 9, 16, 1), obs), 1e-4);
  // The wrong shape does not close.
  EXPECT_GT(LoopResidual(Shape4(4, 9, 16, 4), obs), 1e-2);
}

TEST(LoopResidual, RadicandClampAndOverflow) {
  const LoopShape shape = Shape4(1, 1, 1, 1);
  // Projection longer than the link by less than 1e-6 relative is clamped.
  const FrameObservation barely{{1 + 5e-7, 1, 1, 1}, 1};
  EXPECT_EQ(LoopResidual(shape, barely), 0.0);
  const FrameObservation too_long{{1 + 5e-6, 1, 1, 1}, 1};
  EXPECT_EQ(CodeOf([&] { LoopResidual(shape, too_long); }),
            ErrorCode::kNegativeRadicand);
  const FrameObservation wrong_size{{1, 1, 1}, 1};
  EXPECT_EQ(CodeOf([&] { LoopResidual(shape, wrong_size); }),
            ErrorCode::kInvalidArgument);
}

TEST(ReconstructDepths, PlanarFrameCollapsesToOneAssignment) {
  const FrameObservation obs{{1, 1, 1, 1}, 1};
  const auto depths = ReconstructDepths(Shape4(1, 1, 1, 1), obs);
  ASSERT_EQ(depths.size(), 1u);
  for (double z : depths[0].z_offsets) EXPECT_EQ(z, 0.0);
}

bool ContainsOffsets(const std::vector<DepthAssignment>& depths,
                     const std::vector<double>& expected, double tol) {
  for (const DepthAssignment& d : depths) {
    bool match = true;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      match = match && std::abs(d.z_offsets[k] - expected[k]) <= tol;
    }
    if (match) return true;
  }
  return false;
}

TEST(ReconstructDepths, TiltedSquareMatchesPose) {
  Pose square;
  square.points = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const Pose tilted = Transform(square, RotationXYZ(std::numbers::pi / 6, 0, 0),
                                Eigen::Vector3d(0.3, -0.2, 4.0));
  const auto depths =
      ReconstructDepths(Shape4(1, 1, 1, 1), ProjectOrthographic(tilted));
  std::vector<double> anchored;
  for (const auto& p : tilted.points) anchored.push_back(p.z() - tilted.points[0].z());
  // Q-R rises by sin(pi/6) and S-P falls by the same.
  EXPECT_NEAR(anchored[2], 0.5, 1e-15);
  EXPECT_TRUE(ContainsOffsets(depths, anchored, 1e-7));
  std::vector<double> reflected;
  for (double z : anchored) reflected.push_back(-z);
  EXPECT_TRUE(ContainsOffsets(depths, reflected, 1e-7));
}

TEST(ReconstructDepths, ClosedUnderReflection) {
  const LoopShape shape = Shape4(4, 9, 16, 1);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const Pose pose = SynthesizePose(shape, SampleDof(shape, rng));
    const auto depths = ReconstructDepths(shape, ProjectOrthographic(pose));
    for (const DepthAssignment& d : depths) {
      std::vector<double> flipped;
      for (double z : d.z_offsets) flipped.push_back(-z);
      ASSERT_TRUE(ContainsOffsets(depths, flipped, 1e-9));
      double closure = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        closure += d.sign_pattern[k] *
                   std::sqrt(std::max(0.0, shape.sq_length(k) -
                                               ProjectOrthographic(pose).sq_proj[k]));
      }
      EXPECT_LE(std::abs(closure), ConsistencyThreshold(shape));
    }
  }
}

TEST(ReconstructDepths, InconsistentFrameThrows) {
  const auto& d = fixtures::kPublishedDistances[0];
  const FrameObservation obs{{d[0] * d[0], d[1] * d[1], d[2] * d[2], d[3] * d[3]}, 1};
  EXPECT_EQ(CodeOf([&] { ReconstructDepths(Shape4(4, 9, 16, 4), obs); }),
            ErrorCode::kInconsistentFrame);
}

TEST(SynthesizeTrianglePose, KeepsSidesUnderRotation) {
  const LoopShape triangle({9, 16, 25});
  const Pose pose = SynthesizeTrianglePose(triangle, 0.3, 1.1, -2.0);
  const std::vector<double> sq = CyclicSqDistances(pose);
  EXPECT_NEAR(sq[0], 9.0, 1e-12);
  EXPECT_NEAR(sq[1], 16.0, 1e-12);
  EXPECT_NEAR(sq[2], 25.0, 1e-12);
  EXPECT_LE(LoopResidual(triangle, ProjectOrthographic(pose)), 1e-9);
  EXPECT_EQ(CodeOf([] { SynthesizeTrianglePose(LoopShape({1, 1, 9}), 0, 0, 0); }),
            ErrorCode::kInfeasibleShape);
}

}  // namespace
}  // namespace loopsfm
