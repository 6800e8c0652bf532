#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace loopsfm {

// Squared link lengths of a closed chain P1 -> P2 -> ... -> Pn -> P1. For the
// four-link loop the entries are (a, b, c, d) = (|PQ|^2, |QR|^2, |RS|^2,
// |SP|^2).
class LoopShape {
 public:
  // Throws LoopError(kInvalidArgument) unless n >= 3 and every entry is
  // strictly positive and finite.
  explicit LoopShape(std::vector<double> sq_lengths);

  // Builds a shape from (unsquared) link lengths, as given on the command line.
  static LoopShape FromLengths(std::span<const double> lengths);

  std::size_t size() const { return sq_lengths_.size(); }
  std::span<const double> sq_lengths() const { return sq_lengths_; }
  double sq_length(std::size_t i) const { return sq_lengths_[i]; }
  double length(std::size_t i) const;
  std::vector<double> lengths() const;

  // Sum of link lengths; the scale used by the closure threshold.
  double perimeter() const;

 private:
  std::vector<double> sq_lengths_;
};

// Junction coordinates for one time instant, in loop order.
struct Pose {
  std::vector<Eigen::Vector3d> points;
};

// Squared projected junction-to-junction distances for one frame, in loop
// order (A, B, C, D for the four-link loop).
struct FrameObservation {
  std::vector<double> sq_proj;
  int frame_index = 1;
};

// Degrees of freedom of a four-link pose: the two diagonals, three extrinsic
// rotation angles, and which mirror image of S about the plane PQR is used.
struct PoseDof {
  double diag_pr = 0.0;
  double diag_qs = 0.0;
  double rot_x = 0.0;
  double rot_y = 0.0;
  double rot_z = 0.0;
  int dihedral_sign = 1;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return !(lo < hi); }
  double width() const { return hi - lo; }
  bool contains_open(double x) const { return lo < x && x < hi; }
};

// Relative depths of the junctions for one frame. z_offsets[0] is 0 and
// z_offsets[k+1] - z_offsets[k] = sign_pattern[k] * sqrt(sq_length_k -
// sq_proj_k).
struct DepthAssignment {
  std::vector<double> z_offsets;
  std::vector<int> sign_pattern;
};

// Feasible diagonals of a four-link shape. The P-R diagonal lies in an open
// interval fixed by the triangle inequalities of PQR and PRS; for a given P-R
// the Q-S diagonal ranges over the distances obtained by hinging the two
// triangles about PR from dihedral 0 (folded) to pi (flat, convex).
class DofRanges {
 public:
  explicit DofRanges(const LoopShape& shape);

  const Interval& diag_pr() const { return diag_pr_; }
  Interval DiagQsRange(double diag_pr) const;

 private:
  double a_, b_, c_, d_;
  Interval diag_pr_;
};

// Throws kInfeasibleShape when the P-R interval is empty and
// kInvalidArgument when the shape is not a four-link loop.
DofRanges FeasibleDofRanges(const LoopShape& shape);

// Extrinsic rotation: about X first, then Y, then Z.
Eigen::Matrix3d RotationXYZ(double rot_x, double rot_y, double rot_z);

// Canonical construction: P at the origin, R on +X at distance diag_pr, Q
// trilaterated into the upper half of the XY plane, S trilaterated and hinged
// about PR so that |QS| = diag_qs, then the rotation applied to all points.
// Throws kInfeasibleDof when diag_pr or diag_qs is out of range.
Pose SynthesizePose(const LoopShape& shape, const PoseDof& dof);

// Places a rigid triangle (P at origin, Q on +X, R in the upper XY
// half-plane) and rotates it. Three-link loops have no internal freedom.
Pose SynthesizeTrianglePose(const LoopShape& shape, double rot_x, double rot_y,
                            double rot_z);

// Samples degrees of freedom uniformly inside the feasible ranges shrunk by
// 1% at each end, angles uniform in [0, 2pi), and a fair dihedral sign.
PoseDof SampleDof(const LoopShape& shape, std::mt19937_64& rng);

// Drops Z and returns the squared consecutive distances in loop order.
FrameObservation ProjectOrthographic(const Pose& pose, int frame_index = 1);

// Squared consecutive 3D distances of a pose (link-length check).
std::vector<double> CyclicSqDistances(const Pose& pose);

// Default "can close a loop" threshold: 1e-6 times the perimeter.
double ConsistencyThreshold(const LoopShape& shape,
                            double relative_tolerance = 1e-6);

// Per-link sq_length - sq_proj, with small negative values clamped to zero.
// Throws kNegativeRadicand below -1e-6 * sq_length.
std::vector<double> DepthRadicands(const LoopShape& shape,
                                   const FrameObservation& obs);

// min over sign patterns (first sign +) of |sum_k +- sqrt(radicand_k)|.
double LoopResidual(const LoopShape& shape, const FrameObservation& obs);

// All depth assignments whose signed steps close the loop within
// `tolerance` (negative: use ConsistencyThreshold). Closed under global
// reflection. Throws kInconsistentFrame when none closes.
std::vector<DepthAssignment> ReconstructDepths(const LoopShape& shape,
                                               const FrameObservation& obs,
                                               double tolerance = -1.0);

}  // namespace loopsfm
