#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "loopsfm/geometry.h"
#include "loopsfm/linearizer.h"

namespace loopsfm {

// The ten quadratic coefficients f5..f14 of every frame sum to zero, so the
// direction that adds the same constant to x5..x14 is always in the null
// space. The largest rank any four-link system can reach is therefore 18.
// x1..x4 and x15..x19 are orthogonal to that direction and stay identifiable.
inline constexpr int kStructuralRank = 18;
inline constexpr int kStructuralRank3 = 4;

struct LinearSystem {
  Eigen::MatrixXd rows;  // m x 19, columns are f1..f19
  Eigen::VectorXd rhs;   // -f0 per frame
  std::vector<int> frame_indices;

  int num_equations() const { return static_cast<int>(rows.rows()); }
};

struct SolveOptions {
  // Singular values below svd_rcond * sigma_max are truncated.
  double svd_rcond = 1e-10;
  bool allow_underdetermined = false;
  // Plain LU solve of an exactly square system, as in the original worked
  // example. Diagnostics still come from the SVD.
  bool square_solve = false;
  int min_frames = static_cast<int>(kNumLifted);
  // Closure threshold for per-frame validation, relative to the perimeter.
  double closure_relative_tolerance = 1e-6;
};

struct RecoveryResult {
  LiftedVector x;
  // sqrt(x1..x4); empty when any of them is <= 0.
  std::optional<std::array<double, 4>> lengths;
  bool non_physical = false;
  double condition_number = 0.0;
  double residual_norm = 0.0;
  int numerical_rank = 0;
  bool rank_deficient = false;
  std::vector<double> singular_values;
  // |x5 - x1^2| ... |x14 - x3 x4|, then |x15 - P15(x1..x4)| ... |x19 -
  // P19(x1..x4)|.
  std::array<double, 15> consistency{};
  // Closure residual of the recovered shape on every input frame; NaN where
  // the frame could not be evaluated (non-physical shape or a projection
  // longer than the recovered link).
  std::vector<double> per_frame_closure;
};

// One coefficient row per frame, ordered by frame_index (stable). Throws
// kEmptySystem for an empty list and kInvalidArgument for frames that are not
// four-link observations.
LinearSystem Assemble(std::span<const FrameObservation> frames);

// Minimum-norm least squares by SVD. Throws kEmptySystem and
// kUnderdetermined (fewer than min_frames rows unless allowed).
RecoveryResult Solve(const LinearSystem& system,
                     const SolveOptions& options = {});

// Throws kNonPhysical when any of x1..x4 is <= 0.
LoopShape RecoverShape(const RecoveryResult& result);

struct ClosureReport {
  // NaN marks a frame whose radicand went negative.
  std::vector<double> residuals;
  bool consistent = false;
};

// threshold < 0 selects ConsistencyThreshold(shape).
ClosureReport ValidateAgainstFrames(const LoopShape& shape,
                                    std::span<const FrameObservation> frames,
                                    double threshold = -1.0);

// Rebuilds the observations a system was assembled from (f15..f18 are
// A, B, C, D).
std::vector<FrameObservation> ObservationsOf(const LinearSystem& system);

struct RecoveryResult3 {
  Lifted3Vector x;
  std::optional<std::array<double, 3>> lengths;
  bool non_physical = false;
  double condition_number = 0.0;
  double residual_norm = 0.0;
  int numerical_rank = 0;
  bool rank_deficient = false;
  std::vector<double> singular_values;
  // |s - (a^2 + b^2 + c^2 - 2ab - 2ac - 2bc)|
  double consistency = 0.0;
  std::vector<double> per_frame_closure;
};

// Three-link loops: four unknowns (a, b, c, s), so at least 4 frames unless
// allow_underdetermined. min_frames in options is ignored.
RecoveryResult3 Solve3(std::span<const FrameObservation> frames,
                       const SolveOptions& options = {});

}  // namespace loopsfm
