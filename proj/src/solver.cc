#include "loopsfm/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "loopsfm/error.h"

namespace loopsfm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LeastSquares {
  Eigen::VectorXd x;
  Eigen::VectorXd singular_values;
  int rank = 0;
};

// Truncated-SVD minimum-norm solution.
LeastSquares SvdLeastSquares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             double rcond) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  LeastSquares out;
  out.singular_values = svd.singularValues();
  out.x = Eigen::VectorXd::Zero(a.cols());
  if (out.singular_values.size() == 0 || out.singular_values(0) == 0.0) {
    return out;
  }
  const double cutoff = rcond * out.singular_values(0);
  const Eigen::VectorXd utb = svd.matrixU().transpose() * b;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
    const double s = out.singular_values(i);
    if (s <= cutoff) break;
    out.x += svd.matrixV().col(i) * (utb(i) / s);
    ++out.rank;
  }
  return out;
}

// sigma_max / sigma_k, k the smaller of the row count and the structural
// rank.
double ConditionNumber(const Eigen::VectorXd& sv, int structural_rank) {
  const Eigen::Index k =
      std::min<Eigen::Index>(sv.size(), static_cast<Eigen::Index>(structural_rank));
  if (k == 0) return std::numeric_limits<double>::infinity();
  const double smallest = sv(k - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

std::vector<double> ToStdVector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

std::vector<double> ClosureOrNaN(const std::optional<LoopShape>& shape,
                                 std::span<const FrameObservation> frames) {
  std::vector<double> out;
  out.reserve(frames.size());
  for (const FrameObservation& frame : frames) {
    if (!shape) {
      out.push_back(kNaN);
      continue;
    }
    try {
      out.push_back(LoopResidual(*shape, frame));
    } catch (const LoopError& e) {
      if (e.code() != ErrorCode::kNegativeRadicand) throw;
      out.push_back(kNaN);
    }
  }
  return out;
}

}  // namespace

LinearSystem Assemble(std::span<const FrameObservation> frames) {
  if (frames.empty()) {
    throw LoopError(ErrorCode::kEmptySystem, "no frames to assemble");
  }
  std::vector<std::size_t> order(frames.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return frames[l].frame_index < frames[r].frame_index;
  });

  LinearSystem system;
  const auto m = static_cast<Eigen::Index>(frames.size());
  system.rows.resize(m, static_cast<Eigen::Index>(kNumLifted));
  system.rhs.resize(m);
  system.frame_indices.reserve(frames.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const FrameObservation& frame = frames[order[static_cast<std::size_t>(i)]];
    if (frame.sq_proj.size() != 4) {
      throw LoopError(ErrorCode::kInvalidArgument,
                      "frame " + std::to_string(frame.frame_index) +
                          " is not a four-link observation");
    }
    const CoefficientRow row =
        ComputeCoefficientRow(frame.sq_proj[0], frame.sq_proj[1],
                              frame.sq_proj[2], frame.sq_proj[3]);
    for (std::size_t k = 1; k < kNumCoefficients; ++k) {
      system.rows(i, static_cast<Eigen::Index>(k - 1)) = row.f[k];
    }
    system.rhs(i) = -row.f[0];
    system.frame_indices.push_back(frame.frame_index);
  }
  return system;
}

std::vector<FrameObservation> ObservationsOf(const LinearSystem& system) {
  std::vector<FrameObservation> frames;
  frames.reserve(system.frame_indices.size());
  for (Eigen::Index i = 0; i < system.rows.rows(); ++i) {
    FrameObservation obs;
    obs.frame_index = system.frame_indices[static_cast<std::size_t>(i)];
    // Columns 14..17 hold f15..f18 = A, B, C, D.
    for (Eigen::Index k = 14; k < 18; ++k) obs.sq_proj.push_back(system.rows(i, k));
    frames.push_back(std::move(obs));
  }
  return frames;
}

RecoveryResult Solve(const LinearSystem& system, const SolveOptions& options) {
  const int m = system.num_equations();
  if (m == 0) throw LoopError(ErrorCode::kEmptySystem, "system has no rows");
  if (m < options.min_frames && !options.allow_underdetermined) {
    throw LoopError(ErrorCode::kUnderdetermined,
                    std::to_string(m) + " equations, need at least " +
                        std::to_string(options.min_frames));
  }

  const LeastSquares ls =
      SvdLeastSquares(system.rows, system.rhs, options.svd_rcond);
  Eigen::VectorXd x = ls.x;
  if (options.square_solve) {
    if (m != static_cast<int>(kNumLifted)) {
      throw LoopError(ErrorCode::kInvalidArgument,
                      "square solve needs exactly 19 equations, got " +
                          std::to_string(m));
    }
    x = system.rows.partialPivLu().solve(system.rhs);
  }

  RecoveryResult result;
  std::copy(x.data(), x.data() + x.size(), result.x.x.begin());
  result.singular_values = ToStdVector(ls.singular_values);
  result.numerical_rank = ls.rank;
  result.rank_deficient = ls.rank < kStructuralRank;
  result.condition_number = ConditionNumber(ls.singular_values, kStructuralRank);
  result.residual_norm = (system.rows * x - system.rhs).norm();

  const auto& v = result.x.x;
  result.non_physical = !(v[0] > 0.0 && v[1] > 0.0 && v[2] > 0.0 && v[3] > 0.0);
  if (!result.non_physical) {
    result.lengths = std::array<double, 4>{std::sqrt(v[0]), std::sqrt(v[1]),
                                           std::sqrt(v[2]), std::sqrt(v[3])};
  }

  const LiftedVector implied = EvaluateLift(v[0], v[1], v[2], v[3]);
  for (std::size_t k = 4; k < kNumLifted; ++k) {
    result.consistency[k - 4] = std::abs(v[k] - implied.x[k]);
  }

  std::optional<LoopShape> shape;
  if (!result.non_physical) shape.emplace(std::vector<double>(v.begin(), v.begin() + 4));
  const std::vector<FrameObservation> frames = ObservationsOf(system);
  result.per_frame_closure = ClosureOrNaN(shape, frames);
  return result;
}

LoopShape RecoverShape(const RecoveryResult& result) {
  if (result.non_physical) {
    throw LoopError(ErrorCode::kNonPhysical,
                    "solved squared lengths are not all positive");
  }
  const auto& v = result.x.x;
  return LoopShape({v[0], v[1], v[2], v[3]});
}

ClosureReport ValidateAgainstFrames(const LoopShape& shape,
                                    std::span<const FrameObservation> frames,
                                    double threshold) {
  if (threshold < 0.0) threshold = ConsistencyThreshold(shape);
  ClosureReport report;
  report.residuals = ClosureOrNaN(shape, frames);
  report.consistent = std::all_of(
      report.residuals.begin(), report.residuals.end(),
      [&](double r) { return !std::isnan(r) && r <= threshold; });
  return report;
}

RecoveryResult3 Solve3(std::span<const FrameObservation> frames,
                       const SolveOptions& options) {
  if (frames.empty()) {
    throw LoopError(ErrorCode::kEmptySystem, "no frames to assemble");
  }
  const auto m = static_cast<Eigen::Index>(frames.size());
  if (m < kStructuralRank3 && !options.allow_underdetermined) {
    throw LoopError(ErrorCode::kUnderdetermined,
                    std::to_string(m) + " equations, need at least 4");
  }
  Eigen::MatrixXd rows(m, 4);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const FrameObservation& frame = frames[static_cast<std::size_t>(i)];
    if (frame.sq_proj.size() != 3) {
      throw LoopError(ErrorCode::kInvalidArgument,
                      "frame " + std::to_string(frame.frame_index) +
                          " is not a three-link observation");
    }
    const Coefficient3Row row = ComputeCoefficient3Row(
        frame.sq_proj[0], frame.sq_proj[1], frame.sq_proj[2]);
    for (Eigen::Index k = 0; k < 4; ++k) rows(i, k) = row.g[static_cast<std::size_t>(k + 1)];
    rhs(i) = -row.g[0];
  }

  const LeastSquares ls = SvdLeastSquares(rows, rhs, options.svd_rcond);
  RecoveryResult3 result;
  std::copy(ls.x.data(), ls.x.data() + 4, result.x.x.begin());
  result.singular_values = ToStdVector(ls.singular_values);
  result.numerical_rank = ls.rank;
  result.rank_deficient = ls.rank < kStructuralRank3;
  result.condition_number = ConditionNumber(ls.singular_values, kStructuralRank3);
  result.residual_norm = (rows * ls.x - rhs).norm();

  const auto& v = result.x.x;
  result.non_physical = !(v[0] > 0.0 && v[1] > 0.0 && v[2] > 0.0);
  if (!result.non_physical) {
    result.lengths =
        std::array<double, 3>{std::sqrt(v[0]), std::sqrt(v[1]), std::sqrt(v[2])};
  }
  result.consistency = std::abs(v[3] - EvaluateLift3(v[0], v[1], v[2]).x[3]);

  std::optional<LoopShape> shape;
  if (!result.non_physical) shape.emplace(std::vector<double>{v[0], v[1], v[2]});
  result.per_frame_closure = ClosureOrNaN(shape, frames);
  return result;
}

}  // namespace loopsfm
