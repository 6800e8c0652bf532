#include "loopsfm/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "loopsfm/error.h"

namespace loopsfm {
namespace {

constexpr double kRadicandClamp = 1e-6;
constexpr double kRangeSlack = 1e-12;

void RequireFourLinks(const LoopShape& shape) {
  if (shape.size() != 4) {
    throw LoopError(ErrorCode::kInvalidArgument,
                    "expected a four-link loop, got " +
                        std::to_string(shape.size()) + " links");
  }
}

// Foot and height of a point at distance sqrt(sq_from_p) from P=(0,0,0) and
// sqrt(sq_from_r) from R=(diag_pr,0,0). Height 0 is the collinear case.
struct Trilateration {
  double x;
  double h;
};

Trilateration Trilaterate(double sq_from_p, double sq_from_r, double diag_pr) {
  const double x = (sq_from_p - sq_from_r + diag_pr * diag_pr) / (2.0 * diag_pr);
  return {x, std::sqrt(std::max(0.0, sq_from_p - x * x))};
}

}  // namespace

LoopShape::LoopShape(std::vector<double> sq_lengths)
    : sq_lengths_(std::move(sq_lengths)) {
  if (sq_lengths_.size() < 3) {
    throw LoopError(ErrorCode::kInvalidArgument,
                    "a loop needs at least 3 links");
  }
  for (double v : sq_lengths_) {
    if (!std::isfinite(v) || v <= 0.0) {
      std::ostringstream msg;
      msg << "squared link length must be positive and finite, got " << v;
      throw LoopError(ErrorCode::kInvalidArgument, msg.str());
    }
  }
}

LoopShape LoopShape::FromLengths(std::span<const double> lengths) {
  std::vector<double> sq;
  sq.reserve(lengths.size());
  for (double l : lengths) {
    if (!std::isfinite(l) || l <= 0.0) {
      std::ostringstream msg;
      msg << "link length must be positive and finite, got " << l;
      throw LoopError(ErrorCode::kInvalidArgument, msg.str());
    }
    sq.push_back(l * l);
  }
  return LoopShape(std::move(sq));
}

double LoopShape::length(std::size_t i) const {
  return std::sqrt(sq_lengths_[i]);
}

std::vector<double> LoopShape::lengths() const {
  std::vector<double> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(length(i));
  return out;
}

double LoopShape::perimeter() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) sum += length(i);
  return sum;
}

DofRanges::DofRanges(const LoopShape& shape) {
  RequireFourLinks(shape);
  a_ = shape.sq_length(0);
  b_ = shape.sq_length(1);
  c_ = shape.sq_length(2);
  d_ = shape.sq_length(3);
  const double la = std::sqrt(a_), lb = std::sqrt(b_);
  const double lc = std::sqrt(c_), ld = std::sqrt(d_);
  diag_pr_.lo = std::max(std::abs(la - lb), std::abs(ld - lc));
  diag_pr_.hi = std::min(la + lb, ld + lc);
}

Interval DofRanges::DiagQsRange(double diag_pr) const {
  const Trilateration q = Trilaterate(a_, b_, diag_pr);
  const Trilateration s = Trilaterate(d_, c_, diag_pr);
  const double dx = q.x - s.x;
  return {std::hypot(dx, q.h - s.h), std::hypot(dx, q.h + s.h)};
}

DofRanges FeasibleDofRanges(const LoopShape& shape) {
  DofRanges ranges(shape);
  if (ranges.diag_pr().empty()) {
    std::ostringstream msg;
    msg << "P-R diagonal interval (" << ranges.diag_pr().lo << ", "
        << ranges.diag_pr().hi << ") is empty";
    throw LoopError(ErrorCode::kInfeasibleShape, msg.str());
  }
  return ranges;
}

Eigen::Matrix3d RotationXYZ(double rot_x, double rot_y, double rot_z) {
  return (Eigen::AngleAxisd(rot_z, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rot_y, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rot_x, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Pose SynthesizePose(const LoopShape& shape, const PoseDof& dof) {
  const DofRanges ranges = FeasibleDofRanges(shape);
  const Interval& pr = ranges.diag_pr();
  const double pr_slack = kRangeSlack * pr.hi;
  if (!(dof.diag_pr >= pr.lo - pr_slack && dof.diag_pr <= pr.hi + pr_slack) ||
      dof.diag_pr <= 0.0) {
    std::ostringstream msg;
    msg << "diag_pr " << dof.diag_pr << " outside [" << pr.lo << ", " << pr.hi
        << "]";
    throw LoopError(ErrorCode::kInfeasibleDof, msg.str());
  }
  if (dof.dihedral_sign != 1 && dof.dihedral_sign != -1) {
    throw LoopError(ErrorCode::kInvalidArgument, "dihedral_sign must be +-1");
  }

  const double a = shape.sq_length(0), b = shape.sq_length(1);
  const double c = shape.sq_length(2), d = shape.sq_length(3);
  const Trilateration q = Trilaterate(a, b, dof.diag_pr);
  const Trilateration s = Trilaterate(d, c, dof.diag_pr);

  const Interval qs = ranges.DiagQsRange(dof.diag_pr);
  const double qs_slack = kRangeSlack * std::max(1.0, qs.hi);
  if (!(dof.diag_qs >= qs.lo - qs_slack && dof.diag_qs <= qs.hi + qs_slack)) {
    std::ostringstream msg;
    msg << "diag_qs " << dof.diag_qs << " outside [" << qs.lo << ", " << qs.hi
        << "] for diag_pr " << dof.diag_pr;
    throw LoopError(ErrorCode::kInfeasibleDof, msg.str());
  }

  // |QS|^2 = dx^2 + hq^2 + hs^2 - 2 hq hs cos(dihedral).
  double dihedral = 0.0;
  const double hh = q.h * s.h;
  if (hh > 0.0) {
    const double dx = q.x - s.x;
    const double cos_dihedral =
        (dx * dx + q.h * q.h + s.h * s.h - dof.diag_qs * dof.diag_qs) /
        (2.0 * hh);
    dihedral = std::acos(std::clamp(cos_dihedral, -1.0, 1.0));
  }

  Pose pose;
  pose.points = {
      Eigen::Vector3d::Zero(),
      Eigen::Vector3d(q.x, q.h, 0.0),
      Eigen::Vector3d(dof.diag_pr, 0.0, 0.0),
      Eigen::Vector3d(s.x, s.h * std::cos(dihedral),
                      dof.dihedral_sign * s.h * std::sin(dihedral)),
  };
  const Eigen::Matrix3d rotation = RotationXYZ(dof.rot_x, dof.rot_y, dof.rot_z);
  for (auto& p : pose.points) p = rotation * p;
  return pose;
}

Pose SynthesizeTrianglePose(const LoopShape& shape, double rot_x, double rot_y,
                            double rot_z) {
  if (shape.size() != 3) {
    throw LoopError(ErrorCode::kInvalidArgument,
                    "expected a three-link loop, got " +
                        std::to_string(shape.size()) + " links");
  }
  const double pq = shape.length(0), qr = shape.length(1), rp = shape.length(2);
  const double longest = std::max({pq, qr, rp});
  if (longest > pq + qr + rp - longest) {
    throw LoopError(ErrorCode::kInfeasibleShape,
                    "link lengths violate the triangle inequality");
  }
  // R is sqrt(c) from P and sqrt(b) from Q.
  const Trilateration r = Trilaterate(shape.sq_length(2), shape.sq_length(1), pq);
  Pose pose;
  pose.points = {Eigen::Vector3d::Zero(), Eigen::Vector3d(pq, 0.0, 0.0),
                 Eigen::Vector3d(r.x, r.h, 0.0)};
  const Eigen::Matrix3d rotation = RotationXYZ(rot_x, rot_y, rot_z);
  for (auto& p : pose.points) p = rotation * p;
  return pose;
}

PoseDof SampleDof(const LoopShape& shape, std::mt19937_64& rng) {
  const DofRanges ranges = FeasibleDofRanges(shape);
  auto shrunk = [](const Interval& in) {
    const double margin = 0.01 * in.width();
    return std::uniform_real_distribution<double>(in.lo + margin,
                                                  in.hi - margin);
  };
  PoseDof dof;
  dof.diag_pr = shrunk(ranges.diag_pr())(rng);
  dof.diag_qs = shrunk(ranges.DiagQsRange(dof.diag_pr))(rng);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  dof.rot_x = angle(rng);
  dof.rot_y = angle(rng);
  dof.rot_z = angle(rng);
  dof.dihedral_sign = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
  return dof;
}

FrameObservation ProjectOrthographic(const Pose& pose, int frame_index) {
  FrameObservation obs;
  obs.frame_index = frame_index;
  const std::size_t n = pose.points.size();
  obs.sq_proj.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Vector2d step =
        (pose.points[(k + 1) % n] - pose.points[k]).head<2>();
    obs.sq_proj.push_back(step.squaredNorm());
  }
  return obs;
}

std::vector<double> CyclicSqDistances(const Pose& pose) {
  const std::size_t n = pose.points.size();
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back((pose.points[(k + 1) % n] - pose.points[k]).squaredNorm());
  }
  return out;
}

double ConsistencyThreshold(const LoopShape& shape, double relative_tolerance) {
  return relative_tolerance * shape.perimeter();
}

std::vector<double> DepthRadicands(const LoopShape& shape,
                                   const FrameObservation& obs) {
  if (obs.sq_proj.size() != shape.size()) {
    throw LoopError(ErrorCode::kInvalidArgument,
                    "observation has " + std::to_string(obs.sq_proj.size()) +
                        " entries, shape has " + std::to_string(shape.size()));
  }
  std::vector<double> radicands(shape.size());
  for (std::size_t k = 0; k < shape.size(); ++k) {
    const double proj = obs.sq_proj[k];
    if (!std::isfinite(proj) || proj < 0.0) {
      throw LoopError(ErrorCode::kInvalidArgument,
                      "projected squared distance must be finite and >= 0");
    }
    const double r = shape.sq_length(k) - proj;
    if (r >= 0.0) {
      radicands[k] = r;
    } else if (r >= -kRadicandClamp * shape.sq_length(k)) {
      radicands[k] = 0.0;
    } else {
      std::ostringstream msg;
      msg << "frame " << obs.frame_index << " link " << k << ": projection "
          << proj << " exceeds squared length " << shape.sq_length(k);
      throw LoopError(ErrorCode::kNegativeRadicand, msg.str());
    }
  }
  return radicands;
}

double LoopResidual(const LoopShape& shape, const FrameObservation& obs) {
  const std::vector<double> radicands = DepthRadicands(shape, obs);
  const std::size_t n = radicands.size();
  std::vector<double> steps(n);
  for (std::size_t k = 0; k < n; ++k) steps[k] = std::sqrt(radicands[k]);

  double best = std::numeric_limits<double>::infinity();
  // Bit k-1 of `pattern` set means link k enters with a minus sign.
  for (unsigned pattern = 0; pattern < (1u << (n - 1)); ++pattern) {
    double sum = steps[0];
    for (std::size_t k = 1; k < n; ++k) {
      sum += ((pattern >> (k - 1)) & 1u) ? -steps[k] : steps[k];
    }
    best = std::min(best, std::abs(sum));
  }
  return best;
}

std::vector<DepthAssignment> ReconstructDepths(const LoopShape& shape,
                                               const FrameObservation& obs,
                                               double tolerance) {
  if (tolerance < 0.0) tolerance = ConsistencyThreshold(shape);
  const std::vector<double> radicands = DepthRadicands(shape, obs);
  const std::size_t n = radicands.size();
  std::vector<double> steps(n);
  for (std::size_t k = 0; k < n; ++k) steps[k] = std::sqrt(radicands[k]);

  const double dedupe = 1e-12 * shape.perimeter();
  std::vector<DepthAssignment> out;
  for (unsigned pattern = 0; pattern < (1u << n); ++pattern) {
    DepthAssignment candidate;
    candidate.sign_pattern.resize(n);
    candidate.z_offsets.assign(n, 0.0);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const int sign = ((pattern >> k) & 1u) ? -1 : 1;
      candidate.sign_pattern[k] = sign;
      sum += sign * steps[k];
      if (k + 1 < n) candidate.z_offsets[k + 1] = sum;
    }
    if (std::abs(sum) > tolerance) continue;

    const bool duplicate = std::any_of(
        out.begin(), out.end(), [&](const DepthAssignment& kept) {
          for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(kept.z_offsets[k] - candidate.z_offsets[k]) > dedupe)
              return false;
          }
          return true;
        });
    if (!duplicate) out.push_back(std::move(candidate));
  }
  if (out.empty()) {
    std::ostringstream msg;
    msg << "frame " << obs.frame_index
        << ": no sign pattern closes the loop within " << tolerance;
    throw LoopError(ErrorCode::kInconsistentFrame, msg.str());
  }
  return out;
}

}  // namespace loopsfm
