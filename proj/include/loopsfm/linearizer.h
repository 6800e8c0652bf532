#pragma once

#include <array>
#include <cstddef>

namespace loopsfm {

inline constexpr std::size_t kNumLifted = 19;
inline constexpr std::size_t kNumCoefficients = 20;

// The frame-independent unknowns of the linearized four-link closure
// equation, stored zero-based: x[0..3] = (a, b, c, d); x[4..7] = squares;
// x[8..13] = (ab, ac, ad, bc, bd, cd); x[14..17] = the cubic polynomials that
// multiply A, B, C, D; x[18] = the quartic free term.
struct LiftedVector {
  std::array<double, kNumLifted> x{};

  double operator[](std::size_t i) const { return x[i]; }
};

// Frame constants of one linear equation, indexed as printed: f[0] is the
// free term and f[k] multiplies x_k (x[k-1] in LiftedVector). f[15..18] are
// (A, B, C, D) and f[19] is 1.
struct CoefficientRow {
  std::array<double, kNumCoefficients> f{};

  double operator[](std::size_t i) const { return f[i]; }
};

// Throws LoopError(kNonPositiveShape) unless a, b, c, d are positive and
// finite.
LiftedVector LiftShape(double a, double b, double c, double d);

// Same polynomials without the positivity check. The solver uses this to
// compare solved monomials against the monomials of solved (a, b, c, d),
// which may be negative.
LiftedVector EvaluateLift(double a, double b, double c, double d);

// Throws kInvalidArgument for negative or non-finite inputs.
CoefficientRow ComputeCoefficientRow(double A, double B, double C, double D);

// f[0] + sum_k f[k] * x[k-1]. Zero when the shape closes the frame.
double EvaluateEquation(const CoefficientRow& row, const LiftedVector& lifted);

// Product over the eight sign patterns of
//   sqrt(a-A) + s1 sqrt(b-B) + s2 sqrt(c-C) + s3 sqrt(d-D),
// i.e. the closure equation with every square root squared out. It is
// evaluated directly from the radicals and is independent of the expanded
// coefficient formulas. Throws kNegativeRadicand for a < A etc.
double SignProductOracle(double a, double b, double c, double d, double A,
                         double B, double C, double D);

// Three-link loop. Squaring sqrt(u) +- sqrt(v) +- sqrt(w) = 0 twice, with
// u = a - A, v = b - B, w = c - C, gives
//   (u + v - w)^2 = 4uv  <=>  u^2 + v^2 + w^2 - 2uv - 2uw - 2vw = 0.
// Expanding in the shape gives one linear equation in (a, b, c, s) with
//   s = a^2 + b^2 + c^2 - 2ab - 2ac - 2bc
// and coefficients
//   a: 2(B + C - A),  b: 2(A + C - B),  c: 2(A + B - C),  s: 1,
//   free: A^2 + B^2 + C^2 - 2AB - 2AC - 2BC.
struct Lifted3Vector {
  std::array<double, 4> x{};  // (a, b, c, s)

  double operator[](std::size_t i) const { return x[i]; }
};

struct Coefficient3Row {
  std::array<double, 5> g{};  // g[0] free term, g[1..4] multiply (a, b, c, s)

  double operator[](std::size_t i) const { return g[i]; }
};

Lifted3Vector LiftTriangle(double a, double b, double c);
Lifted3Vector EvaluateLift3(double a, double b, double c);
Coefficient3Row ComputeCoefficient3Row(double A, double B, double C);
double EvaluateEquation3(const Coefficient3Row& row,
                         const Lifted3Vector& lifted);

// Product over the four sign patterns of sqrt(a-A) +- sqrt(b-B) +-
// sqrt(c-C).
double SignProductOracle3(double a, double b, double c, double A, double B,
                          double C);

}  // namespace loopsfm
