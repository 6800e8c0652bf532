#include "loopsfm/linearizer.h"

#include <cmath>
#include <sstream>

#include "loopsfm/compensated_sum.h"
#include "loopsfm/error.h"

namespace loopsfm {
namespace {

// The quartic symmetric form shared by the free term f0 (in A..D) and the
// last lifted unknown x19 (in a..d). Terms accumulate in the printed order.
double QuarticForm(double a, double b, double c, double d) {
  const double a2 = a * a, b2 = b * b, c2 = c * c, d2 = d * d;
  const double a3 = a2 * a, b3 = b2 * b, c3 = c2 * c, d3 = d2 * d;
  CompensatedSum s;
  s += a2 * a2;
  s += b2 * b2;
  s += c2 * c2;
  s += d2 * d2;
  s += 6 * a2 * b2;
  s += 6 * a2 * c2;
  s += 6 * a2 * d2;
  s += 6 * b2 * c2;
  s += 6 * b2 * d2;
  s += 6 * c2 * d2;
  s -= 40 * a * b * c * d;
  s -= 4 * a3 * b;
  s -= 4 * a3 * c;
  s -= 4 * a3 * d;
  s -= 4 * a * b3;
  s -= 4 * b3 * c;
  s -= 4 * b3 * d;
  s -= 4 * a * c3;
  s -= 4 * b * c3;
  s -= 4 * c3 * d;
  s -= 4 * a * d3;
  s -= 4 * b * d3;
  s -= 4 * c * d3;
  s += 4 * a2 * b * c;
  s += 4 * a2 * b * d;
  s += 4 * a2 * c * d;
  s += 4 * a * b2 * c;
  s += 4 * a * b2 * d;
  s += 4 * b2 * c * d;
  s += 4 * a * b * c2;
  s += 4 * a * c2 * d;
  s += 4 * b * c2 * d;
  s += 4 * a * b * d2;
  s += 4 * a * c * d2;
  s += 4 * b * c * d2;
  return s.value();
}

// The cubic forms x15..x18, written out separately as printed. Each is the
// coefficient of A, B, C, D respectively.
double CubicFirst(double a, double b, double c, double d) {
  const double a2 = a * a, b2 = b * b, c2 = c * c, d2 = d * d;
  return -4 * a2 * a - 12 * a * b2 - 12 * a * c2 - 12 * a * d2 +
         40 * b * c * d + 4 * b2 * b + 4 * c2 * c + 4 * d2 * d +
         12 * a2 * b + 12 * a2 * c + 12 * a2 * d - 4 * b2 * c - 4 * b2 * d -
         4 * b * c2 - 4 * c2 * d - 4 * b * d2 - 4 * c * d2 - 8 * a * b * c -
         8 * a * b * d - 8 * a * c * d;
}

double CubicSecond(double a, double b, double c, double d) {
  const double a2 = a * a, b2 = b * b, c2 = c * c, d2 = d * d;
  return -4 * b2 * b - 12 * a2 * b - 12 * b * c2 - 12 * b * d2 +
         40 * a * c * d + 4 * a2 * a + 4 * c2 * c + 4 * d2 * d +
         12 * a * b2 + 12 * b2 * c + 12 * b2 * d - 4 * a2 * c - 4 * a2 * d -
         4 * a * c2 - 4 * c2 * d - 4 * a * d2 - 4 * c * d2 - 8 * a * b * c -
         8 * a * b * d - 8 * b * c * d;
}

double CubicThird(double a, double b, double c, double d) {
  const double a2 = a * a, b2 = b * b, c2 = c * c, d2 = d * d;
  return -4 * c2 * c - 12 * a2 * c - 12 * b2 * c - 12 * c * d2 +
         40 * a * b * d + 4 * a2 * a + 4 * b2 * b + 4 * d2 * d +
         12 * a * c2 + 12 * b * c2 + 12 * c2 * d - 4 * a2 * b - 4 * a2 * d -
         4 * a * b2 - 4 * b2 * d - 4 * a * d2 - 4 * b * d2 - 8 * a * b * c -
         8 * a * c * d - 8 * b * c * d;
}

double CubicFourth(double a, double b, double c, double d) {
  const double a2 = a * a, b2 = b * b, c2 = c * c, d2 = d * d;
  return -4 * d2 * d - 12 * a2 * d - 12 * b2 * d - 12 * c2 * d +
         40 * a * b * c + 4 * a2 * a + 4 * b2 * b + 4 * c2 * c +
         12 * a * d2 + 12 * b * d2 + 12 * c * d2 - 4 * a2 * b - 4 * a2 * c -
         4 * a * b2 - 4 * b2 * c - 4 * a * c2 - 4 * b * c2 - 8 * a * b * d -
         8 * a * c * d - 8 * b * c * d;
}

void RequireNonNegative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    std::ostringstream msg;
    msg << name << " must be finite and >= 0, got " << v;
    throw LoopError(ErrorCode::kInvalidArgument, msg.str());
  }
}

void RequirePositive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    std::ostringstream msg;
    msg << name << " must be finite and > 0, got " << v;
    throw LoopError(ErrorCode::kNonPositiveShape, msg.str());
  }
}

}  // namespace

LiftedVector EvaluateLift(double a, double b, double c, double d) {
  LiftedVector v;
  v.x = {a,
         b,
         c,
         d,
         a * a,
         b * b,
         c * c,
         d * d,
         a * b,
         a * c,
         a * d,
         b * c,
         b * d,
         c * d,
         CubicFirst(a, b, c, d),
         CubicSecond(a, b, c, d),
         CubicThird(a, b, c, d),
         CubicFourth(a, b, c, d),
         QuarticForm(a, b, c, d)};
  return v;
}

LiftedVector LiftShape(double a, double b, double c, double d) {
  RequirePositive(a, "a");
  RequirePositive(b, "b");
  RequirePositive(c, "c");
  RequirePositive(d, "d");
  return EvaluateLift(a, b, c, d);
}

CoefficientRow ComputeCoefficientRow(double A, double B, double C, double D) {
  RequireNonNegative(A, "A");
  RequireNonNegative(B, "B");
  RequireNonNegative(C, "C");
  RequireNonNegative(D, "D");
  const double A2 = A * A, B2 = B * B, C2 = C * C, D2 = D * D;
  CoefficientRow row;
  auto& f = row.f;
  f[0] = QuarticForm(A, B, C, D);

  // f1..f4 carry the printed term order, which differs from x15..x18.
  f[1] = -4 * A2 * A - 12 * A * B2 - 12 * A * C2 - 12 * A * D2 +
         40 * B * C * D + 4 * B2 * B + 4 * C2 * C + 4 * D2 * D +
         12 * A2 * D + 12 * A2 * C + 12 * A2 * B - 8 * A * B * C -
         8 * A * B * D - 8 * A * C * D - 4 * B2 * C - 4 * C * D2 -
         4 * B * C2 - 4 * C2 * D - 4 * B * D2 - 4 * B2 * D;
  f[2] = -4 * B2 * B - 12 * B * C2 - 12 * B * D2 - 12 * A2 * B +
         40 * A * C * D + 4 * A2 * A + 4 * C2 * C + 4 * D2 * D +
         12 * B2 * D + 12 * B2 * C + 12 * A * B2 - 8 * A * B * C -
         8 * A * B * D - 8 * B * C * D - 4 * A2 * C - 4 * A2 * D -
         4 * A * C2 - 4 * C2 * D - 4 * A * D2 - 4 * C * D2;
  f[3] = -4 * C2 * C - 12 * C * D2 - 12 * A2 * C - 12 * B2 * C +
         40 * A * B * D + 4 * A2 * A + 4 * B2 * B + 4 * D2 * D +
         12 * C2 * D + 12 * B * C2 + 12 * A * C2 - 8 * A * B * C -
         8 * A * C * D - 8 * B * C * D - 4 * A2 * B - 4 * A2 * D -
         4 * A * B2 - 4 * B2 * D - 4 * A * D2 - 4 * B * D2;
  f[4] = -4 * D2 * D - 12 * A2 * D - 12 * B2 * D - 12 * C2 * D +
         40 * A * B * C + 4 * A2 * A + 4 * B2 * B + 4 * C2 * C +
         12 * C * D2 + 12 * B * D2 + 12 * A * D2 - 8 * A * B * D -
         8 * A * C * D - 8 * B * C * D - 4 * A2 * B - 4 * A2 * C -
         4 * A * B2 - 4 * B2 * C - 4 * A * C2 - 4 * B * C2;

  f[5] = 6 * A2 + 6 * B2 + 6 * C2 + 6 * D2 - 12 * A * B - 12 * A * C -
         12 * A * D + 4 * B * C + 4 * B * D + 4 * C * D;
  f[6] = 6 * B2 + 6 * A2 + 6 * C2 + 6 * D2 - 12 * A * B - 12 * B * C -
         12 * B * D + 4 * A * C + 4 * A * D + 4 * C * D;
  f[7] = 6 * C2 + 6 * A2 + 6 * B2 + 6 * D2 - 12 * A * C - 12 * B * C -
         12 * C * D + 4 * A * B + 4 * A * D + 4 * B * D;
  f[8] = 6 * D2 + 6 * A2 + 6 * B2 + 6 * C2 - 12 * A * D - 12 * B * D -
         12 * C * D + 4 * A * B + 4 * A * C + 4 * B * C;

  f[9] = 24 * A * B - 40 * C * D - 12 * A2 - 12 * B2 + 8 * A * C +
         8 * A * D + 8 * B * C + 8 * B * D + 4 * C2 + 4 * D2;
  f[10] = 24 * A * C - 40 * B * D - 12 * A2 - 12 * C2 + 8 * A * B +
          8 * A * D + 4 * B2 + 8 * B * C + 8 * C * D + 4 * D2;
  f[11] = 24 * A * D - 40 * B * C - 12 * A2 - 12 * D2 + 8 * A * B +
          8 * A * C + 4 * B2 + 4 * C2 + 8 * B * D + 8 * C * D;
  f[12] = 24 * B * C - 40 * A * D - 12 * B2 - 12 * C2 + 4 * A2 +
          8 * A * B + 8 * B * D + 8 * A * C + 8 * C * D + 4 * D2;
  f[13] = 24 * B * D - 40 * A * C - 12 * B2 - 12 * D2 + 4 * A2 +
          8 * A * B + 8 * B * C + 4 * C2 + 8 * A * D + 8 * C * D;
  f[14] = 24 * C * D - 40 * A * B - 12 * C2 - 12 * D2 + 4 * A2 + 4 * B2 +
          8 * A * C + 8 * B * C + 8 * A * D + 8 * B * D;

  f[15] = A;
  f[16] = B;
  f[17] = C;
  f[18] = D;
  f[19] = 1.0;
  return row;
}

double EvaluateEquation(const CoefficientRow& row, const LiftedVector& lifted) {
  CompensatedSum s;
  s += row.f[0];
  for (std::size_t k = 1; k < kNumCoefficients; ++k) {
    s += row.f[k] * lifted.x[k - 1];
  }
  return s.value();
}

Lifted3Vector EvaluateLift3(double a, double b, double c) {
  return {{a, b, c,
           a * a + b * b + c * c - 2 * a * b - 2 * a * c - 2 * b * c}};
}

Lifted3Vector LiftTriangle(double a, double b, double c) {
  RequirePositive(a, "a");
  RequirePositive(b, "b");
  RequirePositive(c, "c");
  return EvaluateLift3(a, b, c);
}

Coefficient3Row ComputeCoefficient3Row(double A, double B, double C) {
  RequireNonNegative(A, "A");
  RequireNonNegative(B, "B");
  RequireNonNegative(C, "C");
  Coefficient3Row row;
  row.g = {A * A + B * B + C * C - 2 * A * B - 2 * A * C - 2 * B * C,
           2 * (B + C - A), 2 * (A + C - B), 2 * (A + B - C), 1.0};
  return row;
}

double EvaluateEquation3(const Coefficient3Row& row,
                         const Lifted3Vector& lifted) {
  CompensatedSum s;
  s += row.g[0];
  for (std::size_t k = 1; k < 5; ++k) s += row.g[k] * lifted.x[k - 1];
  return s.value();
}

}  // namespace loopsfm
