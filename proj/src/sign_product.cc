#include <cmath>
#include <sstream>

#include "loopsfm/error.h"
#include "loopsfm/linearizer.h"

namespace loopsfm {
namespace {

double CheckedRoot(double sq_length, double sq_proj, const char* link) {
  const double r = sq_length - sq_proj;
  if (!(r >= 0.0)) {
    std::ostringstream msg;
    msg << "radicand for link " << link << " is " << r;
    throw LoopError(ErrorCode::kNegativeRadicand, msg.str());
  }
  return std::sqrt(r);
}

}  // namespace

double SignProductOracle(double a, double b, double c, double d, double A,
                         double B, double C, double D) {
  const double ra = CheckedRoot(a, A, "a");
  const double rb = CheckedRoot(b, B, "b");
  const double rc = CheckedRoot(c, C, "c");
  const double rd = CheckedRoot(d, D, "d");
  double product = 1.0;
  for (int pattern = 0; pattern < 8; ++pattern) {
    const double sb = (pattern & 1) ? -rb : rb;
    const double sc = (pattern & 2) ? -rc : rc;
    const double sd = (pattern & 4) ? -rd : rd;
    product *= ra + sb + sc + sd;
  }
  return product;
}

double SignProductOracle3(double a, double b, double c, double A, double B,
                          double C) {
  const double ra = CheckedRoot(a, A, "a");
  const double rb = CheckedRoot(b, B, "b");
  const double rc = CheckedRoot(c, C, "c");
  double product = 1.0;
  for (int pattern = 0; pattern < 4; ++pattern) {
    const double sb = (pattern & 1) ? -rb : rb;
    const double sc = (pattern & 2) ? -rc : rc;
    product *= ra + sb + sc;
  }
  return product;
}

}  // namespace loopsfm
