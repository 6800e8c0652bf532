#pragma once

#include <cmath>

namespace loopsfm {

// Neumaier's variant of Kahan summation. Used where long polynomial sums
// cancel heavily.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double term) {
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      compensation_ += (sum_ - t) + term;
    } else {
      compensation_ += (term - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  CompensatedSum& operator-=(double term) { return *this += -term; }

  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace loopsfm
