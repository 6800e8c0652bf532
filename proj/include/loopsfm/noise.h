#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace loopsfm {

enum class NoiseKind { kNone, kRoundSignificant, kGaussian };

// What the noise is applied to: the measured distances, or the projected
// junction coordinates before the distances are measured.
enum class NoiseTarget { kDistances, kPoints };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kNone;
  int digits = 0;      // kRoundSignificant, >= 1
  double sigma = 0.0;  // kGaussian, >= 0, length units
  std::uint64_t seed = 0;

  static NoiseModel None() { return {}; }
  static NoiseModel RoundSignificant(int digits);
  static NoiseModel Gaussian(double sigma);

  // Throws LoopError(kInvalidArgument) on digits < 1 or sigma < 0.
  void Validate() const;

  // "none", "round:3", "gauss:0.01"; ParseNoiseModel accepts these back.
  std::string label() const;

  double Apply(double value, std::mt19937_64& rng) const;
};

// Accepts none, round:K, roundK (e.g. round3) and gauss:SIGMA.
NoiseModel ParseNoiseModel(std::string_view text);
NoiseTarget ParseNoiseTarget(std::string_view text);

// Rounds to `digits` significant decimal digits, correctly rounded from the
// exact binary value (as printf("%.*e") does). 0 stays 0.
double RoundSignificant(double value, int digits);

}  // namespace loopsfm
