#include "loopsfm/noise.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "loopsfm/error.h"

namespace loopsfm {
namespace {

double ParseDouble(std::string_view text, std::string_view what) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw LoopError(ErrorCode::kInvalidArgument,
                    "cannot parse " + std::string(what) + " '" + s + "'");
  }
  return v;
}

int ParseDigits(std::string_view text) {
  const double v = ParseDouble(text, "digits");
  if (v != std::floor(v) || v < 1 || v > 17) {
    throw LoopError(ErrorCode::kInvalidArgument,
                    "digits must be an integer in [1, 17]");
  }
  return static_cast<int>(v);
}

}  // namespace

NoiseModel NoiseModel::RoundSignificant(int digits) {
  NoiseModel m;
  m.kind = NoiseKind::kRoundSignificant;
  m.digits = digits;
  m.Validate();
  return m;
}

NoiseModel NoiseModel::Gaussian(double sigma) {
  NoiseModel m;
  m.kind = NoiseKind::kGaussian;
  m.sigma = sigma;
  m.Validate();
  return m;
}

void NoiseModel::Validate() const {
  if (kind == NoiseKind::kRoundSignificant && digits < 1) {
    throw LoopError(ErrorCode::kInvalidArgument,
                    "round_sig digits must be >= 1");
  }
  if (kind == NoiseKind::kGaussian && !(sigma >= 0.0 && std::isfinite(sigma))) {
    throw LoopError(ErrorCode::kInvalidArgument,
                    "gaussian sigma must be finite and >= 0");
  }
}

std::string NoiseModel::label() const {
  switch (kind) {
    case NoiseKind::kNone:
      return "none";
    case NoiseKind::kRoundSignificant:
      return "round:" + std::to_string(digits);
    case NoiseKind::kGaussian: {
      std::ostringstream out;
      out << "gauss:" << sigma;
      return out.str();
    }
  }
  return "none";
}

double NoiseModel::Apply(double value, std::mt19937_64& rng) const {
  switch (kind) {
    case NoiseKind::kNone:
      return value;
    case NoiseKind::kRoundSignificant:
      return loopsfm::RoundSignificant(value, digits);
    case NoiseKind::kGaussian:
      return value + std::normal_distribution<double>(0.0, sigma)(rng);
  }
  return value;
}

NoiseModel ParseNoiseModel(std::string_view text) {
  if (text == "none") return NoiseModel::None();
  if (text.starts_with("round:")) {
    return NoiseModel::RoundSignificant(
        ParseDigits(text.substr(6)));
  }
  if (text.starts_with("round") && text.size() > 5) {
    return NoiseModel::RoundSignificant(
        ParseDigits(text.substr(5)));
  }
  if (text.starts_with("gauss:")) {
    return NoiseModel::Gaussian(ParseDouble(text.substr(6), "sigma"));
  }
  throw LoopError(ErrorCode::kInvalidArgument,
                  "unknown noise model '" + std::string(text) +
                      "' (none, round:K, gauss:SIGMA)");
}

NoiseTarget ParseNoiseTarget(std::string_view text) {
  if (text == "distances") return NoiseTarget::kDistances;
  if (text == "points") return NoiseTarget::kPoints;
  throw LoopError(ErrorCode::kInvalidArgument,
                  "noise target must be 'distances' or 'points'");
}

double RoundSignificant(double value, int digits) {
  if (digits < 1) {
    throw LoopError(ErrorCode::kInvalidArgument, "digits must be >= 1");
  }
  if (value == 0.0 || !std::isfinite(value)) return value;
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*e", digits - 1, value);
  return std::strtod(buffer, nullptr);
}

}  // namespace loopsfm
