#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "loopsfm/geometry.h"
#include "loopsfm/noise.h"
#include "loopsfm/simulate.h"
#include "loopsfm/solver.h"

namespace loopsfm {

// |value - reference| <= 5 * 10^-digits * |reference|.
bool AgreesToSignificantDigits(double value, double reference, int digits);

// Coefficient rows computed from the published distances against the
// published coefficient table.
struct CoefficientComparison {
  double max_relative_deviation = 0.0;
  int worst_frame = 0;        // 1-based
  int worst_coefficient = 0;  // index into f0..f19
  int entries_over_tolerance = 0;
  // max over entries of |computed - published| / bound, where the bound is
  // the first-order effect of rounding the input distances to six
  // significant digits plus the rounding of the published entry itself.
  double max_rounding_bound_ratio = 0.0;
};

CoefficientComparison CompareWithPublishedCoefficients(
    double relative_tolerance = 5e-5);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ReproductionOptions {
  // Rounds the published distances to three significant digits first.
  bool round3 = false;
  bool square_solve = false;
};

struct ReproductionReport {
  std::vector<Check> checks;
  RecoveryResult result;

  bool all_passed() const;
};

ReproductionReport RunReproduction(const ReproductionOptions& options = {});

struct TrialOutcome {
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<double> lengths;           // empty on failure
  std::vector<double> relative_errors;   // per link
  double max_relative_error = 0.0;       // +inf when not recovered
  double condition_number = 0.0;
  int numerical_rank = 0;
  bool rank_deficient = false;
  bool non_physical = false;
  std::string error;
};

struct SensitivityCell {
  int frame_count = 0;
  NoiseModel noise;
  std::vector<TrialOutcome> trials;
  double median_error = 0.0;
  double p90_error = 0.0;
  double rank_deficient_fraction = 0.0;
};

struct SensitivityConfig {
  std::vector<double> sq_lengths = {4, 9, 16, 1};
  int trials = 20;
  std::vector<int> frame_counts = {19};
  std::vector<NoiseModel> noises = {NoiseModel::None()};
  SimulationOptions simulation;
  std::uint64_t seed = 1;
  SolveOptions solve = {};
  // 0 picks std::thread::hardware_concurrency().
  int threads = 0;
};

struct ExperimentReport {
  std::vector<double> true_lengths;
  std::vector<SensitivityCell> cells;
};

// Trial t of every cell uses seed ^ t. Results are ordered by trial index
// regardless of scheduling.
ExperimentReport RunSensitivity(const SensitivityConfig& config);

// Nearest-rank percentile, q in [0, 1]. +inf entries are kept.
double Percentile(std::vector<double> values, double q);

nlohmann::json ToJson(const RecoveryResult& result);
nlohmann::json ToJson(const RecoveryResult3& result);
nlohmann::json ToJson(const ReproductionReport& report);
nlohmann::json ToJson(const ExperimentReport& report);
nlohmann::json ToJson(const std::vector<DepthAssignment>& depths);

}  // namespace loopsfm
