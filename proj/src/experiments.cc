#include "loopsfm/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "loopsfm/error.h"
#include "loopsfm/fixtures.h"

namespace loopsfm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Half a unit in the sixth significant digit.
double SixDigitHalfUlp(double v) {
  if (v == 0.0) return 0.0;
  return 0.5 * std::pow(10.0, std::floor(std::log10(std::abs(v))) - 5.0);
}

CoefficientRow RowFromDistances(const std::array<double, 4>& d) {
  return ComputeCoefficientRow(d[0] * d[0], d[1] * d[1], d[2] * d[2],
                               d[3] * d[3]);
}

std::string FormatNumbers(std::span<const double> values) {
  std::ostringstream out;
  out.precision(6);
  out << "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ", ";
    out << values[i];
  }
  out << ")";
  return out.str();
}

Check MakeCheck(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

TrialOutcome RunTrial(const SensitivityConfig& config, const LoopShape& shape,
                      int frame_count, const NoiseModel& noise, int trial) {
  TrialOutcome outcome;
  outcome.trial = trial;
  outcome.seed = config.seed ^ static_cast<std::uint64_t>(trial);
  outcome.max_relative_error = kInf;
  try {
    const Simulation sim =
        Simulate(shape, frame_count, noise, outcome.seed, config.simulation);
    std::vector<double> recovered;
    if (shape.size() == 4) {
      const RecoveryResult r = Solve(Assemble(sim.frames), config.solve);
      outcome.condition_number = r.condition_number;
      outcome.numerical_rank = r.numerical_rank;
      outcome.rank_deficient = r.rank_deficient;
      outcome.non_physical = r.non_physical;
      if (r.lengths) recovered.assign(r.lengths->begin(), r.lengths->end());
    } else {
      const RecoveryResult3 r = Solve3(sim.frames, config.solve);
      outcome.condition_number = r.condition_number;
      outcome.numerical_rank = r.numerical_rank;
      outcome.rank_deficient = r.rank_deficient;
      outcome.non_physical = r.non_physical;
      if (r.lengths) recovered.assign(r.lengths->begin(), r.lengths->end());
    }
    if (!recovered.empty()) {
      outcome.lengths = recovered;
      outcome.max_relative_error = 0.0;
      for (std::size_t k = 0; k < recovered.size(); ++k) {
        const double truth = shape.length(k);
        const double e = std::abs(recovered[k] - truth) / truth;
        outcome.relative_errors.push_back(e);
        outcome.max_relative_error = std::max(outcome.max_relative_error, e);
      }
    }
  } catch (const LoopError& e) {
    outcome.error = e.what();
  }
  return outcome;
}

nlohmann::json NumberOrNull(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

bool AgreesToSignificantDigits(double value, double reference, int digits) {
  return std::abs(value - reference) <=
         5.0 * std::pow(10.0, -digits) * std::abs(reference);
}

CoefficientComparison CompareWithPublishedCoefficients(
    double relative_tolerance) {
  CoefficientComparison out;
  for (std::size_t i = 0; i < fixtures::kPublishedDistances.size(); ++i) {
    const auto& distances = fixtures::kPublishedDistances[i];
    const CoefficientRow row = RowFromDistances(distances);

    // d f_k / d distance_j by central differences.
    std::array<CoefficientRow, 4> plus, minus;
    std::array<double, 4> steps{};
    for (std::size_t j = 0; j < 4; ++j) {
      steps[j] = 1e-6 * distances[j];
      auto up = distances, down = distances;
      up[j] += steps[j];
      down[j] -= steps[j];
      plus[j] = RowFromDistances(up);
      minus[j] = RowFromDistances(down);
    }

    for (std::size_t k = 0; k < kNumCoefficients; ++k) {
      const double published = fixtures::kPublishedCoefficients[i][k];
      const double deviation = std::abs(row.f[k] - published);
      const double relative = deviation / std::abs(published);
      if (relative > relative_tolerance) ++out.entries_over_tolerance;
      if (relative > out.max_relative_deviation) {
        out.max_relative_deviation = relative;
        out.worst_frame = static_cast<int>(i + 1);
        out.worst_coefficient = static_cast<int>(k);
      }
      double bound = SixDigitHalfUlp(published);
      for (std::size_t j = 0; j < 4; ++j) {
        const double slope = (plus[j].f[k] - minus[j].f[k]) / (2.0 * steps[j]);
        bound += std::abs(slope) * SixDigitHalfUlp(distances[j]);
      }
      if (bound > 0.0) {
        out.max_rounding_bound_ratio =
            std::max(out.max_rounding_bound_ratio, deviation / bound);
      } else if (deviation > 0.0) {
        out.max_rounding_bound_ratio = kInf;
      }
    }
  }
  return out;
}

bool ReproductionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.passed; });
}

ReproductionReport RunReproduction(const ReproductionOptions& options) {
  ReproductionReport report;
  std::vector<FrameRecord> records = fixtures::PublishedRecords();
  if (options.round3) {
    for (FrameRecord& r : records) {
      for (double& d : r.distances) d = RoundSignificant(d, 3);
    }
  }
  const std::vector<FrameObservation> frames = ToObservations(records);

  if (!options.round3) {
    const CoefficientComparison cmp = CompareWithPublishedCoefficients();
    std::ostringstream detail;
    detail << cmp.entries_over_tolerance << " of 380 entries above 5e-5; max "
           << cmp.max_relative_deviation << " at frame " << cmp.worst_frame
           << " f" << cmp.worst_coefficient;
    report.checks.push_back(MakeCheck("coefficients match published table (5e-5 relative)",
                                      cmp.entries_over_tolerance == 0,
                                      detail.str()));
    std::ostringstream bound;
    bound << "max deviation / rounding bound = " << cmp.max_rounding_bound_ratio;
    report.checks.push_back(
        MakeCheck("coefficient deviations within 6-digit input rounding bound",
                  cmp.max_rounding_bound_ratio <= 1.0, bound.str()));
  }

  SolveOptions solve_options;
  solve_options.square_solve = options.square_solve;
  report.result = Solve(Assemble(frames), solve_options);
  const RecoveryResult& r = report.result;
  const std::array<double, 4> solved = {r.x[0], r.x[1], r.x[2], r.x[3]};

  std::ostringstream rank;
  rank << "numerical rank " << r.numerical_rank << ", condition number "
       << r.condition_number;
  report.checks.push_back(MakeCheck("system reaches structural rank 18",
                                    !r.rank_deficient, rank.str()));

  if (!options.round3) {
    bool agree = true;
    for (std::size_t k = 0; k < 4; ++k) {
      agree = agree && AgreesToSignificantDigits(
                           solved[k], fixtures::kPublishedSolution[k], 3);
    }
    report.checks.push_back(MakeCheck(
        "x1..x4 agree with published solution to 3 significant digits", agree,
        "solved " + FormatNumbers(solved) + " vs published " +
            FormatNumbers(std::span(fixtures::kPublishedSolution).first(4))));
  }

  const double length_tolerance = options.round3 ? 0.10 : 0.003;
  bool lengths_ok = r.lengths.has_value();
  std::string lengths_detail = "non-physical solution";
  if (r.lengths) {
    for (std::size_t k = 0; k < 4; ++k) {
      const double truth = std::sqrt(fixtures::kTrueSquaredLengths[k]);
      lengths_ok = lengths_ok &&
                   std::abs((*r.lengths)[k] - truth) <= length_tolerance * truth;
    }
    lengths_detail = "lengths " + FormatNumbers(*r.lengths);
  }
  std::ostringstream lengths_name;
  lengths_name << "lengths within " << length_tolerance * 100
               << "% of (2, 3, 4, 1)";
  report.checks.push_back(
      MakeCheck(lengths_name.str(), lengths_ok, lengths_detail));

  if (!options.round3) {
    const LoopShape truth(std::vector<double>(fixtures::kTrueSquaredLengths.begin(),
                                              fixtures::kTrueSquaredLengths.end()));
    const ClosureReport closure = ValidateAgainstFrames(truth, frames, 1e-3);
    const double worst =
        *std::max_element(closure.residuals.begin(), closure.residuals.end());
    std::ostringstream detail;
    detail << "max residual " << worst;
    report.checks.push_back(MakeCheck(
        "true shape closes every published frame (threshold 1e-3)",
        closure.consistent, detail.str()));
  }
  return report;
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  const auto rank =
      static_cast<std::size_t>(std::max(1.0, std::ceil(q * n))) - 1;
  return values[std::min(rank, values.size() - 1)];
}

ExperimentReport RunSensitivity(const SensitivityConfig& config) {
  if (config.trials < 1) {
    throw LoopError(ErrorCode::kInvalidArgument, "trials must be >= 1");
  }
  if (config.frame_counts.empty() || config.noises.empty()) {
    throw LoopError(ErrorCode::kInvalidArgument,
                    "need at least one frame count and one noise model");
  }
  const LoopShape shape(config.sq_lengths);
  ExperimentReport report;
  report.true_lengths = shape.lengths();

  struct Job {
    std::size_t cell;
    int trial;
  };
  std::vector<Job> jobs;
  for (int frame_count : config.frame_counts) {
    for (const NoiseModel& noise : config.noises) {
      SensitivityCell cell;
      cell.frame_count = frame_count;
      cell.noise = noise;
      cell.trials.resize(static_cast<std::size_t>(config.trials));
      for (int t = 0; t < config.trials; ++t) jobs.push_back({report.cells.size(), t});
      report.cells.push_back(std::move(cell));
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      SensitivityCell& cell = report.cells[jobs[j].cell];
      cell.trials[static_cast<std::size_t>(jobs[j].trial)] =
          RunTrial(config, shape, cell.frame_count, cell.noise, jobs[j].trial);
    }
  };
  unsigned threads = config.threads > 0
                         ? static_cast<unsigned>(config.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (SensitivityCell& cell : report.cells) {
    std::vector<double> errors;
    int deficient = 0;
    for (const TrialOutcome& t : cell.trials) {
      errors.push_back(t.max_relative_error);
      if (t.rank_deficient) ++deficient;
    }
    cell.median_error = Percentile(errors, 0.5);
    cell.p90_error = Percentile(errors, 0.9);
    cell.rank_deficient_fraction =
        static_cast<double>(deficient) / static_cast<double>(cell.trials.size());
  }
  return report;
}

nlohmann::json ToJson(const RecoveryResult& result) {
  nlohmann::json j;
  j["x"] = std::vector<double>(result.x.x.begin(), result.x.x.end());
  if (result.lengths) {
    j["lengths"] = std::vector<double>(result.lengths->begin(), result.lengths->end());
  } else {
    j["lengths"] = nullptr;
  }
  j["sq_lengths"] = std::vector<double>(result.x.x.begin(), result.x.x.begin() + 4);
  j["condition_number"] = NumberOrNull(result.condition_number);
  j["residual_norm"] = result.residual_norm;
  j["rank_deficient"] = result.rank_deficient;
  j["numerical_rank"] = result.numerical_rank;
  j["non_physical"] = result.non_physical;
  j["consistency"] =
      std::vector<double>(result.consistency.begin(), result.consistency.end());
  nlohmann::json closure = nlohmann::json::array();
  for (double r : result.per_frame_closure) closure.push_back(NumberOrNull(r));
  j["per_frame_closure"] = closure;
  return j;
}

nlohmann::json ToJson(const RecoveryResult3& result) {
  nlohmann::json j;
  j["x"] = std::vector<double>(result.x.x.begin(), result.x.x.end());
  if (result.lengths) {
    j["lengths"] = std::vector<double>(result.lengths->begin(), result.lengths->end());
  } else {
    j["lengths"] = nullptr;
  }
  j["sq_lengths"] = std::vector<double>(result.x.x.begin(), result.x.x.begin() + 3);
  j["condition_number"] = NumberOrNull(result.condition_number);
  j["residual_norm"] = result.residual_norm;
  j["rank_deficient"] = result.rank_deficient;
  j["numerical_rank"] = result.numerical_rank;
  j["non_physical"] = result.non_physical;
  j["consistency"] = nlohmann::json::array({result.consistency});
  nlohmann::json closure = nlohmann::json::array();
  for (double r : result.per_frame_closure) closure.push_back(NumberOrNull(r));
  j["per_frame_closure"] = closure;
  return j;
}

nlohmann::json ToJson(const ReproductionReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const Check& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"checks", checks}, {"result", ToJson(report.result)}};
}

nlohmann::json ToJson(const ExperimentReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const SensitivityCell& cell : report.cells) {
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialOutcome& t : cell.trials) {
      nlohmann::json jt = {{"trial", t.trial},
                           {"seed", t.seed},
                           {"lengths", t.lengths},
                           {"relative_errors", t.relative_errors},
                           {"max_relative_error", NumberOrNull(t.max_relative_error)},
                           {"condition_number", NumberOrNull(t.condition_number)},
                           {"numerical_rank", t.numerical_rank},
                           {"rank_deficient", t.rank_deficient},
                           {"non_physical", t.non_physical}};
      if (!t.error.empty()) jt["error"] = t.error;
      trials.push_back(std::move(jt));
    }
    cells.push_back({{"frame_count", cell.frame_count},
                     {"noise", cell.noise.label()},
                     {"median_relative_error", NumberOrNull(cell.median_error)},
                     {"p90_relative_error", NumberOrNull(cell.p90_error)},
                     {"rank_deficient_fraction", cell.rank_deficient_fraction},
                     {"trials", trials}});
  }
  return {{"true_lengths", report.true_lengths}, {"cells", cells}};
}

nlohmann::json ToJson(const std::vector<DepthAssignment>& depths) {
  nlohmann::json out = nlohmann::json::array();
  for (const DepthAssignment& d : depths) {
    out.push_back({{"z_offsets", d.z_offsets}, {"sign_pattern", d.sign_pattern}});
  }
  return out;
}

}  // namespace loopsfm
