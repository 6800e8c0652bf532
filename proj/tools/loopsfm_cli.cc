// Command-line front end: simulate frames, solve for link lengths, check
// closure, reconstruct depths, and run the reproduction and sensitivity
// experiments.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "loopsfm/error.h"
#include "loopsfm/experiments.h"
#include "loopsfm/frames_io.h"
#include "loopsfm/geometry.h"
#include "loopsfm/noise.h"
#include "loopsfm/simulate.h"
#include "loopsfm/solver.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> SplitCommas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) parts.push_back(part);
  return parts;
}

double ParseNumber(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') {
    throw loopsfm::LoopError(loopsfm::ErrorCode::kInvalidArgument,
                             "not a number: '" + text + "'");
  }
  return v;
}

loopsfm::LoopShape ParseShape(const std::string& text) {
  std::vector<double> lengths;
  for (const std::string& part : SplitCommas(text)) {
    lengths.push_back(ParseNumber(part));
  }
  return loopsfm::LoopShape::FromLengths(lengths);
}

void WriteJson(const nlohmann::json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw loopsfm::LoopError(loopsfm::ErrorCode::kIo,
                             "cannot open " + path + " for writing");
  }
  out << j.dump(2) << "\n";
}

std::vector<loopsfm::FrameObservation> LoadFrames(const std::string& path) {
  return loopsfm::ToObservations(loopsfm::ReadFramesCsvFile(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recover link lengths of a looped jointed object from "
               "orthographic frames"};
  app.require_subcommand(1);

  // simulate
  std::string sim_shape, sim_noise = "none", sim_noise_on = "distances",
                         sim_motion = "free", sim_out;
  int sim_frames = 19;
  std::uint64_t sim_seed = 1;
  auto* simulate = app.add_subcommand("simulate", "Generate frames for a shape");
  simulate->add_option("--shape", sim_shape, "Link lengths L1,L2,L3[,L4]")->required();
  simulate->add_option("--frames", sim_frames, "Number of frames")->required();
  simulate->add_option("--seed", sim_seed, "Random seed")->required();
  simulate->add_option("--noise", sim_noise, "none | round:K | gauss:SIGMA");
  simulate->add_option("--noise-on", sim_noise_on, "distances | points");
  simulate->add_option("--motion", sim_motion,
                       "free | static | translation | rotate-z");
  simulate->add_option("--out", sim_out, "Output CSV")->required();

  // solve
  std::string solve_in, solve_out;
  double solve_rcond = 1e-10;
  bool solve_square = false, solve_strict = false;
  int solve_min_frames = 19;
  auto* solve = app.add_subcommand("solve", "Solve the lifted linear system");
  solve->add_option("--in", solve_in, "Frames CSV")->required();
  solve->add_option("--out", solve_out, "Result JSON ('-' for stdout)")->required();
  solve->add_option("--rcond", solve_rcond, "Relative SVD truncation threshold");
  solve->add_flag("--square-solve", solve_square, "LU solve of a 19x19 system");
  solve->add_option("--min-frames", solve_min_frames, "Minimum number of frames");
  solve->add_flag("--strict", solve_strict, "Exit 2 when rank deficient");

  // residual
  std::string res_shape, res_in;
  double res_threshold = -1.0;
  auto* residual = app.add_subcommand("residual", "Per-frame closure residuals");
  residual->add_option("--shape", res_shape, "Link lengths")->required();
  residual->add_option("--in", res_in, "Frames CSV")->required();
  residual->add_option("--threshold", res_threshold,
                       "Closure threshold (default 1e-6 * perimeter)");

  // depths
  std::string dep_shape, dep_in;
  int dep_frame = 1;
  double dep_threshold = -1.0;
  auto* depths = app.add_subcommand("depths", "Relative junction depths of a frame");
  depths->add_option("--shape", dep_shape, "Link lengths")->required();
  depths->add_option("--in", dep_in, "Frames CSV")->required();
  depths->add_option("--frame", dep_frame, "Frame index")->required();
  depths->add_option("--threshold", dep_threshold, "Closure threshold");

  // reproduce-paper
  std::string rep_noise = "none", rep_out;
  bool rep_square = false;
  auto* reproduce = app.add_subcommand(
      "reproduce-paper", "Rerun the published 19-frame example");
  reproduce->add_option("--noise", rep_noise, "none | round3");
  reproduce->add_flag("--square-solve", rep_square, "LU solve of the 19x19 system");
  reproduce->add_option("--out", rep_out, "Also write the report as JSON");

  // sensitivity
  std::string sen_shape, sen_frames = "19", sen_noise = "none",
                         sen_noise_on = "distances", sen_motion = "free", sen_out;
  int sen_trials = 20, sen_threads = 0;
  std::uint64_t sen_seed = 1;
  auto* sensitivity =
      app.add_subcommand("sensitivity", "Recovery error over seeded trials");
  sensitivity->add_option("--shape", sen_shape, "Link lengths")->required();
  sensitivity->add_option("--trials", sen_trials, "Trials per cell")->required();
  sensitivity->add_option("--frames", sen_frames, "Frame counts N1,N2,...");
  sensitivity->add_option("--noise", sen_noise, "Noise models, comma separated");
  sensitivity->add_option("--noise-on", sen_noise_on, "distances | points");
  sensitivity->add_option("--motion", sen_motion,
                          "free | static | translation | rotate-z");
  sensitivity->add_option("--seed", sen_seed, "Base seed");
  sensitivity->add_option("--threads", sen_threads, "Worker threads (0 = all)");
  sensitivity->add_option("--out", sen_out, "Report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*simulate) {
      const loopsfm::LoopShape shape = ParseShape(sim_shape);
      loopsfm::SimulationOptions options;
      options.noise_target = loopsfm::ParseNoiseTarget(sim_noise_on);
      options.motion = loopsfm::ParseMotionKind(sim_motion);
      const loopsfm::Simulation sim = loopsfm::Simulate(
          shape, sim_frames, loopsfm::ParseNoiseModel(sim_noise), sim_seed, options);
      loopsfm::WriteFramesCsvFile(sim_out, sim.records);
    } else if (*solve) {
      const auto frames = LoadFrames(solve_in);
      loopsfm::SolveOptions options;
      options.svd_rcond = solve_rcond;
      options.square_solve = solve_square;
      options.min_frames = solve_min_frames;
      const loopsfm::LinearSystem system = loopsfm::Assemble(frames);
      const loopsfm::RecoveryResult result = loopsfm::Solve(system, options);
      WriteJson(loopsfm::ToJson(result), solve_out);
      if (solve_strict && result.rank_deficient) {
        throw NumericalFailure("system is rank deficient (rank " +
                               std::to_string(result.numerical_rank) + ")");
      }
    } else if (*residual) {
      const loopsfm::LoopShape shape = ParseShape(res_shape);
      const auto frames = LoadFrames(res_in);
      const double threshold =
          res_threshold < 0 ? loopsfm::ConsistencyThreshold(shape) : res_threshold;
      const loopsfm::ClosureReport report =
          loopsfm::ValidateAgainstFrames(shape, frames, threshold);
      std::cout << "frame,residual,closes\n";
      std::cout.precision(17);
      for (std::size_t i = 0; i < frames.size(); ++i) {
        const double r = report.residuals[i];
        std::cout << frames[i].frame_index << ',';
        if (std::isnan(r)) {
          std::cout << "nan,false\n";
        } else {
          std::cout << r << ',' << (r <= threshold ? "true" : "false") << '\n';
        }
      }
      std::cout << "# threshold " << threshold << ", verdict "
                << (report.consistent ? "consistent" : "inconsistent") << '\n';
    } else if (*depths) {
      const loopsfm::LoopShape shape = ParseShape(dep_shape);
      const auto frames = LoadFrames(dep_in);
      const auto it = std::find_if(frames.begin(), frames.end(), [&](const auto& f) {
        return f.frame_index == dep_frame;
      });
      if (it == frames.end()) {
        throw loopsfm::LoopError(loopsfm::ErrorCode::kInvalidArgument,
                                 "no frame " + std::to_string(dep_frame));
      }
      WriteJson(loopsfm::ToJson(loopsfm::ReconstructDepths(shape, *it, dep_threshold)),
                "-");
    } else if (*reproduce) {
      loopsfm::ReproductionOptions options;
      if (rep_noise == "round3") {
        options.round3 = true;
      } else if (rep_noise != "none") {
        throw loopsfm::LoopError(loopsfm::ErrorCode::kInvalidArgument,
                                 "reproduce-paper --noise accepts none or round3");
      }
      options.square_solve = rep_square;
      const loopsfm::ReproductionReport report = loopsfm::RunReproduction(options);
      for (const loopsfm::Check& check : report.checks) {
        std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << " -- "
                  << check.detail << '\n';
      }
      if (!rep_out.empty()) WriteJson(loopsfm::ToJson(report), rep_out);
    } else if (*sensitivity) {
      loopsfm::SensitivityConfig config;
      const loopsfm::LoopShape shape = ParseShape(sen_shape);
      config.sq_lengths.assign(shape.sq_lengths().begin(), shape.sq_lengths().end());
      config.trials = sen_trials;
      config.frame_counts.clear();
      for (const std::string& part : SplitCommas(sen_frames)) {
        config.frame_counts.push_back(static_cast<int>(ParseNumber(part)));
      }
      config.noises.clear();
      for (const std::string& part : SplitCommas(sen_noise)) {
        config.noises.push_back(loopsfm::ParseNoiseModel(part));
      }
      config.simulation.noise_target = loopsfm::ParseNoiseTarget(sen_noise_on);
      config.simulation.motion = loopsfm::ParseMotionKind(sen_motion);
      config.seed = sen_seed;
      config.threads = sen_threads;
      WriteJson(loopsfm::ToJson(loopsfm::RunSensitivity(config)), sen_out);
    }
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const loopsfm::LoopError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
