#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fluoinv/fit.hpp"
#include "fluoinv/inverse.hpp"
#include "fluoinv/metrics.hpp"

namespace fluoinv {

enum class NoiseKind { Gaussian, Uniform, Zero };

/// Zero-mean i.i.d. noise with variance sigma^2 (uniform draws live on
/// [-sqrt(3) sigma, sqrt(3) sigma]).
struct NoiseModel {
  NoiseKind kind = NoiseKind::Gaussian;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

enum class PointLayout { Halton, RegularGrid };

inline constexpr double kPointMargin = 1e-3;

/// Sensor locations in (margin, 1 - margin)^dim. For Halton points the seed
/// shifts the start of the sequence; the regular layout ignores it.
std::vector<Point> sample_points(int dim, std::size_t n, std::uint64_t seed,
                                 PointLayout layout = PointLayout::Halton);

std::vector<double> draw_noise(std::size_t n, const NoiseModel& noise);

/// g interpolated at the points plus noise.
MeasurementSet observe(const GridFunction& g, std::span<const Point> points, const NoiseModel& noise);

/// Independent stream seed for (base, ladder index, trial index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t ladder, std::uint64_t trial);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> log_lambda;
  std::vector<double> log_err;
};

/// Least squares line through (log lambda, log err). Needs >= 3 positive pairs.
RateFit fit_rate(std::span<const double> lambda, std::span<const double> err);

struct LadderPoint {
  std::size_t n = 0;
  double sigma = 0.0;
  double lambda = 0.0;
};

/// One Monte-Carlo study: truth, discretisation and pipeline switches.
struct ExperimentSpec {
  GridPtr grid;
  double beta = 1.0;
  int s = 0;
  GridFunction f_true;   ///< f*
  GridFunction Sf_true;  ///< S f*, the noise-free data
  NoiseKind noise = NoiseKind::Gaussian;
  PointLayout layout = PointLayout::Halton;
  std::uint64_t base_seed = 0;
  int trials = 10;
  double cg_tol = 1e-10;
  /// Set both to run P2 after every fit.
  std::shared_ptr<const ProblemData> problem;
  GridFunction q_true;
  InverseConfig p2 = {1e-10, 200, true, 0};
};

struct TrialResult {
  ErrorBundle errors;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string failure;
  int cg_iterations = 0;
  int p2_iterations = 0;
  bool p2_converged = false;
  double misfit = 0.0;
  /// |Sf - Sf*|_n / (lambda^{1/2} rho0)
  double tail_ratio = 0.0;
};

struct ExperimentRecord {
  int ladder_index = 0;
  int dim = 2;
  int cells = 0;
  double beta = 1.0;
  int s = 0;
  LadderPoint point;
  std::uint64_t base_seed = 0;
  double rho0 = 0.0;  ///< |f*|_{H^s} + sigma n^{-1/2}
  std::vector<TrialResult> trials;
  ErrorBundle mean;   ///< over successful trials
  int failures = 0;
};

/// Runs spec.trials independent observe -> P1 (-> P2) pipelines per ladder
/// point. Trials may run concurrently; results do not depend on the thread
/// count. Solver failures are recorded per trial.
std::vector<ExperimentRecord> expectation_experiment(const ExperimentSpec& spec, std::span<const LadderPoint> ladder);

/// Mean of the given error over successful trials; nullopt if none had it.
std::optional<double> mean_error(const ExperimentRecord& record, int which);

struct TailCurve {
  std::vector<double> z;
  std::vector<double> exceedance;  ///< empirical P(ratio >= z)
};

/// Throws std::invalid_argument with fewer than 50 successful trials.
TailCurve tail_histogram(const ExperimentRecord& record, std::span<const double> z);

}  // namespace fluoinv
