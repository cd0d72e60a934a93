#include "fluoinv/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fluoinv/kernels.hpp"

namespace fluoinv {

namespace {

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double to_interior(double u) { return kPointMargin + (1.0 - 2.0 * kPointMargin) * u; }

}  // namespace

std::vector<Point> sample_points(int dim, std::size_t n, std::uint64_t seed, PointLayout layout) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("sample_points: dim must be 1 or 2");
  if (n < 1) throw std::invalid_argument("sample_points: n must be at least 1");
  std::vector<Point> pts(n);
  if (layout == PointLayout::RegularGrid) {
    const auto side = dim == 1 ? n : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = k % side;
      const std::size_t j = k / side;
      pts[k].x = to_interior((static_cast<double>(i) + 0.5) / static_cast<double>(side));
      if (dim == 2) pts[k].y = to_interior((static_cast<double>(j) + 0.5) / static_cast<double>(side));
    }
    return pts;
  }
  // Start index 1 skips the origin; the seed moves the window along the sequence.
  const std::uint64_t start = 1 + seed % (1ULL << 20);
  for (std::size_t k = 0; k < n; ++k) {
    pts[k].x = to_interior(radical_inverse(start + k, 2));
    if (dim == 2) pts[k].y = to_interior(radical_inverse(start + k, 3));
  }
  return pts;
}

std::vector<double> draw_noise(std::size_t n, const NoiseModel& noise) {
  if (noise.sigma < 0.0) throw std::invalid_argument("draw_noise: sigma must be nonnegative");
  std::vector<double> e(n, 0.0);
  if (noise.kind == NoiseKind::Zero || noise.sigma == 0.0) return e;
  std::mt19937_64 rng(noise.seed);
  if (noise.kind == NoiseKind::Gaussian) {
    std::normal_distribution<double> dist(0.0, noise.sigma);
    for (auto& v : e) v = dist(rng);
  } else {
    const double a = std::sqrt(3.0) * noise.sigma;
    std::uniform_real_distribution<double> dist(-a, a);
    for (auto& v : e) v = dist(rng);
  }
  return e;
}

MeasurementSet observe(const GridFunction& g, std::span<const Point> points, const NoiseModel& noise) {
  const PointEvaluation E(g.grid_ptr(), points);
  MeasurementSet m;
  m.points.assign(points.begin(), points.end());
  m.values = E.apply(g);
  const auto e = draw_noise(points.size(), noise);
  for (std::size_t k = 0; k < e.size(); ++k) m.values[k] += e[k];
  m.sigma = noise.kind == NoiseKind::Zero ? 0.0 : noise.sigma;
  m.seed = noise.seed;
  return m;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t ladder, std::uint64_t trial) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ splitmix64(ladder + 0x51ED2701ULL));
  h = splitmix64(h ^ splitmix64(trial + 0x2545F491ULL));
  return h;
}

RateFit fit_rate(std::span<const double> lambda, std::span<const double> err) {
  if (lambda.size() != err.size()) throw std::invalid_argument("fit_rate: length mismatch");
  if (lambda.size() < 3) throw std::invalid_argument("fit_rate: need at least three pairs");
  RateFit r;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    if (!(lambda[k] > 0.0) || !(err[k] > 0.0)) throw std::invalid_argument("fit_rate: values must be positive");
    r.log_lambda.push_back(std::log(lambda[k]));
    r.log_err.push_back(std::log(err[k]));
  }
  const auto m = static_cast<double>(lambda.size());
  const double mx = kernels::pairwise_sum(r.log_lambda) / m;
  const double my = kernels::pairwise_sum(r.log_err) / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < r.log_lambda.size(); ++k) {
    const double dx = r.log_lambda[k] - mx;
    const double dy = r.log_err[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_rate: lambda values must not all coincide");
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  if (syy <= 1e-300) {
    r.r2 = 1.0;
  } else {
    double ssr = 0.0;
    for (std::size_t k = 0; k < r.log_lambda.size(); ++k) {
      const double res = r.log_err[k] - (r.intercept + r.slope * r.log_lambda[k]);
      ssr += res * res;
    }
    r.r2 = std::clamp(1.0 - ssr / syy, 0.0, 1.0);
  }
  return r;
}

namespace {

TrialResult run_trial(const ExperimentSpec& spec, const SmoothingFit& fitter, const std::vector<double>& clean,
                      const LadderPoint& lp, std::uint64_t seed, double rho0) {
  TrialResult t;
  t.seed = seed;
  try {
    auto values = clean;
    const auto e = draw_noise(values.size(), NoiseModel{spec.noise, lp.sigma, seed});
    for (std::size_t k = 0; k < values.size(); ++k) values[k] += e[k];
    const auto fit = fitter.solve(values, FitConfig{spec.s, lp.lambda, spec.cg_tol, 0});
    t.cg_iterations = fit.report.iterations;
    t.misfit = fit.misfit;
    if (!fit.report.converged) throw std::runtime_error("P1 CG did not converge");
    const auto Sf_pts = fitter.sampler().apply(fit.Sf);
    ErrorInputs in;
    in.f_rec = &fit.f;
    in.f_true = &spec.f_true;
    in.Sf_rec_at_points = Sf_pts;
    in.Sf_true_at_points = clean;
    GridFunction q;
    if (spec.problem && spec.q_true.size() > 0) {
      auto [qs, trace] = noisy_fixed_point_solve(*spec.problem, fit.f, fit.Sf, spec.p2);
      t.p2_iterations = trace.iterations;
      t.p2_converged = trace.converged;
      q = std::move(qs);
      in.q_rec = &q;
      in.q_true = &spec.q_true;
    }
    t.errors = error_bundle(in);
    std::vector<double> d(clean.size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = Sf_pts[k] - clean[k];
    t.tail_ratio = empirical_norm(d) / (std::sqrt(lp.lambda) * rho0);
    t.ok = true;
  } catch (const std::exception& ex) {
    t.ok = false;
    t.failure = ex.what();
  }
  return t;
}

std::optional<double> pick(const ErrorBundle& e, int which) {
  switch (which) {
    case 1: return e.err1;
    case 2: return e.err2;
    case 3: return e.err3;
    case 4: return e.err4;
    case 5: return e.err5;
    default: return std::nullopt;
  }
}

}  // namespace

std::optional<double> mean_error(const ExperimentRecord& record, int which) {
  std::vector<double> v;
  for (const auto& t : record.trials)
    if (t.ok)
      if (auto x = pick(t.errors, which)) v.push_back(*x);
  if (v.empty()) return std::nullopt;
  return kernels::pairwise_sum(v) / static_cast<double>(v.size());
}

std::vector<ExperimentRecord> expectation_experiment(const ExperimentSpec& spec, std::span<const LadderPoint> ladder) {
  if (!spec.grid) throw std::invalid_argument("expectation_experiment: null grid");
  if (spec.trials < 1) throw std::invalid_argument("expectation_experiment: need at least one trial");
  std::vector<ExperimentRecord> out;
  const double fnorm = spec.s == 0 ? l2_norm(spec.f_true) : h1_norm(spec.f_true);
  for (std::size_t li = 0; li < ladder.size(); ++li) {
    const auto& lp = ladder[li];
    ExperimentRecord rec;
    rec.ladder_index = static_cast<int>(li);
    rec.dim = spec.grid->dim();
    rec.cells = spec.grid->cells_per_side();
    rec.beta = spec.beta;
    rec.s = spec.s;
    rec.point = lp;
    rec.base_seed = spec.base_seed;
    rec.rho0 = fnorm + lp.sigma / std::sqrt(static_cast<double>(lp.n));

    const auto pts = sample_points(spec.grid->dim(), lp.n, spec.base_seed, spec.layout);
    const SmoothingFit fitter(spec.grid, spec.beta, pts);
    const auto clean = fitter.sampler().apply(spec.Sf_true);

    rec.trials.resize(static_cast<std::size_t>(spec.trials));
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < spec.trials; ++t) {
      const auto seed = derive_seed(spec.base_seed, li, static_cast<std::uint64_t>(t));
      rec.trials[static_cast<std::size_t>(t)] = run_trial(spec, fitter, clean, lp, seed, rec.rho0);
    }
    for (const auto& t : rec.trials)
      if (!t.ok) ++rec.failures;
    rec.mean.err1 = mean_error(rec, 1);
    rec.mean.err2 = mean_error(rec, 2);
    rec.mean.err3 = mean_error(rec, 3);
    rec.mean.err4 = mean_error(rec, 4);
    rec.mean.err5 = mean_error(rec, 5);
    out.push_back(std::move(rec));
  }
  return out;
}

TailCurve tail_histogram(const ExperimentRecord& record, std::span<const double> z) {
  std::vector<double> ratios;
  for (const auto& t : record.trials)
    if (t.ok) ratios.push_back(t.tail_ratio);
  if (ratios.size() < 50) throw std::invalid_argument("tail_histogram: need at least 50 successful trials");
  std::sort(ratios.begin(), ratios.end());
  TailCurve c;
  for (double zz : z) {
    const auto below = std::lower_bound(ratios.begin(), ratios.end(), zz) - ratios.begin();
    c.z.push_back(zz);
    c.exceedance.push_back(static_cast<double>(ratios.size() - static_cast<std::size_t>(below)) /
                           static_cast<double>(ratios.size()));
  }
  return c;
}

}  // namespace fluoinv
