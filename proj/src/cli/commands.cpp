#include "fluoinv/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "fluoinv/cli/config.hpp"
#include "fluoinv/cli/csv.hpp"
#include "fluoinv/cli/manifest.hpp"
#include "fluoinv/cli/presets.hpp"
#include "fluoinv/experiments.hpp"
#include "fluoinv/fit.hpp"
#include "fluoinv/metrics.hpp"
#include "fluoinv/properties.hpp"
#include "fluoinv/spectral.hpp"
#include "fluoinv/stochastic.hpp"

namespace fluoinv::cli {

namespace {

using nlohmann::json;

struct Run {
  const RunConfig& cfg;
  RunManifest& manifest;
  std::ostream& log;

  void nodal(const std::string& name, const GridFunction& u, const std::string& field) {
    write_nodal(manifest.file(name), u, field);
    manifest.add(name);
  }
  CsvWriter table(const std::string& name, const std::string& schema, const std::vector<std::string>& columns) {
    manifest.add(name);
    return CsvWriter(manifest.file(name), schema, columns);
  }
};

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::optional<double> error_of(const ErrorBundle& e, int which) {
  switch (which) {
    case 1: return e.err1;
    case 2: return e.err2;
    case 3: return e.err3;
    case 4: return e.err4;
    default: return e.err5;
  }
}

json bundle_json(const ErrorBundle& e) {
  json j = json::object();
  for (int k = 1; k <= 5; ++k)
    if (auto v = error_of(e, k)) j["err" + std::to_string(k)] = *v;
  return j;
}

void write_errors(Run& run, const ErrorBundle& e) {
  auto w = run.table("errors.csv", "errors", {"metric", "value"});
  for (int k = 1; k <= 5; ++k)
    if (auto v = error_of(e, k)) w.row(std::vector<std::string>{"err" + std::to_string(k), format_number(*v)});
  w.close();
}

ProblemData checked_problem(const ProblemSpec& spec) {
  try {
    return build_problem(spec);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("problem: ") + ex.what());
  }
}

/// Ground truth for the fit: f*, S f* on one grid and, for Example 2, the
/// problem and q*.
struct Truth {
  GridPtr grid;
  GridFunction f_true;
  GridFunction Sf_true;
  std::shared_ptr<const ProblemData> problem;
  GridFunction q_true;
};

Truth inverse_truth(const RunConfig& cfg, const FieldSpec& source, int cells) {
  const auto spec = problem_spec(cfg, cells);
  checked_problem(spec);
  auto t = make_inverse_truth(spec, source_function(source));
  if (t.q_true.min() < 0.0 || t.q_true.max() > cfg.problem.M)
    throw ConfigError("source: q* must lie in [0, M]");
  return {t.problem->grid, std::move(t.f_true), std::move(t.g), t.problem, std::move(t.q_true)};
}

Truth fit_truth(const RunConfig& cfg, const std::string& which, int cells) {
  if (which == "example1") {
    auto t = make_example1(cfg.dim, cells, cfg.beta);
    return {t.grid, std::move(t.f_true), std::move(t.Sf_true), nullptr, {}};
  }
  return inverse_truth(cfg, FieldSpec{which, 0.0}, cells);
}

double resolve_sigma(const RunConfig& cfg, const GridFunction& Sf_true) {
  const auto& m = cfg.measurements;
  return m.relative ? relative_sigma(Sf_true, m.sigma) : m.sigma;
}

NoiseKind effective_noise(const RunConfig& cfg, double sigma) {
  return sigma > 0.0 ? cfg.measurements.noise : NoiseKind::Zero;
}

double penalty_norm(const GridFunction& f, int s) { return s == 0 ? l2_norm(f) : h1_norm(f); }

double prior_lambda(const Truth& truth, double sigma, std::size_t n, int s) {
  if (!(sigma > 0.0)) throw ConfigError("fit/lambda_policy: the prior lambda needs sigma > 0");
  return optimal_lambda_prior(penalty_norm(truth.f_true, s), sigma, n, s);
}

double fit_tol(const RunConfig& cfg) { return cfg.fit.tol > 0.0 ? cfg.fit.tol : default_solver_tol(); }

MeasurementSet measure(const RunConfig& cfg, const Truth& truth, double sigma) {
  const auto pts = sample_points(truth.grid->dim(), cfg.measurements.n, cfg.seed, cfg.measurements.layout);
  return observe(truth.Sf_true, pts, NoiseModel{effective_noise(cfg, sigma), sigma, derive_seed(cfg.seed, 0, 0)});
}

ErrorBundle fit_errors(const SmoothingFit& fitter, const Truth& truth, const FitResult& fit) {
  const auto rec = fitter.sampler().apply(fit.Sf);
  const auto tru = fitter.sampler().apply(truth.Sf_true);
  ErrorInputs in;
  in.f_rec = &fit.f;
  in.f_true = &truth.f_true;
  in.Sf_rec_at_points = rec;
  in.Sf_true_at_points = tru;
  return error_bundle(in);
}

struct P1Outcome {
  FitResult fit;
  ErrorBundle errors;
  std::vector<double> trace;
  bool converged = true;
  double sigma = 0.0;
};

P1Outcome run_p1(Run& run, const Truth& truth) {
  const auto& cfg = run.cfg;
  P1Outcome out;
  out.sigma = resolve_sigma(cfg, truth.Sf_true);
  const auto meas = measure(cfg, truth, out.sigma);
  const SmoothingFit fitter(truth.grid, cfg.beta, meas.points);
  const int s = cfg.fit.s;
  const double tol = fit_tol(cfg);

  if (cfg.fit.policy == LambdaPolicy::SelfConsistent) {
    auto ls = self_consistent_lambda(fitter, meas.values, s, cfg.fit.stop_tol, cfg.fit.max_outer, tol);
    out.fit = std::move(ls.fit);
    out.trace = std::move(ls.trace);
    out.converged = ls.converged;
    if (!ls.converged) run.log << "p1: lambda search stopped after " << ls.outer_iterations << " outer iterations\n";
  } else {
    const double lambda =
        cfg.fit.policy == LambdaPolicy::Prior ? prior_lambda(truth, out.sigma, meas.size(), s) : cfg.fit.lambda;
    out.fit = fitter.solve(meas.values, FitConfig{s, lambda, tol, 0});
    out.trace = {lambda};
  }
  if (!out.fit.report.converged) {
    out.converged = false;
    run.log << "p1: CG stopped at relative residual " << out.fit.report.residual << "\n";
  }
  out.errors = fit_errors(fitter, truth, out.fit);

  {
    auto w = run.table("measurements.csv", "measurements", {"x", "y", "value"});
    for (std::size_t k = 0; k < meas.size(); ++k)
      w.row(std::vector<double>{meas.points[k].x, meas.points[k].y, meas.values[k]});
    w.close();
  }
  run.nodal("f.csv", out.fit.f, "f");
  run.nodal("Sf.csv", out.fit.Sf, "Sf");
  {
    auto w = run.table("lambda_trace.csv", "lambda_trace", {"iteration", "lambda"});
    for (std::size_t k = 0; k < out.trace.size(); ++k)
      w.row(std::vector<double>{static_cast<double>(k), out.trace[k]});
    w.close();
  }
  return out;
}

int cmd_forward(Run& run) {
  const auto& cfg = run.cfg;
  const auto data = checked_problem(problem_spec(cfg, cfg.cells));
  const auto q = GridFunction::from(data.grid, source_function(cfg.source));
  if (q.min() < 0.0) throw ConfigError("source: q must be nonnegative");
  const auto sol = solve_forward(data, q);
  const auto g = terminal_data(sol.emission);
  const auto ue = terminal_data(sol.excitation);
  run.nodal("q.csv", q, "q");
  run.nodal("g.csv", g, "g");
  run.nodal("ue_T.csv", ue, "ue_T");
  for (const auto& w : data.warnings) run.log << "warning: " << w << "\n";
  run.manifest.set_summary({{"g_min", g.min()},
                            {"g_max", g.max()},
                            {"ue_T_min", ue.min()},
                            {"M_b", data.M_b},
                            {"warnings", data.warnings}});
  run.log << "forward: g in [" << g.min() << ", " << g.max() << "], u_e(T) in [" << ue.min() << ", " << ue.max()
          << "]\n";
  return kExitOk;
}

int cmd_p1(Run& run) {
  const auto& cfg = run.cfg;
  const auto truth = fit_truth(cfg, cfg.fit.truth, cfg.cells);

  if (cfg.fit.policy == LambdaPolicy::Ladder) {
    const double sigma = resolve_sigma(cfg, truth.Sf_true);
    const auto meas = measure(cfg, truth, sigma);
    const SmoothingFit fitter(truth.grid, cfg.beta, meas.points);
    auto w = run.table("lambda_ladder.csv", "lambda_ladder",
                       {"lambda", "err1", "err2", "err3", "misfit", "penalty_norm", "cg_iterations", "converged"});
    bool all = true;
    const GridFunction* warm = nullptr;
    FitResult prev;
    for (double lambda : cfg.fit.ladder) {
      auto fit = fitter.solve(meas.values, FitConfig{cfg.fit.s, lambda, fit_tol(cfg), 0}, warm);
      const auto e = fit_errors(fitter, truth, fit);
      all = all && fit.report.converged;
      w.row(std::vector<std::string>{format_number(lambda), cell(e.err1), cell(e.err2), cell(e.err3),
                                     format_number(fit.misfit), format_number(fit.penalty_norm),
                                     std::to_string(fit.report.iterations), fit.report.converged ? "1" : "0"});
      prev = std::move(fit);
      warm = &prev.f;
    }
    w.close();
    run.log << "p1: " << cfg.fit.ladder.size() << " ladder rows\n";
    return all ? kExitOk : kExitNonConvergence;
  }

  const auto out = run_p1(run, truth);
  write_errors(run, out.errors);
  run.manifest.set_summary({{"lambda", out.fit.lambda},
                            {"sigma", out.sigma},
                            {"s", out.fit.s},
                            {"converged", out.converged},
                            {"errors", bundle_json(out.errors)}});
  run.log << "p1: s=" << out.fit.s << " lambda=" << format_number(out.fit.lambda);
  for (int k = 1; k <= 3; ++k)
    if (auto v = error_of(out.errors, k)) run.log << " err" << k << "=" << *v;
  run.log << "\n";
  return out.converged ? kExitOk : kExitNonConvergence;
}

int cmd_p2(Run& run) {
  const auto& cfg = run.cfg;
  const auto truth = inverse_truth(cfg, cfg.source, cfg.cells);
  const auto& data = *truth.problem;
  const InverseConfig icfg{cfg.p2.tol, cfg.p2.max_iter, cfg.p2.clamp, 0};

  bool p1_ok = true;
  ErrorBundle errors;
  std::pair<GridFunction, IterationTrace> result;
  json summary = json::object();
  if (cfg.p2.clean) {
    result = fixed_point_solve(data, truth.Sf_true, icfg);
  } else {
    const auto out = run_p1(run, truth);
    p1_ok = out.converged;
    errors = out.errors;
    summary["lambda"] = out.fit.lambda;
    summary["sigma"] = out.sigma;
    result = noisy_fixed_point_solve(data, out.fit.f, out.fit.Sf, icfg);
  }
  const auto& [q, trace] = result;
  run.nodal("q.csv", q, "q");
  {
    auto w = run.table("trace.csv", "p2_trace", {"iteration", "increment", "misfit", "min_step"});
    for (std::size_t k = 0; k < trace.increments.size(); ++k)
      w.row(std::vector<double>{static_cast<double>(k + 1), trace.increments[k],
                                k < trace.misfits.size() ? trace.misfits[k] : std::nan(""),
                                k < trace.min_steps.size() ? trace.min_steps[k] : std::nan("")});
    w.close();
  }
  ErrorInputs in;
  in.q_rec = &q;
  in.q_true = &truth.q_true;
  const auto qe = error_bundle(in);
  errors.err4 = qe.err4;
  errors.err5 = qe.err5;
  write_errors(run, errors);

  summary["mode"] = cfg.p2.clean ? "clean" : "noisy";
  summary["iterations"] = trace.iterations;
  summary["converged"] = trace.converged;
  summary["clamped"] = trace.clamped;
  summary["errors"] = bundle_json(errors);
  run.manifest.set_summary(summary);
  run.log << "p2 (" << (cfg.p2.clean ? "clean" : "noisy") << "): " << trace.iterations << " iterations, "
          << (trace.converged ? "converged" : "NOT converged") << ", err4=" << *errors.err4
          << " err5=" << *errors.err5 << "\n";
  return trace.converged && p1_ok ? kExitOk : kExitNonConvergence;
}

/// Slopes the rate theory predicts for E[err_k] against lambda.
std::optional<double> expected_slope(int metric, int s) {
  if (metric == 1) return 0.5;
  if (metric == 2 && s == 0) return 0.25;
  if (metric == 3 && s == 1) return 1.0 / 6.0;
  if (metric == 4 && s == 0) return 0.25;
  if (metric == 5 && s == 1) return 1.0 / 6.0;
  return std::nullopt;
}

int cmd_rates(Run& run) {
  const auto& cfg = run.cfg;
  const auto& rc = cfg.rates;
  const int cells = rc.cells.value_or(cfg.cells);
  const bool p2 = rc.target == "p2";
  const auto truth = p2 ? inverse_truth(cfg, cfg.source, cells) : fit_truth(cfg, cfg.fit.truth, cells);
  const double sigma = resolve_sigma(cfg, truth.Sf_true);

  auto rates = run.table("rates.csv", "rates", {"s", "metric", "slope", "intercept", "r2", "expected_slope"});
  json summary = json::array();
  int failures = 0;
  for (int s : rc.s) {
    ExperimentSpec spec;
    spec.grid = truth.grid;
    spec.beta = cfg.beta;
    spec.s = s;
    spec.f_true = truth.f_true;
    spec.Sf_true = truth.Sf_true;
    spec.noise = effective_noise(cfg, sigma);
    spec.layout = cfg.measurements.layout;
    spec.base_seed = cfg.seed;
    spec.trials = rc.trials;
    spec.cg_tol = fit_tol(cfg);
    if (p2) {
      spec.problem = truth.problem;
      spec.q_true = truth.q_true;
      spec.p2 = InverseConfig{cfg.p2.tol, cfg.p2.max_iter, cfg.p2.clamp, 0};
    }
    std::vector<LadderPoint> ladder;
    for (int k = 0; k < rc.points; ++k) {
      LadderPoint lp;
      lp.n = static_cast<std::size_t>(std::llround(rc.n_start * std::pow(rc.n_factor, k)));
      lp.sigma = sigma;
      lp.lambda = prior_lambda(truth, sigma, lp.n, s);
      ladder.push_back(lp);
    }
    const auto records = expectation_experiment(spec, ladder);

    const std::string tag = "_s" + std::to_string(s);
    auto tw = run.table("trials" + tag + ".csv", "rates_trials",
                        {"ladder_index", "n", "sigma", "lambda", "trial", "seed", "ok", "err1", "err2", "err3", "err4",
                         "err5", "tail_ratio", "failure"});
    auto aw = run.table("aggregate" + tag + ".csv", "rates_aggregate",
                        {"ladder_index", "n", "sigma", "lambda", "rho0", "trials", "failures", "mean_err1",
                         "mean_err2", "mean_err3", "mean_err4", "mean_err5"});
    for (const auto& rec : records) {
      failures += rec.failures;
      for (std::size_t t = 0; t < rec.trials.size(); ++t) {
        const auto& tr = rec.trials[t];
        std::vector<std::string> row{std::to_string(rec.ladder_index), std::to_string(rec.point.n),
                                     format_number(rec.point.sigma),   format_number(rec.point.lambda),
                                     std::to_string(t),                std::to_string(tr.seed),
                                     tr.ok ? "1" : "0"};
        for (int k = 1; k <= 5; ++k) row.push_back(cell(error_of(tr.errors, k)));
        row.push_back(tr.ok ? format_number(tr.tail_ratio) : "");
        row.push_back(tr.failure);
        tw.row(row);
      }
      std::vector<std::string> row{std::to_string(rec.ladder_index), std::to_string(rec.point.n),
                                   format_number(rec.point.sigma),   format_number(rec.point.lambda),
                                   format_number(rec.rho0),          std::to_string(rec.trials.size()),
                                   std::to_string(rec.failures)};
      for (int k = 1; k <= 5; ++k) row.push_back(cell(mean_error(rec, k)));
      aw.row(row);
    }
    tw.close();
    aw.close();

    for (int k = 1; k <= 5; ++k) {
      std::vector<double> lam, err;
      for (const auto& rec : records)
        if (auto m = mean_error(rec, k); m && *m > 0.0) {
          lam.push_back(rec.point.lambda);
          err.push_back(*m);
        }
      if (lam.size() != records.size() || lam.size() < 3) continue;
      const auto r = fit_rate(lam, err);
      const auto want = expected_slope(k, s);
      rates.row(std::vector<std::string>{std::to_string(s), "err" + std::to_string(k), format_number(r.slope),
                                         format_number(r.intercept), format_number(r.r2), cell(want)});
      summary.push_back({{"s", s}, {"metric", "err" + std::to_string(k)}, {"slope", r.slope}, {"r2", r.r2}});
      std::ostringstream line;
      line.precision(4);
      line << "rates: s=" << s << " err" << k << " slope=" << r.slope << " r2=" << r.r2;
      if (want) line << " (theory " << *want << ")";
      run.log << line.str() << "\n";
    }

    if (rc.tail_trials > 0) {
      auto tail_spec = spec;
      tail_spec.trials = rc.tail_trials;
      const std::vector<LadderPoint> one{ladder.front()};
      const auto rec = expectation_experiment(tail_spec, one).front();
      failures += rec.failures;
      std::vector<double> z = rc.tail_z;
      if (z.empty()) {
        double top = 0.0;
        for (const auto& t : rec.trials)
          if (t.ok) top = std::max(top, t.tail_ratio);
        for (int k = 0; k <= 40; ++k) z.push_back(1.2 * top * k / 40.0);
      }
      const auto curve = tail_histogram(rec, z);
      auto w = run.table("tail" + tag + ".csv", "tail", {"z", "exceedance"});
      for (std::size_t k = 0; k < curve.z.size(); ++k) w.row(std::vector<double>{curve.z[k], curve.exceedance[k]});
      w.close();
      run.log << "rates: tail curve with " << rec.trials.size() << " trials written\n";
    }
  }
  rates.close();
  run.manifest.set_summary({{"fits", summary}, {"failed_trials", failures}, {"cells", cells}});
  return failures == 0 ? kExitOk : kExitNonConvergence;
}

int cmd_spectral(Run& run) {
  const auto& cfg = run.cfg;
  const auto& sc = cfg.spectral;
  json summary = json::object();
  auto ex = run.table("exponents.csv", "spectral_exponents",
                      {"spectrum", "fit_first", "fit_last", "exponent", "r2", "reference_exponent"});
  auto emit = [&](const std::string& name, const SpectrumReport& rep, double reference) {
    auto w = run.table(name + ".csv", "spectrum", {"k", "eigenvalue"});
    for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k)
      w.row(std::vector<double>{static_cast<double>(k + 1), rep.eigenvalues[k]});
    w.close();
    if (rep.fit_last > 0) {
      ex.row(std::vector<std::string>{name, std::to_string(rep.fit_first), std::to_string(rep.fit_last),
                                      format_number(rep.exponent), format_number(rep.r2), format_number(reference)});
      run.log << "spectral: " << name << " exponent=" << rep.exponent << " (reference " << reference << ")\n";
    }
    summary[name] = {{"first", rep.eigenvalues.front()}, {"exponent", rep.exponent}, {"r2", rep.r2}};
  };

  const auto dgrid = make_grid(sc.dirichlet_dim, sc.dirichlet_cells);
  const auto interior = dgrid->interior_nodes().size();
  if (sc.k_max > static_cast<int>(interior))
    throw ConfigError("spectral/k_max: exceeds the " + std::to_string(interior) + " interior nodes");
  emit("dirichlet", laplacian_spectrum(*dgrid, sc.k_max), 2.0 / sc.dirichlet_dim);

  const auto sgrid = make_grid(cfg.dim, sc.smoothing_cells);
  const auto pts = sample_points(cfg.dim, sc.n, cfg.seed, cfg.measurements.layout);
  for (int s : sc.s)
    emit("smoothing_s" + std::to_string(s), empirical_smoothing_spectrum(sgrid, cfg.beta, pts, s),
         2.0 * (2.0 + s) / cfg.dim);
  ex.close();
  run.manifest.set_summary(summary);
  return kExitOk;
}

int cmd_verify(Run& run) {
  const auto& cfg = run.cfg;
  VerifyConfig vc;
  vc.problem = problem_spec(cfg, cfg.verify.cells);
  checked_problem(vc.problem);
  vc.q_star = source_function(cfg.source);
  vc.stability = stability_spec();
  vc.seed = cfg.seed;
  vc.monotone_pairs = cfg.verify.monotone_pairs;
  vc.energy_pairs = cfg.verify.energy_pairs;
  vc.stability_pairs = cfg.verify.stability_pairs;
  vc.lipschitz_pairs = cfg.verify.lipschitz_pairs;
  const auto rows = run_property_battery(vc);

  auto w = run.table("verify.csv", "verify", {"id", "result", "value", "bound", "description", "note"});
  int failed = 0;
  for (const auto& r : rows) {
    const std::string result = r.informational ? "INFO" : (r.pass ? "PASS" : "FAIL");
    if (!r.informational && !r.pass) ++failed;
    w.row(std::vector<std::string>{r.id, result, format_number(r.value), format_number(r.bound), r.description,
                                   r.note});
    run.log << result << "  " << r.id << "  value=" << r.value << " bound=" << r.bound
            << (r.note.empty() ? "" : "  [" + r.note + "]") << "\n";
  }
  w.close();
  run.manifest.set_summary({{"checks", rows.size()}, {"failed", failed}});
  run.log << "verify: " << rows.size() - static_cast<std::size_t>(failed) << "/" << rows.size()
          << " checks passed or informational\n";
  return battery_passed(rows) ? kExitOk : kExitPropertyFailure;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load(const Options& opts) {
  std::string text;
  json overlay = json::object();
  if (opts.config) {
    text = read_text(*opts.config);
    overlay = parse_json_text(text);
    if (!overlay.is_object()) throw ConfigError("line 1: configuration must be a JSON object", 1);
  }
  std::string preset = default_preset(opts.command);
  if (opts.preset) {
    preset = *opts.preset;
  } else if (overlay.contains("preset")) {
    if (!overlay["preset"].is_string()) {
      const int line = locate_line(text, {"preset"});
      throw ConfigError("line " + std::to_string(line) + ": /preset: expected a string", line, "/preset");
    }
    preset = overlay["preset"].get<std::string>();
  }
  if (!has_preset(preset)) {
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    const int line = !opts.preset && overlay.contains("preset") ? locate_line(text, {"preset"}) : 0;
    throw ConfigError((line ? "line " + std::to_string(line) + ": " : std::string()) + "unknown preset \"" + preset +
                          "\" (available: " + names + ")",
                      line, "/preset");
  }
  overlay.erase("preset");
  auto cfg = resolve_config(preset_document(preset), overlay, text);
  cfg.preset = preset;
  cfg.echo["preset"] = preset;
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.echo["seed"] = *opts.seed;
  }
  return cfg;
}

}  // namespace

int run_command(const Options& opts, std::ostream& log, std::ostream& err) {
  static const std::map<std::string, std::function<int(Run&)>> commands = {
      {"forward", cmd_forward}, {"p1", cmd_p1},           {"p2", cmd_p2},
      {"rates", cmd_rates},     {"spectral", cmd_spectral}, {"verify", cmd_verify}};
  const auto it = commands.find(opts.command);
  if (it == commands.end()) {
    err << "error: unknown command \"" << opts.command << "\"\n";
    return kExitConfig;
  }
  if (opts.threads < 0) {
    err << "error: --threads must be >= 0\n";
    return kExitConfig;
  }
  if (opts.threads > 0) omp_set_num_threads(opts.threads);

  RunConfig cfg;
  try {
    cfg = load(opts);
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << "\n";
    return kExitConfig;
  }

  RunManifest manifest(opts.out, opts.command, cfg.echo, cfg.seed, omp_get_max_threads());
  Run run{cfg, manifest, log};
  int code = kExitOk;
  try {
    code = it->second(run);
    manifest.set_status(code == kExitOk                  ? "ok"
                        : code == kExitNonConvergence    ? "non-convergence"
                        : code == kExitPropertyFailure   ? "property-failure"
                                                         : "error",
                        code);
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << "\n";
    code = kExitConfig;
    manifest.set_status(std::string("config error: ") + ex.what(), code);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    code = kExitFailure;
    manifest.set_status(std::string("error: ") + ex.what(), code);
  }
  try {
    manifest.write();
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    if (code == kExitOk) code = kExitFailure;
  }
  return code;
}

}  // namespace fluoinv::cli
