#include "fluoinv/properties.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <optional>
#include <sstream>

#include "fluoinv/metrics.hpp"
#include "fluoinv/stochastic.hpp"

namespace fluoinv {

ProblemSpec stability_spec() {
  ProblemSpec s;
  s.dim = 2;
  s.cells = 32;
  s.beta = 1e-3;
  s.T = 0.04;
  s.tau = 4e-4;
  s.M = 0.01;
  s.p = [](Point) { return 100.0; };
  s.b = [](Point, double) { return 1.0; };
  return s;
}

VerifyConfig default_verify_config() {
  VerifyConfig c;
  c.problem.cells = 32;
  c.stability = stability_spec();
  return c;
}

bool battery_passed(const std::vector<CheckResult>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const CheckResult& r) { return r.informational || r.pass; });
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double field_min(const SpaceTimeField& u, int from = 1) {
  double m = kInf;
  for (int k = from; k <= u.last_level(); ++k) m = std::min(m, u.at(k).min());
  return m;
}

double field_max(const SpaceTimeField& u, int from = 1) {
  double m = -kInf;
  for (int k = from; k <= u.last_level(); ++k) m = std::max(m, u.at(k).max());
  return m;
}

double derivative_extreme(const SpaceTimeField& u, int order, bool want_max) {
  double m = want_max ? -kInf : kInf;
  for (int k = order; k <= u.last_level(); ++k) {
    const auto d = order == 1 ? u.time_derivative(k) : u.second_time_derivative(k);
    m = want_max ? std::max(m, d.max()) : std::min(m, d.min());
  }
  return m;
}

class Sampler {
public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  GridFunction uniform(const GridPtr& grid, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    GridFunction q(grid);
    for (std::size_t n = 0; n < q.size(); ++n) q[n] = dist(rng_);
    return q;
  }

  // q1 <= q2 nodewise, both in [0, M].
  std::pair<GridFunction, GridFunction> ordered(const GridPtr& grid, double M) {
    auto lo = uniform(grid, 0.0, M);
    auto hi = lo;
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (std::size_t n = 0; n < hi.size(); ++n) hi[n] = lo[n] + dist(rng_) * (M - lo[n]);
    return {std::move(lo), std::move(hi)};
  }

private:
  std::mt19937_64 rng_;
};

using Check = std::function<void(CheckResult&)>;

class Battery {
public:
  void add(std::string id, std::string description, const Check& body, bool informational = false) {
    CheckResult r;
    r.id = std::move(id);
    r.description = std::move(description);
    r.informational = informational;
    try {
      body(r);
    } catch (const std::exception& ex) {
      r.pass = false;
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.note = std::string("exception: ") + ex.what();
    }
    rows.push_back(std::move(r));
  }
  std::vector<CheckResult> rows;
};

void at_most(CheckResult& r, double value, double bound) {
  r.value = value;
  r.bound = bound;
  r.pass = value <= bound;
}

void at_least(CheckResult& r, double value, double bound) {
  r.value = value;
  r.bound = bound;
  r.pass = value >= bound;
}

}  // namespace

std::vector<CheckResult> run_property_battery(const VerifyConfig& cfg) {
  Battery b;
  const ProblemData data = build_problem(cfg.problem);
  const auto grid = data.grid;
  const auto q_star = GridFunction::from(grid, cfg.q_star);

  // Shared state; each check guards against earlier failures through exceptions.
  std::optional<ForwardSolution> sol;
  std::optional<GridFunction> g;
  std::optional<StabilityConstants> consts;
  try {
    sol = solve_forward(data, q_star);
    g = terminal_data(sol->emission);
    consts = stability_constants(data);
  } catch (const std::exception&) {
  }
  auto need = [&]() -> const ForwardSolution& {
    if (!sol || !g || !consts) throw std::runtime_error("forward solve at q* failed");
    return *sol;
  };

  b.add("assumption_b_signs", "b, d_t b, d_tt b >= 0, b(., T) > 0 on the sampled boundary", [&](CheckResult& r) {
    at_most(r, static_cast<double>(data.warnings.size()), 0.0);
    for (const auto& w : data.warnings) r.note += (r.note.empty() ? "" : "; ") + w;
  });
  b.add(
      "assumption_potential", "p >= Lap g / g at every node (post hoc)",
      [&](CheckResult& r) {
        need();
        const auto bad = potential_condition_violations(data, *g);
        at_most(r, static_cast<double>(bad.size()), 0.0);
        r.note = std::to_string(bad.size()) + " violating nodes";
      },
      true);

  b.add("ue_nonnegative", "u_e >= -1e-12 on all levels", [&](CheckResult& r) {
    at_least(r, field_min(need().excitation), -1e-12);
  });
  b.add("um_nonnegative", "u_m >= -1e-12 on all levels", [&](CheckResult& r) {
    at_least(r, field_min(need().emission), -1e-12);
  });
  b.add("ue_terminal_floor", "u_e(T) >= m_Q - 1e-10 with m_Q = min v_M(T) > 0", [&](CheckResult& r) {
    const auto& s = need();
    at_least(r, s.excitation.at(s.excitation.last_level()).min(), consts->m_Q - 1e-10);
    if (!(consts->m_Q > 0.0)) r.pass = false;
    r.note = "m_Q = " + std::to_string(consts->m_Q);
  });
  b.add("um_terminal_positive", "u_m(T) > 0 at every node", [&](CheckResult& r) {
    need();
    r.value = g->min();
    r.bound = 0.0;
    r.pass = r.value > 0.0;
  });
  b.add("um_time_monotone", "d_t u_m >= -1e-12 on all levels", [&](CheckResult& r) {
    at_least(r, derivative_extreme(need().emission, 1, false), -1e-12);
  });
  b.add("ue_time_derivatives_nonnegative", "d_t u_e and d_tt u_e >= -1e-12", [&](CheckResult& r) {
    const auto& s = need();
    at_least(r, std::min(derivative_extreme(s.excitation, 1, false), derivative_extreme(s.excitation, 2, false)),
             -1e-12);
  });
  b.add("ue_bounded", "max u_e <= M_b + 1e-10", [&](CheckResult& r) {
    at_most(r, field_max(need().excitation), data.M_b + 1e-10);
  });
  b.add("ue_dt_bounded", "max d_t u_e <= M_b + 1e-10", [&](CheckResult& r) {
    at_most(r, derivative_extreme(need().excitation, 1, true), data.M_b + 1e-10);
  });
  b.add("ue_dtt_bounded", "max d_tt u_e <= M_b + 1e-10", [&](CheckResult& r) {
    at_most(r, derivative_extreme(need().excitation, 2, true), data.M_b + 1e-10);
  });

  b.add(
      "ue_derivative_bounds_compatible",
      "control: max(u_e, d_t u_e, d_tt u_e) - M_b with b replaced by t^2 b (compatible with u_e(0) = 0)",
      [&](CheckResult& r) {
        ProblemSpec spec = cfg.problem;
        const BoundaryData base = cfg.problem.b;
        spec.b = [base](Point pt, double t) { return t * t * base(pt, t); };
        const ProblemData cdata = build_problem(spec);
        const auto ue = solve_excitation(cdata, q_star);
        const double top = std::max({field_max(ue), derivative_extreme(ue, 1, true), derivative_extreme(ue, 2, true)});
        at_most(r, top - cdata.M_b, 1e-10);
        r.note = "M_b = " + std::to_string(cdata.M_b);
      },
      true);

  b.add("ue_ordering", "q1 <= q2 implies u_e(q1) >= u_e(q2) within 1e-12", [&](CheckResult& r) {
    Sampler rs(derive_seed(cfg.seed, 1, 0));
    double worst = kInf;
    for (int k = 0; k < cfg.monotone_pairs; ++k) {
      auto [q1, q2] = rs.ordered(grid, data.M);
      const auto u1 = solve_excitation(data, q1);
      const auto u2 = solve_excitation(data, q2);
      for (int l = 1; l <= u1.last_level(); ++l) worst = std::min(worst, (u1.at(l) - u2.at(l)).min());
    }
    at_least(r, worst, -1e-12);
  });
  b.add("conservation", "u_m(q1) - u_m(q2) = u_e(q2) - u_e(q1)", [&](CheckResult& r) {
    Sampler rs(derive_seed(cfg.seed, 2, 0));
    double worst = 0.0;
    double scale = 1.0;
    for (int k = 0; k < cfg.monotone_pairs; ++k) {
      auto [q1, q2] = rs.ordered(grid, data.M);
      const auto s1 = solve_forward(data, q1);
      const auto s2 = solve_forward(data, q2);
      for (int l = 1; l <= s1.excitation.last_level(); ++l) {
        const auto d = (s1.emission.at(l) - s2.emission.at(l)) + (s1.excitation.at(l) - s2.excitation.at(l));
        worst = std::max({worst, std::abs(d.max()), std::abs(d.min())});
        scale = std::max(scale, s1.excitation.at(l).max());
      }
    }
    at_most(r, worst, 1e-10 * scale);
  });
  b.add("K_monotone", "q1 <= q2 implies K q1 <= K q2 within 1e-10", [&](CheckResult& r) {
    need();
    Sampler rs(derive_seed(cfg.seed, 3, 0));
    double worst = kInf;
    for (int k = 0; k < cfg.monotone_pairs; ++k) {
      auto [q1, q2] = rs.ordered(grid, data.M);
      worst = std::min(worst, (operator_K(data, q2, *g) - operator_K(data, q1, *g)).min());
    }
    at_least(r, worst, -1e-10);
  });
  b.add(
      "K_lipschitz", "empirical max |K q1 - K q2| / |q1 - q2| (reported)",
      [&](CheckResult& r) {
        need();
        Sampler rs(derive_seed(cfg.seed, 4, 0));
        double worst = 0.0;
        for (int k = 0; k < cfg.lipschitz_pairs; ++k) {
          const auto q1 = rs.uniform(grid, 0.0, data.M);
          const auto q2 = rs.uniform(grid, 0.0, data.M);
          worst = std::max(worst, l2_norm(operator_K(data, q1, *g) - operator_K(data, q2, *g)) / l2_norm(q1 - q2));
        }
        r.value = worst;
        r.bound = kInf;
        r.pass = std::isfinite(worst);
      },
      true);

  b.add("initial_guess_bounds", "0 <= q_0 <= q* (slack 1e-10 / 1e-8)", [&](CheckResult& r) {
    need();
    const auto q0 = initial_guess(data, *g);
    const double above = (q0 - q_star).max();
    r.value = above;
    r.bound = 1e-8;
    r.pass = above <= 1e-8 && q0.min() >= -1e-10;
    r.note = "min q_0 = " + std::to_string(q0.min());
  });

  std::optional<std::pair<GridFunction, IterationTrace>> fp;
  const InverseConfig icfg{1e-10, 200, false, 1};
  b.add("fixed_point_increasing", "clean iterates nondecreasing within 1e-10", [&](CheckResult& r) {
    need();
    fp = fixed_point_solve(data, *g, icfg);
    const auto& steps = fp->second.min_steps;
    at_least(r, steps.empty() ? 0.0 : *std::min_element(steps.begin(), steps.end()), -1e-10);
  });
  auto need_fp = [&]() -> const std::pair<GridFunction, IterationTrace>& {
    if (!fp) throw std::runtime_error("fixed-point run unavailable");
    return *fp;
  };
  b.add("fixed_point_accuracy", "converged, relative L2 error <= 1e-2 (inverse crime)", [&](CheckResult& r) {
    const auto& [q, tr] = need_fp();
    at_most(r, l2_norm(q - q_star) / l2_norm(q_star), 1e-2);
    if (!tr.converged) r.pass = false;
    r.note = std::to_string(tr.iterations) + " iterations";
  });
  b.add("fixed_point_below_truth", "iterates stay below q* within 1e-8", [&](CheckResult& r) {
    const auto& tr = need_fp().second;
    double worst = -kInf;
    for (const auto& s : tr.snapshots) worst = std::max(worst, (s - q_star).max());
    at_most(r, worst, 1e-8);
  });
  b.add("fixed_point_residual", "|K q - q| <= 10 tol at the returned q", [&](CheckResult& r) {
    const auto& q = need_fp().first;
    at_most(r, l2_norm(operator_K(data, q, *g) - q), 10.0 * icfg.tol);
  });
  b.add("equivalence", "|u_m(T; q) - g| <= 1e-8 |g| at the fixed point", [&](CheckResult& r) {
    const auto& q = need_fp().first;
    at_most(r, l2_norm(forward_map(data, q) - *g), 1e-8 * l2_norm(*g));
  });
  b.add("domain_membership", "q* lies in D", [&](CheckResult& r) {
    need();
    const auto rep = check_domain(data, q_star, *g);
    r.value = static_cast<double>(rep.above_upper.size() + rep.below_lower.size());
    r.bound = 0.0;
    r.pass = rep.inside;
    r.note = rep.summary();
  });

  b.add("energy_estimate", "|u_e(T; q1) - u_e(T; q2)| / |q1 - q2| <= sqrt(T) M_b / sqrt(C_p)", [&](CheckResult& r) {
    need();
    Sampler rs(derive_seed(cfg.seed, 5, 0));
    double worst = 0.0;
    for (int k = 0; k < cfg.energy_pairs; ++k) {
      const auto q1 = rs.uniform(grid, 0.0, data.M);
      const auto q2 = rs.uniform(grid, 0.0, data.M);
      const auto u1 = terminal_data(solve_excitation(data, q1));
      const auto u2 = terminal_data(solve_excitation(data, q2));
      worst = std::max(worst, l2_norm(u1 - u2) / l2_norm(q1 - q2));
    }
    at_most(r, worst, consts->energy_constant());
  });

  std::optional<ProblemData> sdata;
  std::optional<StabilityConstants> sc;
  b.add("stability_smallness", "sqrt(T) M_b (M + 1) / (m_Q sqrt(C_p)) < 1 on the stability setup",
        [&](CheckResult& r) {
          sdata = build_problem(cfg.stability);
          sc = stability_constants(*sdata);
          r.value = sc->contraction();
          r.bound = 1.0;
          r.pass = r.value < 1.0;
          std::ostringstream os;
          os << "m_Q = " << sc->m_Q << ", M_b = " << sc->M_b << ", C_p = " << sc->C_p;
          r.note = os.str();
        });
  b.add("stability_inequality", "|q1 - q2| <= C (|Lap(G q1 - G q2)| + |p|_inf |G q1 - G q2|)", [&](CheckResult& r) {
    if (!sdata || !sc) throw std::runtime_error("stability setup unavailable");
    const double C = sc->stability_constant();
    if (!std::isfinite(C)) throw std::runtime_error("smallness condition fails, no finite constant");
    Sampler rs(derive_seed(cfg.seed, 6, 0));
    double worst = 0.0;
    for (int k = 0; k < cfg.stability_pairs; ++k) {
      const auto q1 = rs.uniform(sdata->grid, 0.0, sdata->M);
      const auto q2 = rs.uniform(sdata->grid, 0.0, sdata->M);
      const auto dG = forward_map(*sdata, q1) - forward_map(*sdata, q2);
      const double rhs =
          C * (l2_norm(robin_neg_laplacian(*sdata->stiffness, *sdata->mass, dG)) + sc->p_max * l2_norm(dG));
      worst = std::max(worst, l2_norm(q1 - q2) / rhs);
    }
    at_most(r, worst, 1.0);
    r.note = "C = " + std::to_string(C);
  });
  return b.rows;
}

}  // namespace fluoinv
