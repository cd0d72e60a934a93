#include "fluoinv/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fluoinv/metrics.hpp"

namespace fluoinv {

namespace {

// numerator + d_t u_m(T; q), divided by u_e(T; q). Also hands back u_m(T; q).
GridFunction apply_K(const ProblemData& data, const GridFunction& q, const GridFunction& numerator,
                     GridFunction* um_T = nullptr) {
  const auto sol = solve_forward(data, q);
  const auto& ue = sol.excitation.at(sol.excitation.last_level());
  const auto dt = terminal_time_derivative(sol.emission);
  GridFunction out(data.grid);
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (!(ue[n] > 0.0)) {
      std::ostringstream os;
      os << "operator K: u_e(T) = " << ue[n] << " at node " << n << ", cannot divide";
      throw std::domain_error(os.str());
    }
    out[n] = (dt[n] + numerator[n]) / ue[n];
  }
  if (um_T) *um_T = terminal_data(sol.emission);
  return out;
}

GridFunction clean_numerator(const ProblemData& data, const GridFunction& g) {
  data.p.require_same_grid(g);
  auto lap = robin_neg_laplacian(*data.stiffness, *data.mass, g);
  for (std::size_t n = 0; n < lap.size(); ++n) lap[n] += data.p[n] * g[n];
  return lap;
}

GridFunction noisy_numerator(const ProblemData& data, const GridFunction& f, const GridFunction& Sf) {
  data.p.require_same_grid(f);
  data.p.require_same_grid(Sf);
  GridFunction out(data.grid);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = f[n] + data.p[n] * Sf[n];
  return out;
}

GridFunction divide_by_free_excitation(const ProblemData& data, const GridFunction& numerator) {
  const GridFunction zero(data.grid, 0.0);
  const auto ue = terminal_data(solve_excitation(data, zero));
  GridFunction out(data.grid);
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (!(ue[n] > 0.0)) throw std::domain_error("initial guess: u_e(T; 0) is not positive");
    out[n] = numerator[n] / ue[n];
  }
  return out;
}

bool project(GridFunction& q, double M) {
  bool changed = false;
  for (std::size_t n = 0; n < q.size(); ++n) {
    const double c = std::clamp(q[n], 0.0, M);
    if (c != q[n]) {
      q[n] = c;
      changed = true;
    }
  }
  return changed;
}

std::pair<GridFunction, IterationTrace> iterate(const ProblemData& data, const GridFunction& numerator,
                                                const GridFunction& target, const InverseConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("InverseConfig: tol must be positive");
  IterationTrace trace;
  GridFunction q = divide_by_free_excitation(data, numerator);
  if (cfg.clamp) trace.clamped = project(q, data.M) || trace.clamped;
  auto keep = [&](int j, const GridFunction& iterate) {
    if (cfg.snapshot_every > 0 && j % cfg.snapshot_every == 0) {
      trace.snapshots.push_back(iterate);
      trace.snapshot_index.push_back(j);
    }
  };
  keep(0, q);
  for (int j = 0; j < cfg.max_iter; ++j) {
    GridFunction um(data.grid);
    GridFunction next = apply_K(data, q, numerator, &um);
    if (cfg.clamp && project(next, data.M)) trace.clamped = true;
    trace.misfits.push_back(l2_norm(um - target));
    GridFunction diff = next - q;
    trace.increments.push_back(l2_norm(diff));
    trace.min_steps.push_back(diff.min());
    q = std::move(next);
    trace.iterations = j + 1;
    keep(j + 1, q);
    if (trace.increments.back() < cfg.tol) {
      trace.converged = true;
      break;
    }
  }
  return {std::move(q), std::move(trace)};
}

}  // namespace

GridFunction forward_map(const ProblemData& data, const GridFunction& q) {
  return terminal_data(solve_forward(data, q).emission);
}

GridFunction operator_K(const ProblemData& data, const GridFunction& q, const GridFunction& g) {
  return apply_K(data, q, clean_numerator(data, g));
}

GridFunction initial_guess(const ProblemData& data, const GridFunction& g) {
  return divide_by_free_excitation(data, clean_numerator(data, g));
}

std::pair<GridFunction, IterationTrace> fixed_point_solve(const ProblemData& data, const GridFunction& g,
                                                          const InverseConfig& cfg) {
  return iterate(data, clean_numerator(data, g), g, cfg);
}

GridFunction operator_K_sigma(const ProblemData& data, const GridFunction& q, const GridFunction& f_rec,
                              const GridFunction& Sf_rec) {
  return apply_K(data, q, noisy_numerator(data, f_rec, Sf_rec));
}

std::pair<GridFunction, IterationTrace> noisy_fixed_point_solve(const ProblemData& data, const GridFunction& f_rec,
                                                                const GridFunction& Sf_rec, InverseConfig cfg) {
  return iterate(data, noisy_numerator(data, f_rec, Sf_rec), Sf_rec, cfg);
}

std::string DomainReport::summary() const {
  std::ostringstream os;
  if (inside) {
    os << "inside D";
  } else {
    os << "outside D: " << above_upper.size() << " nodes above M, " << below_lower.size()
       << " nodes below the lower bound";
  }
  return os.str();
}

DomainReport check_domain(const ProblemData& data, const GridFunction& q, const GridFunction& g) {
  data.p.require_same_grid(q);
  const auto lower = initial_guess(data, g);
  constexpr double slack = 1e-10;
  DomainReport r;
  for (std::size_t n = 0; n < q.size(); ++n) {
    if (q[n] > data.M + slack) r.above_upper.push_back(n);
    if (q[n] < lower[n] - slack) r.below_lower.push_back(n);
  }
  r.inside = r.above_upper.empty() && r.below_lower.empty();
  return r;
}

double StabilityConstants::energy_constant() const { return std::sqrt(T) * M_b / std::sqrt(C_p); }

double StabilityConstants::contraction() const {
  return std::sqrt(T) * M_b * (M + 1.0) / (m_Q * std::sqrt(C_p));
}

double StabilityConstants::stability_constant() const {
  const double denom = m_Q * std::sqrt(C_p) - std::sqrt(T) * M_b * (M + 1.0);
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt(C_p) / denom;
}

StabilityConstants stability_constants(const ProblemData& data) {
  StabilityConstants c;
  c.C_p = data.p.min();
  c.p_max = data.p.max();
  c.M_b = data.M_b;
  c.T = data.T;
  c.M = data.M;
  const GridFunction top(data.grid, data.M);
  c.m_Q = terminal_data(solve_excitation(data, top)).min();
  return c;
}

}  // namespace fluoinv
