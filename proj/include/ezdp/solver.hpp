#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ezdp/model.hpp"
#include "ezdp/operators.hpp"

namespace ezdp {

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr std::size_t kDefaultMaxIterations = 1'000'000;

/// One row of the value-iteration trace. All norms are omega-norms.
struct TraceRecord {
  std::size_t iter;
  /// ||w_k - w_{k-1}||
  double step_norm;
  /// delta^k / (1 - delta) * ||F w_0 - w_0||
  double apriori;
  /// delta / (1 - delta) * ||w_k - w_{k-1}||
  double aposteriori;
};

struct IterationResult {
  ValueFn w;
  std::vector<TraceRecord> trace;

  std::size_t iterations() const noexcept { return trace.size(); }
  /// Certified bound on ||w - w*||.
  double certified_error() const noexcept { return trace.empty() ? 0.0 : trace.back().aposteriori; }
};

/// Banach iteration w_k = F w_{k-1}, stopped once the a-posteriori bound
/// drops to `tol`. Throws MaxIterationsExceeded otherwise.
inline IterationResult value_iterate(const Mdp& m, const DerivedParams& d, const ValueFn& w0, double tol,
                                     std::size_t max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iter == 0) throw std::invalid_argument("max_iter must be positive");

  const auto omega = m.omega();
  const double lead = d.delta / (1.0 - d.delta);
  IterationResult res{w0, {}};
  res.w.space = Space::W;
  double first_step = 0.0;
  double delta_pow = 1.0;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    ValueFn next = apply_F(m, d, res.w);
    const double step = omega_distance(next.values, res.w.values, omega);
    if (k == 1) first_step = step;
    delta_pow *= d.delta;
    res.trace.push_back({k, step, delta_pow / (1.0 - d.delta) * first_step, lead * step});
    res.w = std::move(next);
    if (res.trace.back().aposteriori <= tol) return res;
  }
  throw MaxIterationsExceeded(max_iter, res.trace.back().aposteriori);
}

/// Per state, the feasible action optimizing H_k(s, ., w*); ties go to the
/// lowest action index.
inline Policy extract_policy(const Mdp& m, const DerivedParams& d, const ValueFn& w_star) {
  detail::check_size(m, w_star.size());
  const auto kind = operator_kind(d);
  Policy f{std::vector<ActionIndex>(m.n_states())};
  for (StateIndex s = 0; s < m.n_states(); ++s) f.actions[s] = optimize_state(m, d, kind, s, w_star.values).action;
  return f;
}

/// Actions whose transformed aggregator value is within `rel_tol` (relative
/// to the optimum) of the per-state optimum.
inline std::vector<std::vector<ActionIndex>> optimizing_action_sets(const Mdp& m, const DerivedParams& d,
                                                                    const ValueFn& w, double rel_tol) {
  const auto kind = operator_kind(d);
  std::vector<std::vector<ActionIndex>> sets(m.n_states());
  for (StateIndex s = 0; s < m.n_states(); ++s) {
    const double best = optimize_state(m, d, kind, s, w.values).value;
    for (ActionIndex a : m.feasible(s)) {
      const double h = transformed_H(m, d, kind, s, a, w.values);
      if (std::abs(h - best) <= rel_tol * std::max(1.0, std::abs(best))) sets[s].push_back(a);
    }
  }
  return sets;
}

/// v-space Bellman operator T v(s) = max_a H(s, a, v). The maximum is taken
/// in every case: the w-space minimum of Cases 3/4 is a v-space maximum.
inline ValueFn bellman_T(const Mdp& m, const DerivedParams& d, const ValueFn& v) {
  detail::check_size(m, v.size());
  ValueFn out{std::vector<double>(m.n_states()), Space::V};
  for (StateIndex s = 0; s < m.n_states(); ++s) {
    double best = -INFINITY;
    for (ActionIndex a : m.feasible(s)) best = std::max(best, aggregator_H(m, d, s, a, v));
    out.values[s] = best;
  }
  return out;
}

/// sup_s |v(s) - max_a H(s, a, v)| / omega(s).
inline double bellman_residual(const Mdp& m, const DerivedParams& d, const ValueFn& v) {
  return omega_distance(v.values, bellman_T(m, d, v).values, m.omega());
}

struct SolveReport {
  CaseClass case_class;
  DerivedParams derived;
  double tol;
  std::size_t iterations;
  std::vector<TraceRecord> trace;
  ValueFn w_star;
  ValueFn v_star;
  Policy policy;
  double bellman_residual;
  double certified_error;
  /// M / (1 - delta): the constant of the a-priori bound started at zero.
  double banach_constant;
};

/// classify -> derive -> iterate from zero -> to_v -> extract_policy ->
/// bellman_residual.
inline SolveReport solve(const Mdp& m, double tol = kDefaultTolerance,
                         std::size_t max_iter = kDefaultMaxIterations) {
  DerivedParams d = derive(m);
  auto it = value_iterate(m, d, ValueFn::zero(m.n_states()), tol, max_iter);
  SolveReport rep{d.case_class, d, tol, it.iterations(), {}, {}, {}, {}, 0.0, it.certified_error(),
                  d.M / (1.0 - d.delta)};
  rep.v_star = to_v(it.w, d);
  rep.policy = extract_policy(m, d, it.w);
  rep.bellman_residual = bellman_residual(m, d, rep.v_star);
  rep.w_star = std::move(it.w);
  rep.trace = std::move(it.trace);
  rep.derived = std::move(d);
  return rep;
}

}  // namespace ezdp
