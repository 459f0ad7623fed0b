#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ezdp/model.hpp"
#include "ezdp/operators.hpp"
#include "ezdp/solver.hpp"

namespace ezdp {

/// Finite prefix (pi_1, ..., pi_n) of a Markov policy.
struct MarkovPlan {
  std::vector<Policy> steps;

  std::size_t horizon() const noexcept { return steps.size(); }

  static MarkovPlan repeat(const Policy& f, std::size_t n) { return {std::vector<Policy>(n, f)}; }
};

/// Regimes in which finite-horizon utilities are ordered: A has rho, gamma in
/// (0,1) and horizon values increase; B has rho, gamma > 1 and they decrease.
enum class UtilityRegime { A, B };
enum class Monotone { Increasing, Decreasing };

inline const char* to_string(Monotone m) { return m == Monotone::Increasing ? "Increasing" : "Decreasing"; }

inline UtilityRegime utility_regime(const Mdp& m) {
  if (m.rho() < 1.0 && m.gamma() < 1.0) return UtilityRegime::A;
  if (m.rho() > 1.0 && m.gamma() > 1.0) return UtilityRegime::B;
  throw UnsupportedCase(describe_unsupported(m.rho(), m.gamma()) + "; no utility order for Markov plans");
}

inline void check_plan(const Mdp& m, const MarkovPlan& plan) {
  if (plan.steps.empty()) throw DomainError("Markov plan must have at least one step");
  for (const auto& f : plan.steps) check_feasible(m, f);
}

/// T_f 0^ (s) = r(s, f(s))^(1/(1-rho)): the innermost application in both
/// regimes.
inline ValueFn terminal_step(const Mdp& m, const DerivedParams& d, const Policy& f) {
  ValueFn out{std::vector<double>(m.n_states()), Space::V};
  for (StateIndex s = 0; s < m.n_states(); ++s) out.values[s] = pow_nonneg(d.r(s, f[s]), 1.0 / (1.0 - m.rho()));
  return out;
}

/// T_f psi(s) = H(s, f(s), psi) in v-space.
inline ValueFn apply_T_f(const Mdp& m, const DerivedParams& d, const Policy& f, const ValueFn& psi) {
  ValueFn out{std::vector<double>(m.n_states()), Space::V};
  for (StateIndex s = 0; s < m.n_states(); ++s) out.values[s] = aggregator_H(m, d, s, f[s], psi);
  return out;
}

/// T_{pi_1} ... T_{pi_k} applied to the zero terminal, with the first k steps
/// of `plan`.
inline ValueFn compose_from_zero(const Mdp& m, const DerivedParams& d, const MarkovPlan& plan, std::size_t k) {
  ValueFn v = terminal_step(m, d, plan.steps[k - 1]);
  for (std::size_t i = k - 1; i-- > 0;) v = apply_T_f(m, d, plan.steps[i], v);
  return v;
}

/// T_{pi_1} ... T_{pi_n} applied to `tail`.
inline ValueFn compose_onto(const Mdp& m, const DerivedParams& d, const MarkovPlan& plan, ValueFn tail) {
  for (std::size_t i = plan.steps.size(); i-- > 0;) tail = apply_T_f(m, d, plan.steps[i], tail);
  return tail;
}

/// Stationary utility v_f, the fixed point of v = H(., f(.), v), computed by
/// iterating the contracting policy operator in w-space from zero.
inline ValueFn infinite_horizon(const Mdp& m, const Policy& f, double tol = kDefaultTolerance,
                                std::size_t max_iter = kDefaultMaxIterations) {
  check_feasible(m, f);
  const DerivedParams d = derive(m);
  const double lead = d.delta / (1.0 - d.delta);
  ValueFn w = ValueFn::zero(m.n_states());
  double bound = 0.0;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    ValueFn next = apply_policy_op(m, d, f, w);
    bound = lead * omega_distance(next.values, w.values, m.omega());
    w = std::move(next);
    if (bound <= tol) return to_v(w, d);
  }
  throw MaxIterationsExceeded(max_iter, bound);
}

struct EvalReport {
  /// U_1(pi), ..., U_n(pi) in v-space.
  std::vector<ValueFn> horizon_values;
  /// Utility of the plan continued forever with its last rule; for a
  /// stationary plan this is v_f.
  ValueFn limit_value;
  Monotone monotone_direction;
};

/// U_k(pi) = T_{pi_1} ... T_{pi_k} 0^ for k = 1..n, plus the stationary-tail
/// limit. Throws UnsupportedCase for mixed regimes.
inline EvalReport finite_horizon(const Mdp& m, const MarkovPlan& plan, double tol = 1e-12) {
  const UtilityRegime regime = utility_regime(m);
  check_plan(m, plan);
  const DerivedParams d = derive(m);
  EvalReport rep;
  rep.monotone_direction = regime == UtilityRegime::A ? Monotone::Increasing : Monotone::Decreasing;
  rep.horizon_values.reserve(plan.horizon());
  for (std::size_t k = 1; k <= plan.horizon(); ++k) rep.horizon_values.push_back(compose_from_zero(m, d, plan, k));
  rep.limit_value = compose_onto(m, d, plan, infinite_horizon(m, plan.steps.back(), tol));
  return rep;
}

/// T^n 0^ for the v-space Bellman operator, with the first application
/// mapping zero to max_a r(s,a)^(1/(1-rho)). Increasing in regime A and
/// decreasing in regime B, converging to v* in both.
inline ValueFn bellman_orbit_from_zero(const Mdp& m, const DerivedParams& d, std::size_t n) {
  ValueFn v{std::vector<double>(m.n_states()), Space::V};
  for (StateIndex s = 0; s < m.n_states(); ++s) {
    double best = -INFINITY;
    for (ActionIndex a : m.feasible(s)) best = std::max(best, pow_nonneg(d.r(s, a), 1.0 / (1.0 - m.rho())));
    v.values[s] = best;
  }
  for (std::size_t k = 1; k < n; ++k) v = bellman_T(m, d, v);
  return v;
}

// ---------------------------------------------------------------------------
// Optimality audit

struct PlanMargin {
  /// min_s (v*(s) - U(pi)(s)) / omega(s); negative means pi beats v*.
  double margin;
  StateIndex state;
  /// min_s (U_n(pi)(s) - U(pi)(s)) / omega(s) in regime B, where finite
  /// horizon values bound the limit from above; +inf in regime A.
  double horizon_gap;
};

/// Compares one plan against v*. U(pi) is the plan's stationary-tail value;
/// in regime A the horizon-n value is checked as well.
inline PlanMargin audit_plan(const Mdp& m, const DerivedParams& d, const ValueFn& v_star, const MarkovPlan& plan,
                             double eval_tol = 1e-12) {
  const UtilityRegime regime = utility_regime(m);
  check_plan(m, plan);
  const auto omega = m.omega();
  const ValueFn tail = compose_onto(m, d, plan, infinite_horizon(m, plan.steps.back(), eval_tol));
  const ValueFn finite = compose_from_zero(m, d, plan, plan.horizon());
  PlanMargin pm{std::numeric_limits<double>::infinity(), 0, std::numeric_limits<double>::infinity()};
  for (StateIndex s = 0; s < m.n_states(); ++s) {
    double margin = (v_star[s] - tail[s]) / omega[s];
    if (regime == UtilityRegime::A) margin = std::min(margin, (v_star[s] - finite[s]) / omega[s]);
    else pm.horizon_gap = std::min(pm.horizon_gap, (finite[s] - tail[s]) / omega[s]);
    if (margin < pm.margin) pm = {margin, s, pm.horizon_gap};
  }
  return pm;
}

/// Uniformly random feasible Markov plan of the given horizon.
template <class Rng>
MarkovPlan random_plan(const Mdp& m, std::size_t horizon, Rng& rng) {
  MarkovPlan plan;
  plan.steps.reserve(horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    Policy f{std::vector<ActionIndex>(m.n_states())};
    for (StateIndex s = 0; s < m.n_states(); ++s) {
      const auto acts = m.feasible(s);
      std::uniform_int_distribution<std::size_t> pick(0, acts.size() - 1);
      f.actions[s] = acts[pick(rng)];
    }
    plan.steps.push_back(std::move(f));
  }
  return plan;
}

struct AuditReport {
  std::uint64_t seed;
  std::size_t n_random;
  std::size_t horizon;
  double tolerance;
  double worst_margin;
  std::size_t worst_plan;
  StateIndex worst_state;
  /// Utility of the stationary f* (checked against v*).
  ValueFn f_star_value;
  double f_star_gap;
};

/// Samples `n_random` plans (std::mt19937_64 seeded with `seed`) and checks
/// that none beats v* by more than `tolerance` in omega-norm. Throws
/// AuditFailed naming the first violating plan and state.
inline AuditReport optimality_audit(const Mdp& m, const ValueFn& v_star, const Policy& f_star, std::size_t n_random,
                                    std::size_t horizon, std::uint64_t seed, double tolerance = 1e-9,
                                    double eval_tol = 1e-12) {
  utility_regime(m);
  if (horizon == 0) throw DomainError("audit horizon must be positive");
  const DerivedParams d = derive(m);
  AuditReport rep{seed, n_random, horizon, tolerance, std::numeric_limits<double>::infinity(), 0, 0, {}, 0.0};

  rep.f_star_value = infinite_horizon(m, f_star, eval_tol);
  rep.f_star_gap = omega_distance(rep.f_star_value.values, v_star.values, m.omega());

  std::mt19937_64 rng(seed);
  for (std::size_t p = 0; p < n_random; ++p) {
    const MarkovPlan plan = random_plan(m, horizon, rng);
    const PlanMargin pm = audit_plan(m, d, v_star, plan, eval_tol);
    if (pm.margin < rep.worst_margin) {
      rep.worst_margin = pm.margin;
      rep.worst_plan = p;
      rep.worst_state = pm.state;
    }
    if (pm.margin < -tolerance)
      throw AuditFailed("plan " + std::to_string(p) + " exceeds v* at state " + std::to_string(pm.state) +
                            " by " + detail::fmt(-pm.margin),
                        p, pm.state, pm.margin);
    if (pm.horizon_gap < -tolerance)
      throw AuditFailed("plan " + std::to_string(p) + ": horizon value below its limit by " +
                            detail::fmt(-pm.horizon_gap),
                        p, pm.state, pm.horizon_gap);
  }
  return rep;
}

}  // namespace ezdp
