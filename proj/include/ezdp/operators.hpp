#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ezdp/model.hpp"

namespace ezdp {

/// Stationary decision rule: one feasible action per state.
struct Policy {
  std::vector<ActionIndex> actions;

  std::size_t size() const noexcept { return actions.size(); }
  ActionIndex operator[](StateIndex s) const { return actions[s]; }
  bool operator==(const Policy&) const = default;
};

/// Throws InfeasibleAction at the first state whose action is not in A(s).
inline void check_feasible(const Mdp& m, const Policy& f) {
  if (f.size() != m.n_states())
    throw DomainError("policy has " + std::to_string(f.size()) + " entries, expected " +
                      std::to_string(m.n_states()));
  for (StateIndex s = 0; s < m.n_states(); ++s)
    if (!m.is_feasible(s, f[s])) throw InfeasibleAction(s, f[s]);
}

enum class Optimizer { Max, Min };

/// Which transformed operator drives a case, and how to leave its space.
struct OperatorKind {
  enum class Tag { F1, F2, F3, F4 };
  Tag tag;
  Optimizer optimizer;
  double exponent_back;

  /// F1/F4 use the power-mean-free body [r + beta (E w)^(1/theta)]^theta.
  bool linear_mean() const noexcept { return tag == Tag::F1 || tag == Tag::F4; }
};

inline const char* to_string(OperatorKind::Tag t) {
  switch (t) {
    case OperatorKind::Tag::F1: return "F1";
    case OperatorKind::Tag::F2: return "F2";
    case OperatorKind::Tag::F3: return "F3";
    case OperatorKind::Tag::F4: return "F4";
  }
  return "?";
}

inline OperatorKind operator_kind(const DerivedParams& d) {
  switch (d.machinery) {
    case CaseClass::Case1: return {OperatorKind::Tag::F1, Optimizer::Max, d.exponent_back};
    case CaseClass::Case2: return {OperatorKind::Tag::F2, Optimizer::Max, d.exponent_back};
    case CaseClass::Case3: return {OperatorKind::Tag::F3, Optimizer::Min, d.exponent_back};
    case CaseClass::Case4: return {OperatorKind::Tag::F4, Optimizer::Min, d.exponent_back};
    default: break;
  }
  throw UnsupportedCase("no operator for case " + std::string(to_string(d.case_class)));
}

/// x^p for x >= 0 with 0^p = 0 (p > 0), 0^0 = 1; 0^p for p < 0 and negative
/// x raise DomainError.
inline double pow_nonneg(double x, double p) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("power of negative value " + detail::fmt(x));
  if (x == 0.0) {
    if (p > 0.0) return 0.0;
    if (p == 0.0) return 1.0;
    throw DomainError("zero raised to negative power " + detail::fmt(p));
  }
  return std::pow(x, p);
}

/// Epstein-Zin state-action aggregator on v-space values:
/// [r(s,a) + beta (sum_s' v(s')^(1-gamma) q(s'|s,a))^((1-rho)/(1-gamma))]^(1/(1-rho)).
inline double aggregator_H(const Mdp& m, const DerivedParams& d, StateIndex s, ActionIndex a,
                           std::span<const double> v) {
  const double one_minus_rho = 1.0 - m.rho();
  const double one_minus_gamma = 1.0 - m.gamma();
  double body = d.r(s, a);
  if (m.beta() > 0.0) {
    const auto row = m.transition(s, a);
    double inner = 0.0;
    for (StateIndex t = 0; t < m.n_states(); ++t)
      if (row[t] > 0.0) inner += row[t] * pow_nonneg(v[t], one_minus_gamma);
    body += m.beta() * pow_nonneg(inner, one_minus_rho / one_minus_gamma);
  }
  return pow_nonneg(body, 1.0 / one_minus_rho);
}

inline double aggregator_H(const Mdp& m, const DerivedParams& d, StateIndex s, ActionIndex a,
                           const ValueFn& v) {
  return aggregator_H(m, d, s, a, std::span<const double>(v.values));
}

/// Case-specific transformed aggregator H1..H4 evaluated on w-space values.
inline double transformed_H(const Mdp& m, const DerivedParams& d, const OperatorKind& kind,
                            StateIndex s, ActionIndex a, std::span<const double> w) {
  const auto row = m.transition(s, a);
  double inner = 0.0;
  if (kind.linear_mean()) {
    for (StateIndex t = 0; t < m.n_states(); ++t)
      if (row[t] > 0.0) {
        if (w[t] < 0.0) throw DomainError("negative w-space value at state " + std::to_string(t));
        inner += row[t] * w[t];
      }
    return pow_nonneg(d.r(s, a) + m.beta() * pow_nonneg(inner, 1.0 / d.theta), d.theta);
  }
  for (StateIndex t = 0; t < m.n_states(); ++t)
    if (row[t] > 0.0) inner += row[t] * pow_nonneg(w[t], d.theta);
  return d.r(s, a) + m.beta() * pow_nonneg(inner, 1.0 / d.theta);
}

namespace detail {

inline void check_size(const Mdp& m, std::size_t n) {
  if (n != m.n_states())
    throw DomainError("value function has " + std::to_string(n) + " entries, expected " +
                      std::to_string(m.n_states()));
}

inline bool improves(Optimizer opt, double candidate, double incumbent) {
  return opt == Optimizer::Max ? candidate > incumbent : candidate < incumbent;
}

}  // namespace detail

/// Optimal value of the transformed aggregator at state s and the lowest
/// optimizing action index.
struct StateOptimum {
  double value;
  ActionIndex action;
};

inline StateOptimum optimize_state(const Mdp& m, const DerivedParams& d, const OperatorKind& kind,
                                   StateIndex s, std::span<const double> w) {
  const auto acts = m.feasible(s);
  StateOptimum best{transformed_H(m, d, kind, s, acts[0], w), acts[0]};
  for (std::size_t i = 1; i < acts.size(); ++i) {
    const double h = transformed_H(m, d, kind, s, acts[i], w);
    if (detail::improves(kind.optimizer, h, best.value)) best = {h, acts[i]};
  }
  return best;
}

/// One application of the case's transformed Bellman operator F_k.
inline ValueFn apply_F(const Mdp& m, const DerivedParams& d, const ValueFn& w) {
  detail::check_size(m, w.size());
  const auto kind = operator_kind(d);
  ValueFn out{std::vector<double>(m.n_states()), Space::W};
  for (StateIndex s = 0; s < m.n_states(); ++s) out.values[s] = optimize_state(m, d, kind, s, w.values).value;
  return out;
}

/// Policy operator F_kf: the transformed aggregator at f(s), no optimization.
inline ValueFn apply_policy_op(const Mdp& m, const DerivedParams& d, const Policy& f, const ValueFn& w) {
  detail::check_size(m, w.size());
  check_feasible(m, f);
  const auto kind = operator_kind(d);
  ValueFn out{std::vector<double>(m.n_states()), Space::W};
  for (StateIndex s = 0; s < m.n_states(); ++s) out.values[s] = transformed_H(m, d, kind, s, f[s], w.values);
  return out;
}

/// w-space to v-space: componentwise power 1/(1-gamma) or 1/(1-rho).
inline ValueFn to_v(const ValueFn& w, const DerivedParams& d) {
  ValueFn v{std::vector<double>(w.size()), Space::V};
  for (std::size_t s = 0; s < w.size(); ++s) v.values[s] = pow_nonneg(w.values[s], d.exponent_back);
  return v;
}

/// Exact inverse of to_v.
inline ValueFn to_w(const ValueFn& v, const DerivedParams& d) {
  ValueFn w{std::vector<double>(v.size()), Space::W};
  for (std::size_t s = 0; s < v.size(); ++s) w.values[s] = pow_nonneg(v.values[s], 1.0 / d.exponent_back);
  return w;
}

}  // namespace ezdp
