#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ezdp/errors.hpp"

namespace ezdp {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

/// Largest admissible deviation of a transition row sum from one.
inline constexpr double kRowSumTolerance = 1e-12;

/// Unchecked model description, as read from a model file or assembled in
/// code. `validate` turns it into an `Mdp`.
struct RawModel {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  /// feasible[s] lists the admissible actions A(s).
  std::vector<std::vector<ActionIndex>> feasible;
  /// utility[s][a]; empty optional for infeasible pairs.
  std::vector<std::vector<std::optional<double>>> utility;
  /// transition[s][a][s']; the row may be empty for infeasible pairs.
  std::vector<std::vector<std::vector<double>>> transition;
  double beta = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
  /// Empty means the unit weight.
  std::vector<double> omega;
  std::string name;
};

/// Finite Markov decision process with Epstein-Zin preferences. Immutable;
/// only `validate` constructs one, so every instance satisfies the model
/// invariants (nonempty A(s), stochastic rows, nonnegative utility, omega >= 1).
class Mdp {
 public:
  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }

  std::span<const ActionIndex> feasible(StateIndex s) const { return feasible_[s]; }
  bool is_feasible(StateIndex s, ActionIndex a) const {
    return s < n_states_ && a < n_actions_ && feasible_mask_[s * n_actions_ + a];
  }

  double utility(StateIndex s, ActionIndex a) const { return utility_[s * n_actions_ + a]; }
  std::span<const double> transition(StateIndex s, ActionIndex a) const {
    return {transition_.data() + (s * n_actions_ + a) * n_states_, n_states_};
  }

  double beta() const noexcept { return beta_; }
  double rho() const noexcept { return rho_; }
  double gamma() const noexcept { return gamma_; }
  std::span<const double> omega() const noexcept { return omega_; }
  const std::string& name() const noexcept { return name_; }

  /// Copy back to the unchecked form, e.g. to perturb and revalidate.
  RawModel raw() const {
    RawModel m;
    m.n_states = n_states_;
    m.n_actions = n_actions_;
    m.feasible = feasible_;
    m.utility.assign(n_states_, std::vector<std::optional<double>>(n_actions_));
    m.transition.assign(n_states_, std::vector<std::vector<double>>(n_actions_));
    for (StateIndex s = 0; s < n_states_; ++s) {
      for (ActionIndex a : feasible_[s]) {
        m.utility[s][a] = utility(s, a);
        auto row = transition(s, a);
        m.transition[s][a].assign(row.begin(), row.end());
      }
    }
    m.beta = beta_;
    m.rho = rho_;
    m.gamma = gamma_;
    m.omega = omega_;
    m.name = name_;
    return m;
  }

 private:
  friend Mdp validate(const RawModel& raw);
  Mdp() = default;

  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<std::vector<ActionIndex>> feasible_;
  std::vector<char> feasible_mask_;
  std::vector<double> utility_;
  std::vector<double> transition_;
  double beta_ = 0.0;
  double rho_ = 0.0;
  double gamma_ = 0.0;
  std::vector<double> omega_;
  std::string name_;
};

namespace detail {

inline std::string pair_label(StateIndex s, ActionIndex a) {
  return "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace detail

/// Checks a raw description and returns the validated model. Throws
/// ValidationError naming the first violated invariant and its location.
inline Mdp validate(const RawModel& raw) {
  using K = ValidationError::Kind;
  auto bad_param = [](const std::string& what) {
    throw ValidationError(K::BadParameter, "bad parameter: " + what);
  };

  if (!(raw.beta >= 0.0 && raw.beta < 1.0)) bad_param("beta = " + detail::fmt(raw.beta) + " not in [0, 1)");
  if (!(raw.rho > 0.0)) bad_param("rho = " + detail::fmt(raw.rho) + " must be > 0");
  if (raw.rho == 1.0) bad_param("rho must differ from 1");
  if (!(raw.gamma > 0.0)) bad_param("gamma = " + detail::fmt(raw.gamma) + " must be > 0");
  if (raw.gamma == 1.0) bad_param("gamma must differ from 1");

  const std::size_t ns = raw.n_states;
  const std::size_t na = raw.n_actions;
  if (ns == 0) throw ValidationError(K::Shape, "n_states must be positive");
  if (na == 0) throw ValidationError(K::Shape, "n_actions must be positive");
  if (raw.feasible.size() != ns)
    throw ValidationError(K::Shape, "feasible has " + std::to_string(raw.feasible.size()) +
                                        " entries, expected n_states = " + std::to_string(ns));
  if (raw.utility.size() != ns)
    throw ValidationError(K::Shape, "utility must have n_states rows");
  if (raw.transition.size() != ns)
    throw ValidationError(K::Shape, "transition must have n_states rows");

  Mdp m;
  m.n_states_ = ns;
  m.n_actions_ = na;
  m.feasible_mask_.assign(ns * na, 0);
  m.utility_.assign(ns * na, 0.0);
  m.transition_.assign(ns * na * ns, 0.0);
  m.feasible_.resize(ns);

  const bool negative_exponent = 1.0 - raw.rho < 0.0;

  for (StateIndex s = 0; s < ns; ++s) {
    const auto& acts = raw.feasible[s];
    if (acts.empty())
      throw ValidationError(K::EmptyFeasibleSet, "A(s) is empty at s=" + std::to_string(s), s);
    for (ActionIndex a : acts) {
      if (a >= na)
        throw ValidationError(K::Shape,
                              "feasible action " + std::to_string(a) + " out of range at s=" +
                                  std::to_string(s),
                              s, a);
      if (m.feasible_mask_[s * na + a])
        throw ValidationError(K::Shape, "duplicate feasible action " + detail::pair_label(s, a), s, a);
      m.feasible_mask_[s * na + a] = 1;
    }
    m.feasible_[s] = acts;
    std::sort(m.feasible_[s].begin(), m.feasible_[s].end());

    if (raw.utility[s].size() != na)
      throw ValidationError(K::Shape, "utility row " + std::to_string(s) + " must have n_actions entries", s);
    if (raw.transition[s].size() != na)
      throw ValidationError(K::Shape, "transition row " + std::to_string(s) + " must have n_actions entries", s);

    for (ActionIndex a = 0; a < na; ++a) {
      const bool ok = m.feasible_mask_[s * na + a] != 0;
      const auto& u = raw.utility[s][a];
      const auto& row = raw.transition[s][a];
      if (!ok) {
        if (u.has_value())
          throw ValidationError(K::Shape, "utility given for infeasible pair " + detail::pair_label(s, a), s, a);
        if (!row.empty())
          throw ValidationError(K::Shape, "transition given for infeasible pair " + detail::pair_label(s, a), s, a);
        continue;
      }
      if (!u.has_value())
        throw ValidationError(K::Shape, "missing utility for feasible pair " + detail::pair_label(s, a), s, a);
      if (!std::isfinite(*u))
        throw ValidationError(K::Shape, "non-finite utility at " + detail::pair_label(s, a), s, a);
      if (*u < 0.0)
        throw ValidationError(K::NegativeUtility, "negative utility " + detail::fmt(*u) + " at " + detail::pair_label(s, a), s, a);
      if (negative_exponent && *u == 0.0)
        throw ValidationError(K::ZeroUtilityInNegativeExponentCase,
                              "zero utility at " + detail::pair_label(s, a) +
                                  " while 1 - rho < 0; r must be positive",
                              s, a);
      m.utility_[s * na + a] = *u;

      if (row.size() != ns)
        throw ValidationError(K::Shape, "transition row " + detail::pair_label(s, a) + " must have n_states entries", s, a);
      double sum = 0.0;
      for (double p : row) {
        if (!std::isfinite(p) || p < 0.0)
          throw ValidationError(K::NonStochasticRow,
                                "negative or non-finite probability in row " + detail::pair_label(s, a), s, a);
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        throw ValidationError(K::NonStochasticRow,
                              "row " + detail::pair_label(s, a) + " sums to " + detail::fmt(sum), s, a);
      std::copy(row.begin(), row.end(), m.transition_.begin() + (s * na + a) * ns);
    }
  }

  if (raw.omega.empty()) {
    m.omega_.assign(ns, 1.0);
  } else {
    if (raw.omega.size() != ns) throw ValidationError(K::Shape, "omega must have n_states entries");
    for (StateIndex s = 0; s < ns; ++s) {
      if (!(raw.omega[s] >= 1.0) || !std::isfinite(raw.omega[s]))
        throw ValidationError(K::BadParameter,
                              "bad parameter: omega(" + std::to_string(s) + ") = " + detail::fmt(raw.omega[s]) + " < 1",
                              s);
    }
    m.omega_ = raw.omega;
  }

  m.beta_ = raw.beta;
  m.rho_ = raw.rho;
  m.gamma_ = raw.gamma;
  m.name_ = raw.name;
  return m;
}

// ---------------------------------------------------------------------------
// Regime classification

enum class CaseClass { Case1, Case2, Case3, Case4, ThetaOne, Unsupported };

inline const char* to_string(CaseClass c) {
  switch (c) {
    case CaseClass::Case1: return "Case1";
    case CaseClass::Case2: return "Case2";
    case CaseClass::Case3: return "Case3";
    case CaseClass::Case4: return "Case4";
    case CaseClass::ThetaOne: return "ThetaOne";
    case CaseClass::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

/// Case1: 0<rho<gamma<1, Case2: 0<gamma<rho<1, Case3: 1<rho<gamma,
/// Case4: 1<gamma<rho, ThetaOne: rho == gamma. Mixed regimes are Unsupported.
constexpr CaseClass classify(double rho, double gamma) noexcept {
  if (rho == gamma) return CaseClass::ThetaOne;
  if (rho < 1.0 && gamma < 1.0) return rho < gamma ? CaseClass::Case1 : CaseClass::Case2;
  if (rho > 1.0 && gamma > 1.0) return rho < gamma ? CaseClass::Case3 : CaseClass::Case4;
  return CaseClass::Unsupported;
}

// ---------------------------------------------------------------------------
// Weighted sup norm

inline double omega_norm(std::span<const double> values, std::span<const double> omega) {
  double n = 0.0;
  for (std::size_t s = 0; s < values.size(); ++s) n = std::max(n, std::abs(values[s]) / omega[s]);
  return n;
}

inline double omega_distance(std::span<const double> a, std::span<const double> b,
                             std::span<const double> omega) {
  double n = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) n = std::max(n, std::abs(a[s] - b[s]) / omega[s]);
  return n;
}

enum class Space { W, V };

/// Per-state values tagged with the space they live in.
struct ValueFn {
  std::vector<double> values;
  Space space = Space::W;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](StateIndex s) const { return values[s]; }
  double omega_norm(std::span<const double> omega) const { return ezdp::omega_norm(values, omega); }

  static ValueFn zero(std::size_t n, Space space = Space::W) { return {std::vector<double>(n, 0.0), space}; }
};

// ---------------------------------------------------------------------------
// Derived constants

struct DerivedParams {
  std::size_t n_actions = 0;
  /// r[s * n_actions + a] = (1 - beta) u(s,a)^(1 - rho); zero on infeasible pairs.
  std::vector<double> r_table;
  double theta = 0.0;
  CaseClass case_class = CaseClass::Unsupported;
  /// Case whose operator is used; ThetaOne resolves to Case2 or Case3.
  CaseClass machinery = CaseClass::Unsupported;
  double M = 0.0;
  double c = 1.0;
  double delta = 0.0;
  /// Power taking w-space values to v-space: 1/(1-gamma) for the Case1/Case4
  /// operators, 1/(1-rho) for Case2/Case3.
  double exponent_back = 1.0;

  double r(StateIndex s, ActionIndex a) const { return r_table[s * n_actions + a]; }
};

inline std::string describe_unsupported(double rho, double gamma) {
  std::string regime = rho < 1.0 ? "rho < 1 < gamma" : "gamma < 1 < rho";
  return "unsupported regime " + regime + " (rho = " + detail::fmt(rho) + ", gamma = " +
         detail::fmt(gamma) + "): no transformed Bellman operator is a contraction here";
}

/// Computes r, theta, the growth constants and the contraction modulus.
/// Throws UnsupportedCase for mixed regimes and NotAContraction if delta >= 1.
inline DerivedParams derive(const Mdp& m) {
  DerivedParams d;
  d.case_class = classify(m.rho(), m.gamma());
  if (d.case_class == CaseClass::Unsupported) throw UnsupportedCase(describe_unsupported(m.rho(), m.gamma()));

  d.machinery = d.case_class;
  if (d.case_class == CaseClass::ThetaOne) d.machinery = m.rho() < 1.0 ? CaseClass::Case2 : CaseClass::Case3;

  const std::size_t ns = m.n_states();
  const std::size_t na = m.n_actions();
  const auto omega = m.omega();
  d.n_actions = na;
  d.theta = (1.0 - m.gamma()) / (1.0 - m.rho());
  d.r_table.assign(ns * na, 0.0);

  const bool linear_weight = d.machinery == CaseClass::Case1 || d.machinery == CaseClass::Case4;
  double c = 1.0;
  double M = 0.0;
  for (StateIndex s = 0; s < ns; ++s) {
    const double ws = linear_weight ? omega[s] : std::pow(omega[s], d.theta);
    for (ActionIndex a : m.feasible(s)) {
      const double r = (1.0 - m.beta()) * std::pow(m.utility(s, a), 1.0 - m.rho());
      d.r_table[s * na + a] = r;
      M = std::max(M, r / omega[s]);
      const auto row = m.transition(s, a);
      double growth = 0.0;
      for (StateIndex t = 0; t < ns; ++t) {
        if (row[t] > 0.0) growth += row[t] * (linear_weight ? omega[t] : std::pow(omega[t], d.theta));
      }
      c = std::max(c, growth / ws);
    }
  }
  d.M = M;
  d.c = c;
  d.exponent_back = linear_weight ? 1.0 / (1.0 - m.gamma()) : 1.0 / (1.0 - m.rho());
  d.delta = linear_weight ? c * std::pow(m.beta(), d.theta) : std::pow(c, 1.0 / d.theta) * m.beta();
  if (!(d.delta < 1.0)) throw NotAContraction(d.delta);
  return d;
}

}  // namespace ezdp
