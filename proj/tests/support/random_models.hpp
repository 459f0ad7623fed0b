#pragma once

#include <random>
#include <vector>

#include "ezdp.hpp"

namespace ezdp::testing {

struct RandomModelOptions {
  std::size_t max_states = 8;
  std::size_t max_actions = 4;
  bool random_omega = true;
  double max_delta = 0.95;
  double zero_utility_prob = 0.0;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// (rho, gamma) drawn inside the regime with |theta| and the back-transform
/// exponent kept moderate.
inline std::pair<double, double> random_parameters(CaseClass c, std::mt19937_64& rng) {
  switch (c) {
    case CaseClass::Case1: {
      const double rho = uniform(rng, 0.1, 0.7);
      return {rho, uniform(rng, rho + 0.05, 0.8)};
    }
    case CaseClass::Case2: {
      const double gamma = uniform(rng, 0.1, 0.7);
      return {uniform(rng, gamma + 0.05, 0.8), gamma};
    }
    case CaseClass::Case3: {
      const double rho = uniform(rng, 1.2, 2.5);
      return {rho, uniform(rng, rho + 0.1, std::min(rho + 1.5, 1.0 + 4.0 * (rho - 1.0)))};
    }
    case CaseClass::Case4: {
      const double gamma = uniform(rng, 1.2, 2.5);
      return {uniform(rng, gamma + 0.1, gamma + 2.0), gamma};
    }
    case CaseClass::ThetaOne: {
      const double rho = rng() % 2 ? uniform(rng, 0.1, 0.8) : uniform(rng, 1.2, 2.5);
      return {rho, rho};
    }
    default: break;
  }
  return {0.5, 2.0};
}

inline RawModel random_raw_model(CaseClass c, std::mt19937_64& rng, const RandomModelOptions& opt = {}) {
  RawModel m;
  m.n_states = 1 + rng() % opt.max_states;
  m.n_actions = 1 + rng() % opt.max_actions;
  std::tie(m.rho, m.gamma) = random_parameters(c, rng);
  m.beta = uniform(rng, 0.3, 0.95);
  const bool may_zero = opt.zero_utility_prob > 0.0 && m.rho < 1.0;
  m.feasible.resize(m.n_states);
  m.utility.assign(m.n_states, std::vector<std::optional<double>>(m.n_actions));
  m.transition.assign(m.n_states, std::vector<std::vector<double>>(m.n_actions));
  for (StateIndex s = 0; s < m.n_states; ++s) {
    for (ActionIndex a = 0; a < m.n_actions; ++a)
      if (uniform(rng, 0, 1) < 0.7) m.feasible[s].push_back(a);
    if (m.feasible[s].empty()) m.feasible[s].push_back(rng() % m.n_actions);
    for (ActionIndex a : m.feasible[s]) {
      m.utility[s][a] = may_zero && uniform(rng, 0, 1) < opt.zero_utility_prob ? 0.0 : uniform(rng, 0.5, 5.0);
      std::vector<double> row(m.n_states);
      double sum = 0.0;
      for (auto& p : row) {
        p = uniform(rng, 0, 1) < 0.3 ? 0.0 : uniform(rng, 0, 1);
        sum += p;
      }
      if (sum == 0.0) {
        row[rng() % m.n_states] = 1.0;
        sum = 1.0;
      }
      for (auto& p : row) p /= sum;
      m.transition[s][a] = std::move(row);
    }
  }
  if (opt.random_omega) {
    m.omega.resize(m.n_states);
    for (auto& w : m.omega) w = uniform(rng, 1.0, 3.0);
  }
  return m;
}

/// Redraws until derive succeeds with delta <= max_delta; falls back to the
/// unit weight when a random weight keeps the modulus too large.
inline Mdp random_model(CaseClass c, std::mt19937_64& rng, const RandomModelOptions& opt = {}) {
  for (int attempt = 0;; ++attempt) {
    RawModel raw = random_raw_model(c, rng, opt);
    if (attempt >= 20) raw.omega.clear();
    Mdp m = validate(raw);
    try {
      if (derive(m).delta <= opt.max_delta) return m;
    } catch (const NotAContraction&) {
    }
  }
}

inline ValueFn random_w(std::size_t n, std::span<const double> omega, std::mt19937_64& rng, double scale = 3.0,
                        double floor = 0.0) {
  ValueFn w{std::vector<double>(n), Space::W};
  for (std::size_t s = 0; s < n; ++s) w.values[s] = uniform(rng, floor, scale * omega[s]);
  return w;
}

inline constexpr CaseClass kFourCases[] = {CaseClass::Case1, CaseClass::Case2, CaseClass::Case3, CaseClass::Case4};

/// Single-state model with one self-looping action.
inline RawModel constant_model(double u, double beta, double rho, double gamma) {
  RawModel m;
  m.n_states = 1;
  m.n_actions = 1;
  m.feasible = {{0}};
  m.utility = {{u}};
  m.transition = {{{1.0}}};
  m.beta = beta;
  m.rho = rho;
  m.gamma = gamma;
  return m;
}

/// The 2-state / 2-action Case1 fixture.
inline RawModel fixture_model() {
  RawModel m;
  m.name = "fixture-2x2-case1";
  m.n_states = 2;
  m.n_actions = 2;
  m.feasible = {{0, 1}, {0, 1}};
  m.utility = {{1.0, 2.0}, {3.0, 4.0}};
  m.transition = {{{0.7, 0.3}, {0.2, 0.8}}, {{0.4, 0.6}, {0.5, 0.5}}};
  m.beta = 0.9;
  m.rho = 0.5;
  m.gamma = 0.75;
  return m;
}

/// High-precision oracle values for fixture_model(), from
/// tests/oracles/fixture_oracle.py (10,000 iterations at 60 digits).
inline constexpr double kFixtureWStar[] = {1.3212654225332129437, 1.3385992939397545784};
inline constexpr double kFixtureVStar[] = {3.0476162366029300182, 3.2107195050166630864};
inline constexpr ActionIndex kFixturePolicy[] = {1, 1};

}  // namespace ezdp::testing
