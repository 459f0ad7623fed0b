#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ezdp/model.hpp"
#include "ezdp/operators.hpp"

// Convergence constants of the monotone convex/concave fixed-point theorem
// (order interval [g1, g2], boundary inequality with epsilon, constant B and
// rate 1 - epsilon), set against the Banach contraction constants.

namespace ezdp {

enum class DuKind { Convex, Concave };

inline const char* to_string(DuKind k) { return k == DuKind::Convex ? "Convex" : "Concave"; }

/// Summary statistics of r that determine the boundary computations on
/// constant functions.
struct DuProfile {
  DuKind kind = DuKind::Convex;
  double m_low = 0.0;   ///< min over feasible pairs of r
  double M_high = 0.0;  ///< max over feasible pairs of r
  double minmax = 0.0;  ///< min_s max_a r(s,a)
  double maxmin = 0.0;  ///< max_s min_a r(s,a)
  double beta = 0.0;
  double theta = 0.0;

  /// Open interval of the free parameter: y in (0, inf) for Convex,
  /// x in (0, m_low) for Concave.
  double param_upper() const noexcept {
    return kind == DuKind::Convex ? std::numeric_limits<double>::infinity() : m_low;
  }
};

inline void check_profile(const DuProfile& p) {
  if (p.kind == DuKind::Convex && !(p.theta > 0.0 && p.theta < 1.0))
    throw DomainError("convex profile requires theta in (0,1), got " + detail::fmt(p.theta));
  if (p.kind == DuKind::Concave && !(p.theta > 1.0))
    throw DomainError("concave profile requires theta > 1, got " + detail::fmt(p.theta));
  if (p.kind == DuKind::Concave && !(p.m_low > 0.0)) throw DomainError("concave profile requires min r > 0");
  if (!(p.beta >= 0.0 && p.beta < 1.0)) throw DomainError("beta must lie in [0,1)");
  if (!(p.m_low <= p.minmax && p.maxmin <= p.M_high && p.m_low <= p.maxmin && p.minmax <= p.M_high))
    throw DomainError("inconsistent r extremes in profile");
}

/// Bounded convex setting with M = 1, min_s max_a r = 0, beta = 0.9,
/// rho = 1/2, gamma = 3/4.
inline DuProfile example1_profile() { return {DuKind::Convex, 0.0, 1.0, 0.0, 0.0, 0.9, 0.5}; }

/// Bounded concave setting with m = 1, M = 5, max_s min_a r = 3, beta = 0.9,
/// rho = 1.25, gamma = 1.5.
inline DuProfile example2_profile() { return {DuKind::Concave, 1.0, 5.0, 5.0, 3.0, 0.9, 2.0}; }

/// Profile of a Case1 (convex) or Case3 (concave) model. Other regimes have
/// operators that are neither convex nor concave.
inline DuProfile make_profile(const Mdp& m, const DerivedParams& d) {
  DuProfile p;
  if (d.case_class == CaseClass::Case1) p.kind = DuKind::Convex;
  else if (d.case_class == CaseClass::Case3) p.kind = DuKind::Concave;
  else
    throw UnsupportedCase(std::string("Du bounds need a convex (Case1) or concave (Case3) operator; got ") +
                          to_string(d.case_class));
  p.m_low = INFINITY;
  p.M_high = -INFINITY;
  p.minmax = INFINITY;
  p.maxmin = -INFINITY;
  for (StateIndex s = 0; s < m.n_states(); ++s) {
    double lo = INFINITY, hi = -INFINITY;
    for (ActionIndex a : m.feasible(s)) {
      lo = std::min(lo, d.r(s, a));
      hi = std::max(hi, d.r(s, a));
    }
    p.m_low = std::min(p.m_low, lo);
    p.M_high = std::max(p.M_high, hi);
    p.minmax = std::min(p.minmax, hi);
    p.maxmin = std::max(p.maxmin, lo);
  }
  p.beta = m.beta();
  p.theta = d.theta;
  return p;
}

/// Order interval endpoints and the images T g1, T g2 (one entry per state).
struct BoundaryData {
  double g1;
  double g2;
  std::vector<double> Tg1;
  std::vector<double> Tg2;
};

namespace detail {

/// (r + beta g^(1/theta))^theta for a constant g.
inline double du_body(double r, double beta, double theta, double g) {
  return pow_nonneg(r + beta * pow_nonneg(g, 1.0 / theta), theta);
}

/// T applied to a constant function on the model: optimizer over actions
/// of [r + beta (sum q g)^(1/theta)]^theta, max for convex, min for concave.
inline std::vector<double> model_constant_image(const Mdp& m, const DerivedParams& d, double g, DuKind kind) {
  std::vector<double> out(m.n_states());
  for (StateIndex s = 0; s < m.n_states(); ++s) {
    double best = kind == DuKind::Convex ? -INFINITY : INFINITY;
    for (ActionIndex a : m.feasible(s)) {
      const double h = du_body(d.r(s, a), m.beta(), d.theta, g);
      best = kind == DuKind::Convex ? std::max(best, h) : std::min(best, h);
    }
    out[s] = best;
  }
  return out;
}

/// On constants only the per-state optimal r matters, and the sup/inf over
/// states is attained at the two extremes recorded in the profile.
inline std::vector<double> profile_constant_image(const DuProfile& p, double g) {
  const double a = p.kind == DuKind::Convex ? p.M_high : p.m_low;
  const double b = p.kind == DuKind::Convex ? p.minmax : p.maxmin;
  return {du_body(a, p.beta, p.theta, g), du_body(b, p.beta, p.theta, g)};
}

inline double max_abs_diff(const std::vector<double>& xs, double c) {
  double n = 0.0;
  for (double x : xs) n = std::max(n, std::abs(x - c));
  return n;
}

}  // namespace detail

/// Largest epsilon in (0,1) with T g2 <= (1-eps) g2 + eps g1 (Convex) or
/// T g1 >= (1-eps) g1 + eps g2 (Concave) at every state, by bisection on the
/// pointwise inequality down to adjacent doubles. Verifies first that T maps
/// [g1, g2] into itself.
inline double du_epsilon_max(const BoundaryData& b, DuKind kind) {
  if (!(b.g1 < b.g2)) throw BoundaryConditionFails("order interval [g1, g2] has empty interior");
  for (double t : b.Tg1)
    if (t < b.g1) throw BoundaryConditionFails("T g1 < g1: interval not invariant");
  for (double t : b.Tg2)
    if (t > b.g2) throw BoundaryConditionFails("T g2 > g2: interval not invariant");

  // Rearranged as a margin against eps (g2 - g1) so that an epsilon too small
  // to move (1-eps) g2 in floating point is not accepted.
  const double width = b.g2 - b.g1;
  auto holds = [&](double eps) {
    if (kind == DuKind::Convex)
      return std::all_of(b.Tg2.begin(), b.Tg2.end(), [&](double t) { return b.g2 - t >= eps * width; });
    return std::all_of(b.Tg1.begin(), b.Tg1.end(), [&](double t) { return t - b.g1 >= eps * width; });
  };

  double lo = 0.0, hi = 1.0;
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (holds(mid) ? lo : hi) = mid;
  }
  if (!(lo > 0.0)) throw BoundaryConditionFails("no epsilon > 0 satisfies the boundary condition");
  return lo;
}

/// B = ||g1 - g2|| + 2 defect / eps^2 with the sup norm (normal cone constant 1).
inline double du_B(double g1, double g2, double boundary_defect, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");
  return std::abs(g1 - g2) + 2.0 * boundary_defect / (epsilon * epsilon);
}

/// Boundary constants at one value of the free parameter.
struct DuPoint {
  double param;
  double g1;
  double g2;
  double epsilon;
  double defect;
  double B;
  double rate;     ///< 1 - epsilon
  double product;  ///< B (1 - epsilon)
};

/// g1, g2 as functions of the free parameter: Convex g1 = 0,
/// g2 = ((M + y)/(1-beta))^theta; Concave g1 = (x/(1-beta))^theta,
/// g2 = (M/(1-beta))^theta.
inline std::pair<double, double> du_interval(const DuProfile& p, double param) {
  const double scale = 1.0 / (1.0 - p.beta);
  if (p.kind == DuKind::Convex) return {0.0, std::pow((p.M_high + param) * scale, p.theta)};
  return {std::pow(param * scale, p.theta), std::pow(p.M_high * scale, p.theta)};
}

inline DuPoint du_point(const BoundaryData& b, DuKind kind, double param) {
  DuPoint pt{param, b.g1, b.g2, 0.0, 0.0, 0.0, 0.0, 0.0};
  pt.epsilon = du_epsilon_max(b, kind);
  pt.defect = kind == DuKind::Convex ? detail::max_abs_diff(b.Tg2, b.g2) : detail::max_abs_diff(b.Tg1, b.g1);
  pt.B = du_B(b.g1, b.g2, pt.defect, pt.epsilon);
  pt.rate = 1.0 - pt.epsilon;
  pt.product = pt.B * pt.rate;
  return pt;
}

/// Boundary data from the profile's extremes.
inline BoundaryData du_boundary(const DuProfile& p, double param) {
  const auto [g1, g2] = du_interval(p, param);
  return {g1, g2, detail::profile_constant_image(p, g1), detail::profile_constant_image(p, g2)};
}

/// Boundary data from the model's own operator.
inline BoundaryData du_boundary(const Mdp& m, const DerivedParams& d, const DuProfile& p, double param) {
  const auto [g1, g2] = du_interval(p, param);
  return {g1, g2, detail::model_constant_image(m, d, g1, p.kind), detail::model_constant_image(m, d, g2, p.kind)};
}

/// Model route for a given interval.
inline double du_epsilon_max(const Mdp& m, const DerivedParams& d, double g1, double g2, DuKind kind) {
  return du_epsilon_max(BoundaryData{g1, g2, detail::model_constant_image(m, d, g1, kind),
                                     detail::model_constant_image(m, d, g2, kind)},
                        kind);
}

// ---------------------------------------------------------------------------
// Banach side

/// L = ||F 0^ - 0^||_omega / (1 - delta) for the model's case operator.
inline double banach_L(const Mdp& m, const DerivedParams& d) {
  const ValueFn f0 = apply_F(m, d, ValueFn::zero(m.n_states()));
  return f0.omega_norm(m.omega()) / (1.0 - d.delta);
}

/// Contraction modulus for bounded r with unit weight: beta^theta for the
/// convex case, beta for the concave one.
inline double banach_delta(const DuProfile& p) {
  return p.kind == DuKind::Convex ? std::pow(p.beta, p.theta) : p.beta;
}

// ---------------------------------------------------------------------------
// Parameter optimization

inline constexpr std::size_t kScanPoints = 64;
inline constexpr double kParamTolerance = 1e-8;

/// Golden-section minimization of a unimodal f on [a, b]; stops when the
/// bracket maps to a parameter interval narrower than `tol`.
template <class F, class Map>
double golden_section_minimize(F&& f, double a, double b, Map&& to_param, double tol, std::size_t max_iter = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double e = a + inv_phi * (b - a);
  double fc = f(c), fe = f(e);
  for (std::size_t i = 0; i < max_iter && std::abs(to_param(b) - to_param(a)) > tol; ++i) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = f(e);
    }
  }
  return 0.5 * (a + b);
}

struct DuBoundReport {
  DuKind kind;
  double param_star;
  double epsilon;
  double B;
  double rate;
  double product;
  double banach_delta;
  double banach_L;
  /// "Banach" when delta < 1 - epsilon(param_star), "Du" otherwise.
  std::string winner;
  /// More than one local minimum of B(1-eps) on the bracketing grid.
  bool multimodal;
  /// Minimizer of 1 - epsilon alone, when it is interior.
  std::optional<DuPoint> rate_only;
  std::string rate_only_note;
};

namespace detail {

struct ScanResult {
  double t_lo, t_hi;
  bool multimodal;
};

/// 64-point scan over t in (0,1); returns a bracket around the grid
/// minimum or nothing when the minimum sits on the scan boundary.
template <class Obj>
std::optional<ScanResult> bracket_scan(Obj&& obj) {
  std::vector<double> ts(kScanPoints), fs(kScanPoints);
  for (std::size_t i = 0; i < kScanPoints; ++i) {
    ts[i] = static_cast<double>(i + 1) / static_cast<double>(kScanPoints + 1);
    fs[i] = obj(ts[i]);
  }
  const auto best = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  if (!std::isfinite(fs[best]) || best == 0 || best + 1 == kScanPoints) return std::nullopt;
  std::size_t minima = 0;
  for (std::size_t i = 1; i + 1 < kScanPoints; ++i)
    if (std::isfinite(fs[i]) && fs[i] < fs[i - 1] && fs[i] < fs[i + 1]) ++minima;
  return ScanResult{ts[best - 1], ts[best + 1], minima > 1};
}

}  // namespace detail

/// Minimizes B(p)(1 - eps(p)) over the profile's parameter range, with
/// `boundary(p)` supplying the interval data. Convex profiles use
/// y = t/(1-t), concave ones x = m t, with t in (0,1).
template <class Boundary>
DuBoundReport du_optimize_rate(const DuProfile& profile, Boundary&& boundary, double banach_delta_value,
                               double banach_L_value, bool with_rate_only = true) {
  check_profile(profile);
  const DuKind kind = profile.kind;
  auto to_param = [&](double t) { return kind == DuKind::Convex ? t / (1.0 - t) : profile.m_low * t; };
  auto point = [&](double t) -> std::optional<DuPoint> {
    try {
      return du_point(boundary(to_param(t)), kind, to_param(t));
    } catch (const BoundaryConditionFails&) {
      return std::nullopt;
    }
  };
  auto product_obj = [&](double t) {
    auto pt = point(t);
    return pt ? pt->product : std::numeric_limits<double>::infinity();
  };
  // epsilon directly rather than 1 - epsilon keeps full precision near the
  // flat optimum.
  auto rate_obj = [&](double t) {
    auto pt = point(t);
    return pt ? -pt->epsilon : std::numeric_limits<double>::infinity();
  };

  const auto scan = detail::bracket_scan(product_obj);
  if (!scan) throw OptimizationFailed("no interior minimum of B(1-eps) bracketed on the parameter range");
  const double t_star = golden_section_minimize(product_obj, scan->t_lo, scan->t_hi, to_param, kParamTolerance);
  const auto best = point(t_star);
  if (!best) throw OptimizationFailed("boundary condition fails at the located optimum");

  DuBoundReport rep{kind,        best->param, best->epsilon, best->B, best->rate, best->product, banach_delta_value,
                    banach_L_value, "",      scan->multimodal, std::nullopt, ""};
  rep.winner = banach_delta_value < best->rate ? "Banach" : "Du";

  if (with_rate_only) {
    if (const auto rscan = detail::bracket_scan(rate_obj)) {
      const double t1 = golden_section_minimize(rate_obj, rscan->t_lo, rscan->t_hi, to_param, kParamTolerance);
      rep.rate_only = point(t1);
    }
    if (!rep.rate_only)
      rep.rate_only_note = "1 - eps(p) has no interior minimizer; its infimum is approached at the range boundary";
  }
  return rep;
}

/// Profile route: epsilon and B from the profile's extreme values; the
/// Banach constant is the a-priori one, M / (1 - delta).
inline DuBoundReport du_optimize_rate(const DuProfile& profile, bool with_rate_only = true) {
  const double delta = banach_delta(profile);
  return du_optimize_rate(
      profile, [&](double p) { return du_boundary(profile, p); }, delta, profile.M_high / (1.0 - delta),
      with_rate_only);
}

/// Model route: epsilon and B from the model's operator on constants; the
/// Banach side uses the model's delta and the measured ||F 0^|| / (1 - delta).
inline DuBoundReport du_optimize_rate(const Mdp& m, const DerivedParams& d, bool with_rate_only = true) {
  const DuProfile profile = make_profile(m, d);
  return du_optimize_rate(
      profile, [&](double p) { return du_boundary(m, d, profile, p); }, d.delta, banach_L(m, d), with_rate_only);
}

}  // namespace ezdp
