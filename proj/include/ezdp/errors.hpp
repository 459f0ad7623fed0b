#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ezdp {

/// Base for every error raised by the library. `what()` carries the detail.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A raw model description violates one of the Mdp invariants.
class ValidationError : public Error {
 public:
  enum class Kind {
    Shape,
    EmptyFeasibleSet,
    NonStochasticRow,
    NegativeUtility,
    ZeroUtilityInNegativeExponentCase,
    BadParameter,
  };

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  ValidationError(Kind kind, std::string message, std::size_t state = npos,
                  std::size_t action = npos)
      : Error(std::move(message)), kind_(kind), state_(state), action_(action) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t state() const noexcept { return state_; }
  std::size_t action() const noexcept { return action_; }

 private:
  Kind kind_;
  std::size_t state_;
  std::size_t action_;
};

inline const char* to_string(ValidationError::Kind k) {
  switch (k) {
    case ValidationError::Kind::Shape: return "Shape";
    case ValidationError::Kind::EmptyFeasibleSet: return "EmptyFeasibleSet";
    case ValidationError::Kind::NonStochasticRow: return "NonStochasticRow";
    case ValidationError::Kind::NegativeUtility: return "NegativeUtility";
    case ValidationError::Kind::ZeroUtilityInNegativeExponentCase:
      return "ZeroUtilityInNegativeExponentCase";
    case ValidationError::Kind::BadParameter: return "BadParameter";
  }
  return "Unknown";
}

/// (rho, gamma) outside the four supported regimes and rho == gamma.
class UnsupportedCase : public Error {
 public:
  using Error::Error;
};

/// The growth condition on the weight fails: the modulus is not below one.
class NotAContraction : public Error {
 public:
  explicit NotAContraction(double delta)
      : Error("contraction modulus delta = " + std::to_string(delta) + " is not < 1"),
        delta_(delta) {}
  double delta() const noexcept { return delta_; }

 private:
  double delta_;
};

/// A power or aggregator was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InfeasibleAction : public Error {
 public:
  InfeasibleAction(std::size_t state, std::size_t action)
      : Error("action " + std::to_string(action) + " is not feasible at state " +
              std::to_string(state)),
        state_(state),
        action_(action) {}
  std::size_t state() const noexcept { return state_; }
  std::size_t action() const noexcept { return action_; }

 private:
  std::size_t state_;
  std::size_t action_;
};

class MaxIterationsExceeded : public Error {
 public:
  MaxIterationsExceeded(std::size_t iterations, double last_bound)
      : Error("no convergence after " + std::to_string(iterations) +
              " iterations (last a-posteriori bound " + std::to_string(last_bound) + ")"),
        iterations_(iterations),
        last_bound_(last_bound) {}
  std::size_t iterations() const noexcept { return iterations_; }
  double last_bound() const noexcept { return last_bound_; }

 private:
  std::size_t iterations_;
  double last_bound_;
};

/// The order interval is not invariant or no positive epsilon satisfies the
/// boundary inequality.
class BoundaryConditionFails : public Error {
 public:
  using Error::Error;
};

class OptimizationFailed : public Error {
 public:
  using Error::Error;
};

class AuditFailed : public Error {
 public:
  AuditFailed(std::string message, std::size_t plan, std::size_t state, double margin)
      : Error(std::move(message)), plan_(plan), state_(state), margin_(margin) {}
  std::size_t plan() const noexcept { return plan_; }
  std::size_t state() const noexcept { return state_; }
  double margin() const noexcept { return margin_; }

 private:
  std::size_t plan_;
  std::size_t state_;
  double margin_;
};

}  // namespace ezdp
