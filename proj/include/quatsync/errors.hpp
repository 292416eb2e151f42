#pragma once

#include <stdexcept>
#include <string>

namespace quatsync {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A pairwise imaginary distance exceeded the guard value v_max, so the
/// hyperbolic coupling terms are about to overflow. Signals divergence of
/// the trajectory, not a bug.
struct BlowUpError : Error {
  double t;
  double v;
  BlowUpError(double t_, double v_)
      : Error("imaginary spread " + std::to_string(v_) + " exceeded guard at t=" +
              std::to_string(t_)),
        t(t_),
        v(v_) {}
};

/// Matrix is not (within tolerance) in the image of the quaternion embedding.
struct NotInMError : Error {
  double deviation;
  explicit NotInMError(double dev)
      : Error("matrix violates embedding membership by " + std::to_string(dev)),
        deviation(dev) {}
};

/// Requested a weak-coupling construction with lambda >= omega.
struct NotWeakError : Error {
  NotWeakError() : Error("coupling is not weak (lambda >= omega)") {}
};

/// Orbit detection ran out of time/steps before the section return.
struct NoReturnError : Error {
  explicit NoReturnError(const std::string& what) : Error(what) {}
};

/// Equilibrium classification was asked about a point that is not one.
struct NotEquilibriumError : Error {
  double residual;
  explicit NotEquilibriumError(double r)
      : Error("vector field residual " + std::to_string(r) + " too large"), residual(r) {}
};

/// The premise of the exponential-decay bound failed along the trajectory.
struct HypothesisViolatedError : Error {
  double t_violation;
  explicit HypothesisViolatedError(double t)
      : Error("real-part spread premise violated at t=" + std::to_string(t)),
        t_violation(t) {}
};

struct MaxStepsExceededError : Error {
  MaxStepsExceededError() : Error("integration exceeded max_steps") {}
};

}  // namespace quatsync
