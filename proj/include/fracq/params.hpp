#ifndef FRACQ_PARAMS_HPP
#define FRACQ_PARAMS_HPP

#include <stdexcept>
#include <string>

namespace fracq {

/// Thrown when an input violates an operation's domain of validity.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative numerical method exhausts its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical constants of one problem instance. Defaults are natural units.
struct PhysParams {
  double alpha = 1.0;     ///< fractional exponent, supported range (-1, 4]
  double hbar = 1.0;
  double d_alpha = 1.0;   ///< kinetic coefficient D_alpha
  double halfwidth = 1.0; ///< infinite-well half-width a
  double spring_k = 1.0;  ///< oscillator stiffness, V = k x^2 / 2
  double amplitude = 1.0; ///< amplitude A of the cosine ansatz

  /// Checks the global support of alpha and positivity of the constants.
  void validate() const;
};

inline void PhysParams::validate() const {
  if (!(alpha > -1.0 && alpha <= 4.0)) {
    throw DomainError("alpha=" + std::to_string(alpha) + " outside the supported range (-1, 4]");
  }
  if (!(hbar > 0.0) || !(d_alpha > 0.0) || !(halfwidth > 0.0) || !(spring_k > 0.0)) {
    throw DomainError("hbar, D_alpha, well half-width and spring constant must be strictly positive");
  }
}

inline PhysParams with_alpha(PhysParams p, double alpha) {
  p.alpha = alpha;
  return p;
}

}  // namespace fracq

#endif  // FRACQ_PARAMS_HPP
