#ifndef FRACQ_QUADRATURE_HPP
#define FRACQ_QUADRATURE_HPP

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace fracq::quad {

using Function = std::function<double(double)>;

constexpr double kDefaultTolerance = 1e-10;
constexpr std::size_t kEvaluationBudget = 1'000'000;

/// Interior point where the integrand formula is 0/0 but has a finite limit.
struct SingularPoint {
  double location = 0.0;
  /// Limit value at the point; estimated by two-sided Richardson extrapolation when empty.
  std::optional<double> limit;
};

/// Endpoint behaviour f(p) ~ |p - at|^exponent ln^log_power |p - at| with exponent > -1
/// and log_power 0 or 1.
struct EndpointPower {
  double at = 0.0;
  double exponent = 0.0;
  int log_power = 0;
};

/// One piece p^power ln^log_power(p) * envelope(p) * cos(frequency * p + phase) of an
/// exact large-p decomposition of an integrand. The envelope must stay O(1) and
/// vary slowly; it may receive very large p (up to ~1e300).
struct TailTerm {
  Function envelope;
  double power = -2.0;
  double frequency = 0.0;
  double phase = 0.0;
  int log_power = 0;
};

/// Integrand with the structural information the adaptive rules need.
struct Integrand {
  Function evaluator;
  std::vector<SingularPoint> singular_points;
  /// |f(p)| <= C p^decay_exponent as p -> infinity. NaN means "not declared".
  double decay_exponent = std::numeric_limits<double>::quiet_NaN();
  /// Oscillation period for the accelerated half-period cell summation.
  std::optional<double> period;
  std::optional<EndpointPower> endpoint;
  /// When non-empty, f(p) equals the sum of these terms for every p >= tail_start.
  std::vector<TailTerm> tail;
  double tail_start = 0.0;
};

struct QuadResult {
  double value = 0.0;
  double abs_err_estimate = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;

  QuadResult& operator+=(const QuadResult& other) {
    value += other.value;
    abs_err_estimate += other.abs_err_estimate;
    converged = converged && other.converged;
    evaluations += other.evaluations;
    return *this;
  }
};

inline QuadResult operator+(QuadResult a, const QuadResult& b) { return a += b; }

inline Integrand make_integrand(Function f) {
  Integrand in;
  in.evaluator = std::move(f);
  return in;
}

/// Adaptive 7/15-point Gauss-Kronrod integration of f over [lo, hi].
///
/// Declared singular points inside the range become breakpoints; abscissae
/// closer than 1e-8 to one use its limit value. A declared endpoint power at
/// lo or hi is removed by the substitution p - lo = w u^(1/(1+exponent)).
/// Exhausting the evaluation budget yields converged=false with the best
/// estimate. A non-finite evaluator value throws ConvergenceError naming p.
QuadResult integrate_finite(const Integrand& f, double lo, double hi,
                            double tol = kDefaultTolerance);

/// Integral of f over [lo, infinity).
///
/// Paths, in order of preference:
///  - tail decomposition: [lo, tail_start] adaptively, then each tail term on
///    its own (power-law terms by an algebraic map of the tail onto (0, 1],
///    oscillatory terms by summing cells between consecutive zeros with Euler
///    acceleration);
///  - declared period: half-period cells with Euler acceleration (the cells
///    must alternate in sign);
///  - declared decay_exponent < -1: algebraic map of the tail.
/// Anything else throws DomainError.
QuadResult integrate_semi_infinite(const Integrand& f, double lo,
                                   double tol = kDefaultTolerance);

/// Integral of one tail term over [from, infinity).
QuadResult integrate_tail_term(const TailTerm& term, double from, double tol = kDefaultTolerance);

/// Euler-accelerated limit of a sequence of partial sums of an alternating
/// series: repeated averaging of neighbours. Returns {estimate, change of the
/// estimate when the last partial sum is dropped}.
std::pair<double, double> euler_limit(const std::vector<double>& partial_sums);

}  // namespace fracq::quad

#endif  // FRACQ_QUADRATURE_HPP
