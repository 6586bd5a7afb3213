#ifndef FRACQ_SPECFUN_HPP
#define FRACQ_SPECFUN_HPP

#include <vector>

namespace fracq::specfun {

struct AiryValue {
  double ai = 0.0;
  double ai_prime = 0.0;
  double argument = 0.0;
  /// Set when |x| > 50 and the result is an under/overflow-guarded value.
  bool out_of_range = false;
};

/// Airy function Ai and its derivative.
///
/// Maclaurin series for |x| <= 3, asymptotic expansions for |x| >= 8, and
/// Taylor re-expansion of y'' = x y in between: stepped outward from the
/// series on the oscillatory side and inward from the asymptotic values on
/// the decaying side (the stable direction for Ai in each case).
AiryValue airy_ai(double x);

enum class RootKind { ai_zero, ai_prime_zero };

struct RootTable {
  RootKind kind = RootKind::ai_zero;
  std::vector<double> roots;  ///< negative, strictly decreasing; roots[0] is the first zero
};

/// Asymptotic location of the n-th zero of the merged sequence
/// a'_1 > a_1 > a'_2 > a_2 > ...: -(3 pi/4 (n + 1/2))^(2/3).
double merged_root_estimate(int n);

/// The first `count` negative zeros of Ai or Ai', each to ~1e-14.
///
/// Seeds come from merged_root_estimate; brackets reach halfway to the
/// neighbouring seeds of the same kind, then bisection and Newton polish.
/// A bracket without a sign change throws ConvergenceError naming the index.
RootTable airy_roots(RootKind kind, int count);

/// Gamma function for x > 0; throws DomainError otherwise.
double gamma_fn(double x);

}  // namespace fracq::specfun

#endif  // FRACQ_SPECFUN_HPP
