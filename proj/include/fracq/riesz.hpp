#ifndef FRACQ_RIESZ_HPP
#define FRACQ_RIESZ_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <iosfwd>
#include <limits>

#include <Eigen/Core>

#include "fracq/params.hpp"
#include "fracq/quadrature.hpp"

namespace fracq {

enum class Space { position, momentum };

/// Uniform samples on [-L, L): coordinate_j = -L + j * 2L / n.
struct SampledFunction {
  Space space = Space::position;
  double halfwidth = 1.0;
  Eigen::VectorXcd samples;
  /// Boundary samples had not decayed below 1e-12 (aliasing risk).
  bool boundary_warning = false;
  /// Samples with |coordinate| above this are unreliable; infinity when all are usable.
  double reliable_halfwidth = std::numeric_limits<double>::infinity();

  Eigen::Index size() const { return samples.size(); }
  double spacing() const { return 2.0 * halfwidth / static_cast<double>(samples.size()); }
  double coordinate(Eigen::Index j) const { return -halfwidth + static_cast<double>(j) * spacing(); }
  Eigen::VectorXd coordinates() const;
  bool reliable(Eigen::Index j) const { return std::abs(coordinate(j)) <= reliable_halfwidth; }
};

/// Samples f on n points of [-L, L). n must be even and >= 2.
SampledFunction sample(Space space, double halfwidth, Eigen::Index n,
                       const std::function<std::complex<double>(double)>& f);

/// CSV with header "coordinate,re,im", 12 significant digits.
void write_csv(std::ostream& out, const SampledFunction& f);

/// phi(p) = int psi(x) exp(-i p x / hbar) dx on the grid p_k = pi hbar k / L, k = -n/2 .. n/2-1.
SampledFunction fourier_forward(const SampledFunction& psi, const PhysParams& params);

/// psi(x) = (1 / 2 pi hbar) int phi(p) exp(i p x / hbar) dp; inverse of fourier_forward.
/// The momentum grid must be the one fourier_forward produces for the target halfwidth
/// L = pi hbar n / (2 P).
SampledFunction fourier_inverse(const SampledFunction& phi, const PhysParams& params);

enum class Symbol {
  spectral,  ///< |p|^alpha
  lattice,   ///< |2 hbar / h sin(p h / 2 hbar)|^alpha, the fractional power of the 3-point Laplacian
};

struct RieszOptions {
  Symbol symbol = Symbol::spectral;
  /// Subtract the periodic images so the result approximates the whole-line operator.
  /// Exact for inputs that vanish on the outer 20% of the grid.
  bool whole_line = true;
};

/// The multiplier |p|^alpha on one grid, with the image kernel precomputed.
class RieszOperator {
 public:
  RieszOperator(const PhysParams& params, double halfwidth, Eigen::Index n, RieszOptions options = {});

  SampledFunction apply(const SampledFunction& psi) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& samples) const;

  double alpha() const { return alpha_; }
  double halfwidth() const { return halfwidth_; }
  Eigen::Index size() const { return n_; }

 private:
  double alpha_;
  double halfwidth_;
  Eigen::Index n_;
  Eigen::VectorXd multiplier_;     // in FFT order
  Eigen::VectorXcd image_kernel_;  // transformed, length 2n; empty when unused
};

/// Whole-line |p|^alpha applied on the grid of psi. Requires 0 <= alpha <= 4.
/// The outer 10% of the grid is marked unreliable.
SampledFunction riesz_apply(const SampledFunction& psi, const PhysParams& params,
                            RieszOptions options = {});

/// The Riesz derivative of the cosine ansatz A cos(pi x / 2a) on |x| <= a at one point,
/// from its single-integral representation. Requires -1 < alpha < 1 and |x| <= 2a.
double riesz_pointwise_psi0(double x, const PhysParams& params, double tol = 1e-10);

/// Same value with the quadrature error estimate (scaled to the result).
quad::QuadResult riesz_pointwise_psi0_result(double x, const PhysParams& params, double tol = 1e-10);

}  // namespace fracq

#endif  // FRACQ_RIESZ_HPP
