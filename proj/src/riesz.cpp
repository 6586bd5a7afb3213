#include "fracq/riesz.hpp"

#include <algorithm>
#include <numbers>
#include <ostream>
#include <string>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/SpecialFunctions>

#include "fracq/io.hpp"

namespace fracq {
namespace {

using std::numbers::pi;

constexpr double kDecayThreshold = 1e-12;
constexpr double kReliableFraction = 0.9;
// Image terms are kept for separations up to this fraction of the period; beyond
// it the kernel grows like h^-alpha and only couples the outer grid margins.
constexpr double kImageReach = 0.8;

void require_grid(Eigen::Index n, double halfwidth) {
  if (n < 2 || n % 2 != 0) {
    throw DomainError("grid size must be even and >= 2, got " + std::to_string(n));
  }
  if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) {
    throw DomainError("grid half-width must be positive and finite");
  }
}

bool undecayed(const Eigen::VectorXcd& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return false;
  const double edge = std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
  return edge > kDecayThreshold * std::max(scale, 1.0);
}

// (-1)^k for k = m - n/2.
double centred_sign(Eigen::Index m, Eigen::Index n) {
  return (m - n / 2) % 2 == 0 ? 1.0 : -1.0;
}

bool even_integer(double alpha) {
  return std::abs(alpha - 2.0 * std::round(alpha / 2.0)) < 1e-14;
}

}  // namespace

Eigen::VectorXd SampledFunction::coordinates() const {
  Eigen::VectorXd x(size());
  for (Eigen::Index j = 0; j < size(); ++j) x(j) = coordinate(j);
  return x;
}

SampledFunction sample(Space space, double halfwidth, Eigen::Index n,
                       const std::function<std::complex<double>(double)>& f) {
  require_grid(n, halfwidth);
  SampledFunction s;
  s.space = space;
  s.halfwidth = halfwidth;
  s.samples.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) s.samples(j) = f(s.coordinate(j));
  if (!s.samples.allFinite()) throw DomainError("sampled function has non-finite values");
  return s;
}

void write_csv(std::ostream& out, const SampledFunction& f) {
  out << "coordinate,re,im\n";
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    out << format_number(f.coordinate(j)) << ',' << format_number(f.samples(j).real()) << ','
        << format_number(f.samples(j).imag()) << '\n';
  }
}

SampledFunction fourier_forward(const SampledFunction& psi, const PhysParams& params) {
  params.validate();
  if (psi.space != Space::position) throw DomainError("fourier_forward expects a position-space function");
  const Eigen::Index n = psi.size();
  require_grid(n, psi.halfwidth);
  Eigen::FFT<double> fft;
  Eigen::VectorXcd spectrum(n);
  fft.fwd(spectrum, psi.samples);

  SampledFunction phi;
  phi.space = Space::momentum;
  phi.halfwidth = pi * params.hbar * static_cast<double>(n) / (2.0 * psi.halfwidth);
  phi.boundary_warning = psi.boundary_warning || undecayed(psi.samples);
  phi.samples.resize(n);
  const double h = psi.spacing();
  for (Eigen::Index m = 0; m < n; ++m) {
    const Eigen::Index k = (m - n / 2 + n) % n;
    phi.samples(m) = h * centred_sign(m, n) * spectrum(k);
  }
  return phi;
}

SampledFunction fourier_inverse(const SampledFunction& phi, const PhysParams& params) {
  params.validate();
  if (phi.space != Space::momentum) throw DomainError("fourier_inverse expects a momentum-space function");
  const Eigen::Index n = phi.size();
  require_grid(n, phi.halfwidth);
  Eigen::VectorXcd spectrum(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    spectrum((m - n / 2 + n) % n) = centred_sign(m, n) * phi.samples(m);
  }
  SampledFunction psi;
  psi.space = Space::position;
  psi.halfwidth = pi * params.hbar * static_cast<double>(n) / (2.0 * phi.halfwidth);
  psi.boundary_warning = phi.boundary_warning;
  Eigen::FFT<double> fft;
  fft.inv(psi.samples, spectrum);
  psi.samples /= psi.spacing();
  return psi;
}

RieszOperator::RieszOperator(const PhysParams& params, double halfwidth, Eigen::Index n,
                             RieszOptions options)
    : alpha_(params.alpha), halfwidth_(halfwidth), n_(n) {
  params.validate();
  require_grid(n, halfwidth);
  if (alpha_ < 0.0) {
    throw DomainError("the grid Riesz operator needs 0 <= alpha <= 4 (alpha=" + std::to_string(alpha_) +
                      "); negative alpha is available only pointwise for the cosine ansatz");
  }
  const double h = 2.0 * halfwidth / static_cast<double>(n);
  const double hbar = params.hbar;
  multiplier_.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index signed_k = k < n / 2 ? k : k - n;
    const double q = 2.0 * pi * static_cast<double>(signed_k) / (static_cast<double>(n) * h);
    const double p = options.symbol == Symbol::spectral
                         ? hbar * std::abs(q)
                         : 2.0 * hbar / h * std::abs(std::sin(0.5 * q * h));
    multiplier_(k) = std::pow(p, alpha_);  // pow(0, 0) = 1
  }

  if (!options.whole_line || even_integer(alpha_)) return;
  // Off the diagonal the operator is the kernel c / |x - y|^(1+alpha); the periodic
  // images at x - y + 2Lm, m != 0, sum to Hurwitz zeta values.
  const double c = -std::pow(hbar, alpha_) * std::tgamma(1.0 + alpha_) * std::sin(0.5 * pi * alpha_) / pi;
  const double period = 2.0 * halfwidth;
  const double s = 1.0 + alpha_;
  const double scale = c * h * std::pow(period, -s);
  Eigen::VectorXcd kernel = Eigen::VectorXcd::Zero(2 * n);
  const auto reach = static_cast<Eigen::Index>(kImageReach * static_cast<double>(n));
  for (Eigen::Index m = 0; m <= reach; ++m) {
    const double u = static_cast<double>(m) / static_cast<double>(n);
    const double g = scale * (Eigen::numext::zeta(s, 1.0 + u) + Eigen::numext::zeta(s, 1.0 - u));
    kernel(m) = g;
    if (m > 0) kernel(2 * n - m) = g;
  }
  Eigen::FFT<double> fft;
  fft.fwd(image_kernel_, kernel);
}

Eigen::VectorXcd RieszOperator::apply(const Eigen::VectorXcd& samples) const {
  if (samples.size() != n_) {
    throw DomainError("sample count " + std::to_string(samples.size()) + " does not match operator size " +
                      std::to_string(n_));
  }
  Eigen::FFT<double> fft;
  Eigen::VectorXcd spectrum(n_);
  fft.fwd(spectrum, samples);
  spectrum.array() *= multiplier_.array();
  Eigen::VectorXcd out(n_);
  fft.inv(out, spectrum);
  if (image_kernel_.size() == 0) return out;

  Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(2 * n_);
  padded.head(n_) = samples;
  Eigen::VectorXcd padded_hat(2 * n_);
  fft.fwd(padded_hat, padded);
  padded_hat.array() *= image_kernel_.array();
  Eigen::VectorXcd images(2 * n_);
  fft.inv(images, padded_hat);
  out -= images.head(n_);
  return out;
}

SampledFunction RieszOperator::apply(const SampledFunction& psi) const {
  if (psi.space != Space::position) throw DomainError("the Riesz operator acts on position-space samples");
  if (std::abs(psi.halfwidth - halfwidth_) > 1e-12 * halfwidth_) {
    throw DomainError("grid half-width does not match the operator");
  }
  SampledFunction out;
  out.space = Space::position;
  out.halfwidth = halfwidth_;
  out.samples = apply(psi.samples);
  out.boundary_warning = psi.boundary_warning || undecayed(psi.samples);
  out.reliable_halfwidth = kReliableFraction * halfwidth_;
  return out;
}

SampledFunction riesz_apply(const SampledFunction& psi, const PhysParams& params, RieszOptions options) {
  return RieszOperator(params, psi.halfwidth, psi.size(), options).apply(psi);
}

quad::QuadResult riesz_pointwise_psi0_result(double x, const PhysParams& params, double tol) {
  params.validate();
  const double alpha = params.alpha;
  if (!(alpha > -1.0 && alpha < 1.0)) {
    throw DomainError("the single-integral representation converges absolutely only for -1 < alpha < 1, got alpha=" +
                      std::to_string(alpha));
  }
  const double a = params.halfwidth;
  if (!(std::abs(x) <= 2.0 * a)) {
    throw DomainError("riesz_pointwise_psi0 requires |x| <= 2a, got x=" + std::to_string(x));
  }
  const double k = 0.5 * pi * x / a;
  quad::Integrand in = quad::make_integrand([alpha, k](double p) {
    return std::pow(p, alpha) / (p * p - 1.0) * std::cos(0.5 * pi * p) * std::cos(k * p);
  });
  in.singular_points.push_back({1.0, -0.25 * pi * std::cos(k)});
  in.endpoint = quad::EndpointPower{0.0, alpha};
  in.tail_start = 4.0;
  const quad::Function envelope = [](double p) { return 0.5 / (1.0 - 1.0 / (p * p)); };
  for (double omega : {std::abs(0.5 * pi + k), std::abs(0.5 * pi - k)}) {
    in.tail.push_back({envelope, alpha - 2.0, omega, 0.0});
  }
  quad::QuadResult r = quad::integrate_semi_infinite(in, 0.0, tol);
  const double prefactor = -2.0 * params.amplitude / pi * std::pow(pi * params.hbar / (2.0 * a), alpha);
  r.value *= prefactor;
  r.abs_err_estimate *= std::abs(prefactor);
  return r;
}

double riesz_pointwise_psi0(double x, const PhysParams& params, double tol) {
  const quad::QuadResult r = riesz_pointwise_psi0_result(x, params, tol);
  if (!r.converged) {
    throw ConvergenceError("riesz_pointwise_psi0 at x=" + std::to_string(x) + " did not reach tolerance " +
                           std::to_string(tol) + " (estimate " + std::to_string(r.abs_err_estimate) + ")");
  }
  return r.value;
}

}  // namespace fracq
