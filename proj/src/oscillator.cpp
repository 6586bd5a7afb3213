#include "fracq/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "fracq/io.hpp"
#include "fracq/parallel.hpp"
#include "fracq/quadrature.hpp"
#include "fracq/specfun.hpp"

namespace fracq {
namespace {

using std::numbers::pi;

void require_positive_alpha(double alpha, const char* what) {
  if (!(alpha > 0.0)) {
    throw DomainError(std::string(what) + " requires alpha > 0, got alpha=" + std::to_string(alpha));
  }
}

void require_level(int n) {
  if (n < 0) throw DomainError("level index must be >= 0, got " + std::to_string(n));
}

void require_count(int count) {
  if (count < 1) throw DomainError("level count must be >= 1, got " + std::to_string(count));
}

// y'' = q(p) y with q = c (D p^alpha - E), c = 2 / (k hbar^2), integrated by Numerov on [0, P].
class Shooter {
 public:
  Shooter(const PhysParams& params, double cutoff, int steps)
      : c_(2.0 / (params.spring_k * params.hbar * params.hbar)),
        d_(params.d_alpha),
        alpha_(params.alpha),
        cutoff_(cutoff),
        steps_(steps),
        h_(cutoff / steps) {
    potential_.resize(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) potential_[static_cast<std::size_t>(i)] = d_ * std::pow(i * h_, alpha_);
  }

  // Sign changes of phi on (0, P] for the given parity (0 even, 1 odd).
  int nodes(double energy, int parity) const {
    const double h = h_, h2 = h * h;
    const std::vector<double> head = series_start(energy, parity);
    int count = 0;
    double last_sign = 0.0;
    auto track = [&](double y) {
      if (y == 0.0) return;
      const double s = y > 0 ? 1.0 : -1.0;
      if (last_sign != 0.0 && s != last_sign) ++count;
      last_sign = s;
    };
    for (double y : head) track(y);
    const int start = static_cast<int>(head.size()) - 1;
    double y0 = head[head.size() - 2], y1 = head.back();
    auto weight = [&](int i) { return 1.0 - h2 * c_ * (potential_[static_cast<std::size_t>(i)] - energy) / 12.0; };
    double f0 = weight(start - 1), f1 = weight(start);
    for (int i = start; i < steps_; ++i) {
      const double f2 = weight(i + 1);
      const double y2 = ((12.0 - 10.0 * f1) * y1 - f0 * y0) / f2;
      track(y2);
      y0 = y1;
      y1 = y2;
      f0 = f1;
      f1 = f2;
      if (std::abs(y1) > 1e150) {
        y0 *= 1e-150;
        y1 *= 1e-150;
      }
    }
    return count;
  }

  // int_{p2}^{P} sqrt(q) dp: how deep the cutoff lies in the forbidden region.
  double decay_exponent(double energy) const { return forbidden_depth(energy, cutoff_); }

  double forbidden_depth(double energy, double to) const {
    const double p2 = std::pow(energy / d_, 1.0 / alpha_);
    if (to <= p2) return 0.0;
    const int m = 2000;
    const double dp = (to - p2) / m;
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      const double p = p2 + (i + 0.5) * dp;
      sum += std::sqrt(std::max(0.0, c_ * (d_ * std::pow(p, alpha_) - energy))) * dp;
    }
    return sum;
  }

  double cutoff() const { return cutoff_; }

 private:
  static constexpr int kSeriesPoints = 32;
  static constexpr int kPowers = 48;
  static constexpr int kAlphaPowers = 24;

  // phi on the first grid points from the series sum_{m,j} a(m,j) p^(m + j alpha), which
  // resolves the kink of |p|^alpha at the origin: a(m+2,j)(e+2)(e+1) = c D a(m,j-1) - c E a(m,j).
  std::vector<double> series_start(double energy, int parity) const {
    std::vector<double> a(static_cast<std::size_t>(kPowers * kAlphaPowers), 0.0);
    auto at = [&](int m, int j) -> double& { return a[static_cast<std::size_t>(m * kAlphaPowers + j)]; };
    at(parity, 0) = 1.0;
    for (int m = 0; m + 2 < kPowers; ++m) {
      for (int j = 0; j < kAlphaPowers; ++j) {
        const double e = m + j * alpha_;
        const double coupled = j > 0 ? c_ * d_ * at(m, j - 1) : 0.0;
        at(m + 2, j) = (coupled - c_ * energy * at(m, j)) / ((e + 2.0) * (e + 1.0));
      }
    }
    const int points = std::clamp(steps_ / 100, 2, kSeriesPoints) + 1;
    std::vector<double> y(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
      const double p = i * h_;
      double sum = 0.0;
      for (int j = 0; j < kAlphaPowers; ++j) {
        double inner = 0.0;
        for (int m = kPowers - 1; m >= 0; --m) inner = inner * p + at(m, j);
        sum += inner * (j == 0 ? 1.0 : std::pow(p, j * alpha_));
      }
      y[static_cast<std::size_t>(i)] = sum;
    }
    return y;
  }

  double c_, d_, alpha_, cutoff_;
  int steps_;
  double h_;
  std::vector<double> potential_;
};

constexpr double kAutoDepth = 20.0;
constexpr double kMinDepth = 10.0;

double auto_cutoff(const PhysParams& params, double e_max) {
  const double p2 = std::pow(e_max / params.d_alpha, 1.0 / params.alpha);
  double cutoff = 3.0 * p2;
  const Shooter probe(params, cutoff, 1);
  while (probe.forbidden_depth(e_max, cutoff) < kAutoDepth) cutoff *= 1.25;
  return cutoff;
}

double shoot_level(const Shooter& shooter, int n, double seed, double rel_tol) {
  const int k = n / 2, parity = n % 2;
  double lo = 0.5 * seed, hi = 1.5 * seed;
  for (int it = 0; shooter.nodes(lo, parity) > k; ++it) {
    if (it > 200) throw ConvergenceError("no lower energy bracket for level " + std::to_string(n));
    lo *= 0.5;
  }
  for (int it = 0; shooter.nodes(hi, parity) <= k; ++it) {
    if (it > 200) throw ConvergenceError("no upper energy bracket for level " + std::to_string(n));
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (shooter.nodes(mid, parity) <= k) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const int below = shooter.nodes(lo, parity), above = shooter.nodes(hi, parity);
  if (below != k || above != k + 1) {
    throw ConvergenceError("missed level near n=" + std::to_string(n) + ": node count jumps from " +
                           std::to_string(below) + " to " + std::to_string(above) + " at E=" + std::to_string(hi));
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string to_string(SpectrumMethod m) {
  switch (m) {
    case SpectrumMethod::wkb: return "wkb";
    case SpectrumMethod::airy_exact: return "airy_exact";
    case SpectrumMethod::shooting: return "shooting";
    case SpectrumMethod::wkb_numeric: return "wkb_numeric";
  }
  return "unknown";
}

SpectrumMethod parse_spectrum_method(const std::string& name) {
  if (name == "wkb") return SpectrumMethod::wkb;
  if (name == "airy" || name == "airy_exact") return SpectrumMethod::airy_exact;
  if (name == "shoot" || name == "shooting") return SpectrumMethod::shooting;
  if (name == "wkb_numeric" || name == "wkb-numeric") return SpectrumMethod::wkb_numeric;
  throw DomainError("unknown spectrum method '" + name + "' (expected wkb, wkb_numeric, airy, shoot)");
}

std::vector<double> Spectrum::energies() const {
  std::vector<double> e;
  for (const auto& l : levels) e.push_back(l.energy);
  return e;
}

TurningPoints turning_points(double energy, const PhysParams& params) {
  require_positive_alpha(params.alpha, "turning_points");
  if (!(energy > 0.0)) throw DomainError("turning points need E > 0");
  const double p2 = std::pow(energy / params.d_alpha, 1.0 / params.alpha);
  return {-p2, p2};
}

double wkb_energy(int n, const PhysParams& params) {
  params.validate();
  require_positive_alpha(params.alpha, "wkb_energy");
  require_level(n);
  const double alpha = params.alpha;
  const double base = (n + 0.5) * params.hbar * pi * std::sqrt(params.spring_k) *
                      std::pow(params.d_alpha, 1.0 / alpha) * std::tgamma(1.5 + 1.0 / alpha) /
                      (2.0 * std::sqrt(2.0) * std::tgamma(1.5) * std::tgamma(1.0 + 1.0 / alpha));
  return std::pow(base, 2.0 * alpha / (2.0 + alpha));
}

double wkb_energy_numeric(int n, const PhysParams& params, double rel_tol) {
  params.validate();
  require_positive_alpha(params.alpha, "wkb_energy_numeric");
  require_level(n);
  const double target = (n + 0.5) * pi * params.hbar;
  auto action = [&params, target](double energy) {
    const double p2 = turning_points(energy, params).p2;
    quad::Integrand in = quad::make_integrand([&params, energy](double p) {
      return std::sqrt(std::max(0.0, 2.0 / params.spring_k * (energy - params.d_alpha * std::pow(p, params.alpha))));
    });
    in.endpoint = quad::EndpointPower{p2, 0.5};
    const quad::QuadResult r = quad::integrate_finite(in, 0.0, p2, 1e-12 * target);
    return 2.0 * r.value;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; action(hi) < target; ++it) {
    if (it > 300) {
      throw ConvergenceError("WKB quantization bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                             "] never reached the target action");
    }
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (action(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double asymptotic_root(int n) {
  require_level(n);
  return specfun::merged_root_estimate(n);
}

double airy_energy(double root, const PhysParams& params) {
  const double scale = std::cbrt(params.spring_k * params.hbar * params.hbar * params.d_alpha * params.d_alpha / 2.0);
  return -scale * root;
}

Spectrum airy_spectrum(int count, const PhysParams& params) {
  params.validate();
  require_count(count);
  if (params.alpha != 1.0) {
    throw DomainError("the Airy solution is exact only for alpha = 1, got alpha=" + std::to_string(params.alpha));
  }
  const specfun::RootTable prime = specfun::airy_roots(specfun::RootKind::ai_prime_zero, (count + 1) / 2);
  const specfun::RootTable plain =
      count > 1 ? specfun::airy_roots(specfun::RootKind::ai_zero, count / 2) : specfun::RootTable{};
  Spectrum s;
  s.method = SpectrumMethod::airy_exact;
  s.params = params;
  s.kappa = std::cbrt(2.0 * params.d_alpha / (params.spring_k * params.hbar * params.hbar));
  for (int n = 0; n < count; ++n) {
    const double r = n % 2 == 0 ? prime.roots[static_cast<std::size_t>(n / 2)] : plain.roots[static_cast<std::size_t>(n / 2)];
    s.roots.push_back(r);
    s.levels.push_back({n, airy_energy(r, params)});
  }
  return s;
}

AiryWavefunction airy_wavefunction(const Spectrum& spectrum, int n, double halfwidth, Eigen::Index points) {
  if (spectrum.method != SpectrumMethod::airy_exact) throw DomainError("wavefunctions need an airy_exact spectrum");
  if (n < 0 || n >= static_cast<int>(spectrum.roots.size())) {
    throw DomainError("level " + std::to_string(n) + " is not in the spectrum");
  }
  const double r = spectrum.roots[static_cast<std::size_t>(n)];
  const double kappa = spectrum.kappa;
  AiryWavefunction w;
  w.phi = sample(Space::momentum, halfwidth, points, [=](double p) -> std::complex<double> {
    const double sign = n % 2 == 0 ? 1.0 : (p > 0 ? 1.0 : p < 0 ? -1.0 : 0.0);
    return sign * specfun::airy_ai(kappa * std::abs(p) + r).ai;
  });
  return w;
}

std::vector<RootErrorRow> root_error_table(int count) {
  require_count(count);
  const PhysParams natural;
  const Spectrum exact = airy_spectrum(count, natural);
  std::vector<RootErrorRow> rows;
  for (int n = 0; n < count; ++n) {
    RootErrorRow row;
    row.n = n;
    row.exact = exact.roots[static_cast<std::size_t>(n)];
    row.approx = asymptotic_root(n);
    row.percent = 100.0 * std::abs(row.exact - row.approx) / std::abs(row.approx);
    rows.push_back(row);
  }
  return rows;
}

Spectrum shoot_spectrum(int count, const PhysParams& params, double alpha, const ShootingOptions& options) {
  const PhysParams p = with_alpha(params, alpha);
  p.validate();
  require_positive_alpha(alpha, "shoot_spectrum");
  require_count(count);
  if (options.steps < 100) throw DomainError("shooting needs at least 100 steps");

  std::vector<double> seeds;
  for (int n = 0; n < count; ++n) seeds.push_back(wkb_energy(n, p));
  const double e_max = 1.5 * seeds.back();
  const double cutoff = options.cutoff > 0.0 ? options.cutoff : auto_cutoff(p, e_max);
  const Shooter shooter(p, cutoff, options.steps);

  Spectrum s;
  s.method = SpectrumMethod::shooting;
  s.params = p;
  s.levels.resize(static_cast<std::size_t>(count));
  parallel_for(static_cast<std::size_t>(count), options.threads, [&](std::size_t i) {
    const int n = static_cast<int>(i);
    const double e = shoot_level(shooter, n, seeds[i], options.rel_tol);
    if (shooter.decay_exponent(e) < kMinDepth) {
      throw DomainError("cutoff P=" + std::to_string(cutoff) + " is not deep in the decaying regime for level " +
                        std::to_string(n) + "; use a larger P (about " + std::to_string(auto_cutoff(p, e)) + ")");
    }
    s.levels[i] = {n, e};
  });
  return s;
}

Spectrum wkb_spectrum(int count, const PhysParams& params, bool numeric) {
  require_count(count);
  Spectrum s;
  s.method = numeric ? SpectrumMethod::wkb_numeric : SpectrumMethod::wkb;
  s.params = params;
  for (int n = 0; n < count; ++n) {
    s.levels.push_back({n, numeric ? wkb_energy_numeric(n, params) : wkb_energy(n, params)});
  }
  return s;
}

nlohmann::json to_json(const Spectrum& spectrum) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : spectrum.levels) levels.push_back({{"n", l.n}, {"E", l.energy}});
  nlohmann::json j = {{"method", to_string(spectrum.method)},
                      {"params",
                       {{"alpha", spectrum.params.alpha},
                        {"hbar", spectrum.params.hbar},
                        {"d_alpha", spectrum.params.d_alpha},
                        {"spring_k", spectrum.params.spring_k}}},
                      {"levels", levels}};
  if (spectrum.method == SpectrumMethod::airy_exact) {
    j["kappa"] = spectrum.kappa;
    j["roots"] = spectrum.roots;
    j["wavefunction_normalized"] = false;
  }
  return j;
}

Spectrum spectrum_from_json(const nlohmann::json& j) {
  Spectrum s;
  s.method = parse_spectrum_method(j.at("method").get<std::string>());
  const auto& p = j.at("params");
  s.params.alpha = p.at("alpha").get<double>();
  s.params.hbar = p.at("hbar").get<double>();
  s.params.d_alpha = p.at("d_alpha").get<double>();
  s.params.spring_k = p.at("spring_k").get<double>();
  for (const auto& l : j.at("levels")) s.levels.push_back({l.at("n").get<int>(), l.at("E").get<double>()});
  if (j.contains("kappa")) s.kappa = j["kappa"].get<double>();
  if (j.contains("roots")) s.roots = j["roots"].get<std::vector<double>>();
  return s;
}

void write_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "method,n,E\n";
  for (const auto& l : spectrum.levels) {
    out << to_string(spectrum.method) << ',' << l.n << ',' << format_number(l.energy) << '\n';
  }
}

}  // namespace fracq
