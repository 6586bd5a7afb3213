#include "fracq/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>

#include "fracq/params.hpp"

namespace fracq::specfun {
namespace {

constexpr double kAi0 = 0.355028053887817239260063186004;   // Ai(0)
constexpr double kAip0 = 0.258819403792806798405183560189;  // -Ai'(0)
constexpr double kSeriesLimit = 3.0;
constexpr double kAsymptoticLimit = 8.0;
constexpr double kMaxStep = 0.5;

std::pair<double, double> maclaurin(double x) {
  const double x3 = x * x * x;
  double f = 1.0, fp = 0.0, g = x, gp = 1.0;
  double a = 1.0, b = 1.0;
  double xpow = 1.0;  // x^(3k)
  for (int k = 1; k < 200; ++k) {
    a /= (3.0 * k - 1.0) * (3.0 * k);
    b /= (3.0 * k) * (3.0 * k + 1.0);
    const double xm1 = xpow * x * x;  // x^(3k-1)
    xpow *= x3;
    const double tf = a * xpow;
    const double tfp = 3.0 * k * a * xm1;
    const double tg = b * xpow * x;
    const double tgp = (3.0 * k + 1.0) * b * xpow;
    f += tf;
    fp += tfp;
    g += tg;
    gp += tgp;
    if (std::abs(tf) + std::abs(tg) + std::abs(tfp) + std::abs(tgp) <
        1e-18 * (std::abs(f) + std::abs(g) + std::abs(fp) + std::abs(gp))) {
      break;
    }
  }
  return {kAi0 * f - kAip0 * g, kAi0 * fp - kAip0 * gp};
}

// Optimally truncated sums of the large-argument expansions (DLMF 9.7):
// plain alternating sums in u_k, v_k for the decaying side and sums split by
// parity of k for the oscillatory side.
struct AsymptoticSums {
  double u_even = 0.0, u_odd = 0.0, v_even = 0.0, v_odd = 0.0;
  double u_all = 0.0, v_all = 0.0;
};

AsymptoticSums asymptotic_sums(double zeta) {
  AsymptoticSums s;
  double u = 1.0;
  double zpow = 1.0;
  double last = 1.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
      zpow /= zeta;
    }
    const double v = k == 0 ? 1.0 : -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u;
    const double tu = u * zpow;
    const double tv = v * zpow;
    if (k > 2 && std::abs(tu) > last) break;  // divergent tail
    last = std::abs(tu);
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    s.u_all += sign * tu;
    s.v_all += sign * tv;
    // (-1)^j with j = k/2 for the parity-split sums.
    const double split_sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
    if (k % 2 == 0) {
      s.u_even += split_sign * tu;
      s.v_even += split_sign * tv;
    } else {
      s.u_odd += split_sign * tu;
      s.v_odd += split_sign * tv;
    }
    if (std::abs(tu) + std::abs(tv) < 1e-18) break;
  }
  return s;
}

std::pair<double, double> asymptotic(double x) {
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  if (x > 0.0) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    const AsymptoticSums s = asymptotic_sums(zeta);
    const double e = std::exp(-zeta);
    const double q = std::sqrt(std::sqrt(x));
    return {e / (2.0 * sqrt_pi * q) * s.u_all, -q * e / (2.0 * sqrt_pi) * s.v_all};
  }
  const double z = -x;
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const AsymptoticSums s = asymptotic_sums(zeta);
  const double q = std::sqrt(std::sqrt(z));
  const double c = std::cos(zeta - 0.25 * std::numbers::pi);
  const double sn = std::sin(zeta - 0.25 * std::numbers::pi);
  return {(c * s.u_even + sn * s.u_odd) / (sqrt_pi * q),
          q * (sn * s.v_even - c * s.v_odd) / sqrt_pi};
}

// One Taylor step of y'' = x y from x0 by h.
std::pair<double, double> taylor_step(double x0, double y, double yp, double h) {
  double c_prev2 = 0.0;  // c_{n-1}
  double c_prev = y;     // c_n
  double c_cur = yp;     // c_{n+1}
  double value = y + yp * h;
  double slope = yp;
  double hpow = h;  // h^(n+1)
  // c_{n+2} = (x0 c_n + c_{n-1}) / ((n+2)(n+1))
  for (int n = 0; n < 400; ++n) {
    const double c_next = (x0 * c_prev + c_prev2) / ((n + 2.0) * (n + 1.0));
    const double term_slope = (n + 2.0) * c_next * hpow;
    hpow *= h;
    const double term_value = c_next * hpow;
    value += term_value;
    slope += term_slope;
    c_prev2 = c_prev;
    c_prev = c_cur;
    c_cur = c_next;
    if (n > 8 && std::abs(term_value) + std::abs(term_slope) <
                     1e-18 * (std::abs(value) + std::abs(slope))) {
      break;
    }
  }
  return {value, slope};
}

std::pair<double, double> march(double from, std::pair<double, double> start, double to) {
  auto [y, yp] = start;
  double x = from;
  const int steps = static_cast<int>(std::ceil(std::abs(to - from) / kMaxStep));
  const double h = (to - from) / steps;
  for (int i = 0; i < steps; ++i) {
    std::tie(y, yp) = taylor_step(x, y, yp, h);
    x = from + (i + 1) * h;
  }
  return {y, yp};
}

}  // namespace

AiryValue airy_ai(double x) {
  AiryValue r;
  r.argument = x;
  r.out_of_range = std::abs(x) > 50.0;
  std::pair<double, double> v;
  if (std::abs(x) <= kSeriesLimit) {
    v = maclaurin(x);
  } else if (std::abs(x) >= kAsymptoticLimit) {
    v = asymptotic(x);
  } else if (x > 0.0) {
    v = march(kAsymptoticLimit, asymptotic(kAsymptoticLimit), x);
  } else {
    v = march(-kSeriesLimit, maclaurin(-kSeriesLimit), x);
  }
  r.ai = v.first;
  r.ai_prime = v.second;
  if (x > 0.0 && r.ai == 0.0) r.ai_prime = -0.0;
  return r;
}

double merged_root_estimate(int n) {
  return -std::pow(0.75 * std::numbers::pi * (n + 0.5), 2.0 / 3.0);
}

RootTable airy_roots(RootKind kind, int count) {
  if (count < 1) throw DomainError("airy_roots requires count >= 1");
  RootTable table;
  table.kind = kind;
  const int offset = kind == RootKind::ai_prime_zero ? 0 : 1;
  auto target = [kind](double x) {
    const AiryValue v = airy_ai(x);
    return kind == RootKind::ai_zero ? v.ai : v.ai_prime;
  };
  for (int k = 0; k < count; ++k) {
    const int n = 2 * k + offset;
    const double seed = merged_root_estimate(n);
    double lo = 0.5 * (seed + merged_root_estimate(n + 2));
    double hi = n >= 2 ? 0.5 * (seed + merged_root_estimate(n - 2)) : 0.0;
    double f_lo = target(lo);
    double f_hi = target(hi);
    if (f_lo * f_hi > 0.0) {
      throw ConvergenceError("no sign change bracketing Airy root index " + std::to_string(k + 1) +
                             " in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f_mid = target(mid);
      if (f_mid * f_lo > 0.0) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    double x = 0.5 * (lo + hi);
    bool polished = false;
    for (int it = 0; it < 50; ++it) {
      const AiryValue v = airy_ai(x);
      const double step = kind == RootKind::ai_zero ? v.ai / v.ai_prime : v.ai_prime / (x * v.ai);
      const double next = x - step;
      if (!(next >= lo - 1e-9 && next <= hi + 1e-9)) break;
      x = next;
      if (std::abs(step) <= 1e-14 * std::abs(x)) {
        polished = true;
        break;
      }
    }
    if (!polished) {
      throw ConvergenceError("Newton polishing failed for Airy root index " + std::to_string(k + 1));
    }
    table.roots.push_back(x);
  }
  return table;
}

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("gamma_fn is defined here only for finite x > 0, got " + std::to_string(x));
  }
  return std::tgamma(x);
}

}  // namespace fracq::specfun
