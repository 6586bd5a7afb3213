#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fracq/oscillator.hpp"
#include "fracq/specfun.hpp"

using namespace fracq;
using std::numbers::pi;

namespace {

PhysParams ordinary_oscillator() {
  PhysParams p;
  p.alpha = 2.0;
  p.d_alpha = 0.5;
  return p;
}

bool strictly_increasing_positive(const Spectrum& s) {
  double previous = 0.0;
  for (const auto& l : s.levels) {
    if (!(l.energy > previous)) return false;
    previous = l.energy;
  }
  return true;
}

}  // namespace

TEST_CASE("WKB closed form") {
  SUBCASE("quadratic kinetic term is the ordinary oscillator") {
    for (double k : {1.0, 4.0}) {
      PhysParams p = ordinary_oscillator();
      p.spring_k = k;
      for (int n : {0, 1, 2, 7}) CHECK(wkb_energy(n, p) == doctest::Approx(std::sqrt(k) * (n + 0.5)).epsilon(1e-14));
    }
  }
  SUBCASE("alpha = 1 ground state") {
    CHECK(wkb_energy(0, {}) == doctest::Approx(std::pow(3 * pi / 8, 2.0 / 3) * std::cbrt(0.5)).epsilon(1e-14));
  }
  SUBCASE("scaling with D_alpha") {
    for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
      PhysParams p = with_alpha({}, alpha);
      const double base = wkb_energy(3, p);
      p.d_alpha = 3.0;
      CHECK(wkb_energy(3, p) == doctest::Approx(std::pow(3.0, 2 / (2 + alpha)) * base).epsilon(1e-13));
    }
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(wkb_energy(0, with_alpha({}, -0.5)), DomainError);
    CHECK_THROWS_AS(wkb_energy(0, with_alpha({}, 0.0)), DomainError);
    CHECK_THROWS_AS(wkb_energy(-1, {}), DomainError);
  }
}

TEST_CASE("WKB and the Airy formula with asymptotic roots coincide") {
  for (int n = 0; n <= 20; ++n) {
    CAPTURE(n);
    CHECK(std::abs(wkb_energy(n, {}) / airy_energy(asymptotic_root(n), {}) - 1) <= 1e-12);
  }
  PhysParams p;
  p.hbar = 0.7;
  p.spring_k = 2.3;
  p.d_alpha = 1.9;
  CHECK(std::abs(wkb_energy(4, p) / airy_energy(asymptotic_root(4), p) - 1) <= 1e-12);
}

TEST_CASE("WKB quantization integral matches the closed form") {
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    for (int n : {0, 1, 5}) {
      const PhysParams p = with_alpha({}, alpha);
      CAPTURE(alpha);
      CAPTURE(n);
      CHECK(std::abs(wkb_energy_numeric(n, p) / wkb_energy(n, p) - 1) <= 1e-8);
    }
  }
  CHECK(wkb_energy_numeric(2, ordinary_oscillator()) == doctest::Approx(2.5).epsilon(1e-10));
  PhysParams doubled;
  doubled.d_alpha = 2.0;
  CHECK(wkb_energy_numeric(1, doubled) == doctest::Approx(std::pow(2.0, 2.0 / 3) * wkb_energy_numeric(1, {})).epsilon(1e-10));
}

TEST_CASE("turning points") {
  const TurningPoints t = turning_points(8.0, with_alpha({}, 1.5));
  CHECK(t.p2 == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(t.p1 == -t.p2);
  CHECK_THROWS_AS(turning_points(0.0, {}), DomainError);
}

TEST_CASE("exact alpha = 1 spectrum") {
  const Spectrum s = airy_spectrum(6, {});
  CHECK(s.method == SpectrumMethod::airy_exact);
  CHECK(s.levels.size() == 6);
  CHECK(s.levels[0].energy == doctest::Approx(std::cbrt(0.5) * 1.0187929716474711).epsilon(1e-12));
  CHECK(s.levels[1].energy == doctest::Approx(std::cbrt(0.5) * 2.338107410459767).epsilon(1e-12));
  CHECK(s.levels[0].energy == doctest::Approx(0.80861).epsilon(1e-5));
  CHECK(s.kappa == doctest::Approx(std::cbrt(2.0)).epsilon(1e-15));
  CHECK(strictly_increasing_positive(s));
  for (int n = 0; n < 6; ++n) {
    const specfun::AiryValue v = specfun::airy_ai(s.roots[static_cast<std::size_t>(n)]);
    CHECK(std::abs(n % 2 == 0 ? v.ai_prime : v.ai) < 1e-10);
  }
  CHECK_THROWS_AS(airy_spectrum(3, with_alpha({}, 1.5)), DomainError);
  CHECK_THROWS_AS(airy_spectrum(0, {}), DomainError);
}

TEST_CASE("Airy wavefunctions solve the momentum equation with alternating parity") {
  PhysParams p;
  p.spring_k = 1.7;
  p.d_alpha = 0.6;
  p.hbar = 0.9;
  const Spectrum s = airy_spectrum(4, p);
  for (int n = 0; n < 4; ++n) {
    const AiryWavefunction w = airy_wavefunction(s, n, 6.0, 1200);
    CHECK_FALSE(w.normalized);
    const Eigen::VectorXcd& phi = w.phi.samples;
    const Eigen::Index size = phi.size();
    const double parity = n % 2 == 0 ? 1.0 : -1.0;
    for (Eigen::Index j = 1; j < size; ++j) CHECK(std::abs(phi(j) - parity * phi(size - j)) < 1e-14);
    // (k hbar^2 / 2) phi'' = (D |p| - E) phi away from p = 0.
    const double h = w.phi.spacing();
    const double e = s.levels[static_cast<std::size_t>(n)].energy;
    double worst = 0.0;
    for (Eigen::Index j = 1; j + 1 < size; ++j) {
      const double q = w.phi.coordinate(j);
      if (std::abs(q) < 2 * h) continue;
      const double second = (phi(j + 1) - 2.0 * phi(j) + phi(j - 1)).real() / (h * h);
      const double residual = 0.5 * p.spring_k * p.hbar * p.hbar * second - (p.d_alpha * std::abs(q) - e) * phi(j).real();
      worst = std::max(worst, std::abs(residual));
    }
    CAPTURE(n);
    CHECK(worst < 1e-3);
  }
  CHECK_THROWS_AS(airy_wavefunction(s, 4, 6.0, 100), DomainError);
}

TEST_CASE("asymptotic root error table") {
  CHECK(asymptotic_root(0) == doctest::Approx(-std::pow(3 * pi / 8, 2.0 / 3)).epsilon(1e-15));
  const std::vector<RootErrorRow> rows = root_error_table(21);
  const double published[] = {8.7, 0.77, 0.41};
  for (int n = 0; n < 3; ++n) {
    CAPTURE(n);
    CHECK(std::abs(rows[static_cast<std::size_t>(n)].percent - published[n]) <= 0.05);
  }
  // The merged sequence alternates root kinds; the error shrinks within each kind.
  for (std::size_t n = 0; n + 2 < rows.size(); ++n) {
    CAPTURE(n);
    CHECK(rows[n + 2].percent < rows[n].percent);
  }
  CHECK(rows[20].percent < 0.01);
}

TEST_CASE("shooting reproduces the exact spectra") {
  SUBCASE("ordinary oscillator") {
    const Spectrum s = shoot_spectrum(6, ordinary_oscillator(), 2.0);
    CHECK(s.method == SpectrumMethod::shooting);
    for (int n = 0; n < 6; ++n) CHECK(std::abs(s.levels[static_cast<std::size_t>(n)].energy - (n + 0.5)) <= 1e-6);
  }
  SUBCASE("alpha = 1 against the Airy roots") {
    const Spectrum exact = airy_spectrum(6, {});
    const Spectrum s = shoot_spectrum(6, {}, 1.0);
    for (std::size_t n = 0; n < 6; ++n) CHECK(std::abs(s.levels[n].energy - exact.levels[n].energy) <= 1e-6);
  }
  SUBCASE("non-natural units") {
    PhysParams p;
    p.hbar = 0.6;
    p.spring_k = 2.5;
    p.d_alpha = 1.4;
    const Spectrum exact = airy_spectrum(4, p);
    const Spectrum s = shoot_spectrum(4, p, 1.0);
    for (std::size_t n = 0; n < 4; ++n) CHECK(std::abs(s.levels[n].energy / exact.levels[n].energy - 1) <= 1e-7);
  }
}

TEST_CASE("shooting is converged in the step size") {
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    ShootingOptions coarse, fine;
    fine.steps = 2 * coarse.steps;
    const Spectrum a = shoot_spectrum(5, {}, alpha, coarse);
    const Spectrum b = shoot_spectrum(5, {}, alpha, fine);
    for (std::size_t n = 0; n < 5; ++n) {
      CAPTURE(alpha);
      CAPTURE(n);
      CHECK(std::abs(a.levels[n].energy - b.levels[n].energy) <= 1e-7);
    }
    CHECK(strictly_increasing_positive(a));
  }
}

TEST_CASE("WKB accuracy against shooting away from the exact cases") {
  const Spectrum s = shoot_spectrum(10, {}, 1.5);
  for (int n = 3; n < 10; ++n) {
    const double e = s.levels[static_cast<std::size_t>(n)].energy;
    CAPTURE(n);
    CHECK(std::abs(wkb_energy(n, with_alpha({}, 1.5)) / e - 1) < 0.02);
  }
}

TEST_CASE("shooting rejects a shallow cutoff and bad input") {
  ShootingOptions shallow;
  shallow.cutoff = 2.0;
  CHECK_THROWS_AS(shoot_spectrum(3, {}, 1.0, shallow), DomainError);
  CHECK_THROWS_AS(shoot_spectrum(3, {}, 0.0), DomainError);
  CHECK_THROWS_AS(shoot_spectrum(0, {}, 1.0), DomainError);
}

TEST_CASE("parallel shooting is deterministic") {
  ShootingOptions parallel;
  parallel.threads = 3;
  CHECK(shoot_spectrum(6, {}, 0.8, parallel).energies() == shoot_spectrum(6, {}, 0.8).energies());
}

TEST_CASE("spectrum positivity and ordering for every method") {
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    CHECK(strictly_increasing_positive(wkb_spectrum(8, with_alpha({}, alpha))));
    CHECK(strictly_increasing_positive(wkb_spectrum(4, with_alpha({}, alpha), true)));
  }
  CHECK(strictly_increasing_positive(airy_spectrum(30, {})));
}

TEST_CASE("spectrum serialization") {
  const Spectrum s = wkb_spectrum(2, ordinary_oscillator());
  std::ostringstream out;
  write_csv(out, s);
  CHECK(out.str() == "method,n,E\nwkb,0,5.00000000000e-01\nwkb,1,1.50000000000e+00\n");
  const nlohmann::json j = to_json(airy_spectrum(2, {}));
  CHECK(j["method"] == "airy_exact");
  CHECK(j["levels"].size() == 2);
  CHECK(j["roots"][1].get<double>() == doctest::Approx(-2.338107410459767));
  CHECK(j["wavefunction_normalized"] == false);
  CHECK(parse_spectrum_method("shoot") == SpectrumMethod::shooting);
  CHECK_THROWS_AS(parse_spectrum_method("magic"), DomainError);
}
