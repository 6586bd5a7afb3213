#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fracq/grid_solver.hpp"
#include "fracq/oscillator.hpp"

using namespace fracq;
using std::numbers::pi;

namespace {

Eigen::VectorXd cosine_on(const Eigen::VectorXd& grid, double a) {
  return (0.5 * pi / a * grid.array()).cos().matrix();
}

int sign_changes(const Eigen::VectorXd& v) {
  const double floor = 1e-8 * v.cwiseAbs().maxCoeff();
  int count = 0;
  double last = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) < floor) continue;
    const double s = v(i) > 0 ? 1.0 : -1.0;
    if (last != 0.0 && s != last) ++count;
    last = s;
  }
  return count;
}

}  // namespace

TEST_CASE("well Hamiltonian is a symmetric Toeplitz matrix") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const DiscreteHamiltonian h = build_hamiltonian(PotentialTag::well, with_alpha({}, alpha), 64, 8);
    const double scale = h.matrix.cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (Eigen::Index i = 1; i < 64; ++i) {
      for (Eigen::Index j = 1; j < 64; ++j) worst = std::max(worst, std::abs(h.matrix(i, j) - h.matrix(i - 1, j - 1)));
    }
    CAPTURE(alpha);
    CHECK(worst <= 1e-10 * scale);
    CHECK((h.matrix - h.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(h.grid(0) == doctest::Approx(-1.0 + h.spacing));
    CHECK(h.grid(63) == doctest::Approx(1.0 - h.spacing));
    CHECK(h.padded_points >= 8 * 65);
  }
}

TEST_CASE("exact stencils at alpha = 0 and alpha = 2") {
  PhysParams p;
  p.d_alpha = 1.7;
  p.hbar = 0.8;
  SUBCASE("identity") {
    const DiscreteHamiltonian h = build_hamiltonian(PotentialTag::well, with_alpha(p, 0.0), 32, 4);
    CHECK((h.matrix - 1.7 * Eigen::MatrixXd::Identity(32, 32)).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("three-point Laplacian") {
    const DiscreteHamiltonian h = build_hamiltonian(PotentialTag::well, with_alpha(p, 2.0), 40, 4);
    const double c = 1.7 * 0.8 * 0.8 / (h.spacing * h.spacing);
    Eigen::MatrixXd stencil = Eigen::MatrixXd::Zero(40, 40);
    for (Eigen::Index i = 0; i < 40; ++i) {
      stencil(i, i) = 2.0 * c;
      if (i > 0) stencil(i, i - 1) = -c;
      if (i + 1 < 40) stencil(i, i + 1) = -c;
    }
    CHECK((h.matrix - stencil).cwiseAbs().maxCoeff() <= 1e-10 * c);
  }
}

TEST_CASE("alpha = 2 recovers the ordinary well") {
  const DiscreteHamiltonian h = build_hamiltonian(PotentialTag::well, with_alpha({}, 2.0));
  CHECK(h.n_interior() == 256);
  const EigenResult r = solve_eigen(h, 3);
  CHECK(std::abs(r.energies(0) - pi * pi / 4) <= 1e-3);
  CHECK(std::abs(r.energies(1) - pi * pi) <= 1e-2);
  const Eigen::VectorXd c = cosine_on(r.grid, 1.0);
  CHECK(std::abs(r.states.col(0).dot(c)) / c.norm() >= 0.9999);
}

TEST_CASE("fractional ground state is not a cosine") {
  const DiscreteHamiltonian two = build_hamiltonian(PotentialTag::well, with_alpha({}, 2.0));
  const DiscreteHamiltonian one = build_hamiltonian(PotentialTag::well, with_alpha({}, 1.0));
  const Eigen::VectorXd c = cosine_on(two.grid, 1.0);
  const double d2 = shape_defect(solve_eigen(two, 1).states.col(0), c);
  const double d1 = shape_defect(solve_eigen(one, 1).states.col(0), c);
  CHECK(d1 >= 10.0 * d2);
  CHECK(d1 > 0.1);
}

TEST_CASE("Rayleigh quotient of the cosine bounds the ground energy") {
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    const DiscreteHamiltonian h = build_hamiltonian(PotentialTag::well, with_alpha({}, alpha), 128, 8);
    const EigenResult r = solve_eigen(h, 1);
    CAPTURE(alpha);
    CHECK(rayleigh_quotient(h, cosine_on(h.grid, 1.0)) >= r.energies(0) - 1e-10);
    CHECK(r.residuals(0) <= 1e-8);
  }
}

TEST_CASE("eigenstates alternate parity and count nodes") {
  for (PotentialTag tag : {PotentialTag::well, PotentialTag::oscillator}) {
    const DiscreteHamiltonian h = build_hamiltonian(tag, with_alpha({}, 1.2), 128, 4);
    const EigenResult r = solve_eigen(h, 5);
    for (Eigen::Index k = 0; k < 5; ++k) {
      const Eigen::VectorXd v = r.states.col(k);
      const double parity = k % 2 == 0 ? 1.0 : -1.0;
      CAPTURE(to_string(tag));
      CAPTURE(k);
      CHECK((v - parity * v.reverse()).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK(sign_changes(v) == k);
      CHECK(v.norm() == doctest::Approx(1.0));
      if (k > 0) CHECK(r.energies(k) > r.energies(k - 1));
    }
  }
}

TEST_CASE("grid energies scale with units exactly") {
  for (double alpha : {0.6, 1.4}) {
    const double base = solve_eigen(build_hamiltonian(PotentialTag::well, with_alpha({}, alpha), 64, 4), 1).energies(0);
    PhysParams p = with_alpha({}, alpha);
    p.halfwidth = 2.5;
    p.hbar = 0.6;
    p.d_alpha = 1.3;
    const double scaled = solve_eigen(build_hamiltonian(PotentialTag::well, p, 64, 4), 1).energies(0);
    CAPTURE(alpha);
    CHECK(scaled == doctest::Approx(1.3 * std::pow(0.6 / 2.5, alpha) * base).epsilon(1e-10));
  }
}

TEST_CASE("padding beyond the default leaves the well energy unchanged") {
  const PhysParams p = with_alpha({}, 1.0);
  const double e16 = solve_eigen(build_hamiltonian(PotentialTag::well, p, 128, 16), 1).energies(0);
  const double e32 = solve_eigen(build_hamiltonian(PotentialTag::well, p, 128, 32), 1).energies(0);
  CHECK(std::abs(e16 - e32) <= 1e-8);
}

TEST_CASE("convergence study") {
  SUBCASE("second order at alpha = 2") {
    const ConvergenceTable t = convergence_study(PotentialTag::well, with_alpha({}, 2.0), {64, 128, 256}, {4});
    CHECK(t.rows.size() == 3);
    CHECK(t.observed_order == doctest::Approx(2.0).epsilon(0.02));
    CHECK(std::abs(t.extrapolated - pi * pi / 4) <= 1e-6);
  }
  SUBCASE("oscillator at alpha = 1 extrapolates to the Airy ground state") {
    const ConvergenceTable t = convergence_study(PotentialTag::oscillator, {}, {64, 128, 256, 512}, {4});
    CHECK(std::abs(t.extrapolated - airy_spectrum(1, {}).levels[0].energy) <= 1e-4);
  }
  SUBCASE("too few resolutions leave the order undetermined") {
    const ConvergenceTable t = convergence_study(PotentialTag::well, {}, {32, 64}, {4, 8});
    CHECK(t.rows.size() == 4);
    CHECK(std::isnan(t.observed_order));
    CHECK(t.extrapolated == t.rows.back().ground_energy);
  }
}

TEST_CASE("alpha = 1 well energies form a Cauchy sequence") {
  const ConvergenceTable t = convergence_study(PotentialTag::well, {}, {32, 64, 128, 256}, {8});
  for (std::size_t i = 2; i < t.rows.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(t.rows[i].ground_energy - t.rows[i - 1].ground_energy) <
          std::abs(t.rows[i - 1].ground_energy - t.rows[i - 2].ground_energy));
  }
  for (const auto& row : t.rows) CHECK(row.ground_energy > 0.0);
}

TEST_CASE("lowest oscillator levels match the Airy spectrum") {
  const EigenResult r = solve_eigen(build_hamiltonian(PotentialTag::oscillator, {}, 512, 4), 4);
  const Spectrum exact = airy_spectrum(4, {});
  for (Eigen::Index n = 0; n < 4; ++n) {
    CAPTURE(n);
    CHECK(std::abs(r.energies(n) / exact.levels[static_cast<std::size_t>(n)].energy - 1) <= 1e-3);
  }
}

TEST_CASE("grid solver rejects invalid input") {
  CHECK_THROWS_AS(build_hamiltonian(PotentialTag::well, with_alpha({}, 2.5), 64, 8), DomainError);
  CHECK_THROWS_AS(build_hamiltonian(PotentialTag::well, with_alpha({}, -0.5), 64, 8), DomainError);
  CHECK_THROWS_AS(build_hamiltonian(PotentialTag::well, {}, 8, 8), DomainError);
  CHECK_THROWS_AS(build_hamiltonian(PotentialTag::well, {}, 64, 2), DomainError);
  const DiscreteHamiltonian h = build_hamiltonian(PotentialTag::well, {}, 16, 4);
  CHECK_THROWS_AS(solve_eigen(h, 0), DomainError);
  CHECK_THROWS_AS(solve_eigen(h, 17), DomainError);
  CHECK_THROWS_AS(parse_potential("box"), DomainError);
  CHECK(parse_potential("oscillator") == PotentialTag::oscillator);
}

TEST_CASE("parallel assembly is deterministic") {
  GridOptions parallel;
  parallel.threads = 4;
  const PhysParams p = with_alpha({}, 0.7);
  CHECK(build_hamiltonian(PotentialTag::oscillator, p, 96, 4, parallel).matrix ==
        build_hamiltonian(PotentialTag::oscillator, p, 96, 4).matrix);
}

TEST_CASE("grid solver serialization") {
  const DiscreteHamiltonian h = build_hamiltonian(PotentialTag::well, with_alpha({}, 0.0), 16, 4);
  const EigenResult r = solve_eigen(h, 2);
  std::ostringstream states, energies, matrix;
  write_states_csv(states, r);
  write_energies_csv(energies, r);
  write_matrix_csv(matrix, h);
  CHECK(states.str().rfind("x,v0,v1\n", 0) == 0);
  CHECK(energies.str().rfind("n,E,residual\n0,1.00000000000e+00,", 0) == 0);
  const std::string dumped = matrix.str();
  CHECK(std::count(dumped.begin(), dumped.end(), '\n') == 16);
  const nlohmann::json j = to_json(r);
  CHECK(j["energies"].size() == 2);
  CHECK(j["states"][1].size() == 16);
  const nlohmann::json t = to_json(convergence_study(PotentialTag::well, {}, {16, 32}, {4}));
  CHECK(t["observed_order"].is_null());
  CHECK(t["rows"].size() == 2);
}
