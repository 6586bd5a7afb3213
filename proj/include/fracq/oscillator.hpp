#ifndef FRACQ_OSCILLATOR_HPP
#define FRACQ_OSCILLATOR_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracq/params.hpp"
#include "fracq/riesz.hpp"

namespace fracq {

enum class SpectrumMethod { wkb, airy_exact, shooting, wkb_numeric };

std::string to_string(SpectrumMethod m);
/// Parses "wkb", "airy", "airy_exact", "shoot", "shooting", "wkb_numeric"; throws DomainError otherwise.
SpectrumMethod parse_spectrum_method(const std::string& name);

struct Level {
  int n = 0;
  double energy = 0.0;
};

/// Energy levels of H = D_alpha |p|^alpha + k x^2 / 2.
struct Spectrum {
  SpectrumMethod method = SpectrumMethod::wkb;
  std::vector<Level> levels;
  PhysParams params;
  /// airy_exact only: momentum scale and the merged root sequence r_n.
  double kappa = 0.0;
  std::vector<double> roots;

  std::vector<double> energies() const;
};

/// Classical turning points of E = D_alpha |p|^alpha in momentum space.
struct TurningPoints {
  double p1 = 0.0;
  double p2 = 0.0;
};

TurningPoints turning_points(double energy, const PhysParams& params);

/// Closed-form WKB energy for alpha > 0.
double wkb_energy(int n, const PhysParams& params);

/// WKB energy from the quantization integral
/// int_{p1}^{p2} sqrt((2/k)(E - D_alpha |p|^alpha)) dp = (n + 1/2) pi hbar, solved by bisection.
double wkb_energy_numeric(int n, const PhysParams& params, double rel_tol = 1e-13);

/// -(3 pi/4 (n + 1/2))^(2/3).
double asymptotic_root(int n);

/// E = -(k hbar^2 D_1^2 / 2)^(1/3) r for a root r of Ai or Ai'.
double airy_energy(double root, const PhysParams& params);

/// Exact spectrum at alpha = 1: r_n are Ai' zeros for even n and Ai zeros for odd n.
Spectrum airy_spectrum(int count, const PhysParams& params);

/// Unnormalized momentum wavefunction (sgn p)^n Ai(kappa |p| + r_n) of an airy_exact level.
struct AiryWavefunction {
  SampledFunction phi;
  bool normalized = false;
};

AiryWavefunction airy_wavefunction(const Spectrum& spectrum, int n, double halfwidth, Eigen::Index points);

struct RootErrorRow {
  int n = 0;
  double exact = 0.0;
  double approx = 0.0;
  /// 100 |exact - approx| / |approx|.
  double percent = 0.0;
};

std::vector<RootErrorRow> root_error_table(int count);

struct ShootingOptions {
  /// Integration range [0, cutoff]; 0 selects one deep in the forbidden region of the highest level.
  double cutoff = 0.0;
  int steps = 40000;
  double rel_tol = 1e-12;
  int threads = 1;
};

/// Levels of (k hbar^2 / 2) phi'' = (D_alpha |p|^alpha - E) phi by Numerov shooting from p = 0
/// with parity conditions, bisecting E on the node count of phi on (0, cutoff].
Spectrum shoot_spectrum(int count, const PhysParams& params, double alpha, const ShootingOptions& options = {});

/// WKB spectrum from the closed form or, with numeric = true, from the quantization integral.
Spectrum wkb_spectrum(int count, const PhysParams& params, bool numeric = false);

nlohmann::json to_json(const Spectrum& spectrum);
Spectrum spectrum_from_json(const nlohmann::json& j);

/// CSV: method,n,E.
void write_csv(std::ostream& out, const Spectrum& spectrum);

}  // namespace fracq

#endif  // FRACQ_OSCILLATOR_HPP
