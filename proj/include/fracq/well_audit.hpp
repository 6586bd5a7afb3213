#ifndef FRACQ_WELL_AUDIT_HPP
#define FRACQ_WELL_AUDIT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracq/params.hpp"
#include "fracq/quadrature.hpp"
#include "fracq/riesz.hpp"

namespace fracq {

/// Threshold for "is zero" verdicts.
constexpr double kAuditTolerance = 1e-6;

/// A cos(pi x / 2a) on |x| <= a, zero outside.
double psi0(double x, const PhysParams& params);

/// Fourier transform of psi0: -(A pi hbar^2 / a) cos(a p / hbar) / (p^2 - (pi hbar / 2a)^2).
double phi0_closed_form(double p, const PhysParams& params);

/// f(alpha) = int_0^inf p^alpha cos^2(pi p / 2) / (p^2 - 1) dp for -1 < alpha < 1.
quad::QuadResult f_of_alpha(double alpha, double tol = 1e-10);

/// df/dalpha = int_0^inf p^alpha ln(p) cos^2(pi p / 2) / (p^2 - 1) dp for -1 < alpha < 1.
quad::QuadResult df_dalpha(double alpha, double tol = 1e-10);

/// Riesz derivative of psi0 at the wall x = a.
double boundary_limit(const PhysParams& params);

/// Relative failure of R[psi0] = c psi0 on the grid points with |x| <= 0.95a:
/// min over c of sup |R - c psi0| / sup |R|, with c from least squares.
///
/// R comes from the pointwise integral for -1 < alpha < 1, from the exact
/// eigenvalue (pi hbar / 2a)^alpha for even alpha, and otherwise from
/// riesz_apply on psi0 sampled over the grid (which must then be padded, L >= 4a).
double proportionality_defect(double alpha, const PhysParams& params, const SampledFunction& grid);

/// Uniform grid on [-a, a) with n points, the default for the defect.
SampledFunction interior_grid(const PhysParams& params, Eigen::Index n = 400);

enum class Verdict { fails, passes, out_of_validity };

std::string to_string(Verdict v);

struct AuditPoint {
  double alpha = 0.0;
  quad::QuadResult f;
  quad::QuadResult df;
  double boundary_limit_value = 0.0;
  double proportionality_defect = 0.0;
  Verdict verdict = Verdict::out_of_validity;
};

struct AuditReport {
  std::vector<AuditPoint> points;
  /// f strictly increasing along the grid (sorted by alpha).
  bool f_monotone = false;
  /// Root of f from bisection; NaN when no sign change was found.
  double f_zero_crossing = 0.0;
  double tolerance = kAuditTolerance;
  /// passes when every point passes, fails when any point fails.
  Verdict verdict = Verdict::out_of_validity;

  std::vector<double> alpha_grid() const;
  std::vector<double> f_values() const;
};

struct AuditOptions {
  double tolerance = kAuditTolerance;
  double quad_tolerance = 1e-10;
  Eigen::Index defect_points = 400;
  int threads = 1;
};

/// Audits each alpha of the grid. Points outside (-1, 1) are reported as
/// out_of_validity without evaluation.
AuditReport run_audit(std::vector<double> alpha_grid, const PhysParams& params, const AuditOptions& options = {});

nlohmann::json to_json(const AuditReport& report);
/// Inverse of to_json; evaluation counts are not serialized.
AuditReport audit_report_from_json(const nlohmann::json& j);

/// Flat CSV: alpha,f,df,defect.
void write_csv(std::ostream& out, const AuditReport& report);

}  // namespace fracq

#endif  // FRACQ_WELL_AUDIT_HPP
