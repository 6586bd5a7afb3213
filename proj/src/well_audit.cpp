#include "fracq/well_audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "fracq/io.hpp"
#include "fracq/parallel.hpp"

namespace fracq {
namespace {

using std::numbers::pi;

constexpr double kInteriorFraction = 0.95;

void require_window(double alpha, const char* what) {
  if (!(alpha > -1.0 && alpha < 1.0)) {
    throw DomainError(std::string(what) + " diverges outside -1 < alpha < 1, got alpha=" + std::to_string(alpha));
  }
}

// p^alpha w(p) cos^2(pi p / 2) / (p^2 - 1), with w = 1 or ln p.
quad::Integrand boundary_integrand(double alpha, bool with_log) {
  quad::Integrand in = quad::make_integrand([alpha, with_log](double p) {
    const double c = std::cos(0.5 * pi * p);
    const double w = with_log ? std::log(p) : 1.0;
    return std::pow(p, alpha) * w * c * c / (p * p - 1.0);
  });
  in.singular_points.push_back({1.0, 0.0});
  const int log_power = with_log ? 1 : 0;
  in.endpoint = quad::EndpointPower{0.0, alpha, log_power};
  in.tail_start = 4.0;
  // cos^2 = (1 + cos pi p) / 2 and 1 / (p^2 - 1) = p^-2 / (1 - p^-2).
  const quad::Function envelope = [](double p) { return 0.5 / (1.0 - 1.0 / (p * p)); };
  in.tail.push_back({envelope, alpha - 2.0, 0.0, 0.0, log_power});
  in.tail.push_back({envelope, alpha - 2.0, pi, 0.0, log_power});
  return in;
}

bool even_integer(double alpha) {
  return alpha >= 0.0 && std::abs(alpha - 2.0 * std::round(alpha / 2.0)) < 1e-14;
}

double bisect_root(double lo, double hi, double f_lo, double tol) {
  for (int it = 0; it < 80 && hi - lo > 1e-11; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f_of_alpha(mid, tol).value;
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double zero_crossing(const std::vector<AuditPoint>& points, double tol) {
  std::vector<const AuditPoint*> valid;
  for (const auto& p : points) {
    if (p.verdict != Verdict::out_of_validity) valid.push_back(&p);
  }
  for (std::size_t i = 0; i + 1 < valid.size(); ++i) {
    const double lo = valid[i]->f.value, hi = valid[i + 1]->f.value;
    if (lo == 0.0) return valid[i]->alpha;
    if ((lo < 0.0) != (hi < 0.0)) return bisect_root(valid[i]->alpha, valid[i + 1]->alpha, lo, tol);
  }
  if (!valid.empty() && valid.back()->f.value == 0.0) return valid.back()->alpha;
  // No bracket on the grid: widen to most of the window.
  const double lo = -0.9, hi = 0.9;
  const double f_lo = f_of_alpha(lo, tol).value, f_hi = f_of_alpha(hi, tol).value;
  if ((f_lo < 0.0) == (f_hi < 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return bisect_root(lo, hi, f_lo, tol);
}

}  // namespace

double psi0(double x, const PhysParams& params) {
  const double a = params.halfwidth;
  return std::abs(x) <= a ? params.amplitude * std::cos(0.5 * pi * x / a) : 0.0;
}

double phi0_closed_form(double p, const PhysParams& params) {
  const double a = params.halfwidth, hbar = params.hbar, amp = params.amplitude;
  const double k = 0.5 * pi * hbar / a;
  // Near |p| = k: cos(a|p|/hbar) = -sin(t) with t = a(|p| - k)/hbar, so the ratio is a sinc.
  const double t = a * (std::abs(p) - k) / hbar;
  if (std::abs(t) < 1e-4) return amp * pi * hbar * (1.0 - t * t / 6.0) / (std::abs(p) + k);
  return -amp * pi * hbar * hbar / a * std::cos(a * p / hbar) / (p * p - k * k);
}

quad::QuadResult f_of_alpha(double alpha, double tol) {
  require_window(alpha, "f(alpha)");
  return quad::integrate_semi_infinite(boundary_integrand(alpha, false), 0.0, tol);
}

quad::QuadResult df_dalpha(double alpha, double tol) {
  require_window(alpha, "df/dalpha");
  return quad::integrate_semi_infinite(boundary_integrand(alpha, true), 0.0, tol);
}

double boundary_limit(const PhysParams& params) {
  params.validate();
  require_window(params.alpha, "the wall limit");
  return riesz_pointwise_psi0(params.halfwidth, params);
}

SampledFunction interior_grid(const PhysParams& params, Eigen::Index n) {
  return sample(Space::position, params.halfwidth, n,
                [&params](double x) -> std::complex<double> { return psi0(x, params); });
}

double proportionality_defect(double alpha, const PhysParams& params, const SampledFunction& grid) {
  const PhysParams p = with_alpha(params, alpha);
  p.validate();
  const double a = p.halfwidth;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    if (std::abs(grid.coordinate(j)) <= kInteriorFraction * a) rows.push_back(j);
  }
  if (rows.empty()) throw DomainError("defect grid has no points with |x| <= 0.95a");

  Eigen::VectorXd psi(static_cast<Eigen::Index>(rows.size()));
  Eigen::VectorXd image(psi.size());
  SampledFunction applied;
  const bool pointwise = alpha > -1.0 && alpha < 1.0;
  if (!pointwise && !even_integer(alpha)) {
    if (grid.halfwidth < 4.0 * a) {
      throw DomainError("defect at alpha=" + std::to_string(alpha) + " needs a padded grid with L >= 4a");
    }
    applied = riesz_apply(sample(Space::position, grid.halfwidth, grid.size(),
                                 [&p](double x) -> std::complex<double> { return psi0(x, p); }),
                          p);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double x = grid.coordinate(rows[i]);
    psi(r) = psi0(x, p);
    if (pointwise) {
      image(r) = riesz_pointwise_psi0(x, p);
    } else if (even_integer(alpha)) {
      // Derivatives of the cosine: (-hbar^2 d^2/dx^2)^(alpha/2) psi0 = (pi hbar / 2a)^alpha psi0.
      image(r) = std::pow(0.5 * pi * p.hbar / a, alpha) * psi(r);
    } else {
      image(r) = applied.samples(rows[i]).real();
    }
  }
  const double scale = image.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const double c = psi.dot(image) / psi.squaredNorm();
  return (image - c * psi).cwiseAbs().maxCoeff() / scale;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::fails: return "fails";
    case Verdict::passes: return "passes";
    case Verdict::out_of_validity: return "out_of_validity";
  }
  return "unknown";
}

std::vector<double> AuditReport::alpha_grid() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.alpha);
  return out;
}

std::vector<double> AuditReport::f_values() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.f.value);
  return out;
}

AuditReport run_audit(std::vector<double> alpha_grid, const PhysParams& params, const AuditOptions& options) {
  params.validate();
  if (alpha_grid.empty()) throw DomainError("audit grid is empty");
  std::sort(alpha_grid.begin(), alpha_grid.end());
  AuditReport report;
  report.tolerance = options.tolerance;
  report.points.resize(alpha_grid.size());
  const SampledFunction grid = interior_grid(params, options.defect_points);

  parallel_for(alpha_grid.size(), options.threads, [&](std::size_t i) {
    AuditPoint& pt = report.points[i];
    pt.alpha = alpha_grid[i];
    if (!(pt.alpha > -1.0 && pt.alpha < 1.0)) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      pt.f.value = pt.df.value = pt.boundary_limit_value = pt.proportionality_defect = nan;
      pt.verdict = Verdict::out_of_validity;
      return;
    }
    pt.f = f_of_alpha(pt.alpha, options.quad_tolerance);
    pt.df = df_dalpha(pt.alpha, options.quad_tolerance);
    pt.boundary_limit_value = boundary_limit(with_alpha(params, pt.alpha));
    pt.proportionality_defect = proportionality_defect(pt.alpha, params, grid);
    const bool zero = std::abs(pt.f.value) <= options.tolerance && pt.proportionality_defect <= options.tolerance;
    pt.verdict = zero ? Verdict::passes : Verdict::fails;
  });

  report.f_monotone = true;
  bool any_fails = false, all_pass = true;
  const AuditPoint* previous = nullptr;
  for (const auto& pt : report.points) {
    if (pt.verdict == Verdict::out_of_validity) {
      all_pass = false;
      continue;
    }
    if (previous && !(pt.f.value > previous->f.value)) report.f_monotone = false;
    previous = &pt;
    any_fails = any_fails || pt.verdict == Verdict::fails;
    all_pass = all_pass && pt.verdict == Verdict::passes;
  }
  report.verdict = any_fails ? Verdict::fails : all_pass ? Verdict::passes : Verdict::out_of_validity;
  report.f_zero_crossing = zero_crossing(report.points, options.quad_tolerance);
  return report;
}

nlohmann::json to_json(const AuditReport& report) {
  auto number = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json points = nlohmann::json::array();
  for (const auto& pt : report.points) {
    points.push_back({{"alpha", pt.alpha},
                      {"f", number(pt.f.value)},
                      {"f_error", number(pt.f.abs_err_estimate)},
                      {"df", number(pt.df.value)},
                      {"df_error", number(pt.df.abs_err_estimate)},
                      {"converged", pt.f.converged && pt.df.converged},
                      {"boundary_limit", number(pt.boundary_limit_value)},
                      {"proportionality_defect", number(pt.proportionality_defect)},
                      {"verdict", to_string(pt.verdict)}});
  }
  nlohmann::json f_values = nlohmann::json::array();
  for (double v : report.f_values()) f_values.push_back(number(v));
  return {{"alpha_grid", report.alpha_grid()},
          {"f_values", f_values},
          {"f_monotone", report.f_monotone},
          {"f_zero_crossing", number(report.f_zero_crossing)},
          {"tolerance", report.tolerance},
          {"verdict", to_string(report.verdict)},
          {"points", points}};
}

AuditReport audit_report_from_json(const nlohmann::json& j) {
  auto number = [](const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  auto verdict = [](const std::string& name) {
    if (name == "passes") return Verdict::passes;
    if (name == "fails") return Verdict::fails;
    if (name == "out_of_validity") return Verdict::out_of_validity;
    throw DomainError("unknown verdict '" + name + "'");
  };
  AuditReport r;
  for (const auto& pt : j.at("points")) {
    AuditPoint a;
    a.alpha = pt.at("alpha").get<double>();
    a.f.value = number(pt.at("f"));
    a.f.abs_err_estimate = number(pt.at("f_error"));
    a.df.value = number(pt.at("df"));
    a.df.abs_err_estimate = number(pt.at("df_error"));
    a.f.converged = a.df.converged = pt.at("converged").get<bool>();
    a.boundary_limit_value = number(pt.at("boundary_limit"));
    a.proportionality_defect = number(pt.at("proportionality_defect"));
    a.verdict = verdict(pt.at("verdict").get<std::string>());
    r.points.push_back(a);
  }
  r.f_monotone = j.at("f_monotone").get<bool>();
  r.f_zero_crossing = number(j.at("f_zero_crossing"));
  r.tolerance = j.at("tolerance").get<double>();
  r.verdict = verdict(j.at("verdict").get<std::string>());
  return r;
}

void write_csv(std::ostream& out, const AuditReport& report) {
  out << "alpha,f,df,defect\n";
  for (const auto& pt : report.points) {
    out << format_number(pt.alpha) << ',' << format_number(pt.f.value) << ',' << format_number(pt.df.value) << ','
        << format_number(pt.proportionality_defect) << '\n';
  }
}

}  // namespace fracq
