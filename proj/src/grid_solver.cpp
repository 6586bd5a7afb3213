#include "fracq/grid_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "fracq/io.hpp"
#include "fracq/parallel.hpp"

namespace fracq {
namespace {

constexpr double kResidualLimit = 1e-8;

// Smallest even m >= n whose only prime factors are 2, 3 and 5.
Eigen::Index smooth_size(Eigen::Index n) {
  for (Eigen::Index m = std::max<Eigen::Index>(2, n + n % 2);; m += 2) {
    Eigen::Index r = m;
    for (Eigen::Index f : {2, 3, 5}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

}  // namespace

std::string to_string(PotentialTag tag) { return tag == PotentialTag::well ? "well" : "oscillator"; }

PotentialTag parse_potential(const std::string& name) {
  if (name == "well") return PotentialTag::well;
  if (name == "oscillator") return PotentialTag::oscillator;
  throw DomainError("unknown potential '" + name + "' (expected well or oscillator)");
}

DiscreteHamiltonian build_hamiltonian(PotentialTag tag, const PhysParams& params, Eigen::Index n_interior,
                                      double padding, const GridOptions& options) {
  params.validate();
  if (!(params.alpha >= 0.0 && params.alpha <= 2.0)) {
    throw DomainError("grid Hamiltonian supports 0 <= alpha <= 2, got alpha=" + std::to_string(params.alpha));
  }
  if (n_interior < 16) throw DomainError("n_interior must be >= 16, got " + std::to_string(n_interior));
  if (!(padding >= 4.0)) {
    throw DomainError("padding must be >= 4 (periodization error dominates below), got " + std::to_string(padding));
  }
  const double x_max = tag == PotentialTag::well ? params.halfwidth : options.oscillator_halfwidth;
  if (!(x_max > 0.0)) throw DomainError("domain half-width must be positive");

  DiscreteHamiltonian h;
  h.tag = tag;
  h.params = params;
  h.spacing = 2.0 * x_max / static_cast<double>(n_interior + 1);
  h.grid.resize(n_interior);
  for (Eigen::Index j = 0; j < n_interior; ++j) h.grid(j) = -x_max + static_cast<double>(j + 1) * h.spacing;

  const Eigen::Index big = smooth_size(static_cast<Eigen::Index>(std::ceil(padding * static_cast<double>(n_interior + 1))));
  h.padded_points = big;
  const RieszOperator op(params, 0.5 * static_cast<double>(big) * h.spacing, big, {options.symbol, true});
  const Eigen::Index offset = big / 2 - n_interior / 2;

  h.matrix.resize(n_interior, n_interior);
  parallel_for(static_cast<std::size_t>(n_interior), options.threads, [&](std::size_t col) {
    const auto j = static_cast<Eigen::Index>(col);
    Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(big);
    delta(offset + j) = 1.0;
    const Eigen::VectorXcd image = op.apply(delta);
    h.matrix.col(j) = params.d_alpha * image.segment(offset, n_interior).real();
  });
  // Remove roundoff asymmetry of the FFT columns.
  h.matrix = 0.5 * (h.matrix + h.matrix.transpose()).eval();
  if (tag == PotentialTag::oscillator) {
    h.matrix.diagonal().array() += 0.5 * params.spring_k * h.grid.array().square();
  }
  return h;
}

EigenResult solve_eigen(const DiscreteHamiltonian& h, Eigen::Index count) {
  if (count < 1 || count > h.n_interior()) {
    throw DomainError("eigenpair count must be in [1, " + std::to_string(h.n_interior()) + "], got " +
                      std::to_string(count));
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
  if (solver.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver did not converge");
  EigenResult r;
  r.grid = h.grid;
  r.energies = solver.eigenvalues().head(count);
  r.states = solver.eigenvectors().leftCols(count);
  r.residuals.resize(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    Eigen::Index peak = 0;
    r.states.col(k).cwiseAbs().maxCoeff(&peak);
    if (r.states(peak, k) < 0.0) r.states.col(k) *= -1.0;
    const Eigen::VectorXd v = r.states.col(k);
    r.residuals(k) = (h.matrix * v - r.energies(k) * v).norm() / v.norm();
    if (!(r.residuals(k) <= kResidualLimit)) {
      throw ConvergenceError("eigenpair " + std::to_string(k) + " residual " + std::to_string(r.residuals(k)) +
                             " exceeds " + std::to_string(kResidualLimit));
    }
  }
  return r;
}

double rayleigh_quotient(const DiscreteHamiltonian& h, const Eigen::VectorXd& v) {
  return v.dot(h.matrix * v) / v.squaredNorm();
}

double shape_defect(const Eigen::VectorXd& v, const Eigen::VectorXd& f) {
  const double c = f.dot(v) / f.squaredNorm();
  return (v - c * f).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
}

ConvergenceTable convergence_study(PotentialTag tag, const PhysParams& params, std::vector<Eigen::Index> resolutions,
                                   std::vector<double> paddings, const GridOptions& options) {
  if (resolutions.empty() || paddings.empty()) throw DomainError("convergence study needs resolutions and paddings");
  std::sort(resolutions.begin(), resolutions.end());
  std::sort(paddings.begin(), paddings.end());
  ConvergenceTable t;
  for (double padding : paddings) {
    for (Eigen::Index n : resolutions) {
      const DiscreteHamiltonian h = build_hamiltonian(tag, params, n, padding, options);
      t.rows.push_back({n, padding, h.spacing, solve_eigen(h, 1).energies(0)});
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  t.observed_order = nan;
  t.extrapolated = t.rows.back().ground_energy;
  if (resolutions.size() < 3) return t;
  const ConvergenceRow& c = t.rows[t.rows.size() - 3];
  const ConvergenceRow& b = t.rows[t.rows.size() - 2];
  const ConvergenceRow& a = t.rows.back();
  const double ratio = b.spacing / a.spacing;
  const double d1 = c.ground_energy - b.ground_energy;
  const double d2 = b.ground_energy - a.ground_energy;
  if (d2 == 0.0 || d1 / d2 <= 0.0) return t;
  t.observed_order = std::log(d1 / d2) / std::log(ratio);
  t.extrapolated = a.ground_energy - d2 / (std::pow(ratio, t.observed_order) - 1.0);
  return t;
}

void write_states_csv(std::ostream& out, const EigenResult& result) {
  out << "x";
  for (Eigen::Index k = 0; k < result.states.cols(); ++k) out << ",v" << k;
  out << '\n';
  for (Eigen::Index i = 0; i < result.grid.size(); ++i) {
    out << format_number(result.grid(i));
    for (Eigen::Index k = 0; k < result.states.cols(); ++k) out << ',' << format_number(result.states(i, k));
    out << '\n';
  }
}

void write_energies_csv(std::ostream& out, const EigenResult& result) {
  out << "n,E,residual\n";
  for (Eigen::Index k = 0; k < result.energies.size(); ++k) {
    out << k << ',' << format_number(result.energies(k)) << ',' << format_number(result.residuals(k)) << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const DiscreteHamiltonian& h) {
  for (Eigen::Index i = 0; i < h.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_number(h.matrix(i, j));
    }
    out << '\n';
  }
}

void write_csv(std::ostream& out, const ConvergenceTable& table) {
  out << "n_interior,padding,h,E0\n";
  for (const auto& r : table.rows) {
    out << r.n_interior << ',' << format_number(r.padding) << ',' << format_number(r.spacing) << ','
        << format_number(r.ground_energy) << '\n';
  }
}

nlohmann::json to_json(const EigenResult& result) {
  nlohmann::json states = nlohmann::json::array();
  for (Eigen::Index k = 0; k < result.states.cols(); ++k) {
    const Eigen::VectorXd v = result.states.col(k);
    states.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  }
  return {{"energies", std::vector<double>(result.energies.data(), result.energies.data() + result.energies.size())},
          {"residuals", std::vector<double>(result.residuals.data(), result.residuals.data() + result.residuals.size())},
          {"grid", std::vector<double>(result.grid.data(), result.grid.data() + result.grid.size())},
          {"states", states}};
}

nlohmann::json to_json(const ConvergenceTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"n_interior", r.n_interior}, {"padding", r.padding}, {"h", r.spacing}, {"E0", r.ground_energy}});
  }
  auto number = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  return {{"rows", rows}, {"observed_order", number(table.observed_order)}, {"extrapolated", number(table.extrapolated)}};
}

}  // namespace fracq
