#ifndef FRACQ_GRID_SOLVER_HPP
#define FRACQ_GRID_SOLVER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "fracq/params.hpp"
#include "fracq/riesz.hpp"

namespace fracq {

enum class PotentialTag { well, oscillator };

std::string to_string(PotentialTag tag);
PotentialTag parse_potential(const std::string& name);

struct GridOptions {
  Symbol symbol = Symbol::lattice;
  /// Half-width X of the soft oscillator domain [-X, X]; unused for the well.
  double oscillator_halfwidth = 8.0;
  int threads = 1;
};

/// H = D_alpha (-hbar^2 Laplacian)^(alpha/2) + V on interior points x_j = -X + (j+1) h,
/// h = 2X / (n+1), with the exterior held at zero.
struct DiscreteHamiltonian {
  PotentialTag tag = PotentialTag::well;
  PhysParams params;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd grid;
  double spacing = 0.0;
  /// Size of the periodic grid the Riesz block was computed on.
  Eigen::Index padded_points = 0;

  Eigen::Index n_interior() const { return grid.size(); }
};

/// Columns of the Riesz block come from riesz_apply on each interior delta, zero-padded
/// to a grid `padding` times the domain. Requires 0 <= alpha <= 2, n_interior >= 16, padding >= 4.
DiscreteHamiltonian build_hamiltonian(PotentialTag tag, const PhysParams& params, Eigen::Index n_interior = 256,
                                      double padding = 16.0, const GridOptions& options = {});

struct EigenResult {
  Eigen::VectorXd energies;
  /// Eigenvectors as columns, unit 2-norm, sign fixed so the largest component is positive.
  Eigen::MatrixXd states;
  Eigen::VectorXd grid;
  /// ||H v - E v|| / ||v|| per eigenpair.
  Eigen::VectorXd residuals;
};

/// Lowest `count` eigenpairs by tridiagonalization and QL. Throws ConvergenceError
/// if the solver fails or a residual exceeds 1e-8.
EigenResult solve_eigen(const DiscreteHamiltonian& h, Eigen::Index count);

/// v^T H v / v^T v.
double rayleigh_quotient(const DiscreteHamiltonian& h, const Eigen::VectorXd& v);

/// min over c of sup |v - c f| / sup |v| with c from least squares.
double shape_defect(const Eigen::VectorXd& v, const Eigen::VectorXd& f);

struct ConvergenceRow {
  Eigen::Index n_interior = 0;
  double padding = 0.0;
  double spacing = 0.0;
  double ground_energy = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// From the three finest resolutions at the largest padding; NaN with fewer than three.
  double observed_order = 0.0;
  double extrapolated = 0.0;
};

ConvergenceTable convergence_study(PotentialTag tag, const PhysParams& params, std::vector<Eigen::Index> resolutions,
                                   std::vector<double> paddings, const GridOptions& options = {});

/// CSV: x, then one column per state (v0, v1, ...).
void write_states_csv(std::ostream& out, const EigenResult& result);
/// CSV: n, E, residual.
void write_energies_csv(std::ostream& out, const EigenResult& result);
/// Headerless dense matrix, one row per line.
void write_matrix_csv(std::ostream& out, const DiscreteHamiltonian& h);
/// CSV: n_interior, padding, h, E0.
void write_csv(std::ostream& out, const ConvergenceTable& table);

nlohmann::json to_json(const EigenResult& result);
nlohmann::json to_json(const ConvergenceTable& table);

}  // namespace fracq

#endif  // FRACQ_GRID_SOLVER_HPP
