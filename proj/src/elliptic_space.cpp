#include "mtfd/elliptic_space.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "mtfd/errors.hpp"

namespace mtfd {

SpaceGrid::SpaceGrid(double x_lo, double x_hi, int n_cells) : x_lo_(x_lo), x_hi_(x_hi), n_cells_(n_cells) {
  if (!(x_lo < x_hi) || !std::isfinite(x_lo) || !std::isfinite(x_hi)) {
    throw ConfigError("SpaceGrid: need finite x_lo < x_hi");
  }
  if (n_cells < 2) throw ConfigError("SpaceGrid: need at least 2 cells");
}

Eigen::VectorXd SpaceGrid::sample(const std::function<double(double)>& f) const {
  Eigen::VectorXd v(n_nodes());
  for (Eigen::Index i = 0; i < n_nodes(); ++i) v[i] = f(node(i));
  return v;
}

Eigen::SparseMatrix<double> assemble(const SpaceGrid& grid, const EllipticCoefficients& coeff) {
  const Eigen::Index n = grid.n_interior();
  const double h = grid.step();
  // Face diffusivities a_{i+1/2}, i = 0..n_cells-1.
  Eigen::VectorXd face(grid.n_cells());
  for (int i = 0; i < grid.n_cells(); ++i) {
    face[i] = coeff.a(grid.node(i) + 0.5 * h);
    if (!(face[i] > 0.0) || !std::isfinite(face[i])) {
      throw CoefficientError("assemble: diffusivity must be positive, a(" +
                             std::to_string(grid.node(i) + 0.5 * h) + ") = " + std::to_string(face[i]));
    }
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(3 * n));
  const double inv_h2 = 1.0 / (h * h);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index node = k + 1;
    const double c = coeff.c(grid.node(node));
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw CoefficientError("assemble: potential must be >= 0, c(" + std::to_string(grid.node(node)) +
                             ") = " + std::to_string(c));
    }
    entries.emplace_back(k, k, (face[node - 1] + face[node]) * inv_h2 + c);
    if (k > 0) entries.emplace_back(k, k - 1, -face[node - 1] * inv_h2);
    if (k + 1 < n) entries.emplace_back(k, k + 1, -face[node] * inv_h2);
  }
  Eigen::SparseMatrix<double> matrix(n, n);
  matrix.setFromTriplets(entries.begin(), entries.end());
  return matrix;
}

int default_mode_count(const SpaceGrid& grid) {
  return static_cast<int>(std::min<Eigen::Index>(64, grid.n_interior()));
}

EigenSystem eigensystem(const SpaceGrid& grid, const Eigen::SparseMatrix<double>& matrix, int n_modes) {
  const Eigen::Index n = grid.n_interior();
  if (matrix.rows() != n || matrix.cols() != n) throw GridMismatch("eigensystem: matrix does not match grid");
  if (n_modes < 1 || n_modes > n) {
    throw ConfigError("eigensystem: n_modes must lie in [1, " + std::to_string(n) + "]");
  }
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (Eigen::Index k = 0; k < n; ++k) diag[k] = matrix.coeff(k, k);
  for (Eigen::Index k = 0; k + 1 < n; ++k) sub[k] = matrix.coeff(k + 1, k);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw SolverError("eigensystem: tridiagonal eigensolver failed");

  EigenSystem eig{grid, solver.eigenvalues().head(n_modes),
                  solver.eigenvectors().leftCols(n_modes) / std::sqrt(grid.step())};
  // Fix the sign so each mode has a positive first nonzero entry.
  for (Eigen::Index m = 0; m < n_modes; ++m) {
    Eigen::Index idx = 0;
    eig.modes.col(m).cwiseAbs().maxCoeff(&idx);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(eig.modes(k, m)) > 1e-8 * std::abs(eig.modes(idx, m))) {
        idx = k;
        break;
      }
    }
    if (eig.modes(idx, m) < 0.0) eig.modes.col(m) *= -1.0;
  }
  return eig;
}

Eigen::VectorXd EigenSystem::mode_on_nodes(Eigen::Index n) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.n_nodes());
  v.segment(1, grid.n_interior()) = modes.col(n);
  return v;
}

Eigen::VectorXd EigenSystem::project(const Eigen::VectorXd& u_nodes) const {
  if (u_nodes.size() != grid.n_nodes()) throw GridMismatch("project: vector does not match grid");
  return grid.step() * (modes.transpose() * u_nodes.segment(1, grid.n_interior()));
}

Eigen::VectorXd EigenSystem::synthesize(const Eigen::VectorXd& coefficients) const {
  if (coefficients.size() != count()) throw GridMismatch("synthesize: coefficient count mismatch");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.n_nodes());
  v.segment(1, grid.n_interior()) = modes * coefficients;
  return v;
}

double Subdomain::measure() const {
  double total = 0.0;
  for (const auto& [lo, hi] : intervals) total += hi - lo;
  return total;
}

Eigen::VectorXd observe_weights(const SpaceGrid& grid, const Subdomain& omega) {
  if (omega.intervals.empty()) throw ConfigError("observe_weights: subdomain is empty");
  auto sorted = omega.intervals;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    const auto [lo, hi] = sorted[j];
    if (!(lo < hi)) throw ConfigError("observe_weights: intervals must have positive length");
    if (lo < grid.x_lo() || hi > grid.x_hi()) throw ConfigError("observe_weights: interval outside the domain");
    if (j > 0 && lo < sorted[j - 1].second) throw ConfigError("observe_weights: intervals overlap");
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(grid.n_nodes());
  for (int i = 0; i < grid.n_cells(); ++i) {
    const double a = grid.node(i);
    const double b = grid.node(i + 1);
    double overlap = 0.0;
    for (const auto& [lo, hi] : sorted) overlap += std::max(0.0, std::min(b, hi) - std::max(a, lo));
    w[i] += 0.5 * overlap;
    w[i + 1] += 0.5 * overlap;
  }
  return w;
}

double space_inner(const SpaceGrid& grid, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != grid.n_nodes() || v.size() != grid.n_nodes()) throw GridMismatch("space_inner: size mismatch");
  return grid.step() * u.segment(1, grid.n_interior()).dot(v.segment(1, grid.n_interior()));
}

}  // namespace mtfd
