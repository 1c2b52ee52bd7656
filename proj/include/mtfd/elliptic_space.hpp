#pragma once

// One-dimensional Dirichlet discretization of A u = -(a u')' + c u.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <utility>
#include <vector>

namespace mtfd {

/// Uniform nodes x_i = x_lo + i h, i = 0..n_cells. Nodes 0 and n_cells are the
/// Dirichlet boundary.
class SpaceGrid {
 public:
  SpaceGrid(double x_lo, double x_hi, int n_cells);

  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }
  int n_cells() const { return n_cells_; }
  double step() const { return (x_hi_ - x_lo_) / n_cells_; }
  double length() const { return x_hi_ - x_lo_; }
  Eigen::Index n_nodes() const { return n_cells_ + 1; }
  Eigen::Index n_interior() const { return n_cells_ - 1; }
  double node(Eigen::Index i) const { return i == n_cells_ ? x_hi_ : x_lo_ + static_cast<double>(i) * step(); }

  /// f at every node (boundary included).
  Eigen::VectorXd sample(const std::function<double(double)>& f) const;

  friend bool operator==(const SpaceGrid& a, const SpaceGrid& b) {
    return a.x_lo_ == b.x_lo_ && a.x_hi_ == b.x_hi_ && a.n_cells_ == b.n_cells_;
  }

 private:
  double x_lo_;
  double x_hi_;
  int n_cells_;
};

/// Diffusivity a(x) > 0 and potential c(x) >= 0.
struct EllipticCoefficients {
  std::function<double(double)> a = [](double) { return 1.0; };
  std::function<double(double)> c = [](double) { return 0.0; };

  static EllipticCoefficients laplacian() { return {}; }
};

/// Interior-node operator matrix (size n_interior squared): conservative flux
/// differences with a sampled at cell midpoints. Symmetric positive definite.
Eigen::SparseMatrix<double> assemble(const SpaceGrid& grid, const EllipticCoefficients& coeff);

/// Lowest eigenpairs, orthonormal in the discrete inner product h Σ u_i v_i.
struct EigenSystem {
  SpaceGrid grid;
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd modes;        // n_interior x count, interior node values

  Eigen::Index count() const { return eigenvalues.size(); }
  /// Mode n on all nodes, zeros at the boundary.
  Eigen::VectorXd mode_on_nodes(Eigen::Index n) const;
  /// Coefficients <u, φ_n> of a full-node vector (boundary entries ignored).
  Eigen::VectorXd project(const Eigen::VectorXd& u_nodes) const;
  /// Σ_n c_n φ_n as a full-node vector.
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coefficients) const;
};

/// Default retained mode count min(64, interior nodes).
int default_mode_count(const SpaceGrid& grid);

/// n_modes lowest eigenpairs of the tridiagonal operator matrix.
EigenSystem eigensystem(const SpaceGrid& grid, const Eigen::SparseMatrix<double>& matrix, int n_modes);

/// Disjoint open intervals inside the domain.
struct Subdomain {
  std::vector<std::pair<double, double>> intervals;

  static Subdomain interval(double lo, double hi) { return Subdomain{{{lo, hi}}}; }
  double measure() const;
};

/// Node weights w_i with Σ w_i u_i ≈ ∫_ω u dx: every cell contributes half its
/// overlap with ω to each of its two end nodes. Sums to |ω| exactly.
Eigen::VectorXd observe_weights(const SpaceGrid& grid, const Subdomain& omega);

/// Discrete L²(Ω) inner product of two full-node vectors.
double space_inner(const SpaceGrid& grid, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

}  // namespace mtfd
