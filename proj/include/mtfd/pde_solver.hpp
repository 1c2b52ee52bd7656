#pragma once

// Forward, heat, subordination and adjoint solvers for
//   Σ_j q_j ∂_t^{α_j}(u - u0) + A u = g(t) f(x),  u = 0 on the boundary.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <string>
#include <vector>

#include "mtfd/elliptic_space.hpp"
#include "mtfd/time_series.hpp"
#include "mtfd/transform_kernels.hpp"

namespace mtfd {

/// u(x_i, t_k): rows are space nodes (boundary rows zero), columns time nodes.
struct SpaceTimeField {
  SpaceGrid sgrid;
  TimeGrid tgrid;
  Eigen::MatrixXd values;

  static SpaceTimeField zeros(const SpaceGrid& s, const TimeGrid& t) {
    return {s, t, Eigen::MatrixXd::Zero(s.n_nodes(), t.size())};
  }
  Eigen::VectorXd at(Eigen::Index k) const { return values.col(k); }
};

/// Separable source F(x,t) = g(t) f(x); f holds full-node values.
struct SourceSpec {
  TimeSeries g;
  Eigen::VectorXd f;

  static SourceSpec none(const TimeGrid& t, const SpaceGrid& s) {
    return {TimeSeries::zeros(t), Eigen::VectorXd::Zero(s.n_nodes())};
  }
};

/// Heat flow w(t) = Σ_n <u0,φ_n> e^{-λ_n t} φ_n over the retained modes.
SpaceTimeField solve_heat(const EigenSystem& eig, const Eigen::VectorXd& u0, const TimeGrid& tgrid);

/// Mode-wise solution from the contour inverse Laplace transform:
/// u_n(t) = <u0,φ_n> y_n(t) + <f,φ_n> (g * h_n)(t), with the convolution done by
/// product integration of the piecewise-linear g against h_n.
SpaceTimeField solve_forward_spectral(const MultiTermSpec& spec, const EigenSystem& eig,
                                      const Eigen::VectorXd& u0, const SourceSpec& src,
                                      const TimeGrid& tgrid, const ContourSpec& contour);

/// Implicit L1 time stepping in physical space.
SpaceTimeField solve_forward_l1(const MultiTermSpec& spec, const SpaceGrid& sgrid,
                                const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& u0,
                                const SourceSpec& src, const TimeGrid& tgrid);

struct SubordinationResult {
  SpaceTimeField field;
  double tail_estimate = 0.0;
  std::vector<std::string> warnings;
};

using KernelFn = std::function<double(double t, double tau)>;

/// u(t) = ∫_0^{τ_max} w(τ) K(t,τ) dτ by the trapezoid rule on n_tau panels, with w
/// the heat flow from u0. Column 0 holds the projected u0.
SubordinationResult subordinate(const MultiTermSpec& spec, const EigenSystem& eig, const Eigen::VectorXd& u0,
                                const TimeGrid& tgrid, const ContourSpec& contour, double tau_max,
                                int n_tau);

/// Same with an explicit kernel (e.g. a closed form).
SubordinationResult subordinate(const KernelFn& kernel, const EigenSystem& eig, const Eigen::VectorXd& u0,
                                const TimeGrid& tgrid, double tau_max, int n_tau);

struct DuhamelResult {
  Eigen::VectorXd lhs;  // Σ q_j J^{1-α_j} (∫_ω u)
  Eigen::VectorXd rhs;  // g * (∫_ω v)
  double residual = 0.0;  // max |lhs - rhs|
  double relative = 0.0;  // residual / max |lhs|
};

/// Checks the integral identity linking the source solution u (u0 = 0) with the
/// homogeneous solution v (v(0) = f). Both fields come from the spectral solver.
DuhamelResult duhamel_residual(const MultiTermSpec& spec, const EigenSystem& eig, const SourceSpec& src,
                               const Subdomain& omega, const TimeGrid& tgrid, const ContourSpec& contour);

/// Weighted row sums Σ_i w_i u(x_i, t_k).
TimeSeries observe(const SpaceTimeField& field, const Eigen::VectorXd& weights);

/// Adjoint state of the L1-discretized observation map g -> ∫_ω u[g] dx.
///
/// Solves the backward problem by the reflection t -> T - t: the reflected
/// problem is a forward L1 march with zero initial state and source χ_ω times the
/// trapezoid-weighted residual, shifted by one step so that the result is the
/// exact transpose of the discrete forward map in the trapezoid L²(0,T) inner
/// product. χ_ω is discretized by the observation weights divided by h. The value
/// at t = 0 is zero (g(0) does not enter the implicit scheme).
SpaceTimeField solve_adjoint(const MultiTermSpec& spec, const SpaceGrid& sgrid,
                             const Eigen::SparseMatrix<double>& matrix, const TimeSeries& residual,
                             const Eigen::VectorXd& omega_weights);

/// L1 march on interior nodes. `source` has one column per time node; column 0 is
/// never used. Returns the interior states, column k at t_k.
Eigen::MatrixXd l1_march(const MultiTermSpec& spec, const Eigen::SparseMatrix<double>& matrix, double dt,
                         const Eigen::VectorXd& u0_interior, const Eigen::MatrixXd& source);

}  // namespace mtfd
