#include "mtfd/pde_solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "mtfd/errors.hpp"
#include "mtfd/frac_calc.hpp"
#include "mtfd/gamma.hpp"

namespace mtfd {

namespace {

constexpr double kTailWarning = 1e-6;

void require_nodes(const SpaceGrid& grid, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != grid.n_nodes()) throw GridMismatch(std::string(what) + ": vector does not match the space grid");
  if (!v.allFinite()) throw DomainError(std::string(what) + ": non-finite entries");
}

void require_source(const SpaceGrid& sgrid, const TimeGrid& tgrid, const SourceSpec& src) {
  require_same_grid(src.g.grid, tgrid, "source");
  require_nodes(sgrid, src.f, "source f");
}

Eigen::MatrixXd embed(const SpaceGrid& grid, const Eigen::MatrixXd& interior) {
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(grid.n_nodes(), interior.cols());
  full.middleRows(1, grid.n_interior()) = interior;
  return full;
}

// Combined L1 coefficients β_m = Σ_j q_j h^{-α_j}/Γ(2-α_j) b_m^{(j)}.
Eigen::VectorXd combined_l1_weights(const MultiTermSpec& spec, double dt, Eigen::Index n) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  for (const Term& term : spec.terms()) {
    const double scale = term.q * std::pow(dt, -term.alpha) / gamma_fn(2.0 - term.alpha);
    beta += scale * detail::l1_weights(term.alpha, n);
  }
  return beta;
}

// Σ_m c_m e^{-λ_m τ} φ_m as interior values, for each column of `decay`.
Eigen::MatrixXd modal_field(const EigenSystem& eig, const Eigen::VectorXd& coeff, const Eigen::MatrixXd& decay) {
  return eig.modes * (decay.array().colwise() * coeff.array()).matrix();
}

}  // namespace

Eigen::MatrixXd l1_march(const MultiTermSpec& spec, const Eigen::SparseMatrix<double>& matrix, double dt,
                         const Eigen::VectorXd& u0_interior, const Eigen::MatrixXd& source) {
  const Eigen::Index n = matrix.rows();
  const Eigen::Index steps = source.cols() - 1;
  if (u0_interior.size() != n || source.rows() != n) throw GridMismatch("l1_march: size mismatch");
  if (steps < 1) throw GridMismatch("l1_march: need at least one step");

  const Eigen::VectorXd beta = combined_l1_weights(spec, dt, steps);
  Eigen::SparseMatrix<double> system = matrix;
  for (Eigen::Index k = 0; k < n; ++k) system.coeffRef(k, k) += beta[0];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(system);
  if (solver.info() != Eigen::Success) throw SolverError("l1_march: step matrix factorization failed");

  Eigen::MatrixXd u(n, steps + 1);
  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(n, steps + 1);  // column i: u^i - u^{i-1}
  u.col(0) = u0_interior;
  for (Eigen::Index k = 1; k <= steps; ++k) {
    Eigen::VectorXd rhs = beta[0] * u.col(k - 1) + source.col(k);
    if (k > 1) rhs.noalias() -= diff.middleCols(1, k - 1) * beta.segment(1, k - 1).reverse();
    u.col(k) = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !u.col(k).allFinite()) {
      throw SolverError("l1_march: linear solve failed at step " + std::to_string(k));
    }
    diff.col(k) = u.col(k) - u.col(k - 1);
  }
  return u;
}

SpaceTimeField solve_heat(const EigenSystem& eig, const Eigen::VectorXd& u0, const TimeGrid& tgrid) {
  require_nodes(eig.grid, u0, "solve_heat");
  const Eigen::VectorXd coeff = eig.project(u0);
  Eigen::MatrixXd decay(eig.count(), tgrid.size());
  for (Eigen::Index k = 0; k < tgrid.size(); ++k) decay.col(k) = (-eig.eigenvalues.array() * tgrid.node(k)).exp();
  return {eig.grid, tgrid, embed(eig.grid, modal_field(eig, coeff, decay))};
}

SpaceTimeField solve_forward_spectral(const MultiTermSpec& spec, const EigenSystem& eig,
                                      const Eigen::VectorXd& u0, const SourceSpec& src,
                                      const TimeGrid& tgrid, const ContourSpec& contour) {
  contour.validate(spec);
  require_nodes(eig.grid, u0, "solve_forward_spectral");
  require_source(eig.grid, tgrid, src);

  const Eigen::Index modes = eig.count();
  const Eigen::Index nt = tgrid.size();
  const Eigen::VectorXd c0 = eig.project(u0);
  const Eigen::VectorXd cf = eig.project(src.f);
  const bool has_source = src.g.values.cwiseAbs().maxCoeff() > 0.0 && cf.cwiseAbs().maxCoeff() > 0.0;

  // Per-mode responses at every positive node.
  Eigen::MatrixXd relax(modes, nt), step(modes, nt), ramp(modes, nt);
  relax.col(0).setOnes();
  step.col(0).setZero();
  ramp.col(0).setZero();
  const std::span<const double> lambdas(eig.eigenvalues.data(), static_cast<std::size_t>(modes));
  for (Eigen::Index k = 1; k < nt; ++k) {
    const auto responses = mode_responses(spec, lambdas, contour, tgrid.node(k));
    for (Eigen::Index n = 0; n < modes; ++n) {
      relax(n, k) = responses[static_cast<std::size_t>(n)].relaxation;
      step(n, k) = responses[static_cast<std::size_t>(n)].step;
      ramp(n, k) = responses[static_cast<std::size_t>(n)].ramp;
    }
  }

  Eigen::MatrixXd modal = relax.array().colwise() * c0.array();
  if (has_source) {
    // Product integration of the piecewise-linear g against h_n: weights from
    // second differences of the ramp response.
    const double dt = tgrid.step();
    const Eigen::VectorXd& g = src.g.values;
    for (Eigen::Index k = 1; k < nt; ++k) {
      Eigen::VectorXd conv = g[k] * ramp.col(1) / dt;
      for (Eigen::Index j = 1; j < k; ++j) {
        conv += g[k - j] * (ramp.col(j + 1) - 2.0 * ramp.col(j) + ramp.col(j - 1)) / dt;
      }
      conv += g[0] * (step.col(k) - (ramp.col(k) - ramp.col(k - 1)) / dt);
      modal.col(k) += cf.cwiseProduct(conv);
    }
  }
  return {eig.grid, tgrid, embed(eig.grid, eig.modes * modal)};
}

SpaceTimeField solve_forward_l1(const MultiTermSpec& spec, const SpaceGrid& sgrid,
                                const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& u0,
                                const SourceSpec& src, const TimeGrid& tgrid) {
  require_nodes(sgrid, u0, "solve_forward_l1");
  require_source(sgrid, tgrid, src);
  if (matrix.rows() != sgrid.n_interior() || matrix.cols() != sgrid.n_interior()) {
    throw GridMismatch("solve_forward_l1: matrix does not match the space grid");
  }
  const Eigen::VectorXd f = src.f.segment(1, sgrid.n_interior());
  const Eigen::MatrixXd source = f * src.g.values.transpose();
  const Eigen::MatrixXd u = l1_march(spec, matrix, tgrid.step(), u0.segment(1, sgrid.n_interior()), source);
  return {sgrid, tgrid, embed(sgrid, u)};
}

SubordinationResult subordinate(const KernelFn& kernel, const EigenSystem& eig, const Eigen::VectorXd& u0,
                                const TimeGrid& tgrid, double tau_max, int n_tau) {
  require_nodes(eig.grid, u0, "subordinate");
  if (!(tau_max > 0.0) || !std::isfinite(tau_max)) throw DomainError("subordinate: tau_max must be positive");
  if (n_tau < 2) throw DomainError("subordinate: n_tau must be >= 2");

  const Eigen::VectorXd coeff = eig.project(u0);
  const TimeGrid tau_grid(tau_max, n_tau);
  const Eigen::VectorXd wtau = trapezoid_weights(tau_grid);

  // e^{-λ_n τ_m}, modes x τ nodes.
  Eigen::MatrixXd heat(eig.count(), tau_grid.size());
  for (Eigen::Index m = 0; m < tau_grid.size(); ++m) heat.col(m) = (-eig.eigenvalues.array() * tau_grid.node(m)).exp();

  Eigen::MatrixXd factors(eig.count(), tgrid.size());
  factors.col(0).setOnes();
  for (Eigen::Index k = 1; k < tgrid.size(); ++k) {
    Eigen::VectorXd weights(tau_grid.size());
    for (Eigen::Index m = 0; m < tau_grid.size(); ++m) weights[m] = wtau[m] * kernel(tgrid.node(k), tau_grid.node(m));
    factors.col(k) = heat * weights;
  }

  SubordinationResult out{{eig.grid, tgrid, embed(eig.grid, modal_field(eig, coeff, factors))}, 0.0, {}};
  // Beyond τ_max the heat flow is bounded by Σ|c_n| e^{-λ_n τ_max} max|φ_n|, and K integrates to at most 1.
  for (Eigen::Index n = 0; n < eig.count(); ++n) {
    out.tail_estimate += std::abs(coeff[n]) * std::exp(-eig.eigenvalues[n] * tau_max) * eig.modes.col(n).cwiseAbs().maxCoeff();
  }
  if (out.tail_estimate > kTailWarning) {
    std::ostringstream msg;
    msg << "subordinate: truncation tail estimate " << out.tail_estimate << " exceeds " << kTailWarning;
    out.warnings.push_back(msg.str());
  }
  return out;
}

SubordinationResult subordinate(const MultiTermSpec& spec, const EigenSystem& eig, const Eigen::VectorXd& u0,
                                const TimeGrid& tgrid, const ContourSpec& contour, double tau_max,
                                int n_tau) {
  contour.validate(spec);
  return subordinate([&](double t, double tau) { return subordination_kernel(spec, contour, t, tau); }, eig, u0,
                     tgrid, tau_max, n_tau);
}

TimeSeries observe(const SpaceTimeField& field, const Eigen::VectorXd& weights) {
  if (weights.size() != field.values.rows()) throw GridMismatch("observe: weights do not match the field");
  return {field.tgrid, field.values.transpose() * weights};
}

DuhamelResult duhamel_residual(const MultiTermSpec& spec, const EigenSystem& eig, const SourceSpec& src,
                               const Subdomain& omega, const TimeGrid& tgrid, const ContourSpec& contour) {
  const Eigen::VectorXd weights = observe_weights(eig.grid, omega);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(eig.grid.n_nodes());
  const SpaceTimeField u = solve_forward_spectral(spec, eig, zero, src, tgrid, contour);
  const SpaceTimeField v =
      solve_forward_spectral(spec, eig, src.f, SourceSpec::none(tgrid, eig.grid), tgrid, contour);
  const TimeSeries obs_u = observe(u, weights);
  const TimeSeries obs_v = observe(v, weights);

  DuhamelResult out;
  out.lhs = Eigen::VectorXd::Zero(tgrid.size());
  for (const Term& term : spec.terms()) {
    out.lhs += term.q * rl_integral_forward(FractionalOrder(1.0 - term.alpha), tgrid, obs_u.values);
  }
  out.rhs = convolve(tgrid, src.g.values, obs_v.values);
  out.residual = (out.lhs - out.rhs).cwiseAbs().maxCoeff();
  const double scale = out.lhs.cwiseAbs().maxCoeff();
  out.relative = scale > 0.0 ? out.residual / scale : out.residual;
  return out;
}

SpaceTimeField solve_adjoint(const MultiTermSpec& spec, const SpaceGrid& sgrid,
                             const Eigen::SparseMatrix<double>& matrix, const TimeSeries& residual,
                             const Eigen::VectorXd& omega_weights) {
  if (omega_weights.size() != sgrid.n_nodes()) throw GridMismatch("solve_adjoint: weights do not match the grid");
  if (matrix.rows() != sgrid.n_interior()) throw GridMismatch("solve_adjoint: matrix does not match the grid");
  const TimeGrid& tgrid = residual.grid;
  const Eigen::Index n = tgrid.n_steps();
  const Eigen::VectorXd chi = omega_weights.segment(1, sgrid.n_interior()) / sgrid.step();
  const Eigen::VectorXd d = trapezoid_weights(tgrid);

  // Reflected, one-step-shifted march: source at reflected step i+1 is χ D_{N-i} r_{N-i}.
  Eigen::VectorXd rho(n + 2);
  rho[0] = 0.0;
  for (Eigen::Index i = 0; i <= n; ++i) rho[i + 1] = d[n - i] * residual[n - i];
  const Eigen::MatrixXd y =
      l1_march(spec, matrix, tgrid.step(), Eigen::VectorXd::Zero(sgrid.n_interior()), chi * rho.transpose());

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(sgrid.n_interior(), n + 1);
  for (Eigen::Index m = 1; m <= n; ++m) w.col(m) = y.col(n - m + 1) / d[m];
  return {sgrid, tgrid, embed(sgrid, w)};
}

}  // namespace mtfd
