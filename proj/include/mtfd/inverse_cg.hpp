#pragma once

// Reconstruction of the temporal source factor g(t) from the observation
// E(t) = ∫_ω u[g](x,t) dx by conjugate gradients on the Tikhonov functional
//   Φ(g) = ½‖G g - E^δ‖² + ½λ‖g‖²,   G g = ∫_ω u[g] dx,  u0 = 0.

#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtfd/elliptic_space.hpp"
#include "mtfd/errors.hpp"
#include "mtfd/time_series.hpp"
#include "mtfd/transform_kernels.hpp"

namespace mtfd {

struct InverseConfig {
  MultiTermSpec spec = MultiTermSpec::single(0.5);
  SpaceGrid sgrid{0.0, 1.0, 50};
  EllipticCoefficients coeff;
  Eigen::VectorXd f;  // spatial factor, full-node values
  Subdomain omega = Subdomain::interval(0.4, 0.6);
  double lambda_reg = 1e-5;
  double epsilon = 1e-3;
  int max_iters = 50;
  std::optional<TimeSeries> g0;  // zero on the data grid when unset
  std::uint64_t seed = 0;
  double delta = 0.0;

  /// Throws ConfigError on λ < 0, ε <= 0, max_iters < 1 or a mismatched f.
  void validate() const;
};

/// The discrete observation map G and its transpose, with the operator matrix
/// and observation weights assembled once.
class ObservationMap {
 public:
  explicit ObservationMap(const InverseConfig& cfg);

  /// ∫_ω u[g] dx on the grid of g (L1 scheme, u0 = 0).
  TimeSeries apply(const TimeSeries& g) const;
  /// G* r = ∫_Ω f w[r] dx, exact transpose of apply() in the trapezoid L²(0,T) product.
  TimeSeries adjoint(const TimeSeries& r) const;

  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  MultiTermSpec spec_;
  SpaceGrid sgrid_;
  Eigen::VectorXd f_;
  Eigen::SparseMatrix<double> matrix_;
  Eigen::VectorXd weights_;
};

/// E^δ = (1 + δ U(-1,1)) E pointwise, with a seeded 64-bit Mersenne twister.
TimeSeries add_noise(const TimeSeries& e, double delta, std::uint64_t seed);

double objective(const TimeSeries& g, const TimeSeries& data, const InverseConfig& cfg);

/// Φ'(g) = ∫_Ω f w dx + λ g with w the adjoint state for the residual G g - E^δ.
TimeSeries gradient(const TimeSeries& g, const TimeSeries& data, const InverseConfig& cfg);

/// Exact line-search step along d for the quadratic Φ; `gd` is G d.
/// Throws DegenerateDirection when ‖G d‖² + λ‖d‖² vanishes.
double step_size(const TimeSeries& g, const TimeSeries& d, const TimeSeries& gd, const TimeSeries& data,
                 const InverseConfig& cfg);

enum class StopReason { Discrepancy, Gradient, MaxIterations };

std::string to_string(StopReason reason);

struct ReconstructionResult {
  TimeSeries g_rec;
  int iterations = 0;
  StopReason stop_reason = StopReason::MaxIterations;
  std::vector<double> residual_history;   // ‖G g_k - E^δ‖, k = 0..iterations
  std::vector<double> objective_history;  // Φ(g_k)
  std::vector<double> gradient_history;   // ‖Φ'(g_k)‖
  std::optional<double> rel_error;        // ‖g_rec - g_true‖ / ‖g_true‖
};

/// Raised when an iterate stops being finite; carries the history so far.
class DivergenceError : public SolverError {
 public:
  DivergenceError(const std::string& what, std::vector<double> residuals)
      : SolverError(what), residual_history(std::move(residuals)) {}
  std::vector<double> residual_history;
};

/// Fletcher-Reeves CG with exact line search. Stops when
///   ‖G g_k - E^δ‖ <= 1.01 δ ‖E^δ‖                  (discrepancy principle),
///   ‖Φ'(g_k)‖ <= ε ‖Φ'(g_0)‖                       (relative gradient), or
///   k = max_iters.
ReconstructionResult reconstruct(const InverseConfig& cfg, const TimeSeries& data,
                                 const std::optional<TimeSeries>& g_truth = std::nullopt);

}  // namespace mtfd
