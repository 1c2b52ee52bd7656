#pragma once

// Laplace-domain machinery for the multi-term operator Σ q_j ∂_t^{α_j}:
// the symbol Q(s), inverse Laplace transforms on the contour γ(θ0), the
// subordination kernel and a finite-difference complete-monotonicity check.

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace mtfd {

using cplx = std::complex<double>;

struct Term {
  double q;
  double alpha;
};

/// Terms (q_j, α_j) with q_j > 0 and 1 > α_1 > ... > α_ℓ > 0.
class MultiTermSpec {
 public:
  explicit MultiTermSpec(std::vector<Term> terms);

  /// Single term q ∂^α.
  static MultiTermSpec single(double alpha, double q = 1.0) { return MultiTermSpec({{q, alpha}}); }

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  double leading_order() const { return terms_.front().alpha; }
  double lowest_order() const { return terms_.back().alpha; }

 private:
  std::vector<Term> terms_;
};

/// Q(s) = Σ q_j s^{α_j} with principal-branch powers.
cplx q_of_s(const MultiTermSpec& spec, cplx s);

/// Contour γ(θ0): two rays arg s = ±θ0 joined by a circular arc.
///
/// `radius` is the nominal arc radius; for t > 1 the arc is shrunk to radius/t so
/// that e^{st} stays O(1) on it. A `truncation` of 0 selects the ray length
/// automatically so that the integrand has decayed below e^{-25}. `n_nodes` is the
/// number of quadrature nodes on the arc and the minimum on each ray; it must be a
/// positive multiple of 8 (one 8-point Gauss-Legendre panel).
struct ContourSpec {
  double theta0 = 0.0;
  double radius = 1.0;
  double truncation = 0.0;
  int n_nodes = 256;

  /// θ0 at the midpoint of (π/2, min(π/(2α_1), π)).
  static ContourSpec midpoint(const MultiTermSpec& spec);
  /// Throws InvalidContour unless π/2 < θ0 < min(π/(2α_1), π) and the node
  /// count / truncation are admissible.
  void validate(const MultiTermSpec& spec) const;
};

/// One quadrature node of the inverse Laplace integral at a fixed time t.
/// `weight` already contains ds, e^{st} and 1/(2πi).
struct ContourNode {
  cplx s;
  cplx weight;
};

/// Quadrature nodes for (1/2πi) ∫_γ F(s) e^{st} ds. When the transform carries a
/// factor e^{-Q(s)τ}, pass τ so that panel widths resolve its oscillation and the
/// rays are cut once the combined decay passes e^{-25}.
std::vector<ContourNode> contour_nodes(const MultiTermSpec& spec, const ContourSpec& contour,
                                       double t, double tau = 0.0);

/// Full (both half-planes) contour quadrature of a transform. The imaginary part
/// of the result measures conjugate-symmetry defects.
cplx invert_laplace(const std::vector<ContourNode>& nodes, const std::function<cplx(cplx)>& transform);

/// Time-domain responses of one spectral mode with eigenvalue λ:
///   relaxation  y(t)  = L^{-1}[s^{-1} Q/(Q+λ)]   (homogeneous solution, y(0+) = 1)
///   impulse     h(t)  = L^{-1}[1/(Q+λ)]
///   step        H1(t) = L^{-1}[s^{-1}/(Q+λ)]     (∫_0^t h)
///   ramp        H2(t) = L^{-1}[s^{-2}/(Q+λ)]     (∫_0^t H1)
struct ModeResponse {
  double relaxation = 0.0;
  double impulse = 0.0;
  double step = 0.0;
  double ramp = 0.0;
};

/// Responses for every λ in `lambdas` at time t > 0, sharing one node set.
std::vector<ModeResponse> mode_responses(const MultiTermSpec& spec, std::span<const double> lambdas,
                                         const ContourSpec& contour, double t);

/// y_n(t) for a single eigenvalue.
double relaxation_mode(const MultiTermSpec& spec, double lambda, const ContourSpec& contour, double t);

/// Complex-valued relaxation quadrature; the imaginary part is the symmetry defect.
cplx relaxation_mode_complex(const MultiTermSpec& spec, double lambda, const ContourSpec& contour,
                             double t);

/// K(t,τ) = (1/2πi) ∫_γ s^{-1} Q(s) exp(st - Q(s)τ) ds. The raw quadrature value is
/// returned; small negative noise is not clamped.
double subordination_kernel(const MultiTermSpec& spec, const ContourSpec& contour, double t,
                            double tau);

/// K(t,τ) for each τ in `taus` (τ = 0 allowed).
Eigen::VectorXd subordination_kernel_row(const MultiTermSpec& spec, const ContourSpec& contour,
                                         double t, std::span<const double> taus);

/// τ beyond which the slowest heat mode e^{-λ_1 τ} drops below `tol`.
double kernel_tau_max(double lambda_min, double tol = 1e-10);

/// Numerical complete-monotonicity certificate: true iff (-1)^n Δ^n f(s) >= -tol
/// for every order n <= n_max and every s in the grid, with Δ a central
/// difference of step s/10 and tol = 1e-7 times the stencil magnitude.
bool cm_certificate(const std::function<double(double)>& f, std::span<const double> s_grid,
                    int n_max);

/// Certificate for f(s) = s^{-1} Q(s) e^{-Q(s)τ}, the Laplace transform of K(·,τ).
bool cm_certificate(const MultiTermSpec& spec, double tau, std::span<const double> s_grid,
                    int n_max);

/// Logarithmically spaced points on [lo, hi].
std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace mtfd
