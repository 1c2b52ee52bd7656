#pragma once

// Discrete Riemann-Liouville integrals and Caputo derivatives on uniform grids.
//
// J^α uses product-trapezoid quadrature: the piecewise-linear interpolant of u is
// integrated exactly against the kernel (t-τ)^{α-1}/Γ(α). Caputo derivatives use
// the L1 formula. Backward (right-sided, anchored at T) operators are the forward
// ones conjugated by the time reflection t -> T - t.

#include <Eigen/Core>
#include <cmath>

#include "mtfd/gamma.hpp"
#include "mtfd/time_series.hpp"

namespace mtfd {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Reverse the node order, i.e. u(t) -> u(T - t).
template <typename Derived>
VectorX<typename Derived::Scalar> reflect(const Eigen::MatrixBase<Derived>& u) {
  return u.reverse();
}

template <typename Scalar>
BasicTimeSeries<Scalar> reflect(const BasicTimeSeries<Scalar>& u) {
  return {u.grid, u.values.reverse()};
}

namespace detail {

/// Toeplitz part of the product-trapezoid weights: c_0 = 1,
/// c_m = (m+1)^{a+1} - 2 m^{a+1} + (m-1)^{a+1}.
template <typename Scalar>
VectorX<Scalar> product_trapezoid_weights(Scalar alpha, Eigen::Index n) {
  using std::pow;
  VectorX<Scalar> c(n + 1);
  const Scalar p = alpha + Scalar(1);
  c[0] = Scalar(1);
  for (Eigen::Index m = 1; m <= n; ++m) {
    const Scalar mm = Scalar(m);
    c[m] = pow(mm + 1, p) - Scalar(2) * pow(mm, p) + pow(mm - 1, p);
  }
  return c;
}

/// L1 coefficients b_j = (j+1)^{1-a} - j^{1-a}.
template <typename Scalar>
VectorX<Scalar> l1_weights(Scalar alpha, Eigen::Index n) {
  using std::pow;
  VectorX<Scalar> b(n);
  const Scalar p = Scalar(1) - alpha;
  for (Eigen::Index j = 0; j < n; ++j) b[j] = pow(Scalar(j + 1), p) - pow(Scalar(j), p);
  return b;
}

}  // namespace detail

/// Discrete J^α u on the grid nodes; the value at t = 0 is 0.
template <typename Derived>
VectorX<typename Derived::Scalar> rl_integral_forward(const FractionalOrder& order,
                                                      const TimeGrid& grid,
                                                      const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  using std::pow;
  if (u.size() != grid.size()) throw GridMismatch("rl_integral_forward: size mismatch");
  const Scalar alpha = Scalar(order.value());
  const Eigen::Index n = grid.n_steps();
  const VectorX<Scalar> c = detail::product_trapezoid_weights(alpha, n);
  const Scalar scale = pow(Scalar(grid.step()), alpha) / gamma_fn(alpha + Scalar(2));

  VectorX<Scalar> out = VectorX<Scalar>::Zero(n + 1);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const Scalar kk = Scalar(k);
    // Weight of u_0 has its own closed form.
    Scalar acc = (pow(kk - 1, alpha + 1) - (kk - alpha - 1) * pow(kk, alpha)) * u(0);
    for (Eigen::Index j = 1; j <= k; ++j) acc += c[k - j] * u(j);
    out[k] = scale * acc;
  }
  return out;
}

/// Discrete J^α_{T-} u; the value at t = T is 0.
template <typename Derived>
VectorX<typename Derived::Scalar> rl_integral_backward(const FractionalOrder& order,
                                                       const TimeGrid& grid,
                                                       const Eigen::MatrixBase<Derived>& u) {
  return reflect(rl_integral_forward(order, grid, reflect(u)));
}

/// L1 approximation of the Caputo derivative of u - u(0); the value at t = 0 is 0.
template <typename Derived>
VectorX<typename Derived::Scalar> caputo_forward(const FractionalOrder& order,
                                                 const TimeGrid& grid,
                                                 const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  using std::pow;
  order.require_caputo();
  if (u.size() != grid.size()) throw GridMismatch("caputo_forward: size mismatch");
  const Scalar alpha = Scalar(order.value());
  const Eigen::Index n = grid.n_steps();
  const VectorX<Scalar> b = detail::l1_weights(alpha, n);
  const Scalar scale = pow(Scalar(grid.step()), -alpha) / gamma_fn(Scalar(2) - alpha);

  VectorX<Scalar> out = VectorX<Scalar>::Zero(n + 1);
  for (Eigen::Index k = 1; k <= n; ++k) {
    Scalar acc(0);
    for (Eigen::Index j = 0; j < k; ++j) acc += b[j] * (u(k - j) - u(k - j - 1));
    out[k] = scale * acc;
  }
  return out;
}

/// Backward Caputo derivative -d/dt J^{1-α}_{T-}(u - u(T)); the value at t = T is 0.
template <typename Derived>
VectorX<typename Derived::Scalar> caputo_backward(const FractionalOrder& order,
                                                  const TimeGrid& grid,
                                                  const Eigen::MatrixBase<Derived>& u) {
  return reflect(caputo_forward(order, grid, reflect(u)));
}

/// Trapezoid approximation of ∫_0^t u(τ) v(t-τ) dτ at every node.
template <typename DerivedA, typename DerivedB>
VectorX<typename DerivedA::Scalar> convolve(const TimeGrid& grid,
                                            const Eigen::MatrixBase<DerivedA>& u,
                                            const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != grid.size() || v.size() != grid.size()) {
    throw GridMismatch("convolve: size mismatch");
  }
  const Scalar h = Scalar(grid.step());
  const Eigen::Index n = grid.n_steps();
  VectorX<Scalar> out = VectorX<Scalar>::Zero(n + 1);
  for (Eigen::Index k = 1; k <= n; ++k) {
    Scalar acc = Scalar(0.5) * (u(0) * v(k) + u(k) * v(0));
    for (Eigen::Index j = 1; j < k; ++j) acc += u(j) * v(k - j);
    out[k] = h * acc;
  }
  return out;
}

// TimeSeries front ends.

template <typename Scalar>
BasicTimeSeries<Scalar> rl_integral_forward(const FractionalOrder& order,
                                            const BasicTimeSeries<Scalar>& u) {
  return {u.grid, rl_integral_forward(order, u.grid, u.values)};
}

template <typename Scalar>
BasicTimeSeries<Scalar> rl_integral_backward(const FractionalOrder& order,
                                             const BasicTimeSeries<Scalar>& u) {
  return {u.grid, rl_integral_backward(order, u.grid, u.values)};
}

template <typename Scalar>
BasicTimeSeries<Scalar> caputo_forward(const FractionalOrder& order,
                                       const BasicTimeSeries<Scalar>& u) {
  return {u.grid, caputo_forward(order, u.grid, u.values)};
}

template <typename Scalar>
BasicTimeSeries<Scalar> caputo_backward(const FractionalOrder& order,
                                        const BasicTimeSeries<Scalar>& u) {
  return {u.grid, caputo_backward(order, u.grid, u.values)};
}

template <typename Scalar>
BasicTimeSeries<Scalar> convolve(const BasicTimeSeries<Scalar>& u,
                                 const BasicTimeSeries<Scalar>& v) {
  require_same_grid(u.grid, v.grid, "convolve");
  return {u.grid, convolve(u.grid, u.values, v.values)};
}

/// |∫ (J^α g) h dt - ∫ g (J^α_{T-} h) dt| with trapezoid outer integrals.
template <typename Scalar>
Scalar duality_gap(const FractionalOrder& order, const BasicTimeSeries<Scalar>& g,
                   const BasicTimeSeries<Scalar>& h) {
  using std::abs;
  require_same_grid(g.grid, h.grid, "duality_gap");
  const auto w = trapezoid_weights<Scalar>(g.grid);
  const VectorX<Scalar> jg = rl_integral_forward(order, g.grid, g.values);
  const VectorX<Scalar> jh = rl_integral_backward(order, g.grid, h.values);
  const Scalar lhs = (w.array() * jg.array() * h.values.array()).sum();
  const Scalar rhs = (w.array() * g.values.array() * jh.array()).sum();
  return abs(lhs - rhs);
}

}  // namespace mtfd
