#pragma once

// Gamma function via the Lanczos approximation (g = 7, n = 9).
// Relative error is below 1e-13 on (0, 10] in double precision.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace mtfd {

namespace detail {

inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoeff = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

template <typename Scalar>
Scalar lanczos_gamma_shifted(Scalar x) {
  // Valid for x >= 0.5.
  x -= Scalar(1);
  Scalar a = Scalar(kLanczosCoeff[0]);
  for (std::size_t i = 1; i < kLanczosCoeff.size(); ++i) {
    a += Scalar(kLanczosCoeff[i]) / (x + Scalar(i));
  }
  const Scalar t = x + Scalar(kLanczosG) + Scalar(0.5);
  const Scalar sqrt_two_pi = std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
  // Split the power to postpone overflow for large arguments.
  const Scalar half = std::pow(t, (x + Scalar(0.5)) / Scalar(2));
  return sqrt_two_pi * half * (half * std::exp(-t)) * a;
}

}  // namespace detail

template <typename Scalar>
Scalar gamma_fn(Scalar x) {
  using std::floor;
  if (x <= Scalar(0) && floor(x) == x) {
    return std::numeric_limits<Scalar>::quiet_NaN();
  }
  if (x < Scalar(0.5)) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return pi / (std::sin(pi * x) * detail::lanczos_gamma_shifted(Scalar(1) - x));
  }
  return detail::lanczos_gamma_shifted(x);
}

/// 1/Γ(x); zero at the poles 0, -1, -2, ...
template <typename Scalar>
Scalar rgamma_fn(Scalar x) {
  using std::floor;
  if (x <= Scalar(0) && floor(x) == x) return Scalar(0);
  if (x < Scalar(0.5)) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return std::sin(pi * x) * detail::lanczos_gamma_shifted(Scalar(1) - x) / pi;
  }
  return Scalar(1) / detail::lanczos_gamma_shifted(x);
}

}  // namespace mtfd
