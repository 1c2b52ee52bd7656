#include "mtfd/special_functions.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mtfd/errors.hpp"
#include "mtfd/gamma.hpp"

namespace mtfd {

namespace {

constexpr double kPi = std::numbers::pi;

// Series whose largest term exceeds this multiple of the sum lose too many digits.
constexpr double kMaxCancellation = 1e5;

struct SeriesResult {
  double value;
  bool well_conditioned;
};

SeriesResult mittag_leffler_series(double alpha, double beta, double z) {
  double sum = 0.0;
  double max_term = 0.0;
  double zk = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 600; ++k) {
    const double term = zk * rgamma_fn(alpha * k + beta);
    sum += term;
    max_term = std::max(max_term, std::abs(term));
    // Past the peak the terms decrease monotonically.
    if (k > 5 && std::abs(term) <= 1e-17 * std::abs(sum) && std::abs(term) < previous) {
      return {sum, std::isfinite(sum) && max_term <= kMaxCancellation * std::abs(sum)};
    }
    previous = std::abs(term);
    zk *= z;
    if (!std::isfinite(zk)) break;
  }
  return {sum, false};
}

double tanh_sinh_integral(const auto& f, double a, double b) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  return integrator.integrate(f, a, b, 1e-14);
}

// Gorenflo-Loutchko-Luchko representation, valid for 0 < α < 1, β < 1 + α, z < 0.
double mittag_leffler_integral(double alpha, double beta, double z) {
  const double sa = std::sin(kPi * (1.0 - beta));
  const double sb = std::sin(kPi * (1.0 - beta + alpha));
  const double ca = std::cos(alpha * kPi);
  const double p = (1.0 - beta) / alpha;
  auto kernel = [=](double chi) {
    if (chi <= 0.0) return 0.0;
    const double decay = std::exp(-std::pow(chi, 1.0 / alpha));
    if (decay == 0.0) return 0.0;
    const double num = chi * sa - z * sb;
    const double den = chi * chi - 2.0 * chi * z * ca + z * z;
    return std::pow(chi, p) * decay * num / den;
  };
  // e^{-χ^{1/α}} < e^{-60} past the cut.
  const double cut = std::pow(60.0, alpha);
  const double knee = std::min(-z, cut);
  double total = tanh_sinh_integral(kernel, 0.0, knee);
  if (knee < cut) total += tanh_sinh_integral(kernel, knee, cut);
  return total / (alpha * kPi);
}

double mittag_leffler_alpha_one(double beta, double z) {
  if (beta == 1.0) return std::exp(z);
  if (beta > 1.0) {
    // E_{1,β}(z) = (1/Γ(β-1)) ∫_0^1 (1-s)^{β-2} e^{zs} ds.
    auto f = [=](double s) { return std::pow(1.0 - s, beta - 2.0) * std::exp(z * s); };
    return rgamma_fn(beta - 1.0) * tanh_sinh_integral(f, 0.0, 1.0);
  }
  return rgamma_fn(beta) + z * mittag_leffler_alpha_one(beta + 1.0, z);
}

}  // namespace

double mittag_leffler(double alpha, double beta, double z) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("mittag_leffler: alpha must lie in (0,1], got " + std::to_string(alpha));
  }
  if (!std::isfinite(beta) || !std::isfinite(z)) throw DomainError("mittag_leffler: non-finite input");
  if (z > 0.0) throw DomainError("mittag_leffler: only z <= 0 is supported");
  if (z == 0.0) return rgamma_fn(beta);

  if (std::abs(z) <= 5.0) {
    const SeriesResult s = mittag_leffler_series(alpha, beta, z);
    if (s.well_conditioned) return s.value;
  }
  if (alpha == 1.0) return mittag_leffler_alpha_one(beta, z);
  if (beta >= 1.0 + alpha) {
    // E_{α,β}(z) = (E_{α,β-α}(z) - 1/Γ(β-α)) / z.
    return (mittag_leffler(alpha, beta - alpha, z) - rgamma_fn(beta - alpha)) / z;
  }
  return mittag_leffler_integral(alpha, beta, z);
}

namespace {

SeriesResult wright_m_series(double alpha, double z) {
  double sum = 0.0;
  double max_term = 0.0;
  double power = 1.0;  // (-z)^n / n!
  for (int n = 0; n < 2000; ++n) {
    if (n > 0) power *= -z / n;
    const double term = power * rgamma_fn(1.0 - alpha - alpha * n);
    sum += term;
    max_term = std::max(max_term, std::abs(term));
    // |1/Γ(1-α-αn)| <= Γ(α(n+1))/π bounds the remaining terms.
    const double log_bound = (n + 1) * std::log(std::max(z, 1e-300)) - std::lgamma(n + 2.0) +
                             std::lgamma(alpha * (n + 2)) - std::log(kPi);
    if (n > 2 && log_bound < std::log(1e-17 * std::max(std::abs(sum), 1e-300)) &&
        log_bound < std::log(max_term + 1e-300)) {
      return {sum, std::isfinite(sum) && max_term <= kMaxCancellation * std::abs(sum)};
    }
    if (power == 0.0) return {sum, std::isfinite(sum) && max_term <= kMaxCancellation * std::abs(sum)};
  }
  return {sum, false};
}

// M_α(z) = z^{α/(1-α)} / (π(1-α)) ∫_0^π A(φ) exp(-z^{1/(1-α)} A(φ)) dφ with
// A(φ) = [sin(αφ)^α sin((1-α)φ)^{1-α} / sin φ]^{1/(1-α)}.
double wright_m_integral(double alpha, double z) {
  const double beta = 1.0 - alpha;
  const double c = std::pow(z, 1.0 / beta);
  auto integrand = [=](double phi) {
    const double log_a = (alpha * std::log(std::sin(alpha * phi)) +
                          beta * std::log(std::sin(beta * phi)) - std::log(std::sin(phi))) /
                         beta;
    if (!std::isfinite(log_a) || log_a > 700.0) return 0.0;
    const double a = std::exp(log_a);
    const double expo = log_a - c * a;
    return expo < -745.0 ? 0.0 : std::exp(expo);
  };
  if (!std::isfinite(c)) return 0.0;
  const double integral = tanh_sinh_integral(integrand, 0.0, kPi);
  if (integral == 0.0) return 0.0;
  return std::pow(z, alpha / beta) * integral / (kPi * beta);
}

}  // namespace

double wright_m(double alpha, double z) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("wright_m: alpha must lie in (0,1), got " + std::to_string(alpha));
  }
  if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("wright_m: z must be finite and >= 0");
  if (z == 0.0) return rgamma_fn(1.0 - alpha);
  if (z <= 10.0) {
    const SeriesResult s = wright_m_series(alpha, z);
    if (s.well_conditioned && s.value >= 0.0) return s.value;
  }
  return wright_m_integral(alpha, z);
}

}  // namespace mtfd
