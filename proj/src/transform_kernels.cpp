#include "mtfd/transform_kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "mtfd/errors.hpp"

namespace mtfd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDecayExponent = 25.0;
// Largest phase/decay change (radians, e-folds) a single panel has to resolve.
constexpr double kPanelResolution = 2.0;

constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double ray_real_q(const MultiTermSpec& spec, double r, double theta) {
  double acc = 0.0;
  for (const Term& term : spec.terms()) acc += term.q * std::pow(r, term.alpha) * std::cos(term.alpha * theta);
  return acc;
}

// Bound on |d/dr Q(r e^{iθ})|.
double ray_q_rate(const MultiTermSpec& spec, double r) {
  double acc = 0.0;
  for (const Term& term : spec.terms()) acc += term.q * term.alpha * std::pow(r, term.alpha - 1.0);
  return acc;
}

}  // namespace

MultiTermSpec::MultiTermSpec(std::vector<Term> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw ConfigError("MultiTermSpec: at least one term is required");
  for (const Term& term : terms_) {
    if (!(term.q > 0.0) || !std::isfinite(term.q)) {
      throw ConfigError("MultiTermSpec: weights q_j must be positive");
    }
    if (!(term.alpha > 0.0 && term.alpha < 1.0)) {
      throw InvalidOrder("MultiTermSpec: orders must lie in (0,1), got " + std::to_string(term.alpha));
    }
  }
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.alpha > b.alpha; });
  for (std::size_t j = 1; j < terms_.size(); ++j) {
    if (terms_[j].alpha == terms_[j - 1].alpha) throw InvalidOrder("MultiTermSpec: orders must be distinct");
  }
}

cplx q_of_s(const MultiTermSpec& spec, cplx s) {
  if (s == cplx(0.0, 0.0)) throw DomainError("q_of_s: s = 0 is a branch point");
  const double log_r = std::log(std::abs(s));
  const double arg = std::arg(s);
  cplx acc(0.0, 0.0);
  for (const Term& term : spec.terms()) acc += term.q * std::polar(std::exp(term.alpha * log_r), term.alpha * arg);
  return acc;
}

ContourSpec ContourSpec::midpoint(const MultiTermSpec& spec) {
  ContourSpec c;
  const double upper = std::min(kPi / (2.0 * spec.leading_order()), kPi);
  c.theta0 = 0.5 * (kPi / 2.0 + upper);
  return c;
}

void ContourSpec::validate(const MultiTermSpec& spec) const {
  const double upper = std::min(kPi / (2.0 * spec.leading_order()), kPi);
  if (!(theta0 > kPi / 2.0 && theta0 < upper)) {
    throw InvalidContour("contour angle " + std::to_string(theta0) + " outside (pi/2, " +
                         std::to_string(upper) + ")");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidContour("contour radius must be positive");
  if (truncation != 0.0 && !(truncation > radius)) {
    throw InvalidContour("contour truncation must exceed the arc radius");
  }
  if (n_nodes < 8 || n_nodes % 8 != 0) {
    throw InvalidContour("contour node count must be a positive multiple of 8");
  }
}

std::vector<ContourNode> contour_nodes(const MultiTermSpec& spec, const ContourSpec& contour,
                                       double t, double tau) {
  contour.validate(spec);
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("contour_nodes: t must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("contour_nodes: tau must be >= 0");

  const double theta = contour.theta0;
  const double rho = contour.radius * std::min(1.0, 1.0 / t);
  const int min_panels = contour.n_nodes / 8;
  const cplx to_2pi_i(0.0, 2.0 * kPi);

  double r_end = contour.truncation;
  if (r_end == 0.0) {
    r_end = kDecayExponent / (t * std::abs(std::cos(theta)));
    auto exponent = [&](double r) { return t * r * std::abs(std::cos(theta)) + tau * ray_real_q(spec, r, theta); };
    if (tau > 0.0 && exponent(r_end) > kDecayExponent) {
      double lo = rho;
      double hi = r_end;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (exponent(mid) > kDecayExponent ? hi : lo) = mid;
      }
      r_end = hi;
    }
    r_end = std::max(r_end, 2.0 * rho);
  }

  std::vector<ContourNode> nodes;
  nodes.reserve(static_cast<std::size_t>(contour.n_nodes) * 4);
  auto push = [&](cplx s, cplx ds) { nodes.push_back({s, ds * std::exp(s * t) / to_2pi_i}); };

  // Arc |s| = ρ, φ from -θ0 to θ0.
  const double arc_width = 2.0 * theta / min_panels;
  for (int p = 0; p < min_panels; ++p) {
    const double mid = -theta + (p + 0.5) * arc_width;
    for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
      const double phi = mid + 0.5 * arc_width * kGaussNodes[g];
      const cplx s = std::polar(rho, phi);
      push(s, cplx(0.0, 1.0) * s * (0.5 * arc_width * kGaussWeights[g]));
    }
  }

  // Rays: geometric panels from the arc junction, capped so each panel
  // resolves the local oscillation and decay of e^{st - Q(s)τ}.
  const double ratio = std::pow(r_end / rho, 1.0 / min_panels) - 1.0;
  const cplx up = std::polar(1.0, theta);
  const cplx down = std::conj(up);
  double r = rho;
  while (r < r_end) {
    const double rate = t + tau * ray_q_rate(spec, r);
    const double width = std::min({ratio * r, kPanelResolution / rate, r_end - r});
    const double mid = r + 0.5 * width;
    for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
      const double rr = mid + 0.5 * width * kGaussNodes[g];
      const double w = 0.5 * width * kGaussWeights[g];
      push(rr * up, up * w);
      push(rr * down, -down * w);
    }
    r += width;
  }
  return nodes;
}

cplx invert_laplace(const std::vector<ContourNode>& nodes, const std::function<cplx(cplx)>& transform) {
  cplx acc(0.0, 0.0);
  for (const ContourNode& node : nodes) acc += node.weight * transform(node.s);
  return acc;
}

std::vector<ModeResponse> mode_responses(const MultiTermSpec& spec, std::span<const double> lambdas,
                                         const ContourSpec& contour, double t) {
  const std::vector<ContourNode> nodes = contour_nodes(spec, contour, t);
  std::vector<cplx> q(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) q[i] = q_of_s(spec, nodes[i].s);

  std::vector<ModeResponse> out(lambdas.size());
  for (std::size_t n = 0; n < lambdas.size(); ++n) {
    if (!(lambdas[n] >= 0.0)) throw DomainError("mode_responses: eigenvalues must be >= 0");
    cplx relax(0.0), impulse(0.0), step(0.0), ramp(0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const cplx inv_s = 1.0 / nodes[i].s;
      const cplx resolvent = nodes[i].weight / (q[i] + lambdas[n]);
      relax += resolvent * q[i] * inv_s;
      impulse += resolvent;
      step += resolvent * inv_s;
      ramp += resolvent * inv_s * inv_s;
    }
    out[n] = {relax.real(), impulse.real(), step.real(), ramp.real()};
  }
  return out;
}

cplx relaxation_mode_complex(const MultiTermSpec& spec, double lambda, const ContourSpec& contour,
                             double t) {
  if (!(lambda >= 0.0)) throw DomainError("relaxation_mode: eigenvalue must be >= 0");
  const std::vector<ContourNode> nodes = contour_nodes(spec, contour, t);
  return invert_laplace(nodes, [&](cplx s) {
    const cplx q = q_of_s(spec, s);
    return q / (s * (q + lambda));
  });
}

double relaxation_mode(const MultiTermSpec& spec, double lambda, const ContourSpec& contour, double t) {
  const double values[] = {lambda};
  return mode_responses(spec, values, contour, t).front().relaxation;
}

double subordination_kernel(const MultiTermSpec& spec, const ContourSpec& contour, double t,
                            double tau) {
  const std::vector<ContourNode> nodes = contour_nodes(spec, contour, t, tau);
  cplx acc(0.0, 0.0);
  for (const ContourNode& node : nodes) {
    const cplx q = q_of_s(spec, node.s);
    acc += node.weight * (q / node.s) * std::exp(-q * tau);
  }
  return acc.real();
}

Eigen::VectorXd subordination_kernel_row(const MultiTermSpec& spec, const ContourSpec& contour,
                                         double t, std::span<const double> taus) {
  Eigen::VectorXd row(static_cast<Eigen::Index>(taus.size()));
  for (std::size_t m = 0; m < taus.size(); ++m) {
    row[static_cast<Eigen::Index>(m)] = subordination_kernel(spec, contour, t, taus[m]);
  }
  return row;
}

double kernel_tau_max(double lambda_min, double tol) {
  if (!(lambda_min > 0.0)) throw DomainError("kernel_tau_max: lambda_min must be positive");
  if (!(tol > 0.0 && tol < 1.0)) throw DomainError("kernel_tau_max: tol must lie in (0,1)");
  return -std::log(tol) / lambda_min;
}

bool cm_certificate(const std::function<double(double)>& f, std::span<const double> s_grid, int n_max) {
  if (s_grid.empty()) throw DomainError("cm_certificate: empty s grid");
  if (n_max < 0 || n_max > 6) throw DomainError("cm_certificate: n_max must lie in [0, 6]");
  for (double s : s_grid) {
    if (!(s > 0.0)) throw DomainError("cm_certificate: s values must be positive");
    const double delta = 0.1 * s;
    for (int n = 0; n <= n_max; ++n) {
      double diff = 0.0;
      double scale = 0.0;
      double binom = 1.0;
      for (int k = 0; k <= n; ++k) {
        const double value = f(s + (0.5 * n - k) * delta);
        diff += ((k % 2 == 0) ? binom : -binom) * value;
        scale = std::max(scale, std::abs(value));
        binom = binom * (n - k) / (k + 1);
      }
      const double signed_diff = (n % 2 == 0) ? diff : -diff;
      if (signed_diff < -1e-7 * scale) return false;
    }
  }
  return true;
}

bool cm_certificate(const MultiTermSpec& spec, double tau, std::span<const double> s_grid, int n_max) {
  if (!(tau > 0.0)) throw DomainError("cm_certificate: tau must be positive");
  auto transform = [&](double s) {
    const double q = q_of_s(spec, cplx(s, 0.0)).real();
    return q / s * std::exp(-q * tau);
  };
  return cm_certificate(transform, s_grid, n_max);
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw DomainError("log_spaced: need 0 < lo < hi, count >= 2");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

}  // namespace mtfd
