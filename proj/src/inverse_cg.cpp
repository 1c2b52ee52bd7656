#include "mtfd/inverse_cg.hpp"

#include <cmath>
#include <random>

#include "mtfd/pde_solver.hpp"

namespace mtfd {

namespace {

double closed_form_step(const TimeSeries& g, const TimeSeries& d, const TimeSeries& residual,
                        const TimeSeries& gd, double lambda) {
  const double num = inner(residual, gd) + lambda * inner(g, d);
  const double den = inner(gd, gd) + lambda * inner(d, d);
  if (!(den > 0.0) || !std::isfinite(den)) {
    throw DegenerateDirection("step_size: search direction has zero curvature");
  }
  return -num / den;
}

TimeSeries axpy(double a, const TimeSeries& x, const TimeSeries& y) { return {y.grid, a * x.values + y.values}; }

}  // namespace

void InverseConfig::validate() const {
  if (!(lambda_reg >= 0.0) || !std::isfinite(lambda_reg)) throw ConfigError("lambda must be >= 0");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be >= 0");
  if (f.size() != sgrid.n_nodes()) throw ConfigError("spatial factor f does not match the space grid");
  if (!f.allFinite()) throw ConfigError("spatial factor f has non-finite entries");
}

ObservationMap::ObservationMap(const InverseConfig& cfg)
    : spec_(cfg.spec),
      sgrid_(cfg.sgrid),
      f_(cfg.f),
      matrix_(assemble(cfg.sgrid, cfg.coeff)),
      weights_(observe_weights(cfg.sgrid, cfg.omega)) {
  cfg.validate();
}

TimeSeries ObservationMap::apply(const TimeSeries& g) const {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sgrid_.n_nodes());
  return observe(solve_forward_l1(spec_, sgrid_, matrix_, zero, SourceSpec{g, f_}, g.grid), weights_);
}

TimeSeries ObservationMap::adjoint(const TimeSeries& r) const {
  const SpaceTimeField w = solve_adjoint(spec_, sgrid_, matrix_, r, weights_);
  Eigen::VectorXd out(r.size());
  for (Eigen::Index k = 0; k < r.size(); ++k) out[k] = space_inner(sgrid_, f_, w.values.col(k));
  return {r.grid, out};
}

TimeSeries add_noise(const TimeSeries& e, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("add_noise: delta must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd v = e.values;
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] *= 1.0 + delta * unit(rng);
  return {e.grid, v};
}

double objective(const TimeSeries& g, const TimeSeries& data, const InverseConfig& cfg) {
  require_same_grid(g.grid, data.grid, "objective");
  const ObservationMap map(cfg);
  const TimeSeries residual = axpy(-1.0, data, map.apply(g));
  return 0.5 * inner(residual, residual) + 0.5 * cfg.lambda_reg * inner(g, g);
}

TimeSeries gradient(const TimeSeries& g, const TimeSeries& data, const InverseConfig& cfg) {
  require_same_grid(g.grid, data.grid, "gradient");
  const ObservationMap map(cfg);
  const TimeSeries residual = axpy(-1.0, data, map.apply(g));
  return axpy(cfg.lambda_reg, g, map.adjoint(residual));
}

double step_size(const TimeSeries& g, const TimeSeries& d, const TimeSeries& gd, const TimeSeries& data,
                 const InverseConfig& cfg) {
  require_same_grid(g.grid, data.grid, "step_size");
  require_same_grid(d.grid, data.grid, "step_size");
  require_same_grid(gd.grid, data.grid, "step_size");
  const ObservationMap map(cfg);
  return closed_form_step(g, d, axpy(-1.0, data, map.apply(g)), gd, cfg.lambda_reg);
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Discrepancy:
      return "discrepancy";
    case StopReason::Gradient:
      return "gradient";
    case StopReason::MaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

ReconstructionResult reconstruct(const InverseConfig& cfg, const TimeSeries& data,
                                 const std::optional<TimeSeries>& g_truth) {
  const ObservationMap map(cfg);
  TimeSeries g = cfg.g0.value_or(TimeSeries::zeros(data.grid));
  require_same_grid(g.grid, data.grid, "reconstruct");
  if (g_truth) require_same_grid(g_truth->grid, data.grid, "reconstruct");

  const double lambda = cfg.lambda_reg;
  const double noise_floor = 1.01 * cfg.delta * l2_norm(data);

  TimeSeries gg = map.apply(g);
  TimeSeries residual = axpy(-1.0, data, gg);
  TimeSeries grad = axpy(lambda, g, map.adjoint(residual));
  double grad_sq = inner(grad, grad);
  const double grad0 = std::sqrt(grad_sq);

  ReconstructionResult out{g, 0, StopReason::MaxIterations, {}, {}, {}, std::nullopt};
  auto record = [&] {
    const double res = l2_norm(residual);
    out.residual_history.push_back(res);
    out.objective_history.push_back(0.5 * res * res + 0.5 * lambda * inner(g, g));
    out.gradient_history.push_back(std::sqrt(grad_sq));
  };
  auto stop_rule = [&]() -> std::optional<StopReason> {
    if (out.residual_history.back() <= noise_floor) return StopReason::Discrepancy;
    if (std::sqrt(grad_sq) <= cfg.epsilon * grad0) return StopReason::Gradient;
    return std::nullopt;
  };
  record();

  std::optional<StopReason> stop = stop_rule();
  TimeSeries d{grad.grid, -grad.values};
  for (int k = 0; k < cfg.max_iters && !stop; ++k) {
    const TimeSeries gd = map.apply(d);
    const double r = closed_form_step(g, d, residual, gd, lambda);
    const Eigen::VectorXd g_next = g.values + r * d.values;
    const Eigen::VectorXd gg_next = gg.values + r * gd.values;
    if (!std::isfinite(r) || !g_next.allFinite() || !gg_next.allFinite()) {
      throw DivergenceError("reconstruct: non-finite iterate at step " + std::to_string(k + 1),
                            out.residual_history);
    }
    g = TimeSeries{g.grid, g_next};
    gg = TimeSeries{gg.grid, gg_next};
    residual = axpy(-1.0, data, gg);
    const TimeSeries grad_new = axpy(lambda, g, map.adjoint(residual));
    const double grad_new_sq = inner(grad_new, grad_new);
    d = axpy(grad_new_sq / grad_sq, d, TimeSeries{grad_new.grid, -grad_new.values});
    grad = grad_new;
    grad_sq = grad_new_sq;
    out.iterations = k + 1;
    record();
    stop = stop_rule();
  }

  out.stop_reason = stop.value_or(StopReason::MaxIterations);
  out.g_rec = g;
  if (g_truth) out.rel_error = l2_norm(axpy(-1.0, *g_truth, g)) / l2_norm(*g_truth);
  return out;
}

}  // namespace mtfd
