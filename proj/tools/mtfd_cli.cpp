// Command-line front end: forward solves, kernel tables, reconstructions,
// the verification suite and the named examples.

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "mtfd/harness.hpp"
#include "mtfd/pde_solver.hpp"

namespace {

using namespace mtfd;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> delta;
  std::optional<double> lambda;
  std::optional<int> steps;
  std::optional<int> cells;
  std::optional<std::string> alpha;
  std::optional<std::string> q;
};

void add_experiment_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "noise RNG seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--delta", o.delta, "relative noise level");
  cmd->add_option("--lambda", o.lambda, "Tikhonov weight");
  cmd->add_option("--steps", o.steps, "time steps");
  cmd->add_option("--cells", o.cells, "space cells");
  cmd->add_option("--alpha", o.alpha, "comma-separated orders in (0,1)");
  cmd->add_option("--q", o.q, "comma-separated weights, paired with --alpha");
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.cells) apply_key(cfg, "cells", std::to_string(*o.cells));
  apply_orders(cfg, o.alpha, o.q);
  if (o.steps) apply_key(cfg, "steps", std::to_string(*o.steps));
  if (o.seed) apply_key(cfg, "seed", std::to_string(*o.seed));
  if (o.delta) apply_key(cfg, "delta", format_real(*o.delta));
  if (o.lambda) apply_key(cfg, "lambda", format_real(*o.lambda));
  if (!o.out.empty()) cfg.out_dir = o.out;
}

int report_run(const RunReport& report, const ExperimentConfig& cfg) {
  std::cout << "example = " << cfg.id << '\n'
            << "iterations = " << report.iterations << '\n'
            << "stop_reason = " << report.stop_reason << '\n';
  if (report.rel_error) std::cout << "rel_error = " << format_real(*report.rel_error) << '\n';
  if (cfg.max_rel_error) std::cout << "rel_error_bound = " << format_real(*cfg.max_rel_error) << '\n';
  if (cfg.max_iterations) std::cout << "iteration_bound = " << *cfg.max_iterations << '\n';
  std::cout << "accepted = " << (report.accepted ? "true" : "false") << '\n'
            << "output = " << cfg.out_dir.string() << '\n';
  return report.accepted ? kExitSuccess : kExitAcceptance;
}

int run_forward(const ExperimentConfig& cfg, const std::string& solver, const std::string& initial) {
  const InverseConfig& inv = cfg.inverse;
  const TimeGrid tgrid = cfg.time_grid();
  const SourceSpec src{truth_series(cfg), inv.f};
  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(inv.sgrid.n_nodes());
  if (initial == "sine") u0 = inv.f;
  const auto matrix = assemble(inv.sgrid, inv.coeff);
  const SpaceTimeField u =
      solver == "spectral"
          ? solve_forward_spectral(inv.spec, eigensystem(inv.sgrid, matrix, default_mode_count(inv.sgrid)), u0, src,
                                   tgrid, ContourSpec::midpoint(inv.spec))
          : solve_forward_l1(inv.spec, inv.sgrid, matrix, u0, src, tgrid);

  const Eigen::Index nx = inv.sgrid.n_nodes();
  Eigen::VectorXd t(nx * tgrid.size()), x(t.size()), value(t.size());
  for (Eigen::Index k = 0; k < tgrid.size(); ++k) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      t[k * nx + i] = tgrid.node(k);
      x[k * nx + i] = inv.sgrid.node(i);
      value[k * nx + i] = u.values(i, k);
    }
  }
  write_csv(cfg.out_dir / "u.csv", {{"t", "x", "u"}, {t, x, value}});
  const TimeSeries obs = observe(u, observe_weights(inv.sgrid, inv.omega));
  write_csv(cfg.out_dir / "observation.csv", {{"t", "E"}, {tgrid.nodes(), obs.values}});
  std::cout << "wrote " << (cfg.out_dir / "u.csv").string() << " and " << (cfg.out_dir / "observation.csv").string()
            << '\n';
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-term time-fractional diffusion: forward solves and source reconstruction"};
  app.require_subcommand(1);

  Overrides fwd_o, inv_o, ex_o;
  std::string solver = "l1";
  std::string initial = "zero";
  auto* forward = app.add_subcommand("forward", "solve the forward problem and write u.csv, observation.csv");
  add_experiment_options(forward, fwd_o);
  forward->add_option("--solver", solver, "l1 or spectral")->check(CLI::IsMember({"l1", "spectral"}));
  forward->add_option("--u0", initial, "initial state: zero or sine")->check(CLI::IsMember({"zero", "sine"}));

  std::string kernel_alpha = "0.5";
  std::optional<std::string> kernel_q;
  std::string kernel_out = "kernel.csv";
  std::optional<double> kernel_theta;
  KernelTableSpec table;
  auto* kernel = app.add_subcommand("kernel", "tabulate the subordination kernel K(t,tau)");
  kernel->add_option("--alpha", kernel_alpha, "comma-separated orders");
  kernel->add_option("--q", kernel_q, "comma-separated weights");
  kernel->add_option("--out", kernel_out, "output CSV file");
  kernel->add_option("--nt", table.n_t, "number of t nodes");
  kernel->add_option("--ntau", table.n_tau, "number of tau nodes");
  kernel->add_option("--t-max", table.t_max, "largest t");
  kernel->add_option("--tau-max", table.tau_max, "largest tau");
  kernel->add_option("--theta0", kernel_theta, "contour angle (default: admissible midpoint)");

  auto* invert = app.add_subcommand("invert", "reconstruct g(t) from synthetic noisy observations");
  add_experiment_options(invert, inv_o);

  std::string level = "quick";
  std::optional<double> verify_theta;
  auto* verify = app.add_subcommand("verify", "run the property verification suite");
  verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--theta0", verify_theta, "override the contour angle of every check");

  std::string example_id;
  auto* example = app.add_subcommand("example", "run a named example (ex1a ex1b ex2a ex2b ex3a ex3b)");
  example->add_option("id", example_id, "example id")->required();
  add_experiment_options(example, ex_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitConfig;
  }

  try {
    if (*forward || *invert) {
      const Overrides& o = *forward ? fwd_o : inv_o;
      ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
      apply_overrides(cfg, o);
      if (*forward) return run_forward(cfg, solver, initial);
      return report_run(run_experiment(cfg), cfg);
    }
    if (*example) {
      ExperimentConfig cfg = preset(example_id);
      if (!ex_o.config.empty()) throw ConfigError("example: use 'invert --config' for configuration files");
      apply_overrides(cfg, ex_o);
      return report_run(run_experiment(cfg), cfg);
    }
    if (*kernel) {
      ExperimentConfig cfg;
      apply_orders(cfg, kernel_alpha, kernel_q);
      ContourSpec contour = ContourSpec::midpoint(cfg.inverse.spec);
      if (kernel_theta) contour.theta0 = *kernel_theta;
      const double min_value = emit_kernel_table(cfg.inverse.spec, contour, table, kernel_out);
      std::cout << "min = " << format_real(min_value) << '\n' << "output = " << kernel_out << '\n';
      return kExitSuccess;
    }
    if (*verify) {
      SuiteOptions options;
      options.level = level == "full" ? SuiteLevel::Full : SuiteLevel::Quick;
      options.theta0 = verify_theta;
      const auto checks = run_verification_suite(options);
      print_checks(std::cout, checks);
      for (const Check& c : checks) {
        if (!c.passed) return kExitAcceptance;
      }
      return kExitSuccess;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidOrder& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidContour& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUnexpected;
}
