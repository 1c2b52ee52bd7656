// Acceptance criteria: one PASS/FAIL line each; exit status 4 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mtfd/harness.hpp"
#include "mtfd/pde_solver.hpp"
#include "mtfd/special_functions.hpp"

namespace {

using namespace mtfd;

constexpr double kPi = std::numbers::pi;

// Tolerances.
constexpr double kExampleRuntime = 30.0;        // seconds per example run
constexpr double kSubordinationTol = 1e-3;      // relative L² mismatch
constexpr double kSubordinationRuntime = 120.0;  // seconds for all three specs
constexpr double kKernelFloor = -1e-8;
constexpr int kKernelGrid = 40;
constexpr int kCmOrder = 6;
constexpr double kMinOrder = 1.5;               // duality and semigroup
constexpr double kCaputoAlpha = 0.4;
constexpr double kCaputoSlack = 0.2;            // observed >= 2 - α - slack
constexpr double kOracleTol = 2e-3;             // max error, 50 steps
constexpr double kRelaxationTol = 1e-6;
constexpr double kGradientTol = 1e-4;
constexpr double kAdjointTol = 1e-3;
constexpr double kDuhamelTol = 5e-3;
constexpr double kShortTimeBound = 2.0;
constexpr double kLongTimeBand = 3.0;

struct Line {
  std::string name;
  bool passed;
  std::string detail;
};

std::vector<Line> lines;

void report(const std::string& name, bool passed, const std::string& detail) {
  lines.push_back({name, passed, detail});
  std::cout << (passed ? "PASS " : "FAIL ") << name << " (" << detail << ")" << std::endl;
}

template <typename Fn>
void guarded(const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(name, false, std::string("error: ") + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// One example criterion covers one or two preset cases.
void example_criterion(const std::string& name, const std::vector<std::string>& ids) {
  guarded(name, [&] {
    bool passed = true;
    std::ostringstream detail;
    const std::filesystem::path root = std::filesystem::temp_directory_path() / "mtfd_acceptance";
    for (const std::string& id : ids) {
      ExperimentConfig cfg = preset(id);
      cfg.out_dir = root / id;
      const RunReport r = run_experiment(cfg);
      const bool ok = r.accepted && r.rel_error && r.wall_seconds <= kExampleRuntime;
      passed = passed && ok;
      detail << id << ": rel_error=" << format_real(*r.rel_error) << " bound=" << format_real(*cfg.max_rel_error)
             << " iterations=" << r.iterations;
      if (cfg.max_iterations) detail << " bound=" << *cfg.max_iterations;
      detail << " stop=" << r.stop_reason << " seconds=" << format_real(r.wall_seconds) << "; ";
    }
    report(name, passed, detail.str());
  });
}

MultiTermSpec random_spec(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> order(0.05, 0.95), weight(0.1, 2.0);
  std::vector<Term> terms;
  const int n = count(rng);
  while (static_cast<int>(terms.size()) < n) {
    const double a = order(rng);
    bool distinct = true;
    for (const Term& t : terms) distinct = distinct && std::abs(t.alpha - a) > 0.02;
    if (distinct) terms.push_back({weight(rng), a});
  }
  return MultiTermSpec(terms);
}

void kernel_positivity() {
  guarded("kernel_positivity", [] {
    std::mt19937_64 rng(20240601);
    const auto s_grid = log_spaced(0.1, 10.0, 20);
    double min_value = 1e300;
    bool cm = true;
    std::ostringstream detail;
    for (int trial = 0; trial < 5; ++trial) {
      const MultiTermSpec spec = random_spec(rng);
      const ContourSpec contour = ContourSpec::midpoint(spec);
      std::vector<double> taus;
      for (int j = 1; j <= kKernelGrid; ++j) taus.push_back(double(j) / kKernelGrid);
      double spec_min = 1e300;
      for (int i = 1; i <= kKernelGrid; ++i) {
        spec_min = std::min(spec_min, subordination_kernel_row(spec, contour, double(i) / kKernelGrid, taus).minCoeff());
      }
      bool spec_cm = true;
      for (double tau : {0.05, 0.5, 1.0}) spec_cm = spec_cm && cm_certificate(spec, tau, s_grid, kCmOrder);
      min_value = std::min(min_value, spec_min);
      cm = cm && spec_cm;
      detail << "spec" << trial << "[";
      for (const Term& t : spec.terms()) detail << t.q << "*d^" << t.alpha << " ";
      detail << "] min=" << format_real(spec_min) << " cm=" << (spec_cm ? "true" : "false") << "; ";
    }
    report("kernel_positivity", min_value >= kKernelFloor && cm,
           "min K=" + format_real(min_value) + " floor=" + format_real(kKernelFloor) + "; " + detail.str());
  });
}

void single_term_oracle() {
  guarded("single_term_oracle", [] {
    const SpaceGrid sgrid(0.0, 1.0, 50);
    const auto matrix = assemble(sgrid, {});
    const EigenSystem eig = eigensystem(sgrid, matrix, default_mode_count(sgrid));
    const TimeGrid tgrid(1.0, 50);
    const Eigen::VectorXd u0 = sgrid.sample([](double x) { return std::sin(kPi * x); });
    std::ostringstream detail;
    bool passed = true;
    for (double alpha : {0.2, 0.5, 0.8}) {
      const auto spec = MultiTermSpec::single(alpha);
      const auto none = SourceSpec::none(tgrid, sgrid);
      const auto l1 = solve_forward_l1(spec, sgrid, matrix, u0, none, tgrid);
      const auto spectral = solve_forward_spectral(spec, eig, u0, none, tgrid, ContourSpec::midpoint(spec));
      double e_l1 = 0.0, e_sp = 0.0, e_l1_final = 0.0;
      for (Eigen::Index k = 0; k < tgrid.size(); ++k) {
        const double ml = mittag_leffler(alpha, 1.0, -eig.eigenvalues[0] * std::pow(tgrid.node(k), alpha));
        const double el1 = (l1.at(k) - ml * u0).cwiseAbs().maxCoeff();
        e_l1 = std::max(e_l1, el1);
        e_sp = std::max(e_sp, (spectral.at(k) - ml * u0).cwiseAbs().maxCoeff());
        if (k == tgrid.n_steps()) e_l1_final = el1;
      }
      double e_relax = 0.0;
      for (double t : {0.01, 0.1, 0.5, 1.0}) {
        e_relax = std::max(e_relax, std::abs(relaxation_mode(spec, eig.eigenvalues[0], ContourSpec::midpoint(spec), t) -
                                             mittag_leffler(alpha, 1.0, -eig.eigenvalues[0] * std::pow(t, alpha))));
      }
      passed = passed && e_l1 <= kOracleTol && e_sp <= kOracleTol && e_relax <= kRelaxationTol;
      detail << "alpha=" << alpha << ": l1=" << format_real(e_l1) << " (at T " << format_real(e_l1_final)
             << ") spectral=" << format_real(e_sp) << " relaxation=" << format_real(e_relax) << "; ";
    }
    report("single_term_oracle", passed,
           detail.str() + "tolerances " + format_real(kOracleTol) + "/" + format_real(kRelaxationTol));
  });
}

void decay_rates() {
  guarded("decay_rates", [] {
    const MultiTermSpec spec({{1.0, 0.7}, {0.5, 0.3}});
    const ContourSpec contour = ContourSpec::midpoint(spec);
    double short_worst = 0.0;
    for (int n : {50, 200, 800}) {
      const SpaceGrid sgrid(0.0, 1.0, 40);
      const auto matrix = assemble(sgrid, {});
      const EigenSystem eig = eigensystem(sgrid, matrix, default_mode_count(sgrid));
      const TimeGrid tgrid(1.0, n);
      const Eigen::VectorXd u0 = eig.mode_on_nodes(0);
      const double norm0 = std::sqrt(space_inner(sgrid, u0, u0));
      const auto none = SourceSpec::none(tgrid, sgrid);
      for (const SpaceTimeField& u : {solve_forward_l1(spec, sgrid, matrix, u0, none, tgrid),
                                      solve_forward_spectral(spec, eig, u0, none, tgrid, contour)}) {
        for (Eigen::Index k = 1; k < tgrid.size(); ++k) {
          const Eigen::VectorXd uk = u.at(k);
          short_worst = std::max(short_worst, std::pow(tgrid.node(k), 0.7) * std::sqrt(space_inner(sgrid, uk, uk)) / norm0);
        }
      }
    }
    const SpaceGrid sgrid(0.0, 1.0, 40);
    const auto matrix = assemble(sgrid, {});
    const EigenSystem eig = eigensystem(sgrid, matrix, default_mode_count(sgrid));
    const TimeGrid tgrid(50.0, 500);
    const Eigen::VectorXd u0 = eig.mode_on_nodes(4);
    const auto none = SourceSpec::none(tgrid, sgrid);
    double lo = 1e300, hi = 0.0;
    for (const SpaceTimeField& u : {solve_forward_l1(spec, sgrid, matrix, u0, none, tgrid),
                                    solve_forward_spectral(spec, eig, u0, none, tgrid, contour)}) {
      for (Eigen::Index k = 100; k < tgrid.size(); ++k) {
        const Eigen::VectorXd uk = u.at(k);
        const double scaled = std::pow(tgrid.node(k), 0.3) * std::sqrt(space_inner(sgrid, uk, uk));
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
      }
    }
    const double band = lo > 0.0 ? hi / lo : 1e300;
    report("decay_rates", short_worst <= kShortTimeBound && band <= kLongTimeBand,
           "short-time sup t^a1 |u|/|u0|=" + format_real(short_worst) + " bound=" + format_real(kShortTimeBound) +
               " (50/200/800 steps, both solvers); long-time band t^al |u| on [10,50]=" + format_real(band) +
               " bound=" + format_real(kLongTimeBand));
  });
}

double field_l2(const Eigen::MatrixXd& m) { return m.norm(); }

void subordination_identity() {
  guarded("subordination_identity", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const SpaceGrid sgrid(0.0, 1.0, 20);
    const EigenSystem eig = eigensystem(sgrid, assemble(sgrid, {}), default_mode_count(sgrid));
    const TimeGrid tgrid(1.0, 8);
    const Eigen::VectorXd u0 = sgrid.sample([](double x) { return std::sin(kPi * x); });
    double worst = 0.0;
    std::ostringstream detail;
    int ell = 1;
    for (const MultiTermSpec& spec : {MultiTermSpec::single(0.5), MultiTermSpec({{1.0, 0.7}, {0.5, 0.3}}),
                                      MultiTermSpec({{1.0, 0.8}, {0.4, 0.5}, {0.2, 0.2}})}) {
      const ContourSpec contour = ContourSpec::midpoint(spec);
      const auto direct = solve_forward_spectral(spec, eig, u0, SourceSpec::none(tgrid, sgrid), tgrid, contour);
      const auto sub = subordinate(spec, eig, u0, tgrid, contour, kernel_tau_max(eig.eigenvalues[0]), 2000);
      const double rel = field_l2(sub.field.values - direct.values) / field_l2(direct.values);
      worst = std::max(worst, rel);
      detail << "l=" << ell++ << ": " << format_real(rel) << " tail=" << format_real(sub.tail_estimate) << "; ";
    }
    const double seconds = seconds_since(t0);
    report("subordination_identity", worst <= kSubordinationTol && seconds <= kSubordinationRuntime,
           detail.str() + "tolerance=" + format_real(kSubordinationTol) + " seconds=" + format_real(seconds) +
               " budget=" + format_real(kSubordinationRuntime));
  });
}

std::string describe(const Check& c) {
  return "measured=" + format_real(c.measured) + " tolerance=" + format_real(c.tolerance) +
         (c.detail.empty() ? "" : "; " + c.detail);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  example_criterion("example_5_1_a", {"ex1a"});
  example_criterion("example_5_1_b", {"ex1b"});
  example_criterion("example_5_2", {"ex2a", "ex2b"});
  example_criterion("example_5_3", {"ex3a", "ex3b"});

  std::map<std::string, Check> suite;
  try {
    for (const Check& c : run_verification_suite({SuiteLevel::Full, std::nullopt})) suite[c.name] = c;
  } catch (const std::exception& e) {
    std::cout << "verification suite aborted: " << e.what() << std::endl;
  }
  // Each suite check must carry the tolerance pinned above.
  using Expect = std::pair<std::string, double>;
  auto from_suite = [&](const std::string& name, const std::vector<Expect>& checks) {
    bool passed = true;
    std::string detail;
    for (const auto& [key, tolerance] : checks) {
      const auto it = suite.find(key);
      if (it == suite.end()) {
        passed = false;
        detail += key + ": missing; ";
        continue;
      }
      const bool pinned = std::abs(it->second.tolerance - tolerance) <= 1e-12 * std::abs(tolerance);
      passed = passed && it->second.passed && pinned;
      detail += key + ": " + (it->second.passed ? "pass " : "fail ") + describe(it->second) +
                (pinned ? "" : " [tolerance differs from " + format_real(tolerance) + "]") + "; ";
    }
    report(name, passed, detail);
  };

  subordination_identity();

  kernel_positivity();
  from_suite("solution_positivity", {{"solution_positivity", 0.0}});
  from_suite("operator_identities", {{"duality_gap_order", kMinOrder},
                                     {"semigroup_order", kMinOrder},
                                     {"caputo_power_rule_order", 2.0 - kCaputoAlpha - kCaputoSlack}});
  single_term_oracle();
  from_suite("adjoint_gradient", {{"gradient_finite_difference", kGradientTol}, {"adjoint_consistency", kAdjointTol}});
  from_suite("duhamel_identity", {{"duhamel_identity_200", kDuhamelTol}, {"duhamel_refinement_monotone", kDuhamelTol}});
  decay_rates();

  int failed = 0;
  for (const Line& l : lines) failed += l.passed ? 0 : 1;
  std::cout << "SUMMARY " << (lines.size() - failed) << "/" << lines.size() << " passed in "
            << format_real(seconds_since(start)) << " s" << std::endl;
  return failed == 0 ? kExitSuccess : kExitAcceptance;
}
