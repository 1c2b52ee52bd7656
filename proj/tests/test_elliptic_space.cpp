#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "mtfd/elliptic_space.hpp"
#include "mtfd/errors.hpp"

namespace {

using namespace mtfd;

constexpr double kPi = std::numbers::pi;

TEST(SpaceGrid, Nodes) {
  const SpaceGrid grid(0.0, 2.0, 4);
  EXPECT_EQ(grid.n_nodes(), 5);
  EXPECT_EQ(grid.n_interior(), 3);
  EXPECT_DOUBLE_EQ(grid.node(2), 1.0);
  EXPECT_EQ(grid.node(4), 2.0);
  EXPECT_THROW(SpaceGrid(0.0, 1.0, 1), ConfigError);
  EXPECT_THROW(SpaceGrid(1.0, 0.0, 8), ConfigError);
}

TEST(Assemble, LaplacianStencil) {
  const SpaceGrid grid(0.0, 1.0, 4);
  const Eigen::MatrixXd a = assemble(grid, EllipticCoefficients::laplacian());
  Eigen::MatrixXd expected(3, 3);
  expected << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  EXPECT_LT((a - 16.0 * expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assemble, RejectsBadCoefficients) {
  const SpaceGrid grid(0.0, 1.0, 10);
  EXPECT_THROW(assemble(grid, {[](double x) { return x - 0.5; }, [](double) { return 0.0; }}), CoefficientError);
  EXPECT_THROW(assemble(grid, {[](double) { return 1.0; }, [](double) { return -1.0; }}), CoefficientError);
}

TEST(EigenSystem, LaplacianEigenvaluesAreDiscreteSines) {
  const SpaceGrid grid(0.0, 1.0, 50);
  const auto eig = eigensystem(grid, assemble(grid, {}), 10);
  const double h = grid.step();
  for (int n = 1; n <= 10; ++n) {
    const double discrete = 4.0 / (h * h) * std::pow(std::sin(n * kPi * h / 2.0), 2);
    EXPECT_NEAR(eig.eigenvalues[n - 1], discrete, 1e-9 * discrete);
  }
  // Continuous limit: λ_1 → π², O(h²).
  EXPECT_NEAR(eig.eigenvalues[0], kPi * kPi, 5e-3);
  // First mode is sqrt(2) sin(πx) at the nodes.
  const Eigen::VectorXd phi = eig.mode_on_nodes(0);
  for (Eigen::Index i = 0; i < grid.n_nodes(); ++i) EXPECT_NEAR(phi[i], std::sqrt(2.0) * std::sin(kPi * grid.node(i)), 1e-10);
}

TEST(EigenSystem, VariableCoefficientsMatchDenseSolver) {
  const SpaceGrid grid(0.0, 1.0, 40);
  const EllipticCoefficients coeff{[](double x) { return 1.0 + 0.5 * std::sin(3.0 * x); },
                                   [](double x) { return 2.0 * x * x; }};
  const auto matrix = assemble(grid, coeff);
  const auto eig = eigensystem(grid, matrix, 39);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense{Eigen::MatrixXd(matrix)};
  EXPECT_LT((eig.eigenvalues - dense.eigenvalues()).cwiseAbs().maxCoeff(), 1e-9 * dense.eigenvalues().maxCoeff());
  // Orthonormal in h Σ u v, and A φ = λ φ.
  const Eigen::MatrixXd gram = grid.step() * eig.modes.transpose() * eig.modes;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(39, 39)).cwiseAbs().maxCoeff(), 1e-10);
  const Eigen::MatrixXd residual = Eigen::MatrixXd(matrix) * eig.modes - eig.modes * eig.eigenvalues.asDiagonal();
  EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-8 * eig.eigenvalues.maxCoeff());
}

TEST(EigenSystem, ProjectSynthesizeRoundTrip) {
  const SpaceGrid grid(0.0, 1.0, 30);
  const auto eig = eigensystem(grid, assemble(grid, {}), 29);
  const Eigen::VectorXd u = grid.sample([](double x) { return x * (1.0 - x) * std::exp(x); });
  EXPECT_LT((eig.synthesize(eig.project(u)) - u).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(eigensystem(grid, assemble(grid, {}), 30), ConfigError);
  EXPECT_EQ(default_mode_count(grid), 29);
  EXPECT_EQ(default_mode_count(SpaceGrid(0.0, 1.0, 200)), 64);
}

TEST(ObserveWeights, SumToMeasureAndIntegrate) {
  const SpaceGrid grid(0.0, 1.0, 50);
  const Eigen::VectorXd w = observe_weights(grid, Subdomain::interval(0.4, 0.6));
  EXPECT_NEAR(w.sum(), 0.2, 1e-15);
  const Eigen::VectorXd s = grid.sample([](double x) { return std::sin(kPi * x); });
  // ∫_{0.4}^{0.6} sin πx dx = 2 cos(0.4π)/π ≈ 0.19673.
  EXPECT_NEAR(w.dot(s), 2.0 * std::cos(0.4 * kPi) / kPi, 2e-4);
}

TEST(ObserveWeights, PartialCellsAndUnions) {
  const SpaceGrid grid(0.0, 1.0, 10);
  const Subdomain omega{{{0.05, 0.23}, {0.71, 1.0}}};
  const Eigen::VectorXd w = observe_weights(grid, omega);
  EXPECT_NEAR(w.sum(), omega.measure(), 1e-15);
  // Partial cells use the cell's end values, so linear data is integrated to
  // O(h · overlap), exactly on fully covered cells.
  const double exact = (0.23 * 0.23 + 0.23) - (0.05 * 0.05 + 0.05) + 2.0 - (0.71 * 0.71 + 0.71);
  auto err = [&](int n) {
    const SpaceGrid g(0.0, 1.0, n);
    return std::abs(observe_weights(g, omega).dot(g.sample([](double x) { return 2.0 * x + 1.0; })) - exact);
  };
  EXPECT_LT(err(10), 2.0 * 0.1 * omega.measure());
  EXPECT_LT(err(1000), 1e-3);
  EXPECT_NEAR(observe_weights(grid, Subdomain::interval(0.2, 0.7)).dot(grid.sample([](double x) { return 2.0 * x + 1.0; })),
              (0.49 + 0.7) - (0.04 + 0.2), 1e-14);
  EXPECT_THROW(observe_weights(grid, Subdomain{{{0.1, 0.5}, {0.4, 0.6}}}), ConfigError);
  EXPECT_THROW(observe_weights(grid, Subdomain::interval(0.5, 1.2)), ConfigError);
  EXPECT_THROW(observe_weights(grid, Subdomain{}), ConfigError);
}

TEST(SpaceInner, IgnoresBoundaryEntries) {
  const SpaceGrid grid(0.0, 1.0, 4);
  Eigen::VectorXd u(5), v(5);
  u << 9, 1, 2, 3, 9;
  v << 7, 1, 1, 1, 7;
  EXPECT_DOUBLE_EQ(space_inner(grid, u, v), 0.25 * 6.0);
}

}  // namespace
