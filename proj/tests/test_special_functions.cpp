#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "mtfd/errors.hpp"
#include "mtfd/gamma.hpp"
#include "mtfd/special_functions.hpp"

namespace {

using namespace mtfd;

constexpr double kPi = std::numbers::pi;

// Reference series in long double; peak is the largest term magnitude.
struct LdSeries {
  long double sum = 0.0L;
  long double peak = 0.0L;
};

LdSeries ml_series_ld(long double alpha, long double beta, long double z) {
  LdSeries s;
  long double zk = 1.0L;
  for (int k = 0; k < 2000; ++k) {
    const long double term = zk / std::tgamma(alpha * k + beta);
    s.sum += term;
    s.peak = std::max(s.peak, std::fabs(term));
    if (k > 10 && std::fabs(term) < 1e-22L * s.peak) break;
    zk *= z;
  }
  return s;
}

TEST(Gamma, MatchesStdTgamma) {
  for (double x : {0.1, 0.5, 0.8, 1.0, 1.5, 2.3, 4.7, 9.9, -0.3, -1.5, -2.7}) {
    EXPECT_NEAR(gamma_fn(x) / std::tgamma(x), 1.0, 1e-13) << x;
    EXPECT_NEAR(rgamma_fn(x) * std::tgamma(x), 1.0, 1e-13) << x;
  }
  EXPECT_EQ(rgamma_fn(0.0), 0.0);
  EXPECT_EQ(rgamma_fn(-3.0), 0.0);
  EXPECT_TRUE(std::isnan(gamma_fn(-2.0)));
}

TEST(MittagLeffler, ReducesToExponential) {
  for (double z : {-0.5, -3.0, -12.0, -40.0}) EXPECT_NEAR(mittag_leffler(1.0, 1.0, z) / std::exp(z), 1.0, 1e-12);
}

TEST(MittagLeffler, HalfOrderClosedForm) {
  // E_{1/2}(-x) = e^{x^2} erfc(x).
  EXPECT_NEAR(mittag_leffler(0.5, 1.0, -1.0), 0.42758357615580705, 1e-10);
  for (double x : {0.3, 2.0, 4.5, 8.0, 20.0}) {
    const double exact = std::exp(x * x) * std::erfc(x);
    EXPECT_NEAR(mittag_leffler(0.5, 1.0, -x) / exact, 1.0, 1e-9) << x;
  }
}

TEST(MittagLeffler, SeriesOracleModerateArgument) {
  for (double alpha : {0.2, 0.5, 0.8, 0.95}) {
    for (double beta : {alpha, 1.0, 1.0 + alpha, 2.0}) {
      for (double z : {-0.1, -1.0, -2.5}) {
        const LdSeries oracle = ml_series_ld(alpha, beta, z);
        // Only trust the oracle when cancellation leaves long double ~10 digits.
        if (oracle.peak > 1e8L * std::fabs(oracle.sum)) continue;
        const double ref = static_cast<double>(oracle.sum);
        EXPECT_NEAR(mittag_leffler(alpha, beta, z), ref, 1e-10 * std::max(1.0, std::abs(ref)))
            << alpha << " " << beta << " " << z;
      }
    }
  }
}

TEST(MittagLeffler, BranchesAgreeAcrossTheSwitch) {
  // Just inside the series region against just outside: smooth continuation.
  for (double alpha : {0.3, 0.7}) {
    const double a = mittag_leffler(alpha, 1.0, -4.999);
    const double b = mittag_leffler(alpha, 1.0, -5.001);
    EXPECT_NEAR(a, b, 1e-3 * std::abs(a));
  }
}

TEST(MittagLeffler, LargeArgumentAsymptotics) {
  // E_{α,β}(-x) ~ Σ_{k=1}^{K} (-1)^{k+1} x^{-k} / Γ(β - αk).
  for (double alpha : {0.3, 0.6, 0.9}) {
    for (double beta : {1.0, alpha}) {
      const double x = 400.0;
      double asym = 0.0;
      for (int k = 1; k <= 4; ++k) asym += ((k % 2) ? 1.0 : -1.0) * std::pow(x, -k) * rgamma_fn(beta - alpha * k);
      EXPECT_NEAR(mittag_leffler(alpha, beta, -x), asym, 1e-9) << alpha << " " << beta;
    }
  }
}

TEST(MittagLeffler, CompletelyMonotoneDecay) {
  for (double alpha : {0.2, 0.5, 0.9}) {
    double previous = 1.0;
    for (double x = 0.25; x < 200.0; x *= 1.5) {
      const double v = mittag_leffler(alpha, 1.0, -x);
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, previous);
      previous = v;
    }
  }
}

TEST(MittagLeffler, Domain) {
  EXPECT_THROW(mittag_leffler(0.0, 1.0, -1.0), DomainError);
  EXPECT_THROW(mittag_leffler(1.2, 1.0, -1.0), DomainError);
  EXPECT_THROW(mittag_leffler(0.5, 1.0, 1.0), DomainError);
  EXPECT_DOUBLE_EQ(mittag_leffler(0.5, 2.0, 0.0), 1.0);
}

TEST(WrightM, HalfOrderIsGaussian) {
  // M_{1/2}(z) = e^{-z^2/4}/sqrt(π).
  EXPECT_NEAR(wright_m(0.5, 1.0), 0.43939128946772243, 1e-12);
  for (double z : {0.0, 0.5, 3.0, 9.0, 12.0, 20.0}) {
    const double exact = std::exp(-z * z / 4.0) / std::sqrt(kPi);
    EXPECT_NEAR(wright_m(0.5, z), exact, 1e-12 + 1e-9 * exact) << z;
  }
}

TEST(WrightM, IsAProbabilityDensityWithKnownMean) {
  // ∫ M_α = 1 and ∫ z M_α = 1/Γ(1+α).
  boost::math::quadrature::exp_sinh<double> integrator;
  for (double alpha : {0.25, 0.5, 0.75}) {
    const double mass = integrator.integrate([&](double z) { return wright_m(alpha, z); }, 1e-10);
    const double mean = integrator.integrate([&](double z) { return z * wright_m(alpha, z); }, 1e-10);
    EXPECT_NEAR(mass, 1.0, 1e-7) << alpha;
    EXPECT_NEAR(mean, 1.0 / std::tgamma(1.0 + alpha), 1e-7) << alpha;
  }
}

TEST(WrightM, NonNegativeAndContinuousAcrossBranches) {
  for (double alpha : {0.1, 0.4, 0.6}) {
    for (double z = 0.0; z < 30.0; z += 0.37) {
      const double v = wright_m(alpha, z);
      EXPECT_TRUE(std::isfinite(v)) << alpha << " " << z;
      EXPECT_GE(v, 0.0) << alpha << " " << z;
    }
    // Centred second differences of log M straddle the branch switch at z = 10:
    // smooth curvature scales like h², a jump between branches would not.
    auto curvature = [alpha](double h) {
      return std::log(wright_m(alpha, 10.0 - h)) + std::log(wright_m(alpha, 10.0 + h)) -
             2.0 * std::log(wright_m(alpha, 10.0));
    };
    EXPECT_LT(std::abs(curvature(4e-3) - 4.0 * curvature(2e-3)), 1e-8) << alpha;
  }
  EXPECT_EQ(wright_m(0.5, 1e300), 0.0);
  // M_{0.6}(z) ~ exp(-(2/3) (0.6 z)^{5/2}) up to an algebraic prefactor.
  EXPECT_NEAR(std::log(wright_m(0.6, 10.0)) / (-(2.0 / 3.0) * std::pow(6.0, 2.5)), 1.0, 0.05);
  EXPECT_EQ(wright_m(0.8, 10.0), 0.0);
}

TEST(WrightM, Domain) {
  EXPECT_THROW(wright_m(1.0, 1.0), DomainError);
  EXPECT_THROW(wright_m(0.5, -1.0), DomainError);
  EXPECT_NEAR(wright_m(0.3, 0.0), 1.0 / std::tgamma(0.7), 1e-14);
}

}  // namespace
