#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pjm/spectrum.hpp"

using namespace pjm;

TEST(Spectrum, ChebyshevEdgesAndClosedGaps) {
  for (std::size_t n = 2; n <= 10; ++n) {
    const SpectralData sd = spectral_data(zero_point(n));
    ASSERT_EQ(sd.edges.size(), 2 * n);
    EXPECT_NEAR(sd.edges.front(), -2.0, 1e-12);
    EXPECT_NEAR(sd.edges.back(), 2.0, 1e-12);
    for (std::size_t gap = 1; gap < n; ++gap) {
      const double expected = -2.0 * std::cos(std::numbers::pi * static_cast<double>(gap) / static_cast<double>(n));
      EXPECT_TRUE(sd.gap_closed[gap - 1]) << "N=" << n << " gap " << gap;
      EXPECT_NEAR(sd.lower(gap), expected, 1e-10);
      EXPECT_NEAR(sd.upper(gap), expected, 1e-10);
      EXPECT_NEAR(sd.critical[gap - 1], expected, 1e-10);
      EXPECT_NEAR(sd.dirichlet[gap - 1], expected, 1e-10);
      EXPECT_EQ(sd.crest_excess[gap - 1], 0.0);
    }
    EXPECT_NEAR(sd.width(), 4.0, 1e-12);
  }
}

TEST(Spectrum, TwoPeriodicExample) {
  const CoefficientPoint p = oracle::two_periodic(0.3, 0.5);
  const oracle::TwoPeriodic cf{0.3, 0.5};
  const SpectralData sd = spectral_data(p);
  EXPECT_NEAR(spectral_bound(p), 2.5906770282577210, 1e-14);
  EXPECT_NEAR(sd.edges[0], -cf.outer_edge(), 1e-13);
  EXPECT_NEAR(sd.edges[1], -cf.inner_edge(), 1e-13);
  EXPECT_NEAR(sd.edges[2], cf.inner_edge(), 1e-13);
  EXPECT_NEAR(sd.edges[3], cf.outer_edge(), 1e-13);
  EXPECT_NEAR(sd.edges[0], -2.1496349542386343, 1e-13);
  EXPECT_NEAR(sd.edges[1], -0.78799139366146342, 1e-13);
  EXPECT_NEAR(sd.critical[0], 0.0, 1e-14);
  EXPECT_NEAR(sd.dirichlet[0], -0.5, 1e-14);
  EXPECT_FALSE(sd.gap_closed[0]);
  EXPECT_EQ(sd.gap_sign(1), -1.0);
}

TEST(Spectrum, EdgesMatchPeriodicEigenvalues) {
  for (std::size_t n = 2; n <= 10; ++n) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const CoefficientPoint p = random_point(n, 0.8, seed);
      const SpectralData sd = spectral_data(p);
      const oracle::Vec ref = oracle::band_edges(p);
      for (std::size_t k = 0; k < ref.size(); ++k) {
        EXPECT_NEAR(sd.edges[k], ref[k], 1e-10 * sd.bound) << "N=" << n << " seed " << seed;
      }
    }
  }
}

TEST(Spectrum, CriticalPointsMatchOracle) {
  for (std::size_t n = 2; n <= 10; ++n) {
    const CoefficientPoint p = random_point(n, 0.8, 50 + n);
    const Vector crit = critical_points(p);
    const oracle::Vec edges = oracle::band_edges(p);
    ASSERT_EQ(crit.size(), n - 1);
    for (std::size_t gap = 1; gap < n; ++gap) {
      EXPECT_NEAR(crit[gap - 1], oracle::critical_point(p, edges, gap), 1e-10);
      EXPECT_NEAR(oracle::delta_prime(p, crit[gap - 1]), 0.0, 1e-9 * std::pow(3.0, static_cast<double>(n)));
    }
  }
}

TEST(Spectrum, DirichletMatchesTruncatedMatrix) {
  for (std::size_t n = 2; n <= 10; ++n) {
    const CoefficientPoint p = random_point(n, 0.8, 70 + n);
    const SpectralData sd = spectral_data(p);
    const oracle::Vec ref = oracle::dirichlet(p);
    for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(sd.dirichlet[k], ref[k], 1e-11);
  }
}

TEST(Spectrum, DirichletAreZerosOfThetaNPlusOne) {
  for (std::size_t n = 2; n <= 10; ++n) {
    const CoefficientPoint p = random_point(n, 0.8, 90 + n);
    const SpectralData sd = spectral_data(p);
    const double h = 1e-10 * sd.bound;
    for (double mu : sd.dirichlet) {
      const double left = oracle::monodromy(p, mu - h)[2];
      const double right = oracle::monodromy(p, mu + h)[2];
      EXPECT_LT(left * right, 0.0) << "N=" << n << " mu=" << mu;
    }
  }
}

TEST(Spectrum, Interlacing) {
  for (std::size_t n = 2; n <= 10; ++n) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const SpectralData sd = spectral_data(random_point(n, 1.0, seed));
      for (std::size_t k = 1; k < sd.edges.size(); ++k) EXPECT_LE(sd.edges[k - 1], sd.edges[k]);
      for (std::size_t gap = 1; gap < n; ++gap) {
        EXPECT_LE(sd.lower(gap), sd.critical[gap - 1]);
        EXPECT_GE(sd.upper(gap), sd.critical[gap - 1]);
        EXPECT_LE(sd.lower(gap), sd.dirichlet[gap - 1]);
        EXPECT_GE(sd.upper(gap), sd.dirichlet[gap - 1]);
      }
      EXPECT_GE(sd.edges.front(), -sd.bound);
      EXPECT_LE(sd.edges.back(), sd.bound);
    }
  }
}

TEST(Spectrum, SignedDiscriminantAtEdgesAndCrests) {
  const CoefficientPoint p = random_point(6, 0.8, 11);
  const SpectralData sd = spectral_data(p);
  for (std::size_t band = 1; band <= sd.n; ++band) {
    const double sign = alternating(sd.n - band + 1);
    EXPECT_NEAR(sign * oracle::delta(p, sd.band_begin(band)), 2.0, 1e-9);
    EXPECT_NEAR(sign * oracle::delta(p, sd.band_end(band)), -2.0, 1e-9);
  }
  for (std::size_t gap = 1; gap < sd.n; ++gap) {
    const double m = sd.gap_sign(gap) * oracle::delta(p, sd.critical[gap - 1]);
    EXPECT_NEAR(sd.crest_excess[gap - 1], m - 2.0, 1e-10 * m);
  }
}

TEST(Spectrum, NearlyClosedGapStaysOpen) {
  // Gap width ~ 1e-12 at s = 1e-6 while the crest rises only ~6e-13 above 2.
  const CoefficientPoint p = oracle::two_periodic(0.3e-6, 0.5e-6);
  const SpectralData sd = spectral_data(p);
  EXPECT_FALSE(sd.gap_closed[0]);
  EXPECT_GT(sd.crest_excess[0], 0.0);
  EXPECT_NEAR(sd.dirichlet[0], -0.5e-6, 1e-15);
}

TEST(Spectrum, SturmCountsTruncatedSpectrum) {
  const CoefficientPoint p = random_point(7, 0.8, 5);
  const detail::Recurrence rec(p);
  const oracle::Vec mu = oracle::dirichlet(p);
  EXPECT_EQ(detail::sturm_count(rec, -100.0), 0u);
  EXPECT_EQ(detail::sturm_count(rec, 100.0), 6u);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    EXPECT_EQ(detail::sturm_count(rec, mu[k] + 1e-9), k + 1);
  }
}

TEST(Spectrum, BandEdgesLeavesDirichletEmpty) {
  const SpectralData sd = band_edges(random_point(4, 0.5, 1));
  EXPECT_TRUE(sd.dirichlet.empty());
  EXPECT_EQ(dirichlet_eigenvalues(random_point(4, 0.5, 1), sd).size(), 3u);
}

TEST(Spectrum, RejectsInvalidPoint) {
  EXPECT_THROW(spectral_data({2, {1.0, 1.0}, {0.0, 0.0}}), DomainError);
}
