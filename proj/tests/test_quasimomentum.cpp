#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pjm/quasimomentum.hpp"

using namespace pjm;
using std::numbers::pi;

TEST(Quasimomentum, ChebyshevJunctions) {
  const CoefficientPoint p = zero_point(2);
  const SpectralData sd = spectral_data(p);
  EXPECT_NEAR(k_on_band(p, sd, -2.0), 0.0, 1e-12);
  EXPECT_NEAR(k_on_band(p, sd, 0.0), pi, 1e-7);
  EXPECT_NEAR(k_on_band(p, sd, 2.0), 2.0 * pi, 1e-12);
  for (std::size_t n = 3; n <= 8; ++n) {
    const CoefficientPoint q = zero_point(n);
    const SpectralData s = spectral_data(q);
    for (std::size_t m = 0; m <= n; ++m) {
      const double lam = -2.0 * std::cos(pi * static_cast<double>(m) / static_cast<double>(n));
      EXPECT_NEAR(k_on_band(q, s, lam), pi * static_cast<double>(m), 1e-6) << "N=" << n;
    }
  }
}

TEST(Quasimomentum, ChebyshevInterior) {
  // p = 0: k(lambda) = arccos(-lambda / 2) ... scaled, i.e. lambda = -2 cos(k / N).
  const std::size_t n = 4;
  const CoefficientPoint p = zero_point(n);
  const SpectralData sd = spectral_data(p);
  for (double k : {0.3, 1.9, 5.0, 11.2}) {
    const double lam = -2.0 * std::cos(k / static_cast<double>(n));
    EXPECT_NEAR(k_on_band(p, sd, lam), k, 1e-8);
  }
}

TEST(Quasimomentum, TwoPeriodicEdgesAndSlit) {
  const CoefficientPoint p = oracle::two_periodic(0.3, 0.5);
  const SpectralData sd = spectral_data(p);
  const HeightVector h = height_map(p, sd);
  EXPECT_NEAR(k_on_band(p, sd, sd.edges[0]), 0.0, 1e-9);
  EXPECT_NEAR(k_on_band(p, sd, sd.lower(1)), pi, 1e-9);
  EXPECT_NEAR(k_on_band(p, sd, sd.upper(1)), pi, 1e-9);
  EXPECT_NEAR(k_on_band(p, sd, sd.edges[3]), 2.0 * pi, 1e-9);

  const auto top = k_on_gap(p, sd, 1, 0.0, Side::upper);
  EXPECT_NEAR(top.real(), pi, 1e-15);
  EXPECT_NEAR(top.imag(), 0.76890942007287478, 1e-12);
  EXPECT_NEAR(k_on_gap(p, sd, 1, 0.0, Side::lower).imag(), -0.76890942007287478, 1e-12);
  EXPECT_NEAR(std::abs(k_on_gap(p, sd, 1, -0.5, Side::upper).imag()), 0.6, 1e-12);
  EXPECT_NEAR(k_on_gap(p, sd, 1, sd.lower(1), Side::upper).imag(), 0.0, 1e-7);

  const SlitDomainData slits = slit_domain(h);
  EXPECT_NEAR(slits.slit_centers[0], pi, 1e-15);
  EXPECT_EQ(slits.slit_heights[0], h.habs[0]);
  EXPECT_EQ(slits.dirichlet_marks[0], h.h1[0]);
}

TEST(Quasimomentum, SlitHeightsMatchHeights) {
  for (std::size_t n = 2; n <= 8; ++n) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const CoefficientPoint p = random_point(n, 0.8, seed);
      const SpectralData sd = spectral_data(p);
      const HeightVector h = height_map(p, sd);
      for (std::size_t gap = 1; gap < n; ++gap) {
        if (sd.gap_closed[gap - 1]) continue;
        const auto at_crest = k_on_gap(p, sd, gap, sd.critical[gap - 1], Side::upper);
        const auto at_mu = k_on_gap(p, sd, gap, sd.dirichlet[gap - 1], Side::upper);
        EXPECT_NEAR(at_crest.imag(), h.habs[gap - 1], 1e-8);
        EXPECT_NEAR(std::abs(at_mu.imag()), std::abs(h.h1[gap - 1]), 1e-8);
      }
    }
  }
}

TEST(Quasimomentum, MonotoneAndContinuousAcrossBands) {
  const CoefficientPoint p = random_point(6, 0.8, 11);
  const SpectralData sd = spectral_data(p);
  double last = -1.0;
  for (std::size_t band = 1; band <= sd.n; ++band) {
    const double lo = sd.band_begin(band), hi = sd.band_end(band);
    for (int i = 0; i <= 1000; ++i) {
      const double lam = i == 1000 ? hi : lo + (hi - lo) * i / 1000.0;
      const double k = k_on_band(p, sd, lam);
      EXPECT_GE(k, last - 1e-12);
      if (i == 0) {
        EXPECT_NEAR(k, last < 0.0 ? 0.0 : last, 1e-9);
      }
      last = k;
    }
  }
  EXPECT_NEAR(last, 6.0 * pi, 1e-9);
}

TEST(Quasimomentum, Errors) {
  const CoefficientPoint p = oracle::two_periodic(0.3, 0.5);
  const SpectralData sd = spectral_data(p);
  EXPECT_THROW(k_on_band(p, sd, 0.0), DomainError);   // open gap
  EXPECT_THROW(k_on_band(p, sd, 3.0), DomainError);   // outside
  EXPECT_THROW(k_on_gap(p, sd, 1, 1.5, Side::upper), DomainError);
  EXPECT_THROW(k_on_gap(p, sd, 2, 0.0, Side::upper), DomainError);
  const CoefficientPoint z = zero_point(2);
  EXPECT_THROW(k_on_gap(z, spectral_data(z), 1, 0.0, Side::upper), DomainError);
}
