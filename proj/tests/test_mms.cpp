#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tpflow/mms.hpp"

using namespace tpflow;

TEST(Mms, ExactValues) {
  const ManufacturedCase mms(1.0);
  EXPECT_NEAR(mms.pressure(0.0, 0.0, 1.0), 2.0, 1e-15);
  EXPECT_NEAR(mms.saturation(0.0, 0.0, 1.0), 3.0 / 8.0, 1e-15);
  EXPECT_NEAR(mms.pressure(0.3, 0.7, 0.4), std::exp(-0.6) * mms.pressure(0.3, 0.7, 1.0), 1e-14);
  EXPECT_EQ(mms.dirichlet_value(Unknown::Pressure, 1.0, 0.2, 0.5), mms.pressure(1.0, 0.2, 0.5));
  EXPECT_EQ(mms.exact(Unknown::Saturation, 0.0, 0.2, 0.5), mms.saturation(0.0, 0.2, 0.5));
}

TEST(Mms, SaturationInUnitInterval) {
  const ManufacturedCase mms(20.0);
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j)
      for (double t : {0.0, 10.0, 20.0}) {
        const double s = mms.saturation(i / 20.0, j / 20.0, t);
        EXPECT_GT(s, 0.0);
        EXPECT_LT(s, 1.0);
      }
}

TEST(Mms, SourcesMatchFiniteDifferenceOracle) {
  const ManufacturedCase mms(1.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const auto r = oracle::mms_residuals(mms, u(rng), u(rng), u(rng));
    EXPECT_LE(std::abs(r[0]), 1e-6);
    EXPECT_LE(std::abs(r[1]), 1e-6);
  }
}

TEST(Mms, SourcesAtTwoTimes) {
  // Sampled, not assumed: both times pass the oracle and differ.
  const ManufacturedCase mms(1.0);
  const auto a = mms.sources(0.4, 0.6, 0.2), b = mms.sources(0.4, 0.6, 0.9);
  EXPECT_NE(a.total, b.total);
  for (double t : {0.2, 0.9}) {
    const auto r = oracle::mms_residuals(mms, 0.4, 0.6, t);
    EXPECT_LE(std::abs(r[0]) + std::abs(r[1]), 2e-6);
  }
}

TEST(Mms, RejectsOtherModels) {
  FluidModel m = mms_fluid_model();
  m.relperm = BrooksCoreyRelPerm{};
  EXPECT_THROW(ManufacturedCase(1.0, m), std::invalid_argument);
}
