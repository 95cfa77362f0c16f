#include <gtest/gtest.h>

#include <mwq/haar_oracle.hpp>
#include <mwq/oracles.hpp>

#include <utility>

using namespace mwq;

TEST(HaarOracle, ExactValues) {
  // (n, d) = (3, 3): cf = (27 - 3)/(27 + 1) = 6/7.
  EXPECT_EQ(oracle::exact_q_sector(3, 3, 2), oracle::Fraction(2, 7));
  EXPECT_EQ(oracle::exact_q_interference(3, 3, 2, 1), oracle::Fraction(4, 7));
  // (3, 2): cf = 6/9 = 2/3.
  EXPECT_EQ(oracle::exact_q_interference(3, 2, 1, 1), oracle::Fraction(2, 3));
  // (2, 2): cf = 2/5.
  EXPECT_EQ(oracle::exact_q_interference(2, 2, 1, 1), oracle::Fraction(2, 5));
  EXPECT_EQ(oracle::exact_q_sector(4, 5, 1), oracle::Fraction(0));
}

TEST(HaarOracle, FloatingMatchesExact) {
  for (std::size_t n = 2; n <= 6; ++n) {
    for (std::size_t d = 2; d <= 7; ++d) {
      for (std::size_t a = 1; a <= d; ++a) {
        EXPECT_NEAR(haar::expected_q_sector(n, d, a), oracle::exact_q_sector(n, d, a).value(), 1e-15);
        for (std::size_t b = 1; a + b <= d; ++b)
          EXPECT_NEAR(haar::expected_q_interference(n, d, a, b), oracle::exact_q_interference(n, d, a, b).value(), 1e-15);
      }
    }
  }
}

TEST(HaarOracle, CorrectionFactorLimits) {
  EXPECT_DOUBLE_EQ(haar::correction_factor(1, 3), 0.0);
  EXPECT_NEAR(haar::correction_factor(60, 2), 1.0, 1e-15);
  for (std::size_t d = 2; d <= 6; ++d)
    for (std::size_t n = 2; n < 12; ++n) EXPECT_LT(haar::correction_factor(n, d), haar::correction_factor(n + 1, d));
}

TEST(HaarOracle, TotalIsPartitionIndependent) {
  for (std::size_t n = 2; n <= 6; ++n) {
    for (std::size_t d = 2; d <= 7; ++d) {
      const double cf = haar::correction_factor(n, d);
      for (const auto &part : ordered_partitions(d)) EXPECT_NEAR(haar::expected_q_total(n, d, part), cf, 1e-14);
    }
  }
}

TEST(HaarOracle, LargeNLimits) {
  EXPECT_NEAR(haar::expected_q_sector(50, 6, 3), 3.0 * 2.0 / 30.0, 1e-12);
  EXPECT_NEAR(haar::expected_q_interference(50, 6, 3, 3), 18.0 / 30.0, 1e-12);
}

// Equal sectors: interference outweighs each sector term by 2 d_a / (d_a - 1).
TEST(HaarOracle, EquipartitionRatio) {
  for (const auto [d, da] : {std::pair<std::size_t, std::size_t>{4, 2}, {6, 3}, {8, 4}}) {
    const double r = haar::expected_q_interference(4, d, da, da) / haar::expected_q_sector(4, d, da);
    EXPECT_NEAR(r, 2.0 * double(da) / double(da - 1), 1e-12);
  }
}

TEST(HaarOracle, SectorTermGrowsWithSectorSize) {
  for (std::size_t a = 1; a < 6; ++a) EXPECT_LT(haar::expected_q_sector(4, 6, a), haar::expected_q_sector(4, 6, a + 1));
}

TEST(HaarOracle, PredictLayout) {
  const auto p = haar::predict(3, ChargePartition::from_dims({2, 1}));
  ASSERT_EQ(p.q_sector_theory.size(), 2u);
  EXPECT_NEAR(p.q_sector_theory[0], 2.0 / 7.0, 1e-15);
  EXPECT_EQ(p.q_sector_theory[1], 0.0);
  EXPECT_NEAR(p.q_interference_theory.at({0, 1}), 4.0 / 7.0, 1e-15);
  EXPECT_NEAR(p.total(), 6.0 / 7.0, 1e-15);
}

TEST(HaarOracle, DomainErrors) {
  EXPECT_THROW(haar::correction_factor(3, 1), DomainError);
  EXPECT_THROW(haar::expected_q_sector(1, 3, 2), DomainError);
  EXPECT_THROW(haar::expected_q_sector(3, 3, 4), DomainError);
  EXPECT_THROW(haar::expected_q_interference(3, 3, 2, 2), DomainError);
  EXPECT_THROW(haar::expected_q_total(3, 4, ChargePartition::from_dims({2, 1})), DomainError);
}
