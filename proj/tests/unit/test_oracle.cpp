#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mongealign/error.hpp"
#include "mongealign/fft.hpp"
#include "mongealign/oracle.hpp"

namespace ma = mongealign;
namespace orc = mongealign::oracle;
using ma::ComplexMatrix;
using ma::CrossSpectrum;
using ma::RealMatrix;

namespace {

// q = DFT of a first row supported on the band, so F diag(q) F^H is band-limited.
Eigen::VectorXcd band_limited_q(std::size_t n, std::size_t f, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<ma::fft::cdouble> row(n, 0.0), q(n);
  for (std::size_t d = 0; d < n; ++d) {
    if (orc::in_band(d, n, f)) row[d] = {nd(rng), nd(rng)};
  }
  ma::fft::forward(row, q);
  return Eigen::Map<Eigen::VectorXcd>(q.data(), static_cast<Eigen::Index>(n));
}

Eigen::VectorXcd random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXcd x(n);
  for (auto& v : x) v = {nd(rng), nd(rng)};
  return x;
}

}  // namespace

TEST(DenseCov, IdentityAndFlat) {
  CrossSpectrum cs;
  cs.bins.assign(6, ComplexMatrix::Identity(2, 2));
  EXPECT_LE((orc::dense_cov(cs) - RealMatrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-14);
  cs.bins.assign(5, 3.0 * ComplexMatrix::Identity(1, 1));
  EXPECT_LE((orc::dense_cov(cs) - 3.0 * RealMatrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DenseCov, BlocksAreCirculantAndSymmetric) {
  const auto spec = orc::random_spectrum(2, 10, 4);
  const RealMatrix s = orc::dense_cov(spec);
  EXPECT_LE((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const RealMatrix blk = s.block(a * 10, b * 10, 10, 10);
      for (int l = 1; l < 10; ++l)
        for (int m = 0; m < 10; ++m) EXPECT_NEAR(blk(l, m), blk(l - 1, (m + 9) % 10), 1e-12);
    }
  }
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<RealMatrix>(s).eigenvalues().minCoeff(), 0.0);
}

TEST(DenseCov, RejectsAsymmetricSpectrum) {
  CrossSpectrum cs;
  cs.bins.assign(4, ComplexMatrix::Identity(1, 1));
  cs.bins[1](0, 0) = 2.0;
  try {
    orc::dense_cov(cs);
    FAIL();
  } catch (const ma::Error& e) {
    EXPECT_EQ(e.code(), ma::ErrorCode::kNonRealResult);
  }
}

TEST(DenseFMonge, IdentityAndFullSize) {
  const auto spec = orc::random_spectrum(2, 8, 5);
  const RealMatrix s = orc::dense_cov(spec);
  for (std::size_t f : {1u, 2u, 4u, 8u}) {
    EXPECT_LE((orc::dense_f_monge(s, s, 2, f) - RealMatrix::Identity(16, 16)).cwiseAbs().maxCoeff(),
              1e-9);
  }
  EXPECT_THROW(orc::dense_f_monge(s, s, 2, 3), ma::Error);
  EXPECT_THROW(orc::dense_f_monge(s, s, 3, 1), ma::Error);
}

TEST(DenseFMonge, RecoversBandLimitedMap) {
  for (std::size_t f : {2u, 4u, 8u}) {
    const auto qs = orc::random_spectrum(2, 8, 6 + f);
    const auto b = orc::random_band_limited_map(2, 8, f, 60 + f);
    const RealMatrix got =
        orc::dense_f_monge(orc::dense_cov(qs), orc::dense_cov(orc::congruence(b, qs)), 2, f);
    EXPECT_LE((got - orc::dense_cov(b)).cwiseAbs().maxCoeff(), 1e-8) << f;
  }
}

TEST(DenseApply, IdentityPermutationAndErrors) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  ma::SignalData data(3, 5);
  for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = nd(rng);
  const ma::Signal x(data);
  EXPECT_TRUE(orc::dense_apply(RealMatrix::Identity(15, 15), x).data() == data);
  EXPECT_THROW(orc::dense_apply(RealMatrix::Identity(10, 10), x), ma::Error);

  RealMatrix a(15, 15);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
  // Swapping channels 0 and 2 on input and output commutes with the operator.
  Eigen::PermutationMatrix<Eigen::Dynamic> p(15);
  for (int c = 0; c < 3; ++c)
    for (int l = 0; l < 5; ++l) p.indices()[c * 5 + l] = (2 - c) * 5 + l;
  const RealMatrix pa = p * a * p.transpose();
  ma::SignalData swapped = data.colwise().reverse();
  const auto lhs = orc::dense_apply(pa, ma::Signal(swapped)).data();
  const ma::SignalData rhs = orc::dense_apply(a, x).data().colwise().reverse();
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Prop1, ImpulseAndFullLength) {
  std::mt19937_64 rng(8);
  const auto x = random_vec(12, rng);
  for (std::size_t f : {1u, 2u, 3u, 4u, 6u, 12u}) {
    const auto r = orc::prop1_check(Eigen::VectorXcd::Ones(12), x, f);
    EXPECT_LE((r.dense - x).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((r.filtered - x).cwiseAbs().maxCoeff(), 1e-12);
  }
  const auto q = random_vec(12, rng);
  const auto r = orc::prop1_check(q, x, 12);
  EXPECT_LE((r.dense - r.filtered).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Prop1, RandomBandLimited) {
  std::mt19937_64 rng(9);
  for (std::size_t f : {1u, 2u, 4u, 8u, 16u}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto q = band_limited_q(16, f, rng);
      const auto x = random_vec(16, rng);
      const auto r = orc::prop1_check(q, x, f);
      EXPECT_LE((r.dense - r.filtered).norm(), 1e-10 * std::max(1.0, r.dense.norm()));
    }
  }
}

TEST(Prop1, RejectsOutOfBand) {
  std::mt19937_64 rng(10);
  const auto q = random_vec(16, rng);
  try {
    orc::prop1_check(q, random_vec(16, rng), 4);
    FAIL();
  } catch (const ma::Error& e) {
    EXPECT_EQ(e.code(), ma::ErrorCode::kNotBandLimited);
  }
  EXPECT_THROW(orc::prop1_check(q, random_vec(16, rng), 5), ma::Error);
}

TEST(Projection, IsClosestBandLimitedCirculant) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  const std::size_t n = 10, f = 5;
  RealMatrix a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
  const RealMatrix p = orc::project_band_limited(a, f);
  const double best = (p - a).norm();
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (std::size_t d = 0; d < n; ++d)
      if (orc::in_band(d, n, f)) row[d] = nd(rng);
    RealMatrix g(n, n);
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t m = 0; m < n; ++m) g(l, m) = row[(m + n - l) % n];
    EXPECT_LE(best, (g - a).norm() + 1e-12);
    // Perturbing the projection in any band direction cannot help either.
    EXPECT_LE(best, (p + 1e-3 * g - a).norm() + 1e-12);
  }
}

TEST(Band, Membership) {
  // n = 12, f = 5: offsets 0, 1, 2 and 10, 11.
  for (std::size_t d = 0; d < 12; ++d) {
    const bool expected = d <= 2 || d >= 10;
    EXPECT_EQ(orc::in_band(d, 12, 5), expected) << d;
  }
  for (std::size_t d = 0; d < 7; ++d) EXPECT_TRUE(orc::in_band(d, 7, 7));
}

TEST(RandomSpectrum, IsValidWithFloor) {
  const auto spec = orc::random_spectrum(3, 9, 12, 0.25);
  EXPECT_NO_THROW(ma::validate_cross_spectrum(spec));
  for (const auto& b : spec.bins) {
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<ComplexMatrix>(b).eigenvalues().minCoeff(), 0.25 - 1e-12);
  }
  const auto bl = orc::random_band_limited_map(2, 12, 4, 13);
  EXPECT_NO_THROW(ma::validate_cross_spectrum(bl));
  const RealMatrix dense = orc::dense_cov(bl);
  for (std::size_t d = 0; d < 12; ++d) {
    if (!orc::in_band(d, 12, 4)) EXPECT_NEAR(dense(0, d), 0.0, 1e-12) << d;
  }
}
