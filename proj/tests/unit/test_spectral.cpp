#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mongealign/error.hpp"
#include "mongealign/spectral.hpp"

namespace ma = mongealign;
using ma::cdouble;
using ma::ComplexMatrix;

namespace {

ma::Signal white(std::size_t n_c, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ma::SignalData x(n_c, n);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = nd(rng);
  return ma::Signal(std::move(x));
}

template <typename Fn>
void expect_code(ma::ErrorCode code, Fn&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << ma::error_name(code);
  } catch (const ma::Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(Signal, ValidatesContents) {
  ma::SignalData x = ma::SignalData::Ones(2, 3);
  x(1, 2) = std::numeric_limits<double>::quiet_NaN();
  expect_code(ma::ErrorCode::kNonFinite, [&] { ma::Signal s(x); });
  expect_code(ma::ErrorCode::kInvalidArgument, [&] { ma::Signal s(ma::SignalData(0, 0)); });
  expect_code(ma::ErrorCode::kInvalidArgument,
              [&] { ma::Signal s(ma::SignalData::Ones(1, 2), -1.0); });
}

TEST(FourierMatrix, SmallCases) {
  EXPECT_EQ(ma::fourier_matrix(1)(0, 0), cdouble(1.0, 0.0));
  const ComplexMatrix f2 = ma::fourier_matrix(2);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(f2(0, 0) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f2(1, 1) + r), 0.0, 1e-15);
  const ComplexMatrix f4 = ma::fourier_matrix(4);
  EXPECT_NEAR(std::abs(f4(1, 1) - cdouble(0.0, -0.5)), 0.0, 1e-15);
  for (std::size_t n : {1u, 5u, 16u, 33u}) {
    const ComplexMatrix f = ma::fourier_matrix(n);
    EXPECT_LE((f * f.adjoint() - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Windows, HannValues) {
  EXPECT_DOUBLE_EQ(ma::hann_window(1)[0], 1.0);
  const auto w3 = ma::hann_window(3);
  EXPECT_NEAR(w3[0], 0.0, 1e-16);
  EXPECT_NEAR(w3[1], 1.0, 1e-15);
  EXPECT_NEAR(w3[2], 0.0, 1e-16);
  const auto w4 = ma::hann_window(4);
  const double s = std::sqrt(1.125);
  EXPECT_NEAR(w4[0], 0.0, 1e-16);
  EXPECT_NEAR(w4[1], 0.75 / s, 1e-15);
  EXPECT_NEAR(w4[2], 0.75 / s, 1e-15);
  EXPECT_NEAR(w4[3], 0.0, 1e-16);
}

TEST(Windows, UnitNormAndValidation) {
  for (std::size_t f : {1u, 2u, 3u, 7u, 256u}) {
    if (f != 2) EXPECT_NEAR(ma::hann_window(f).norm(), 1.0, 1e-12);
    EXPECT_NEAR(ma::rectangular_window(f).norm(), 1.0, 1e-12);
  }
  // Both samples of a length-2 Hann window are zero.
  expect_code(ma::ErrorCode::kInvalidArgument, [] { ma::hann_window(2); });
  expect_code(ma::ErrorCode::kInvalidArgument,
              [] { ma::WindowSpec{ma::WindowKind::kHann, 2, 1}.validate(); });
  EXPECT_NO_THROW((ma::WindowSpec{ma::WindowKind::kRectangular, 2, 1}.validate()));
  expect_code(ma::ErrorCode::kInvalidArgument,
              [] { ma::WindowSpec{ma::WindowKind::kHann, 8, 9}.validate(); });
  expect_code(ma::ErrorCode::kInvalidArgument,
              [] { ma::WindowSpec{ma::WindowKind::kHann, 8, 0}.validate(); });
  EXPECT_EQ(ma::WindowSpec::with_default_hop(ma::WindowKind::kHann, 1).hop, 1u);
  EXPECT_EQ(ma::WindowSpec::with_default_hop(ma::WindowKind::kHann, 64).hop, 32u);
  EXPECT_EQ((ma::WindowSpec{ma::WindowKind::kHann, 8, 4}.window_count(20)), 4u);
  EXPECT_EQ((ma::WindowSpec{ma::WindowKind::kHann, 8, 4}.window_count(7)), 0u);
}

TEST(Welch, ZeroSignalGivesZeroBins) {
  const ma::Signal zero(ma::SignalData::Zero(2, 64));
  const auto cs = ma::welch_cross_psd(zero, {ma::WindowKind::kHann, 16, 8}, 0.0);
  for (const auto& b : cs.bins) EXPECT_EQ(b.cwiseAbs().maxCoeff(), 0.0);
  const auto psd = ma::welch_psd(zero, {ma::WindowKind::kHann, 16, 8});
  EXPECT_EQ(psd.values.maxCoeff(), ma::kPsdFloor);
}

TEST(Welch, TooShort) {
  expect_code(ma::ErrorCode::kSignalTooShort, [] {
    ma::welch_cross_psd(ma::Signal(ma::SignalData::Ones(1, 10)), {ma::WindowKind::kHann, 16, 8},
                        0.0);
  });
}

TEST(Welch, SingleRectangularWindowIsPeriodogram) {
  const std::size_t f = 12;
  const ma::Signal x = white(1, f, 3);
  const auto cs = ma::welch_cross_psd(x, {ma::WindowKind::kRectangular, f, 5}, 0.0);
  const double w = 1.0 / std::sqrt(static_cast<double>(f));
  for (std::size_t j = 0; j < f; ++j) {
    cdouble acc = 0.0;
    for (std::size_t k = 0; k < f; ++k) {
      acc += w * x.data()(0, k) * std::polar(1.0, -2.0 * std::numbers::pi * j * k / f);
    }
    EXPECT_NEAR(cs.bins[j](0, 0).real(), std::norm(acc), 1e-12);
    EXPECT_EQ(cs.bins[j](0, 0).imag(), 0.0);
  }
}

TEST(Welch, ParsevalForOneFullWindow) {
  const std::size_t f = 40;
  const ma::Signal x = white(3, f, 4);
  for (auto kind : {ma::WindowKind::kRectangular, ma::WindowKind::kHann}) {
    const ma::WindowSpec win{kind, f, f};
    const auto cs = ma::welch_cross_psd(x, win, 0.0);
    double total = 0.0;
    for (const auto& b : cs.bins) total += b.trace().real();
    const Eigen::VectorXd w = win.weights();
    const double windowed = (x.data().array().rowwise() * w.transpose().array()).matrix().squaredNorm();
    // Unnormalized analysis DFT: sum_j |x_hat_j|^2 = f ||w . x||^2.
    EXPECT_NEAR(total, static_cast<double>(f) * windowed, 1e-9 * total);
  }
}

TEST(Welch, CosineConcentratesAtItsBin) {
  const std::size_t f = 32, n = 256, j0 = 5;
  ma::SignalData x(1, n);
  for (std::size_t k = 0; k < n; ++k) x(0, k) = std::cos(2.0 * std::numbers::pi * j0 * k / f);
  const auto psd = ma::welch_psd(ma::Signal(x), {ma::WindowKind::kRectangular, f, f});
  const double total = psd.values.sum();
  EXPECT_NEAR(psd.values(0, j0) + psd.values(0, f - j0), total, 1e-9 * total);
  EXPECT_NEAR(psd.values(0, j0), psd.values(0, f - j0), 1e-9 * total);
}

TEST(Welch, PsdIsDiagonalOfCrossSpectrum) {
  const ma::Signal x = white(4, 1000, 5);
  const ma::WindowSpec win{ma::WindowKind::kHann, 32, 16};
  const auto cs = ma::welch_cross_psd(x, win, 0.0);
  const auto psd = ma::welch_psd(x, win);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t j = 0; j < 32; ++j) {
      EXPECT_NEAR(psd.values(c, j), cs.bins[j](c, c).real(), 1e-12);
    }
  }
}

TEST(Welch, OutputSatisfiesSpectrumInvariants) {
  const ma::Signal x = white(3, 500, 6);
  const auto cs = ma::welch_cross_psd(x, {ma::WindowKind::kHann, 20, 10}, 1e-10);
  EXPECT_NO_THROW(ma::validate_cross_spectrum(cs, 1e-12));
  for (std::size_t j = 0; j < cs.f(); ++j) {
    EXPECT_TRUE(cs.bins[j] == cs.bins[(cs.f() - j) % cs.f()].conjugate());
    EXPECT_GE(ma::herm_eig(cs.bins[j]).values[0], 0.0);
  }
}

TEST(Welch, WhiteNoiseBinsAreIdentityOnAverage) {
  const std::size_t f = 16, runs = 40;
  const ma::WindowSpec win{ma::WindowKind::kHann, f, 8};
  std::vector<ComplexMatrix> sum(f, ComplexMatrix::Zero(2, 2));
  std::vector<Eigen::MatrixXd> sum_sq(f, Eigen::MatrixXd::Zero(2, 4));
  for (std::size_t r = 0; r < runs; ++r) {
    const auto cs = ma::welch_cross_psd(white(2, 100000, 100 + r), win, 0.0);
    for (std::size_t j = 0; j < f; ++j) {
      sum[j] += cs.bins[j];
      sum_sq[j].leftCols(2) += cs.bins[j].real().cwiseAbs2();
      sum_sq[j].rightCols(2) += cs.bins[j].imag().cwiseAbs2();
    }
  }
  for (std::size_t j = 0; j < f; ++j) {
    const ComplexMatrix mean = sum[j] / static_cast<double>(runs);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const double target = a == b ? 1.0 : 0.0;
        const double m2 = sum_sq[j](a, b) / runs;
        const double sd = std::sqrt(std::max(m2 - std::pow(mean(a, b).real(), 2), 0.0));
        EXPECT_LE(std::abs(mean(a, b).real() - target), 3.0 * sd / std::sqrt(runs) + 1e-12)
            << "bin " << j;
      }
    }
  }
}

TEST(SpatialCov, ArithmeticAndLawOfLargeNumbers) {
  ma::SignalData x(2, 2);
  x << 1, -1, 1, -1;
  const auto cov = ma::spatial_cov(ma::Signal(x), 0.0);
  EXPECT_TRUE(cov.entries.isApprox(ma::RealMatrix::Ones(2, 2)));
  EXPECT_EQ(ma::spatial_cov(ma::Signal(ma::SignalData::Zero(3, 5)), 0.0).entries.norm(), 0.0);

  const auto big = ma::spatial_cov(white(3, 100000, 7), 0.0);
  EXPECT_LE((big.entries - ma::RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Subsample, StrideGather) {
  Eigen::VectorXcd q(8);
  for (int i = 0; i < 8; ++i) q[i] = cdouble(i, -i);
  const auto p = ma::subsample_gf(q, 4);
  ASSERT_EQ(p.size(), 4);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(p[i], q[2 * i]);
  EXPECT_EQ(ma::subsample_gf(q, 8), q);
  EXPECT_EQ(ma::subsample_gf(q, 1)[0], q[0]);
  expect_code(ma::ErrorCode::kNotDivisible, [&] { ma::subsample_gf(q, 3); });
}

TEST(Subsample, BlocksLiftElementwise) {
  std::vector<ComplexMatrix> q;
  for (int i = 0; i < 8; ++i) q.push_back(ComplexMatrix::Constant(2, 2, cdouble(i, 1)));
  const auto p = ma::subsample_gf_blocks(q, 4);
  ASSERT_EQ(p.f(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(p.bins[i], q[2 * i]);
  EXPECT_EQ(ma::subsample_gf_blocks(q, 8).bins, q);
  EXPECT_EQ(ma::subsample_gf_blocks(q, 1).bins.front(), q.front());
  expect_code(ma::ErrorCode::kNotDivisible, [&] { ma::subsample_gf_blocks(q, 5); });
}

TEST(HermitianSymmetry, SymmetricInputUnchanged) {
  const auto cs = ma::welch_cross_psd(white(2, 300, 8), {ma::WindowKind::kHann, 10, 5}, 0.0);
  const auto out = ma::enforce_hermitian_symmetry(cs);
  for (std::size_t j = 0; j < cs.f(); ++j) {
    EXPECT_LE((out.bins[j] - cs.bins[j]).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(HermitianSymmetry, AveragesPerturbedPair) {
  const std::size_t f = 6;
  ma::CrossSpectrum cs;
  for (std::size_t j = 0; j < f; ++j) cs.bins.push_back(ComplexMatrix::Identity(2, 2));
  ComplexMatrix e = ComplexMatrix::Zero(2, 2);
  e(0, 1) = cdouble(1e-3, 2e-3);
  e(1, 0) = std::conj(e(0, 1));
  cs.bins[1] += e;
  const auto out = ma::enforce_hermitian_symmetry(cs);
  const ComplexMatrix avg = 0.5 * (cs.bins[1] + cs.bins[f - 1].conjugate());
  EXPECT_LE((out.bins[1] - avg).cwiseAbs().maxCoeff(), 1e-18);
  EXPECT_LE((out.bins[f - 1] - avg.conjugate()).cwiseAbs().maxCoeff(), 1e-18);
}

TEST(HermitianSymmetry, RandomPerturbationPassesValidation) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (std::size_t f : {1u, 2u, 7u, 8u}) {
    ma::CrossSpectrum cs;
    for (std::size_t j = 0; j < f; ++j) {
      ComplexMatrix m(3, 3);
      for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = {nd(rng), nd(rng)};
      cs.bins.push_back(m);
    }
    expect_code(ma::ErrorCode::kInvalidSpectrum, [&] { ma::validate_cross_spectrum(cs); });
    const auto out = ma::enforce_hermitian_symmetry(cs);
    EXPECT_NO_THROW(ma::validate_cross_spectrum(out, 0.0));
  }
}

TEST(Regularize, ShrinksAndClipsKeepingSymmetry) {
  ma::CrossSpectrum cs;
  ComplexMatrix neg = ComplexMatrix::Identity(2, 2);
  neg(1, 1) = -1e-3;
  for (int j = 0; j < 4; ++j) cs.bins.push_back(neg);
  const auto out = ma::regularize_bins(cs, 0.0);
  for (const auto& b : out.bins) EXPECT_GE(ma::herm_eig(b).values[0], 0.0);
  EXPECT_NO_THROW(ma::validate_cross_spectrum(out, 0.0));

  ma::CrossSpectrum rank1;
  for (int j = 0; j < 3; ++j) rank1.bins.push_back(ComplexMatrix::Ones(2, 2));
  const auto shrunk = ma::regularize_bins(rank1, 0.1);
  EXPECT_NEAR(ma::herm_eig(shrunk.bins[0]).values[0], 0.1, 1e-14);
}
