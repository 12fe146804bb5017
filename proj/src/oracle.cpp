#include "mongealign/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mongealign/error.hpp"
#include "mongealign/monge.hpp"
#include "mongealign/synth.hpp"

namespace mongealign::oracle {

namespace {

void require_divides(std::size_t n, std::size_t f) {
  if (f == 0 || n % f != 0) {
    throw Error(ErrorCode::kNotDivisible,
                std::to_string(n) + " is not a multiple of " + std::to_string(f));
  }
}

}  // namespace

RealMatrix dense_cov(const CrossSpectrum& spec) {
  const std::size_t n = spec.f();
  const std::size_t n_c = spec.n_channels();
  const ComplexMatrix F = fourier_matrix(n);
  RealMatrix out(n_c * n, n_c * n);
  double residue = 0.0;
  Eigen::VectorXcd q(n);
  for (std::size_t a = 0; a < n_c; ++a) {
    for (std::size_t b = 0; b < n_c; ++b) {
      for (std::size_t j = 0; j < n; ++j) q[j] = spec.bins[j](a, b);
      const ComplexMatrix block = F.adjoint() * q.asDiagonal() * F;
      residue = std::max(residue, block.imag().cwiseAbs().maxCoeff());
      out.block(a * n, b * n, n, n) = block.real();
    }
  }
  if (residue > 1e-8 * std::max(1.0, out.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::kNonRealResult, "spectrum is not conjugate symmetric");
  }
  return out;
}

bool in_band(std::size_t d, std::size_t n, std::size_t f) {
  return d < (f + 1) / 2 || d >= n - f / 2;
}

RealMatrix project_band_limited(const RealMatrix& block, std::size_t f) {
  const auto n = static_cast<std::size_t>(block.rows());
  Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
  for (std::size_t d = 0; d < n; ++d) {
    if (!in_band(d, n, f)) continue;
    double sum = 0.0;
    for (std::size_t l = 0; l < n; ++l) sum += block(l, (l + d) % n);
    row[d] = sum / static_cast<double>(n);
  }
  RealMatrix out(n, n);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t m = 0; m < n; ++m) out(l, m) = row[(m + n - l) % n];
  }
  return out;
}

RealMatrix dense_f_monge(const RealMatrix& sigma_s, const RealMatrix& sigma_t,
                         std::size_t n_channels, std::size_t f) {
  if (n_channels == 0 || sigma_s.rows() % static_cast<Eigen::Index>(n_channels) != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "covariance size is not a multiple of n_channels");
  }
  const auto n = static_cast<std::size_t>(sigma_s.rows()) / n_channels;
  require_divides(n, f);
  const RealMatrix a = monge_map<double>(sigma_s, sigma_t, 0.0);
  RealMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < n_channels; ++i) {
    for (std::size_t k = 0; k < n_channels; ++k) {
      out.block(i * n, k * n, n, n) = project_band_limited(a.block(i * n, k * n, n, n), f);
    }
  }
  return out;
}

Signal dense_apply(const RealMatrix& a, const Signal& sig) {
  const std::size_t n_c = sig.n_channels();
  const std::size_t n = sig.n_samples();
  if (static_cast<std::size_t>(a.rows()) != n_c * n || a.cols() != a.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "operator does not match the signal size");
  }
  Eigen::VectorXd v(n_c * n);
  for (std::size_t c = 0; c < n_c; ++c) {
    for (std::size_t l = 0; l < n; ++l) v[c * n + l] = sig.data()(c, l);
  }
  const Eigen::VectorXd y = a * v;
  SignalData out(n_c, n);
  for (std::size_t c = 0; c < n_c; ++c) {
    for (std::size_t l = 0; l < n; ++l) out(c, l) = y[c * n + l];
  }
  return Signal(std::move(out), sig.sample_rate_hz());
}

Prop1Result prop1_check(const Eigen::VectorXcd& q, const Eigen::VectorXcd& x, std::size_t f) {
  const auto n = static_cast<std::size_t>(q.size());
  require_divides(n, f);
  if (static_cast<std::size_t>(x.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "x and q differ in length");
  }
  const ComplexMatrix F = fourier_matrix(n);
  const ComplexMatrix A = F * q.asDiagonal() * F.adjoint();

  const double scale = std::max(1e-300, A.row(0).cwiseAbs().maxCoeff());
  for (std::size_t d = 0; d < n; ++d) {
    if (!in_band(d, n, f) && std::abs(A(0, d)) > 1e-9 * scale) {
      throw Error(ErrorCode::kNotBandLimited,
                  "first-row entry at offset " + std::to_string(d) + " is outside the band");
    }
  }

  const Eigen::VectorXcd g = subsample_gf(q, f);
  const Eigen::VectorXcd h = fourier_matrix(f).adjoint() * g / std::sqrt(static_cast<double>(f));

  Prop1Result out;
  out.dense = A * x;
  out.filtered = Eigen::VectorXcd::Zero(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t t = 0; t < f; ++t) {
      const std::ptrdiff_t s = t < (f + 1) / 2 ? static_cast<std::ptrdiff_t>(t)
                                               : static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(f);
      const std::ptrdiff_t idx = ((static_cast<std::ptrdiff_t>(l) + s) % sn + sn) % sn;
      out.filtered[l] += h[t] * x[idx];
    }
  }
  return out;
}

CrossSpectrum random_spectrum(std::size_t n_channels, std::size_t n, std::uint64_t seed,
                              double floor) {
  NormalStream normals(seed);
  CrossSpectrum out;
  out.bins.resize(n);
  for (std::size_t j = 0; j <= n / 2 && j < n; ++j) {
    const bool real_bin = j == 0 || 2 * j == n;
    ComplexMatrix g(n_channels, n_channels);
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      const double re = normals.next();
      g.data()[k] = real_bin ? cdouble(re, 0.0) : cdouble(re, normals.next());
    }
    ComplexMatrix bin = g * g.adjoint() + floor * ComplexMatrix::Identity(n_channels, n_channels);
    bin = hermitian_part(bin);
    out.bins[j] = bin;
    out.bins[(n - j) % n] = bin.conjugate();
  }
  return out;
}

CrossSpectrum random_band_limited_map(std::size_t n_channels, std::size_t n, std::size_t f,
                                      std::uint64_t seed) {
  NormalStream normals(seed);
  const int reach = static_cast<int>((f + 1) / 2) - 1;
  const int width = 2 * reach + 1;
  // taps[i][k][d + reach] with taps[k][i][-d] = taps[i][k][d].
  std::vector<std::vector<std::vector<double>>> taps(
      n_channels, std::vector<std::vector<double>>(n_channels, std::vector<double>(width, 0.0)));
  for (std::size_t i = 0; i < n_channels; ++i) {
    for (std::size_t k = i; k < n_channels; ++k) {
      for (int d = -reach; d <= reach; ++d) {
        if (i == k && d < 0) continue;
        const double v = normals.next();
        taps[i][k][d + reach] = v;
        taps[k][i][-d + reach] = v;
      }
    }
  }

  auto spectrum = [&]() {
    CrossSpectrum b;
    b.bins.assign(n, ComplexMatrix::Zero(n_channels, n_channels));
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n_channels; ++i) {
        for (std::size_t k = 0; k < n_channels; ++k) {
          cdouble acc = 0.0;
          for (int d = -reach; d <= reach; ++d) {
            const double phase = -2.0 * std::numbers::pi *
                                 static_cast<double>(j * static_cast<std::size_t>(d + static_cast<int>(n)) % n) /
                                 static_cast<double>(n);
            acc += taps[i][k][d + reach] * std::polar(1.0, phase);
          }
          b.bins[j](i, k) = acc;
        }
      }
    }
    return enforce_hermitian_symmetry(b);
  };

  CrossSpectrum b = spectrum();
  double lmin = std::numeric_limits<double>::infinity();
  for (const auto& bin : b.bins) lmin = std::min(lmin, herm_eig(bin).values[0]);
  const double shift = 1.0 - lmin;
  for (std::size_t i = 0; i < n_channels; ++i) taps[i][i][reach] += shift;
  return spectrum();
}

CrossSpectrum congruence(const CrossSpectrum& b, const CrossSpectrum& q) {
  if (b.f() != q.f() || b.n_channels() != q.n_channels()) {
    throw Error(ErrorCode::kShapeMismatch, "spectra differ in shape");
  }
  CrossSpectrum out;
  out.bins.reserve(b.f());
  for (std::size_t j = 0; j < b.f(); ++j) out.bins.push_back(b.bins[j] * q.bins[j] * b.bins[j]);
  return enforce_hermitian_symmetry(out);
}

}  // namespace mongealign::oracle
