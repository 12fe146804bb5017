#include "mongealign/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mongealign/error.hpp"
#include "mongealign/fft.hpp"

namespace mongealign {

namespace {

constexpr std::size_t kWindowBlock = 64;

std::size_t mirror(std::size_t j, std::size_t f) { return (f - j) % f; }

void require_window_fits(const Signal& sig, const WindowSpec& win) {
  win.validate();
  if (sig.n_samples() < win.length) {
    throw Error(ErrorCode::kSignalTooShort,
                "window length " + std::to_string(win.length) + " exceeds " +
                    std::to_string(sig.n_samples()) + " samples");
  }
}

// Fills bins j > f/2 from their conjugate partners.
void mirror_upper_half(std::vector<ComplexMatrix>& bins) {
  const std::size_t f = bins.size();
  for (std::size_t j = f / 2 + 1; j < f; ++j) bins[j] = bins[mirror(j, f)].conjugate();
}

}  // namespace

Signal::Signal(SignalData data, std::optional<double> sample_rate_hz)
    : data_(std::move(data)), sample_rate_hz_(sample_rate_hz) {
  if (data_.rows() == 0 || data_.cols() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "signal must have at least one channel and sample");
  }
  if (!data_.allFinite()) throw Error(ErrorCode::kNonFinite, "signal contains NaN or Inf");
  if (sample_rate_hz_ && !(*sample_rate_hz_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
}

Signal center_channels(const Signal& sig) {
  SignalData centered = sig.data();
  centered.colwise() -= centered.rowwise().mean();
  return Signal(std::move(centered), sig.sample_rate_hz());
}

WindowSpec WindowSpec::with_default_hop(WindowKind kind, std::size_t length) {
  return WindowSpec{kind, length, std::max<std::size_t>(1, length / 2)};
}

void WindowSpec::validate() const {
  if (length == 0 || hop == 0 || hop > length) {
    throw Error(ErrorCode::kInvalidArgument,
                "window needs 1 <= hop <= length (length " + std::to_string(length) +
                    ", hop " + std::to_string(hop) + ")");
  }
  if (kind == WindowKind::kHann && length == 2) {
    throw Error(ErrorCode::kInvalidArgument, "a length-2 Hann window is identically zero");
  }
}

Eigen::VectorXd WindowSpec::weights() const {
  validate();
  return kind == WindowKind::kHann ? hann_window(length) : rectangular_window(length);
}

std::size_t WindowSpec::window_count(std::size_t n_samples) const {
  if (n_samples < length) return 0;
  return (n_samples - length) / hop + 1;
}

ComplexMatrix fourier_matrix(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "fourier_matrix needs n >= 1");
  ComplexMatrix out(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t m = 0; m < n; ++m) {
      // Reduce the exponent mod n first so large products keep full precision.
      const double phase =
          -2.0 * std::numbers::pi * static_cast<double>((l * m) % n) / static_cast<double>(n);
      out(l, m) = std::polar(scale, phase);
    }
  }
  return out;
}

Eigen::VectorXd hann_window(std::size_t f) {
  if (f == 0) throw Error(ErrorCode::kInvalidArgument, "window length must be >= 1");
  if (f == 1) return Eigen::VectorXd::Ones(1);
  if (f == 2) throw Error(ErrorCode::kInvalidArgument, "a length-2 Hann window is identically zero");
  Eigen::VectorXd w(f);
  for (std::size_t k = 0; k < f; ++k) {
    w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                 static_cast<double>(f - 1)));
  }
  return w / w.norm();
}

Eigen::VectorXd rectangular_window(std::size_t f) {
  if (f == 0) throw Error(ErrorCode::kInvalidArgument, "window length must be >= 1");
  return Eigen::VectorXd::Constant(f, 1.0 / std::sqrt(static_cast<double>(f)));
}

CrossSpectrum welch_cross_psd(const Signal& sig, const WindowSpec& win, double eps) {
  require_window_fits(sig, win);
  const std::size_t f = win.length;
  const std::size_t half = f / 2 + 1;
  const std::size_t n_c = sig.n_channels();
  const std::size_t n_w = win.window_count(sig.n_samples());
  const Eigen::VectorXd w = win.weights();

  // One contiguous (bins x windows) block per channel, accumulated pair by
  // pair; the lower triangle is filled by conjugation at the end.
  std::vector<ComplexMatrix> stft(n_c, ComplexMatrix(half, kWindowBlock));
  std::vector<Eigen::VectorXcd> acc(n_c * (n_c + 1) / 2, Eigen::VectorXcd::Zero(half));
  std::vector<double> frame(f);

  for (std::size_t first = 0; first < n_w; first += kWindowBlock) {
    const auto count = static_cast<Eigen::Index>(std::min(kWindowBlock, n_w - first));
    for (std::size_t c = 0; c < n_c; ++c) {
      for (Eigen::Index b = 0; b < count; ++b) {
        const std::size_t start = (first + static_cast<std::size_t>(b)) * win.hop;
        for (std::size_t k = 0; k < f; ++k) frame[k] = w[k] * sig.data()(c, start + k);
        fft::forward_real(frame, std::span<cdouble>(stft[c].col(b).data(), half));
      }
    }
    std::size_t pair = 0;
    for (std::size_t a = 0; a < n_c; ++a) {
      const auto sa = stft[a].leftCols(count).array();
      for (std::size_t b = a; b < n_c; ++b, ++pair) {
        acc[pair] += (sa * stft[b].leftCols(count).array().conjugate()).rowwise().sum().matrix();
      }
    }
  }

  CrossSpectrum out;
  out.bins.resize(f);
  const double scale = 1.0 / static_cast<double>(n_w);
  for (std::size_t j = 0; j < half; ++j) {
    ComplexMatrix bin(n_c, n_c);
    std::size_t pair = 0;
    for (std::size_t a = 0; a < n_c; ++a) {
      for (std::size_t b = a; b < n_c; ++b, ++pair) {
        bin(a, b) = acc[pair][j] * scale;
        bin(b, a) = std::conj(bin(a, b));
      }
    }
    out.bins[j] = std::move(bin);
  }
  mirror_upper_half(out.bins);
  return regularize_bins(enforce_hermitian_symmetry(out), eps);
}

ChannelPsd welch_psd(const Signal& sig, const WindowSpec& win) {
  require_window_fits(sig, win);
  const std::size_t f = win.length;
  const std::size_t half = f / 2 + 1;
  const std::size_t n_c = sig.n_channels();
  const std::size_t n_w = win.window_count(sig.n_samples());
  const Eigen::VectorXd w = win.weights();

  ChannelPsd out{Eigen::MatrixXd::Zero(n_c, f)};
  std::vector<double> frame(f);
  std::vector<cdouble> spectrum(half);
  for (std::size_t c = 0; c < n_c; ++c) {
    for (std::size_t i = 0; i < n_w; ++i) {
      const std::size_t start = i * win.hop;
      for (std::size_t k = 0; k < f; ++k) frame[k] = w[k] * sig.data()(c, start + k);
      fft::forward_real(frame, spectrum);
      for (std::size_t j = 0; j < half; ++j) out.values(c, j) += std::norm(spectrum[j]);
    }
    for (std::size_t j = 0; j < half; ++j) {
      out.values(c, j) = std::max(out.values(c, j) / static_cast<double>(n_w), kPsdFloor);
    }
    for (std::size_t j = half; j < f; ++j) out.values(c, j) = out.values(c, mirror(j, f));
  }
  return out;
}

SpatialCov spatial_cov(const Signal& sig, double eps) {
  const auto& x = sig.data();
  RealMatrix cov = (x * x.transpose()) / static_cast<double>(sig.n_samples());
  return SpatialCov{shrink(hermitian_part(cov), eps)};
}

Eigen::VectorXcd subsample_gf(const Eigen::VectorXcd& q, std::size_t f) {
  const auto n = static_cast<std::size_t>(q.size());
  if (f == 0 || n % f != 0) {
    throw Error(ErrorCode::kNotDivisible,
                std::to_string(n) + " is not a multiple of " + std::to_string(f));
  }
  const std::size_t stride = n / f;
  Eigen::VectorXcd p(f);
  for (std::size_t l = 0; l < f; ++l) p[l] = q[l * stride];
  return p;
}

CrossSpectrum subsample_gf_blocks(const std::vector<ComplexMatrix>& q, std::size_t f) {
  const std::size_t n = q.size();
  if (f == 0 || n % f != 0) {
    throw Error(ErrorCode::kNotDivisible,
                std::to_string(n) + " is not a multiple of " + std::to_string(f));
  }
  const std::size_t stride = n / f;
  CrossSpectrum out;
  out.bins.reserve(f);
  for (std::size_t l = 0; l < f; ++l) out.bins.push_back(q[l * stride]);
  return out;
}

CrossSpectrum subsample_gf_blocks(const CrossSpectrum& q, std::size_t f) {
  return subsample_gf_blocks(q.bins, f);
}

CrossSpectrum enforce_hermitian_symmetry(const CrossSpectrum& cs) {
  const std::size_t f = cs.f();
  CrossSpectrum out;
  out.bins.resize(f);
  for (std::size_t j = 0; j <= f / 2 && j < f; ++j) {
    const std::size_t k = mirror(j, f);
    const ComplexMatrix hj = hermitian_part(cs.bins[j]);
    const ComplexMatrix hk = hermitian_part(cs.bins[k]);
    ComplexMatrix avg = 0.5 * (hj + hk.conjugate());
    if (j == k) avg = ComplexMatrix(avg.real().cast<cdouble>());
    out.bins[j] = avg;
    out.bins[k] = avg.conjugate();
  }
  return out;
}

CrossSpectrum regularize_bins(const CrossSpectrum& cs, double eps) {
  const std::size_t f = cs.f();
  CrossSpectrum out = cs;
  for (std::size_t j = 0; j <= f / 2 && j < f; ++j) {
    ComplexMatrix bin = shrink(cs.bins[j], eps);
    const auto eig = herm_eig(bin);
    if (eig.values[0] < 0.0) {
      bin = apply_spectral(eig, [](double l) { return std::max(l, 0.0); });
      if (mirror(j, f) == j) bin = ComplexMatrix(bin.real().cast<cdouble>());
    }
    out.bins[j] = bin;
    out.bins[mirror(j, f)] = bin.conjugate();
  }
  return out;
}

void validate_cross_spectrum(const CrossSpectrum& cs, double tol) {
  const std::size_t f = cs.f();
  if (f == 0) throw Error(ErrorCode::kInvalidSpectrum, "no bins");
  const auto n_c = static_cast<Eigen::Index>(cs.n_channels());
  for (std::size_t j = 0; j < f; ++j) {
    const auto& b = cs.bins[j];
    if (b.rows() != n_c || b.cols() != n_c || n_c == 0) {
      throw Error(ErrorCode::kInvalidSpectrum, "bin " + std::to_string(j) + " has wrong shape");
    }
    if (!is_hermitian(b, tol)) {
      throw Error(ErrorCode::kInvalidSpectrum, "bin " + std::to_string(j) + " is not Hermitian");
    }
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if ((b - cs.bins[mirror(j, f)].conjugate()).cwiseAbs().maxCoeff() > tol * scale) {
      throw Error(ErrorCode::kInvalidSpectrum,
                  "bin " + std::to_string(j) + " breaks conjugate-bin symmetry");
    }
  }
}

}  // namespace mongealign
