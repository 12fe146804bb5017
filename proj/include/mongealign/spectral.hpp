#pragma once

// Second-order statistics of multichannel signals: Welch cross-spectra,
// per-channel PSDs, spatial covariance, and the frequency sub-sampling map.
//
// Frequency convention: bin j of every spectrum in this library is the
// analysis DFT  x_hat[j] = sum_k w[k] exp(-2 i pi j k / f) x[k], and a cross
// spectrum bin is E[x_hat[j] x_hat[j]^H]. Filters built from such spectra are
// applied as ordinary circular convolutions (see align.hpp).

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mongealign/herm.hpp"

namespace mongealign {

using SignalData = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n_channels x n_samples real time series, one row per channel.
class Signal {
 public:
  Signal() = default;
  /// Throws NonFinite for NaN/Inf entries and InvalidArgument for empty data.
  explicit Signal(SignalData data, std::optional<double> sample_rate_hz = std::nullopt);

  std::size_t n_channels() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t n_samples() const { return static_cast<std::size_t>(data_.cols()); }
  const SignalData& data() const { return data_; }
  std::optional<double> sample_rate_hz() const { return sample_rate_hz_; }

 private:
  SignalData data_;
  std::optional<double> sample_rate_hz_;
};

/// Copy with every channel's mean removed.
Signal center_channels(const Signal& sig);

enum class WindowKind { kHann, kRectangular };

struct WindowSpec {
  WindowKind kind = WindowKind::kHann;
  std::size_t length = 256;
  std::size_t hop = 128;

  /// Hop defaults to half the window (at least one sample).
  static WindowSpec with_default_hop(WindowKind kind, std::size_t length);

  /// Throws InvalidArgument unless 1 <= hop <= length.
  void validate() const;
  /// Unit-l2-norm weights.
  Eigen::VectorXd weights() const;
  /// Number of full windows that fit in n_samples (0 if none).
  std::size_t window_count(std::size_t n_samples) const;

  bool operator==(const WindowSpec&) const = default;
};

struct CrossSpectrum {
  std::vector<ComplexMatrix> bins;  // f matrices, n_channels x n_channels

  std::size_t f() const { return bins.size(); }
  std::size_t n_channels() const { return bins.empty() ? 0 : bins.front().rows(); }
};

struct ChannelPsd {
  Eigen::MatrixXd values;  // n_channels x f

  std::size_t f() const { return static_cast<std::size_t>(values.cols()); }
  std::size_t n_channels() const { return static_cast<std::size_t>(values.rows()); }
};

struct SpatialCov {
  RealMatrix entries;  // n_channels x n_channels

  std::size_t n_channels() const { return static_cast<std::size_t>(entries.rows()); }
};

/// Lower bound applied to per-channel PSD values.
inline constexpr double kPsdFloor = 1e-300;

/// Unitary DFT matrix, (F)_{lm} = n^{-1/2} exp(-2 i pi l m / n) (zero-based).
ComplexMatrix fourier_matrix(std::size_t n);

/// Hann window 0.5 (1 - cos(2 pi k / (f - 1))) scaled to unit l2 norm; [1] for f = 1.
Eigen::VectorXd hann_window(std::size_t f);
Eigen::VectorXd rectangular_window(std::size_t f);

/// Welch cross-spectral estimate averaged over all full windows.
/// Bins are then made Hermitian and conjugate-symmetric, shrunk by eps and
/// clipped to be positive semi-definite. Throws SignalTooShort.
CrossSpectrum welch_cross_psd(const Signal& sig, const WindowSpec& win, double eps);

/// Per-channel Welch PSD (diagonal of welch_cross_psd without shrinkage),
/// floored at kPsdFloor.
ChannelPsd welch_psd(const Signal& sig, const WindowSpec& win);

/// (1/n) X X^T, then shrinkage by eps.
SpatialCov spatial_cov(const Signal& sig, double eps);

/// Keeps every (n/f)-th entry starting at index 0. Throws NotDivisible.
Eigen::VectorXcd subsample_gf(const Eigen::VectorXcd& q, std::size_t f);
CrossSpectrum subsample_gf_blocks(const std::vector<ComplexMatrix>& q, std::size_t f);
CrossSpectrum subsample_gf_blocks(const CrossSpectrum& q, std::size_t f);

/// Projects onto spectra whose bins are Hermitian and satisfy
/// bins[j] == conj(bins[(f - j) mod f]) exactly.
CrossSpectrum enforce_hermitian_symmetry(const CrossSpectrum& cs);

/// Shrinks every bin by eps and clips negative eigenvalues, keeping the
/// conjugate-bin symmetry exact. Used after estimation.
CrossSpectrum regularize_bins(const CrossSpectrum& cs, double eps);

/// Throws InvalidSpectrum unless both cross-spectrum invariants hold within tol.
void validate_cross_spectrum(const CrossSpectrum& cs, double tol = 1e-9);

}  // namespace mongealign
