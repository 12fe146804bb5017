#pragma once

// Monge alignment of multichannel signals to a source barycenter.
//
//   stma: per-frequency cross-spectral map, an n_c x n_c grid of length-f filters
//   tma:  per-channel PSD ratio, n_c length-f filters
//   sma:  one n_c x n_c spatial matrix
//
// Filters are stored in natural order h[0..f) and applied as circular
// convolutions y_i[l] = sum_j sum_t h_ij[t] x_j[l - lag(t)], where
// lag(t) = t for t <= f/2 and t - f otherwise. With this placement the bank
// realizes exactly the band-limited circulant operator whose spectrum at the
// f sub-sampled bins equals the per-bin Monge maps.

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mongealign/monge.hpp"
#include "mongealign/spectral.hpp"

namespace mongealign {

enum class Method { kStma, kTma, kSma };

std::string_view method_name(Method method);
/// Accepts "stma", "tma", "sma". Throws InvalidArgument.
Method parse_method(std::string_view name);

/// Per-domain second-order statistics; the alternative matches the method.
using DomainStats = std::variant<CrossSpectrum, ChannelPsd, SpatialCov>;

struct AlignmentModel {
  static constexpr int kFormatVersion = 1;

  Method method = Method::kTma;
  std::size_t f = 1;
  std::size_t n_channels = 0;
  WindowSpec window;
  double eps = 1e-10;
  DomainStats barycenter;
  int format_version = kFormatVersion;

  /// Throws SchemaError when the barycenter alternative or shapes disagree
  /// with the header fields, or the barycenter breaks its invariants.
  void validate() const;
};

struct FilterBank {
  Method method = Method::kTma;
  std::size_t f = 1;
  std::size_t n_channels = 0;
  /// stma: n_c * n_c filters, row-major by (output, input); tma: n_c filters.
  std::vector<Eigen::VectorXd> taps;
  /// sma only.
  RealMatrix spatial;

  const Eigen::VectorXd& tap(std::size_t out_channel, std::size_t in_channel) const;
};

struct FilterOptions {
  /// Upper bound on per-bin gain (eigenvalue of the per-bin map).
  double max_gain = 1e6;
};

enum class Boundary { kCircular, kReflect };

struct ApplyOptions {
  /// kReflect pads each channel by mirror reflection, filters circularly and
  /// crops back to the original length.
  Boundary boundary = Boundary::kCircular;
};

/// Centers the channels, then estimates the statistics the method needs.
DomainStats estimate_stats(Method method, const Signal& sig, const WindowSpec& win, double eps);

/// Barycenter of already-estimated domain statistics.
DomainStats barycenter_of(Method method, std::span<const DomainStats> stats,
                          const BarycenterConfig& cfg);

/// Train-time fit: per-domain statistics, then their barycenter. The model
/// keeps no per-domain data. For sma, f is 1 and the window is ignored.
/// Throws EmptyInput, InconsistentChannels and estimation errors.
AlignmentModel fit(Method method, std::span<const Signal> signals, const WindowSpec& win,
                   double eps, const BarycenterConfig& cfg = {});

FilterBank stma_filters(const CrossSpectrum& domain, const CrossSpectrum& barycenter,
                        const FilterOptions& opts = {});
FilterBank tma_filters(const ChannelPsd& domain, const ChannelPsd& barycenter,
                       const FilterOptions& opts = {});
FilterBank sma_filters(const SpatialCov& domain, const SpatialCov& barycenter);

FilterBank filters_from_stats(const DomainStats& domain, const DomainStats& barycenter,
                              const FilterOptions& opts = {});

/// Estimates the domain statistics of sig with the model's window and maps
/// them onto the model barycenter. Throws ChannelMismatch.
FilterBank build_filters(const AlignmentModel& model, const Signal& sig,
                         const FilterOptions& opts = {});

/// Throws ChannelMismatch, FilterLongerThanSignal.
Signal apply(const FilterBank& bank, const Signal& sig, const ApplyOptions& opts = {});

/// Test-time alignment: center, estimate, build filters, apply.
Signal transform(const AlignmentModel& model, const Signal& sig,
                 const FilterOptions& filter_opts = {}, const ApplyOptions& apply_opts = {});

/// Lag of tap t of a length-f filter.
std::ptrdiff_t filter_lag(std::size_t t, std::size_t f);

/// Places a length-f filter on a circle of length n (f <= n) at its lags.
Eigen::VectorXd embed_filter(const Eigen::VectorXd& taps, std::size_t n);

/// Transfer matrix of the bank at each of the n bins of a length-n DFT.
std::vector<ComplexMatrix> frequency_response(const FilterBank& bank, std::size_t n);

/// Cross-spectrum of the bank's output for an input with cross-spectrum
/// `input` at full resolution: H_j Q_j H_j^H.
CrossSpectrum mapped_spectrum(const FilterBank& bank, const CrossSpectrum& input);

/// Summed per-bin Bures-Wasserstein distance (single distance for sma).
double stats_distance(const DomainStats& a, const DomainStats& b);

}  // namespace mongealign
