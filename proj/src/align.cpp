#include "mongealign/align.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mongealign/error.hpp"
#include "mongealign/fft.hpp"

namespace mongealign {

namespace {

constexpr double kImagResidueTolerance = 1e-8;

std::size_t mirror(std::size_t j, std::size_t f) { return (f - j) % f; }

const char* stats_kind(const DomainStats& s) {
  switch (s.index()) {
    case 0: return "cross_spectrum";
    case 1: return "channel_psd";
    default: return "spatial_cov";
  }
}

std::size_t expected_index(Method m) {
  switch (m) {
    case Method::kStma: return 0;
    case Method::kTma: return 1;
    case Method::kSma: return 2;
  }
  return 0;
}

// Inverse DFT of a conjugate-symmetric bin sequence; returns the real part
// after checking the imaginary residue.
Eigen::VectorXd real_inverse_dft(const std::vector<cdouble>& spectrum) {
  const std::size_t f = spectrum.size();
  std::vector<cdouble> time(f);
  fft::backward(spectrum, time);
  Eigen::VectorXd taps(f);
  double imag_sq = 0.0;
  for (std::size_t k = 0; k < f; ++k) {
    time[k] /= static_cast<double>(f);
    taps[k] = time[k].real();
    imag_sq += time[k].imag() * time[k].imag();
  }
  if (std::sqrt(imag_sq) > kImagResidueTolerance * taps.norm() + 1e-300) {
    throw Error(ErrorCode::kNonRealResult, "filter has a non-negligible imaginary part");
  }
  return taps;
}

ComplexMatrix cap_gain(const ComplexMatrix& map, double max_gain) {
  const auto eig = herm_eig(map);
  if (eig.values[eig.values.size() - 1] <= max_gain) return map;
  return apply_spectral(eig, [max_gain](double l) { return std::min(l, max_gain); });
}

ComplexMatrix per_bin_map(const ComplexMatrix& domain, const ComplexMatrix& bary,
                          double max_gain, std::size_t bin) {
  const double power = domain.trace().real();
  if (power <= 0.0) {
    // Nothing to map in a bin the domain leaves empty.
    return ComplexMatrix::Identity(domain.rows(), domain.cols());
  }
  try {
    return cap_gain(monge_map<cdouble>(domain, bary, 0.0), max_gain);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSingularSource) {
      throw Error(ErrorCode::kSingularDomainSpectrum,
                  "domain cross-spectrum is singular at bin " + std::to_string(bin));
    }
    throw;
  }
}

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  std::ptrdiff_t k = i % period;
  if (k < 0) k += period;
  if (k >= static_cast<std::ptrdiff_t>(n)) k = period - k;
  return static_cast<std::size_t>(k);
}

// Circular multichannel convolution of length n = data.cols().
SignalData circular_filter(const FilterBank& bank, const SignalData& data) {
  const std::size_t n = static_cast<std::size_t>(data.cols());
  const std::size_t n_c = bank.n_channels;
  const std::size_t half = n / 2 + 1;

  std::vector<std::vector<cdouble>> inputs(n_c, std::vector<cdouble>(half));
  std::vector<double> row(n);
  for (std::size_t c = 0; c < n_c; ++c) {
    for (std::size_t k = 0; k < n; ++k) row[k] = data(c, k);
    fft::forward_real(row, inputs[c]);
  }

  auto response = [&](const Eigen::VectorXd& taps) {
    const Eigen::VectorXd embedded = embed_filter(taps, n);
    std::vector<cdouble> h(half);
    fft::forward_real(std::span<const double>(embedded.data(), n), h);
    return h;
  };

  SignalData out(n_c, n);
  std::vector<cdouble> acc(half);
  for (std::size_t i = 0; i < n_c; ++i) {
    std::fill(acc.begin(), acc.end(), cdouble{});
    if (bank.method == Method::kTma) {
      const auto h = response(bank.taps[i]);
      for (std::size_t j = 0; j < half; ++j) acc[j] = h[j] * inputs[i][j];
    } else {
      for (std::size_t k = 0; k < n_c; ++k) {
        const auto h = response(bank.tap(i, k));
        for (std::size_t j = 0; j < half; ++j) acc[j] += h[j] * inputs[k][j];
      }
    }
    fft::backward_real(acc, row);
    for (std::size_t k = 0; k < n; ++k) out(i, k) = row[k] / static_cast<double>(n);
  }
  return out;
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kStma: return "stma";
    case Method::kTma: return "tma";
    case Method::kSma: return "sma";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "stma") return Method::kStma;
  if (name == "tma") return Method::kTma;
  if (name == "sma") return Method::kSma;
  throw Error(ErrorCode::kInvalidArgument, "unknown method '" + std::string(name) + "'");
}

void AlignmentModel::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kSchemaError, msg); };
  if (barycenter.index() != expected_index(method)) {
    fail(std::string("barycenter is a ") + stats_kind(barycenter) + ", method is " +
         std::string(method_name(method)));
  }
  if (n_channels == 0 || f == 0) fail("n_channels and f must be positive");
  if (!std::isfinite(eps) || eps < 0.0 || eps >= 1.0) fail("eps must lie in [0, 1)");
  if (window.length == 0 || window.hop == 0 || window.hop > window.length) {
    fail("window needs 1 <= hop <= length");
  }
  if (method != Method::kSma && window.length != f) fail("window length must equal f");

  if (const auto* cs = std::get_if<CrossSpectrum>(&barycenter)) {
    if (cs->f() != f || cs->n_channels() != n_channels) fail("cross-spectrum shape");
    try {
      validate_cross_spectrum(*cs);
    } catch (const Error& e) {
      fail(e.what());
    }
    for (const auto& bin : cs->bins) {
      const auto eig = herm_eig(bin);
      if (eig.values[0] < -kClipTolerance * eig.values.cwiseAbs().maxCoeff()) {
        fail("cross-spectrum bin is not positive semi-definite");
      }
    }
  } else if (const auto* psd = std::get_if<ChannelPsd>(&barycenter)) {
    if (psd->f() != f || psd->n_channels() != n_channels) fail("channel PSD shape");
    if (!psd->values.allFinite() || (psd->values.array() < 0.0).any()) {
      fail("channel PSD must be finite and nonnegative");
    }
    for (std::size_t c = 0; c < n_channels; ++c) {
      for (std::size_t j = 0; j < f; ++j) {
        const double a = psd->values(c, j);
        const double b = psd->values(c, mirror(j, f));
        if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) fail("channel PSD not symmetric");
      }
    }
  } else {
    const auto& cov = std::get<SpatialCov>(barycenter);
    if (f != 1) fail("sma models have f = 1");
    if (cov.n_channels() != n_channels || cov.entries.cols() != cov.entries.rows()) {
      fail("spatial covariance shape");
    }
    if (!is_hermitian(cov.entries)) fail("spatial covariance is not symmetric");
    const auto eig = herm_eig(cov.entries);
    if (eig.values[0] < -kClipTolerance * eig.values.cwiseAbs().maxCoeff()) {
      fail("spatial covariance is not positive semi-definite");
    }
  }
}

const Eigen::VectorXd& FilterBank::tap(std::size_t out_channel, std::size_t in_channel) const {
  if (method == Method::kTma) {
    if (out_channel != in_channel) {
      throw Error(ErrorCode::kInvalidArgument, "tma banks only have diagonal filters");
    }
    return taps.at(out_channel);
  }
  return taps.at(out_channel * n_channels + in_channel);
}

DomainStats estimate_stats(Method method, const Signal& sig, const WindowSpec& win, double eps) {
  const Signal centered = center_channels(sig);
  switch (method) {
    case Method::kStma: return welch_cross_psd(centered, win, eps);
    case Method::kTma: return welch_psd(centered, win);
    case Method::kSma: return spatial_cov(centered, eps);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method");
}

DomainStats barycenter_of(Method method, std::span<const DomainStats> stats,
                          const BarycenterConfig& cfg) {
  if (stats.empty()) throw Error(ErrorCode::kEmptyInput, "no domains");
  for (const auto& s : stats) {
    if (s.index() != expected_index(method)) {
      throw Error(ErrorCode::kShapeMismatch, "statistics do not match the method");
    }
  }
  switch (method) {
    case Method::kStma: {
      std::vector<CrossSpectrum> specs;
      for (const auto& s : stats) specs.push_back(std::get<CrossSpectrum>(s));
      return crossspectrum_barycenter(specs, cfg);
    }
    case Method::kTma: {
      std::vector<ChannelPsd> psds;
      for (const auto& s : stats) psds.push_back(std::get<ChannelPsd>(s));
      return temporal_barycenter(psds);
    }
    case Method::kSma: {
      std::vector<SpatialCov> covs;
      for (const auto& s : stats) covs.push_back(std::get<SpatialCov>(s));
      return spatial_barycenter(covs, cfg);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method");
}

AlignmentModel fit(Method method, std::span<const Signal> signals, const WindowSpec& win,
                   double eps, const BarycenterConfig& cfg) {
  if (signals.empty()) throw Error(ErrorCode::kEmptyInput, "fit needs at least one domain");
  const std::size_t n_c = signals.front().n_channels();
  for (const auto& s : signals) {
    if (s.n_channels() != n_c) {
      throw Error(ErrorCode::kInconsistentChannels,
                  std::to_string(s.n_channels()) + " vs " + std::to_string(n_c) + " channels");
    }
  }
  AlignmentModel model;
  model.method = method;
  model.n_channels = n_c;
  model.eps = eps;
  if (method == Method::kSma) {
    model.f = 1;
    model.window = WindowSpec{WindowKind::kRectangular, 1, 1};
  } else {
    win.validate();
    model.f = win.length;
    model.window = win;
  }
  std::vector<DomainStats> stats;
  stats.reserve(signals.size());
  for (const auto& s : signals) stats.push_back(estimate_stats(method, s, model.window, eps));
  model.barycenter = barycenter_of(method, stats, cfg);
  return model;
}

FilterBank stma_filters(const CrossSpectrum& domain, const CrossSpectrum& barycenter,
                        const FilterOptions& opts) {
  if (domain.n_channels() != barycenter.n_channels()) {
    throw Error(ErrorCode::kChannelMismatch, "domain and barycenter channel counts differ");
  }
  if (domain.f() != barycenter.f() || domain.f() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "domain and barycenter bin counts differ");
  }
  const std::size_t f = domain.f();
  const std::size_t n_c = domain.n_channels();

  const bool silent = std::all_of(domain.bins.begin(), domain.bins.end(),
                                  [](const ComplexMatrix& b) { return b.trace().real() <= 0.0; });
  if (silent) throw Error(ErrorCode::kSingularDomainSpectrum, "domain has no power at any bin");

  std::vector<ComplexMatrix> maps(f);
  for (std::size_t j = 0; j <= f / 2 && j < f; ++j) {
    ComplexMatrix m = per_bin_map(domain.bins[j], barycenter.bins[j], opts.max_gain, j);
    if (mirror(j, f) == j) m = ComplexMatrix(m.real().cast<cdouble>());
    maps[j] = m;
    maps[mirror(j, f)] = m.conjugate();
  }

  FilterBank bank{Method::kStma, f, n_c, {}, {}};
  bank.taps.reserve(n_c * n_c);
  std::vector<cdouble> series(f);
  for (std::size_t i = 0; i < n_c; ++i) {
    for (std::size_t k = 0; k < n_c; ++k) {
      for (std::size_t j = 0; j < f; ++j) series[j] = maps[j](i, k);
      bank.taps.push_back(real_inverse_dft(series));
    }
  }
  return bank;
}

FilterBank tma_filters(const ChannelPsd& domain, const ChannelPsd& barycenter,
                       const FilterOptions& opts) {
  if (domain.n_channels() != barycenter.n_channels()) {
    throw Error(ErrorCode::kChannelMismatch, "domain and barycenter channel counts differ");
  }
  if (domain.f() != barycenter.f() || domain.f() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "domain and barycenter bin counts differ");
  }
  const std::size_t f = domain.f();
  const std::size_t n_c = domain.n_channels();
  FilterBank bank{Method::kTma, f, n_c, {}, {}};
  std::vector<cdouble> ratio(f);
  for (std::size_t c = 0; c < n_c; ++c) {
    if ((domain.values.row(c).array() <= kPsdFloor).all()) {
      throw Error(ErrorCode::kSingularDomainSpectrum,
                  "channel " + std::to_string(c) + " has no power");
    }
    for (std::size_t j = 0; j < f; ++j) {
      const double d = std::max(domain.values(c, j), kPsdFloor);
      ratio[j] = std::min(std::sqrt(barycenter.values(c, j)) / std::sqrt(d), opts.max_gain);
    }
    bank.taps.push_back(real_inverse_dft(ratio));
  }
  return bank;
}

FilterBank sma_filters(const SpatialCov& domain, const SpatialCov& barycenter) {
  if (domain.n_channels() != barycenter.n_channels()) {
    throw Error(ErrorCode::kChannelMismatch, "domain and barycenter channel counts differ");
  }
  FilterBank bank{Method::kSma, 1, domain.n_channels(), {}, {}};
  try {
    bank.spatial = monge_map<double>(domain.entries, barycenter.entries, 0.0);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSingularSource) {
      throw Error(ErrorCode::kSingularDomainSpectrum, "domain spatial covariance is singular");
    }
    throw;
  }
  return bank;
}

FilterBank filters_from_stats(const DomainStats& domain, const DomainStats& barycenter,
                              const FilterOptions& opts) {
  if (domain.index() != barycenter.index()) {
    throw Error(ErrorCode::kShapeMismatch, "domain statistics do not match the barycenter kind");
  }
  if (const auto* cs = std::get_if<CrossSpectrum>(&domain)) {
    return stma_filters(*cs, std::get<CrossSpectrum>(barycenter), opts);
  }
  if (const auto* psd = std::get_if<ChannelPsd>(&domain)) {
    return tma_filters(*psd, std::get<ChannelPsd>(barycenter), opts);
  }
  return sma_filters(std::get<SpatialCov>(domain), std::get<SpatialCov>(barycenter));
}

FilterBank build_filters(const AlignmentModel& model, const Signal& sig,
                         const FilterOptions& opts) {
  if (sig.n_channels() != model.n_channels) {
    throw Error(ErrorCode::kChannelMismatch, "signal has " + std::to_string(sig.n_channels()) +
                                                 " channels, model expects " +
                                                 std::to_string(model.n_channels));
  }
  const DomainStats stats = estimate_stats(model.method, sig, model.window, model.eps);
  return filters_from_stats(stats, model.barycenter, opts);
}

std::ptrdiff_t filter_lag(std::size_t t, std::size_t f) {
  return t <= f / 2 ? static_cast<std::ptrdiff_t>(t)
                    : static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(f);
}

Eigen::VectorXd embed_filter(const Eigen::VectorXd& taps, std::size_t n) {
  const auto f = static_cast<std::size_t>(taps.size());
  if (f > n) {
    throw Error(ErrorCode::kFilterLongerThanSignal,
                "filter of length " + std::to_string(f) + " on " + std::to_string(n) + " samples");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::size_t t = 0; t < f; ++t) {
    const std::ptrdiff_t lag = filter_lag(t, f);
    out[(lag % sn + sn) % sn] = taps[t];
  }
  return out;
}

Signal apply(const FilterBank& bank, const Signal& sig, const ApplyOptions& opts) {
  if (sig.n_channels() != bank.n_channels) {
    throw Error(ErrorCode::kChannelMismatch, "signal has " + std::to_string(sig.n_channels()) +
                                                 " channels, filter bank expects " +
                                                 std::to_string(bank.n_channels));
  }
  if (bank.method == Method::kSma) {
    return Signal(bank.spatial * sig.data(), sig.sample_rate_hz());
  }
  const std::size_t n = sig.n_samples();
  if (bank.f > n) {
    throw Error(ErrorCode::kFilterLongerThanSignal,
                "filter of length " + std::to_string(bank.f) + " on " + std::to_string(n) +
                    " samples");
  }
  if (opts.boundary == Boundary::kCircular) {
    return Signal(circular_filter(bank, sig.data()), sig.sample_rate_hz());
  }

  const std::size_t pad = bank.f / 2;
  SignalData padded(sig.n_channels(), n + 2 * pad);
  for (std::size_t k = 0; k < n + 2 * pad; ++k) {
    const std::size_t src =
        reflect_index(static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(pad), n);
    padded.col(k) = sig.data().col(src);
  }
  const SignalData filtered = circular_filter(bank, padded);
  return Signal(filtered.middleCols(pad, n), sig.sample_rate_hz());
}

Signal transform(const AlignmentModel& model, const Signal& sig,
                 const FilterOptions& filter_opts, const ApplyOptions& apply_opts) {
  const Signal centered = center_channels(sig);
  const FilterBank bank = build_filters(model, centered, filter_opts);
  return apply(bank, centered, apply_opts);
}

std::vector<ComplexMatrix> frequency_response(const FilterBank& bank, std::size_t n) {
  const std::size_t n_c = bank.n_channels;
  std::vector<ComplexMatrix> out(n, ComplexMatrix::Zero(n_c, n_c));
  if (bank.method == Method::kSma) {
    for (auto& m : out) m = bank.spatial.cast<cdouble>();
    return out;
  }
  std::vector<cdouble> time(n), freq(n);
  auto fill = [&](std::size_t i, std::size_t k, const Eigen::VectorXd& taps) {
    const Eigen::VectorXd embedded = embed_filter(taps, n);
    for (std::size_t t = 0; t < n; ++t) time[t] = embedded[t];
    fft::forward(time, freq);
    for (std::size_t j = 0; j < n; ++j) out[j](i, k) = freq[j];
  };
  for (std::size_t i = 0; i < n_c; ++i) {
    if (bank.method == Method::kTma) {
      fill(i, i, bank.taps[i]);
    } else {
      for (std::size_t k = 0; k < n_c; ++k) fill(i, k, bank.tap(i, k));
    }
  }
  return out;
}

CrossSpectrum mapped_spectrum(const FilterBank& bank, const CrossSpectrum& input) {
  if (input.n_channels() != bank.n_channels) {
    throw Error(ErrorCode::kChannelMismatch, "spectrum and filter bank channel counts differ");
  }
  const auto response = frequency_response(bank, input.f());
  CrossSpectrum out;
  out.bins.reserve(input.f());
  for (std::size_t j = 0; j < input.f(); ++j) {
    out.bins.push_back(response[j] * input.bins[j] * response[j].adjoint());
  }
  return enforce_hermitian_symmetry(out);
}

double stats_distance(const DomainStats& a, const DomainStats& b) {
  if (a.index() != b.index()) throw Error(ErrorCode::kShapeMismatch, "statistics kinds differ");
  if (const auto* ca = std::get_if<CrossSpectrum>(&a)) {
    const auto& cb = std::get<CrossSpectrum>(b);
    if (ca->f() != cb.f() || ca->n_channels() != cb.n_channels()) {
      throw Error(ErrorCode::kShapeMismatch, "cross-spectra differ in shape");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < ca->f(); ++j) {
      total += bures_wasserstein_dist<cdouble>(ca->bins[j], cb.bins[j]);
    }
    return total;
  }
  if (const auto* pa = std::get_if<ChannelPsd>(&a)) {
    const auto& pb = std::get<ChannelPsd>(b);
    if (pa->values.rows() != pb.values.rows() || pa->values.cols() != pb.values.cols()) {
      throw Error(ErrorCode::kShapeMismatch, "PSDs differ in shape");
    }
    // Diagonal covariances: W2 is the l2 distance between elementwise roots.
    const Eigen::ArrayXXd diff = pa->values.array().sqrt() - pb.values.array().sqrt();
    return diff.square().colwise().sum().sqrt().sum();
  }
  return bures_wasserstein_dist<double>(std::get<SpatialCov>(a).entries,
                                        std::get<SpatialCov>(b).entries);
}

}  // namespace mongealign
