#include "mongealign/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mongealign/error.hpp"
#include "mongealign/fft.hpp"

namespace mongealign {

double NormalStream::next() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  constexpr double kScale = 0x1.0p-53;
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * kScale;
  const double u2 = static_cast<double>(engine_() >> 11) * kScale;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

Signal gen_stationary(const CrossSpectrum& spec, std::uint64_t seed,
                      std::optional<double> sample_rate_hz) {
  validate_cross_spectrum(spec);
  const std::size_t n = spec.f();
  const std::size_t n_c = spec.n_channels();
  const std::size_t half = n / 2 + 1;

  std::vector<ComplexMatrix> roots(half);
  for (std::size_t j = 0; j < half; ++j) {
    try {
      roots[j] = herm_sqrt(spec.bins[j]);
    } catch (const Error&) {
      throw Error(ErrorCode::kInvalidSpectrum,
                  "bin " + std::to_string(j) + " is not positive semi-definite");
    }
  }

  NormalStream normals(seed);
  std::vector<std::vector<cdouble>> coeffs(n_c, std::vector<cdouble>(half));
  Eigen::VectorXcd xi(n_c);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < half; ++j) {
    const bool real_bin = (j == 0) || (2 * j == n);
    for (std::size_t c = 0; c < n_c; ++c) {
      if (real_bin) {
        xi[c] = normals.next();
      } else {
        const double re = normals.next();
        const double im = normals.next();
        xi[c] = cdouble(re, im) * inv_sqrt2;
      }
    }
    Eigen::VectorXcd z = roots[j] * xi;
    if (real_bin) z = z.real().cast<cdouble>();
    for (std::size_t c = 0; c < n_c; ++c) coeffs[c][j] = z[c];
  }

  SignalData data(n_c, n);
  std::vector<double> row(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t c = 0; c < n_c; ++c) {
    fft::backward_real(coeffs[c], row);
    for (std::size_t k = 0; k < n; ++k) data(c, k) = row[k] * scale;
  }
  return Signal(std::move(data), sample_rate_hz);
}

Eigen::VectorXd expcorr_psd(double gamma, double rho, std::size_t n) {
  if (!(gamma > 0.0) || !(rho >= 0.0 && rho < 1.0) || n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "expcorr needs gamma > 0, 0 <= rho < 1, n >= 1");
  }
  std::vector<double> r(n);
  for (std::size_t m = 0; m < n; ++m) {
    r[m] = gamma * std::pow(rho, static_cast<double>(std::min(m, n - m)));
  }
  std::vector<cdouble> half(n / 2 + 1);
  fft::forward_real(r, half);
  Eigen::VectorXd psd(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = j <= n / 2 ? j : n - j;
    psd[j] = std::max(half[k].real(), 0.0);
  }
  return psd;
}

CrossSpectrum expcorr_spec(double gamma, double rho, std::size_t n_channels, std::size_t n) {
  if (n_channels == 0) throw Error(ErrorCode::kInvalidArgument, "n_channels must be >= 1");
  const Eigen::VectorXd psd = expcorr_psd(gamma, rho, n);
  CrossSpectrum out;
  out.bins.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.bins.push_back(ComplexMatrix::Identity(n_channels, n_channels) * psd[j]);
  }
  return out;
}

CrossSpectrum mixture_spec(double gamma, double rho, std::size_t n_channels, std::size_t n) {
  if (n_channels == 0 || n == 0) throw Error(ErrorCode::kInvalidArgument, "empty mixture spectrum");
  RealMatrix mix = RealMatrix::Constant(n_channels, n_channels, 0.3);
  mix.diagonal().setOnes();
  std::vector<Eigen::VectorXd> psd;
  for (std::size_t c = 0; c < n_channels; ++c) {
    psd.push_back(expcorr_psd(gamma, rho * static_cast<double>(c + 1) / static_cast<double>(n_channels), n));
  }
  CrossSpectrum spec;
  spec.bins.reserve(n);
  Eigen::VectorXd d(n_channels);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < n_channels; ++c) d[c] = psd[c][j];
    spec.bins.push_back((mix * d.asDiagonal() * mix.transpose()).cast<cdouble>());
  }
  return spec;
}

std::vector<Image> gen_texture_images(std::size_t n_images, std::size_t rows, std::size_t cols,
                                      std::uint64_t seed) {
  NormalStream normals(seed);
  std::vector<Image> out(n_images, Image(rows, cols));
  for (auto& img : out) {
    for (Eigen::Index k = 0; k < img.size(); ++k) img.data()[k] = normals.next();
  }
  return out;
}

std::vector<PixelOffset> line_kernel(double angle_deg, int kernel_len) {
  if (kernel_len < 1 || kernel_len % 2 == 0) {
    throw Error(ErrorCode::kBadKernel,
                "kernel length must be odd and positive, got " + std::to_string(kernel_len));
  }
  const double a = angle_deg * std::numbers::pi / 180.0;
  const int half = (kernel_len - 1) / 2;
  std::vector<PixelOffset> out;
  out.reserve(static_cast<std::size_t>(kernel_len));
  for (int t = -half; t <= half; ++t) {
    out.push_back({static_cast<int>(std::lround(t * std::cos(a))),
                   static_cast<int>(std::lround(-t * std::sin(a)))});
  }
  return out;
}

std::vector<Image> gen_blur_domain(std::span<const Image> base_images, double angle_deg,
                                   int kernel_len) {
  const auto kernel = line_kernel(angle_deg, kernel_len);
  const double weight = 1.0 / static_cast<double>(kernel.size());
  std::vector<Image> out;
  out.reserve(base_images.size());
  for (const auto& img : base_images) {
    const auto rows = img.rows();
    const auto cols = img.cols();
    Image blurred = Image::Zero(rows, cols);
    for (const auto& o : kernel) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::Index si = ((i - o.dy) % rows + rows) % rows;
        for (Eigen::Index j = 0; j < cols; ++j) {
          const Eigen::Index sj = ((j - o.dx) % cols + cols) % cols;
          blurred(i, j) += weight * img(si, sj);
        }
      }
    }
    out.push_back(std::move(blurred));
  }
  return out;
}

}  // namespace mongealign
