#pragma once

// Synthetic test assets: stationary Gaussian signals with a prescribed
// cross-spectrum, exponentially correlated spectra and directionally blurred
// texture images.
//
// Randomness: std::mt19937_64 seeded with the given seed; normals by
// Box-Muller on two consecutive 64-bit words
//   u1 = ((w1 >> 11) + 1) * 2^-53,  u2 = (w2 >> 11) * 2^-53
//   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2)
// returned in the order z0, z1. std::normal_distribution is avoided because
// its output differs between standard libraries.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mongealign/image2d.hpp"
#include "mongealign/spectral.hpp"

namespace mongealign {

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// One realization of length spec.f() with cross-spectrum `spec`.
/// Draw order: bins j = 0 .. n/2 ascending; within a bin, channel by channel;
/// bins 0 and n/2 (n even) take one real normal per channel, the others take
/// a real then an imaginary normal, each scaled by 1/sqrt(2). The coefficient
/// vector is Q_j^{1/2} xi_j and the signal its inverse unitary DFT.
/// Throws InvalidSpectrum (including non-PSD bins).
Signal gen_stationary(const CrossSpectrum& spec, std::uint64_t seed,
                      std::optional<double> sample_rate_hz = std::nullopt);

/// DFT of the circular correlation r[m] = gamma rho^min(m, n - m), clipped at 0.
Eigen::VectorXd expcorr_psd(double gamma, double rho, std::size_t n);

/// expcorr_psd times the n_c x n_c identity at every bin. Throws InvalidArgument.
CrossSpectrum expcorr_spec(double gamma, double rho, std::size_t n_channels, std::size_t n);

/// Channel c has an expcorr PSD with correlation rho (c + 1) / n_c; the
/// channels are then mixed by the matrix with ones on the diagonal and 0.3
/// elsewhere. Throws InvalidArgument.
CrossSpectrum mixture_spec(double gamma, double rho, std::size_t n_channels, std::size_t n);

/// n_images independent white Gaussian images.
std::vector<Image> gen_texture_images(std::size_t n_images, std::size_t rows, std::size_t cols,
                                      std::uint64_t seed);

struct PixelOffset {
  int dx;
  int dy;
};

/// Nearest-pixel rasterized line through the origin: for t = -(L-1)/2 ..
/// (L-1)/2, dx = round(t cos a), dy = round(-t sin a). Throws BadKernel
/// unless kernel_len is odd and >= 1.
std::vector<PixelOffset> line_kernel(double angle_deg, int kernel_len);

/// Circular convolution of every image with the uniform line kernel.
std::vector<Image> gen_blur_domain(std::span<const Image> base_images, double angle_deg,
                                   int kernel_len);

}  // namespace mongealign
