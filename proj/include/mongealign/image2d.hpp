#pragma once

// Temporal Monge alignment for images treated as 2-D stationary signals:
// one PSD per domain (mean squared magnitude of the unitary 2-D DFT), the
// closed-form barycenter, and a 2-D circular ratio filter.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mongealign {

using Image = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Tma2dModel {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Image barycenter_psd;
};

/// Mean over images of |unitary fft2|^2, made exactly point-symmetric.
/// Throws EmptyDomain, ShapeMismatch.
Image image_domain_psd(std::span<const Image> images);

/// One PSD per domain, then ((1/n_d) sum_k sqrt(psd_k))^2 elementwise.
/// Throws EmptyDomain, ShapeMismatch.
Tma2dModel tma2d_fit(const std::vector<std::vector<Image>>& domains);

/// Circular 2-D filtering of one image by sqrt(barycenter / domain_psd),
/// gains capped at max_gain. Throws ShapeMismatch.
Image tma2d_apply(const Tma2dModel& model, const Image& domain_psd, const Image& image,
                  double max_gain = 1e6);

/// Estimates the domain PSD from `images` and aligns each of them.
std::vector<Image> tma2d_transform(const Tma2dModel& model, std::span<const Image> images,
                                   double max_gain = 1e6);

/// Circular autocorrelation image: inverse unitary 2-D DFT of a PSD, real part.
Image correlation_2d(const Image& psd);

}  // namespace mongealign
