#pragma once

// Optimal transport between centered Gaussians: Monge maps and
// Bures-Wasserstein barycenters, plus their per-frequency and per-channel
// structured forms.

#include <cstddef>
#include <span>
#include <vector>

#include "mongealign/herm.hpp"
#include "mongealign/spectral.hpp"

namespace mongealign {

struct BarycenterConfig {
  /// Fixed-point iterations after the Euclidean-mean initialization.
  std::size_t n_iterations = 1;
  /// Relative Frobenius change below which iteration stops early.
  double tolerance = 1e-10;
};

/// A = S^{-1/2} (S^{1/2} T S^{1/2})^{1/2} S^{-1/2} with S = shrink(sigma_s, eps).
/// Throws SingularSource, DimensionMismatch.
template <typename Scalar>
Matrix<Scalar> monge_map(const Matrix<Scalar>& sigma_s, const Matrix<Scalar>& sigma_t,
                         double eps);

/// One application of Psi(A) = mean_k (A^{1/2} S_k A^{1/2})^{1/2}.
template <typename Scalar>
Matrix<Scalar> barycenter_step(const Matrix<Scalar>& current,
                               std::span<const Matrix<Scalar>> sigmas);

/// Euclidean mean followed by cfg.n_iterations fixed-point steps. When every
/// input is bitwise identical that input is returned unchanged.
/// Throws EmptyInput, DimensionMismatch, SingularMatrix (input not PSD).
template <typename Scalar>
Matrix<Scalar> barycenter_fixed_point(std::span<const Matrix<Scalar>> sigmas,
                                      const BarycenterConfig& cfg = {});

/// Independent fixed point per frequency bin. Throws ShapeMismatch.
CrossSpectrum crossspectrum_barycenter(std::span<const CrossSpectrum> specs,
                                       const BarycenterConfig& cfg = {});

/// Closed form ((1/n_d) sum_k q_k^{1/2})^2, elementwise. Throws ShapeMismatch.
ChannelPsd temporal_barycenter(std::span<const ChannelPsd> psds);

SpatialCov spatial_barycenter(std::span<const SpatialCov> covs,
                              const BarycenterConfig& cfg = {});

}  // namespace mongealign
