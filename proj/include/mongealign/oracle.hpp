#pragma once

// Dense reference implementations of the full-covariance path. Everything
// here builds (n_c n) x (n_c n) matrices and is meant for tests at small
// sizes only.
//
// Signals are vectorized channel after channel: vec(X)[c n + l] = X(c, l).

#include <cstdint>
#include <utility>
#include <vector>

#include "mongealign/spectral.hpp"

namespace mongealign::oracle {

/// Covariance whose (c, c') block is F^H diag(q_cc') F, q_cc'[j] = spec.bins[j](c, c').
/// Throws NonRealResult when the result has an imaginary residue above 1e-8.
RealMatrix dense_cov(const CrossSpectrum& spec);

/// True when first-row offset d (column minus row, mod n) is inside the
/// band {0 .. ceil(f/2) - 1} u {n - floor(f/2) .. n - 1}.
bool in_band(std::size_t d, std::size_t n, std::size_t f);

/// Frobenius projection of an n x n block onto band-limited circulants:
/// average each wrapped diagonal, then drop offsets outside the band.
RealMatrix project_band_limited(const RealMatrix& block, std::size_t f);

/// Monge map between dense covariances followed by blockwise projection.
/// Throws NotDivisible, DimensionMismatch and the herm errors.
RealMatrix dense_f_monge(const RealMatrix& sigma_s, const RealMatrix& sigma_t,
                         std::size_t n_channels, std::size_t f);

/// vec^-1(A vec(X)). Throws DimensionMismatch.
Signal dense_apply(const RealMatrix& a, const Signal& sig);

struct Prop1Result {
  Eigen::VectorXcd dense;     // A x with A = F diag(q) F^H
  Eigen::VectorXcd filtered;  // h * x with h = f^{-1/2} F_f^H g_f(q)
};

/// Evaluates both sides of the band-limited filtering identity. The filter
/// acts as y[l] = sum_t h[t] x[(l + s(t)) mod n] with s(t) = t for
/// t < ceil(f/2) and t - f otherwise. Throws NotBandLimited when the first
/// row of A leaves the band, NotDivisible.
Prop1Result prop1_check(const Eigen::VectorXcd& q, const Eigen::VectorXcd& x, std::size_t f);

/// Random PSD cross-spectrum of length n with exact conjugate-bin symmetry
/// and smallest eigenvalue at least `floor` in every bin.
CrossSpectrum random_spectrum(std::size_t n_channels, std::size_t n, std::uint64_t seed,
                              double floor = 0.1);

/// Spectrum of a random symmetric positive definite block filter whose taps
/// live on lags |d| <= ceil(f/2) - 1, so that its block-circulant matrix is
/// band-limited at f.
CrossSpectrum random_band_limited_map(std::size_t n_channels, std::size_t n, std::size_t f,
                                      std::uint64_t seed);

/// bins[j] = b[j] q[j] b[j].
CrossSpectrum congruence(const CrossSpectrum& b, const CrossSpectrum& q);

}  // namespace mongealign::oracle
