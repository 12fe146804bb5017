#pragma once

// Thin, thread-safe wrapper over FFTW. All transforms are unnormalized:
//   forward:  X[k] = sum_n x[n] exp(-2 i pi k n / N)
//   backward: x[n] = sum_k X[k] exp(+2 i pi k n / N)
// Callers apply 1/N or 1/sqrt(N) themselves.

#include <complex>
#include <cstddef>
#include <span>

namespace mongealign::fft {

using cdouble = std::complex<double>;

/// Real input of length n, writes the n/2 + 1 non-redundant bins.
void forward_real(std::span<const double> in, std::span<cdouble> half_out);

/// Half spectrum (n/2 + 1 bins of a conjugate-symmetric sequence) to the
/// real sequence of length out.size(). Imaginary parts of the self-conjugate
/// bins are ignored.
void backward_real(std::span<const cdouble> half_in, std::span<double> out);

void forward(std::span<const cdouble> in, std::span<cdouble> out);
void backward(std::span<const cdouble> in, std::span<cdouble> out);

/// Row-major rows x cols complex 2-D transforms.
void forward_2d(std::size_t rows, std::size_t cols, std::span<const cdouble> in,
                std::span<cdouble> out);
void backward_2d(std::size_t rows, std::size_t cols, std::span<const cdouble> in,
                 std::span<cdouble> out);

}  // namespace mongealign::fft
