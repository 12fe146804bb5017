#pragma once

// Dense kernels for small Hermitian / real symmetric positive semi-definite
// matrices. Every function is templated on the scalar type and explicitly
// instantiated for double and std::complex<double>.

#include <complex>

#include <Eigen/Dense>

namespace mongealign {

using cdouble = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<cdouble>;

/// Absolute tolerance of the Hermitian-symmetry check (scaled by the largest
/// entry when that exceeds one).
inline constexpr double kHermitianTolerance = 1e-12;

/// Eigenvalues in (-kClipTolerance * max|lambda|, 0] are treated as zero.
inline constexpr double kClipTolerance = 1e-10;

template <typename Scalar>
struct EigenDecomposition {
  Eigen::VectorXd values;   // ascending
  Matrix<Scalar> vectors;   // columns, unitary
};

template <typename Scalar>
bool is_hermitian(const Matrix<Scalar>& h, double tol = kHermitianTolerance);

/// (h + h^H) / 2.
template <typename Scalar>
Matrix<Scalar> hermitian_part(const Matrix<Scalar>& h);

/// (1 - eps) h + eps (tr(h) / dim) I.
template <typename Scalar>
Matrix<Scalar> shrink(const Matrix<Scalar>& h, double eps);

/// Eigendecomposition with a deterministic phase: in every eigenvector the
/// first component of largest modulus is made real and positive.
/// Throws NonHermitian.
template <typename Scalar>
EigenDecomposition<Scalar> herm_eig(const Matrix<Scalar>& h);

/// V diag(fn(lambda)) V^H.
template <typename Scalar, typename Fn>
Matrix<Scalar> apply_spectral(const EigenDecomposition<Scalar>& eig, Fn fn) {
  Eigen::VectorXd mapped(eig.values.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped[i] = fn(eig.values[i]);
  Matrix<Scalar> out = eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
  return hermitian_part(out);
}

/// Principal square root. Slightly negative eigenvalues are clipped to zero;
/// anything below -kClipTolerance * max|lambda| raises NegativeEigenvalue.
template <typename Scalar>
Matrix<Scalar> herm_sqrt(const Matrix<Scalar>& h);

/// Inverse square root of shrink(h, eps). Throws SingularMatrix when the
/// regularized matrix is not positive definite.
template <typename Scalar>
Matrix<Scalar> herm_invsqrt(const Matrix<Scalar>& h, double eps);

/// 2-Wasserstein distance between N(0, a) and N(0, b).
///
/// Evaluated as || a^{1/2} - b^{1/2} U ||_F where U is the unitary polar factor
/// of b^{1/2} a^{1/2}. This equals sqrt(tr(a + b - 2 (a^{1/2} b a^{1/2})^{1/2}))
/// but does not lose precision to cancellation when a and b are close.
template <typename Scalar>
double bures_wasserstein_dist(const Matrix<Scalar>& a, const Matrix<Scalar>& b);

}  // namespace mongealign
