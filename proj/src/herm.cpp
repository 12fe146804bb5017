#include "mongealign/herm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mongealign/error.hpp"

namespace mongealign {

namespace {

double max_abs_eigenvalue(const Eigen::VectorXd& values) {
  return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar unit_phase_conj(Scalar v) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return v < 0.0 ? -1.0 : 1.0;
  } else {
    return std::conj(v) / std::abs(v);
  }
}

}  // namespace

template <typename Scalar>
bool is_hermitian(const Matrix<Scalar>& h, double tol) {
  if (h.rows() != h.cols()) return false;
  if (!h.allFinite()) return false;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

template <typename Scalar>
Matrix<Scalar> hermitian_part(const Matrix<Scalar>& h) {
  return (h + h.adjoint()) * 0.5;
}

template <typename Scalar>
Matrix<Scalar> shrink(const Matrix<Scalar>& h, double eps) {
  if (eps == 0.0) return h;
  const Eigen::Index n = h.rows();
  const double mean_eig = std::real(h.trace()) / static_cast<double>(n);
  Matrix<Scalar> out = (1.0 - eps) * h;
  out.diagonal().array() += Scalar(eps * mean_eig);
  return out;
}

template <typename Scalar>
EigenDecomposition<Scalar> herm_eig(const Matrix<Scalar>& h) {
  if (h.rows() == 0 || !is_hermitian(h)) {
    throw Error(ErrorCode::kNonHermitian,
                "matrix of size " + std::to_string(h.rows()) + "x" +
                    std::to_string(h.cols()) + " is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonHermitian, "eigen solver did not converge");
  }
  EigenDecomposition<Scalar> out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < out.vectors.rows(); ++r) {
      const double m = std::abs(out.vectors(r, c));
      if (m > best) {
        best = m;
        arg = r;
      }
    }
    out.vectors.col(c) *= unit_phase_conj(out.vectors(arg, c));
    if constexpr (!std::is_same_v<Scalar, double>) {
      out.vectors(arg, c) = Scalar(std::abs(out.vectors(arg, c)), 0.0);
    }
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> herm_sqrt(const Matrix<Scalar>& h) {
  const auto eig = herm_eig(h);
  const double scale = max_abs_eigenvalue(eig.values);
  const double lambda_min = eig.values[0];
  if (lambda_min < -kClipTolerance * scale) {
    throw Error(ErrorCode::kNegativeEigenvalue,
                "lambda_min = " + std::to_string(lambda_min));
  }
  return apply_spectral(eig, [](double l) { return l > 0.0 ? std::sqrt(l) : 0.0; });
}

template <typename Scalar>
Matrix<Scalar> herm_invsqrt(const Matrix<Scalar>& h, double eps) {
  const auto eig = herm_eig(shrink(h, eps));
  const double lambda_min = eig.values[0];
  if (!(lambda_min > 0.0)) {
    throw Error(ErrorCode::kSingularMatrix,
                "lambda_min = " + std::to_string(lambda_min) + " after shrinkage");
  }
  return apply_spectral(eig, [](double l) { return 1.0 / std::sqrt(l); });
}

template <typename Scalar>
double bures_wasserstein_dist(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.rows()) + " vs " + std::to_string(b.rows()));
  }
  const Matrix<Scalar> sa = herm_sqrt(a);
  const Matrix<Scalar> sb = herm_sqrt(b);
  const Matrix<Scalar> cross = sb * sa;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix<Scalar> polar = svd.matrixU() * svd.matrixV().adjoint();
  return (sa - sb * polar).norm();
}

#define MONGEALIGN_INSTANTIATE(S)                                              \
  template bool is_hermitian<S>(const Matrix<S>&, double);                     \
  template Matrix<S> hermitian_part<S>(const Matrix<S>&);                      \
  template Matrix<S> shrink<S>(const Matrix<S>&, double);                      \
  template EigenDecomposition<S> herm_eig<S>(const Matrix<S>&);                \
  template Matrix<S> herm_sqrt<S>(const Matrix<S>&);                           \
  template Matrix<S> herm_invsqrt<S>(const Matrix<S>&, double);                \
  template double bures_wasserstein_dist<S>(const Matrix<S>&, const Matrix<S>&);

MONGEALIGN_INSTANTIATE(double)
MONGEALIGN_INSTANTIATE(cdouble)

#undef MONGEALIGN_INSTANTIATE

}  // namespace mongealign
