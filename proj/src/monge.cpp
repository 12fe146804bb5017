#include "mongealign/monge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mongealign/error.hpp"

namespace mongealign {

namespace {

template <typename Scalar>
bool all_identical(std::span<const Matrix<Scalar>> sigmas) {
  const auto& first = sigmas.front();
  return std::all_of(sigmas.begin(), sigmas.end(), [&](const Matrix<Scalar>& m) {
    return m.rows() == first.rows() && m.cols() == first.cols() &&
           std::equal(m.data(), m.data() + m.size(), first.data());
  });
}

}  // namespace

template <typename Scalar>
Matrix<Scalar> monge_map(const Matrix<Scalar>& sigma_s, const Matrix<Scalar>& sigma_t,
                         double eps) {
  if (sigma_s.rows() != sigma_t.rows() || sigma_s.cols() != sigma_t.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, std::to_string(sigma_s.rows()) + " vs " +
                                                   std::to_string(sigma_t.rows()));
  }
  const auto eig = herm_eig(shrink(sigma_s, eps));
  if (!(eig.values[0] > 0.0)) {
    throw Error(ErrorCode::kSingularSource,
                "source lambda_min = " + std::to_string(eig.values[0]));
  }
  const Matrix<Scalar> s_half = apply_spectral(eig, [](double l) { return std::sqrt(l); });
  const Matrix<Scalar> s_inv_half =
      apply_spectral(eig, [](double l) { return 1.0 / std::sqrt(l); });
  const Matrix<Scalar> middle = herm_sqrt(hermitian_part<Scalar>(s_half * sigma_t * s_half));
  return hermitian_part<Scalar>(s_inv_half * middle * s_inv_half);
}

template <typename Scalar>
Matrix<Scalar> barycenter_step(const Matrix<Scalar>& current,
                               std::span<const Matrix<Scalar>> sigmas) {
  const Matrix<Scalar> root = herm_sqrt(current);
  Matrix<Scalar> next = Matrix<Scalar>::Zero(current.rows(), current.cols());
  for (const auto& s : sigmas) next += herm_sqrt(hermitian_part<Scalar>(root * s * root));
  return hermitian_part<Scalar>(next / static_cast<double>(sigmas.size()));
}

template <typename Scalar>
Matrix<Scalar> barycenter_fixed_point(std::span<const Matrix<Scalar>> sigmas,
                                      const BarycenterConfig& cfg) {
  if (sigmas.empty()) throw Error(ErrorCode::kEmptyInput, "no covariances to average");
  const Eigen::Index dim = sigmas.front().rows();
  for (const auto& s : sigmas) {
    if (s.rows() != dim || s.cols() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "barycenter inputs differ in size");
    }
    const auto eig = herm_eig(s);
    const double scale = eig.values.cwiseAbs().maxCoeff();
    if (eig.values[0] < -kClipTolerance * scale) {
      throw Error(ErrorCode::kSingularMatrix,
                  "input is not positive semi-definite, lambda_min = " +
                      std::to_string(eig.values[0]));
    }
  }
  if (all_identical(sigmas)) return sigmas.front();

  Matrix<Scalar> current = Matrix<Scalar>::Zero(dim, dim);
  for (const auto& s : sigmas) current += s;
  current = hermitian_part<Scalar>(current / static_cast<double>(sigmas.size()));

  for (std::size_t it = 0; it < cfg.n_iterations; ++it) {
    Matrix<Scalar> next = barycenter_step(current, sigmas);
    const double denom = current.norm();
    const double change = denom > 0.0 ? (next - current).norm() / denom : 0.0;
    current = std::move(next);
    if (cfg.n_iterations > 1 && change < cfg.tolerance) break;
  }
  return current;
}

template Matrix<double> monge_map<double>(const Matrix<double>&, const Matrix<double>&, double);
template Matrix<cdouble> monge_map<cdouble>(const Matrix<cdouble>&, const Matrix<cdouble>&,
                                            double);
template Matrix<double> barycenter_step<double>(const Matrix<double>&,
                                                std::span<const Matrix<double>>);
template Matrix<cdouble> barycenter_step<cdouble>(const Matrix<cdouble>&,
                                                  std::span<const Matrix<cdouble>>);
template Matrix<double> barycenter_fixed_point<double>(std::span<const Matrix<double>>,
                                                       const BarycenterConfig&);
template Matrix<cdouble> barycenter_fixed_point<cdouble>(std::span<const Matrix<cdouble>>,
                                                         const BarycenterConfig&);

CrossSpectrum crossspectrum_barycenter(std::span<const CrossSpectrum> specs,
                                       const BarycenterConfig& cfg) {
  if (specs.empty()) throw Error(ErrorCode::kEmptyInput, "no cross-spectra to average");
  const std::size_t f = specs.front().f();
  const std::size_t n_c = specs.front().n_channels();
  for (const auto& s : specs) {
    if (s.f() != f || s.n_channels() != n_c) {
      throw Error(ErrorCode::kShapeMismatch, "cross-spectra differ in (f, n_channels)");
    }
  }
  CrossSpectrum out;
  out.bins.resize(f);
  std::vector<ComplexMatrix> column(specs.size());
  for (std::size_t j = 0; j <= f / 2 && j < f; ++j) {
    for (std::size_t k = 0; k < specs.size(); ++k) column[k] = specs[k].bins[j];
    out.bins[j] = barycenter_fixed_point<cdouble>(column, cfg);
  }
  for (std::size_t j = f / 2 + 1; j < f; ++j) out.bins[j] = out.bins[f - j].conjugate();
  return enforce_hermitian_symmetry(out);
}

ChannelPsd temporal_barycenter(std::span<const ChannelPsd> psds) {
  if (psds.empty()) throw Error(ErrorCode::kEmptyInput, "no PSDs to average");
  const bool identical = std::all_of(psds.begin(), psds.end(), [&](const ChannelPsd& p) {
    return p.values.rows() == psds.front().values.rows() &&
           p.values.cols() == psds.front().values.cols() && p.values == psds.front().values;
  });
  if (identical) return psds.front();
  const auto rows = psds.front().values.rows();
  const auto cols = psds.front().values.cols();
  Eigen::ArrayXXd root_mean = Eigen::ArrayXXd::Zero(rows, cols);
  for (const auto& p : psds) {
    if (p.values.rows() != rows || p.values.cols() != cols) {
      throw Error(ErrorCode::kShapeMismatch, "PSDs differ in shape");
    }
    if ((p.values.array() < 0.0).any()) {
      throw Error(ErrorCode::kInvalidArgument, "PSD values must be nonnegative");
    }
    root_mean += p.values.array().sqrt();
  }
  root_mean /= static_cast<double>(psds.size());
  return ChannelPsd{root_mean.square().matrix()};
}

SpatialCov spatial_barycenter(std::span<const SpatialCov> covs, const BarycenterConfig& cfg) {
  std::vector<RealMatrix> mats;
  mats.reserve(covs.size());
  for (const auto& c : covs) mats.push_back(c.entries);
  return SpatialCov{barycenter_fixed_point<double>(mats, cfg)};
}

}  // namespace mongealign
