#include "mongealign/image2d.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "mongealign/error.hpp"
#include "mongealign/fft.hpp"
#include "mongealign/spectral.hpp"

namespace mongealign {

namespace {

using cdouble = std::complex<double>;

std::vector<cdouble> to_complex(const Image& img) {
  std::vector<cdouble> out(static_cast<std::size_t>(img.size()));
  for (Eigen::Index k = 0; k < img.size(); ++k) out[k] = img.data()[k];
  return out;
}

void require_shape(const Image& img, std::size_t rows, std::size_t cols) {
  if (static_cast<std::size_t>(img.rows()) != rows || static_cast<std::size_t>(img.cols()) != cols) {
    throw Error(ErrorCode::kShapeMismatch, std::to_string(img.rows()) + "x" +
                                               std::to_string(img.cols()) + " vs " +
                                               std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Image point_symmetric(const Image& a) {
  const auto r = a.rows();
  const auto c = a.cols();
  Image out(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      out(i, j) = 0.5 * (a(i, j) + a((r - i) % r, (c - j) % c));
    }
  }
  return out;
}

}  // namespace

Image image_domain_psd(std::span<const Image> images) {
  if (images.empty()) throw Error(ErrorCode::kEmptyDomain, "domain has no images");
  const auto rows = static_cast<std::size_t>(images.front().rows());
  const auto cols = static_cast<std::size_t>(images.front().cols());
  if (rows == 0 || cols == 0) throw Error(ErrorCode::kShapeMismatch, "empty image");
  Image psd = Image::Zero(rows, cols);
  std::vector<cdouble> spec(rows * cols);
  for (const auto& img : images) {
    require_shape(img, rows, cols);
    fft::forward_2d(rows, cols, to_complex(img), spec);
    for (std::size_t k = 0; k < spec.size(); ++k) psd.data()[k] += std::norm(spec[k]);
  }
  psd /= static_cast<double>(images.size() * rows * cols);
  return point_symmetric(psd);
}

Tma2dModel tma2d_fit(const std::vector<std::vector<Image>>& domains) {
  if (domains.empty()) throw Error(ErrorCode::kEmptyDomain, "no domains");
  Tma2dModel model;
  Eigen::ArrayXXd root_mean;
  for (const auto& domain : domains) {
    const Image psd = image_domain_psd(domain);
    if (model.rows == 0) {
      model.rows = static_cast<std::size_t>(psd.rows());
      model.cols = static_cast<std::size_t>(psd.cols());
      root_mean = Eigen::ArrayXXd::Zero(psd.rows(), psd.cols());
    }
    require_shape(psd, model.rows, model.cols);
    root_mean += psd.array().sqrt();
  }
  root_mean /= static_cast<double>(domains.size());
  model.barycenter_psd = root_mean.square().matrix();
  return model;
}

Image tma2d_apply(const Tma2dModel& model, const Image& domain_psd, const Image& image,
                  double max_gain) {
  require_shape(domain_psd, model.rows, model.cols);
  require_shape(image, model.rows, model.cols);
  const std::size_t n = model.rows * model.cols;
  std::vector<cdouble> spec(n), out(n);
  fft::forward_2d(model.rows, model.cols, to_complex(image), spec);
  Image gain(model.rows, model.cols);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = std::max(domain_psd.data()[k], kPsdFloor);
    gain.data()[k] = std::min(std::sqrt(model.barycenter_psd.data()[k] / d), max_gain);
  }
  gain = point_symmetric(gain);
  for (std::size_t k = 0; k < n; ++k) spec[k] *= gain.data()[k];
  fft::backward_2d(model.rows, model.cols, spec, out);
  Image result(model.rows, model.cols);
  for (std::size_t k = 0; k < n; ++k) result.data()[k] = out[k].real() / static_cast<double>(n);
  return result;
}

std::vector<Image> tma2d_transform(const Tma2dModel& model, std::span<const Image> images,
                                   double max_gain) {
  const Image psd = image_domain_psd(images);
  std::vector<Image> out;
  out.reserve(images.size());
  for (const auto& img : images) out.push_back(tma2d_apply(model, psd, img, max_gain));
  return out;
}

Image correlation_2d(const Image& psd) {
  const auto rows = static_cast<std::size_t>(psd.rows());
  const auto cols = static_cast<std::size_t>(psd.cols());
  std::vector<cdouble> out(rows * cols);
  fft::backward_2d(rows, cols, to_complex(psd), out);
  Image corr(rows, cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows * cols));
  for (std::size_t k = 0; k < out.size(); ++k) corr.data()[k] = out[k].real() * scale;
  return corr;
}

}  // namespace mongealign
