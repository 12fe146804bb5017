#include <optional>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mongealign/align.hpp"
#include "mongealign/error.hpp"
#include "mongealign/herm.hpp"
#include "mongealign/model_io.hpp"
#include "mongealign/monge.hpp"
#include "mongealign/spectral.hpp"
#include "mongealign/synth.hpp"

namespace py = pybind11;
namespace ma = mongealign;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

ma::WindowKind parse_window(const std::string& name) {
  if (name == "hann") return ma::WindowKind::kHann;
  if (name == "rect") return ma::WindowKind::kRectangular;
  throw ma::Error(ma::ErrorCode::kInvalidArgument, "window must be 'hann' or 'rect'");
}

ma::WindowSpec make_window(std::size_t f, std::optional<std::size_t> hop, const std::string& kind) {
  ma::WindowSpec w{parse_window(kind), f, hop.value_or(std::max<std::size_t>(1, f / 2))};
  w.validate();
  return w;
}

ma::Signal to_signal(const ma::SignalData& data, std::optional<double> fs = std::nullopt) {
  return ma::Signal(data, fs);
}

// (f, n_c, n_c) complex array <-> CrossSpectrum.
CArray spectrum_to_array(const ma::CrossSpectrum& cs) {
  const auto f = static_cast<py::ssize_t>(cs.f());
  const auto n_c = static_cast<py::ssize_t>(cs.n_channels());
  CArray out({f, n_c, n_c});
  auto v = out.mutable_unchecked<3>();
  for (py::ssize_t j = 0; j < f; ++j)
    for (py::ssize_t a = 0; a < n_c; ++a)
      for (py::ssize_t b = 0; b < n_c; ++b) v(j, a, b) = cs.bins[j](a, b);
  return out;
}

ma::CrossSpectrum array_to_spectrum(const CArray& arr) {
  if (arr.ndim() != 3 || arr.shape(1) != arr.shape(2)) {
    throw ma::Error(ma::ErrorCode::kInvalidSpectrum, "expected an (f, n_c, n_c) array");
  }
  auto v = arr.unchecked<3>();
  ma::CrossSpectrum cs;
  cs.bins.assign(static_cast<std::size_t>(arr.shape(0)),
                 ma::ComplexMatrix(arr.shape(1), arr.shape(2)));
  for (py::ssize_t j = 0; j < arr.shape(0); ++j)
    for (py::ssize_t a = 0; a < arr.shape(1); ++a)
      for (py::ssize_t b = 0; b < arr.shape(2); ++b) cs.bins[j](a, b) = v(j, a, b);
  return cs;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monge alignment of multichannel stationary signals";

  static py::exception<ma::Error> error_type(m, "MongeAlignError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ma::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(std::string(e.what()));
      exc.attr("code") = std::string(ma::error_name(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def(
      "read_signal",
      [](const std::filesystem::path& path) {
        const auto sig = ma::read_signal(path);
        return py::make_tuple(ma::SignalData(sig.data()), sig.sample_rate_hz());
      },
      py::arg("path"), "Returns (data, sample_rate_hz or None).");
  m.def(
      "write_signal",
      [](const std::filesystem::path& path, const ma::SignalData& data, std::optional<double> fs) {
        ma::write_signal(path, to_signal(data, fs));
      },
      py::arg("path"), py::arg("data"), py::arg("sample_rate_hz") = py::none());

  m.def(
      "welch_cross_psd",
      [](const ma::SignalData& x, std::size_t f, std::optional<std::size_t> hop,
         const std::string& window, double eps) {
        return spectrum_to_array(ma::welch_cross_psd(to_signal(x), make_window(f, hop, window), eps));
      },
      py::arg("x"), py::arg("f"), py::arg("hop") = py::none(), py::arg("window") = "hann",
      py::arg("eps") = 0.0);
  m.def(
      "welch_psd",
      [](const ma::SignalData& x, std::size_t f, std::optional<std::size_t> hop,
         const std::string& window) {
        return Eigen::MatrixXd(ma::welch_psd(to_signal(x), make_window(f, hop, window)).values);
      },
      py::arg("x"), py::arg("f"), py::arg("hop") = py::none(), py::arg("window") = "hann");

  m.def(
      "monge_map",
      [](const ma::ComplexMatrix& s, const ma::ComplexMatrix& t, double eps) {
        return ma::monge_map(s, t, eps);
      },
      py::arg("sigma_s"), py::arg("sigma_t"), py::arg("eps") = 0.0);
  m.def(
      "bures_wasserstein_dist",
      [](const ma::ComplexMatrix& a, const ma::ComplexMatrix& b) {
        return ma::bures_wasserstein_dist(a, b);
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "barycenter",
      [](const std::vector<ma::ComplexMatrix>& sigmas, std::size_t n_iterations) {
        ma::BarycenterConfig cfg;
        cfg.n_iterations = n_iterations;
        return ma::barycenter_fixed_point<ma::cdouble>(sigmas, cfg);
      },
      py::arg("sigmas"), py::arg("n_iterations") = 1);

  m.def(
      "gen_stationary",
      [](const CArray& spec, std::uint64_t seed) {
        return ma::SignalData(ma::gen_stationary(array_to_spectrum(spec), seed).data());
      },
      py::arg("spectrum"), py::arg("seed"));
  m.def("expcorr_psd", &ma::expcorr_psd, py::arg("gamma"), py::arg("rho"), py::arg("n"));
  m.def(
      "mixture_spectrum",
      [](double gamma, double rho, std::size_t n_c, std::size_t n) {
        return spectrum_to_array(ma::mixture_spec(gamma, rho, n_c, n));
      },
      py::arg("gamma"), py::arg("rho"), py::arg("n_channels"), py::arg("n"));

  py::class_<ma::AlignmentModel>(m, "Model")
      .def_property_readonly("method",
                             [](const ma::AlignmentModel& mo) { return std::string(ma::method_name(mo.method)); })
      .def_readonly("f", &ma::AlignmentModel::f)
      .def_readonly("n_channels", &ma::AlignmentModel::n_channels)
      .def_readonly("eps", &ma::AlignmentModel::eps)
      .def(
          "transform",
          [](const ma::AlignmentModel& mo, const ma::SignalData& x, const std::string& boundary) {
            ma::ApplyOptions opts;
            if (boundary == "reflect") {
              opts.boundary = ma::Boundary::kReflect;
            } else if (boundary != "circular") {
              throw ma::Error(ma::ErrorCode::kInvalidArgument, "boundary must be circular or reflect");
            }
            return ma::SignalData(ma::transform(mo, to_signal(x), {}, opts).data());
          },
          py::arg("x"), py::arg("boundary") = "circular")
      .def("distance",
           [](const ma::AlignmentModel& mo, const ma::SignalData& x) {
             return ma::stats_distance(ma::estimate_stats(mo.method, to_signal(x), mo.window, mo.eps),
                                       mo.barycenter);
           })
      .def("to_json", [](const ma::AlignmentModel& mo) { return ma::model_to_json(mo); })
      .def_static("from_json", &ma::model_from_json, py::arg("text"))
      .def("save", [](const ma::AlignmentModel& mo, const std::filesystem::path& p) { ma::save_model(p, mo); })
      .def_static("load", [](const std::filesystem::path& p) { return ma::load_model(p); })
      .def("__repr__", [](const ma::AlignmentModel& mo) {
        return "<Model method=" + std::string(ma::method_name(mo.method)) + " f=" + std::to_string(mo.f) +
               " n_channels=" + std::to_string(mo.n_channels) + ">";
      });

  m.def(
      "fit",
      [](const std::string& method, const std::vector<ma::SignalData>& domains, std::size_t filter_size,
         std::optional<std::size_t> hop, const std::string& window, double eps, std::size_t bary_iters) {
        std::vector<ma::Signal> signals;
        for (const auto& d : domains) signals.push_back(to_signal(d));
        ma::BarycenterConfig cfg;
        cfg.n_iterations = bary_iters;
        return ma::fit(ma::parse_method(method), signals, make_window(filter_size, hop, window), eps, cfg);
      },
      py::arg("method"), py::arg("domains"), py::arg("filter_size") = 256, py::arg("hop") = py::none(),
      py::arg("window") = "hann", py::arg("eps") = 1e-10, py::arg("bary_iters") = 1);
}
