#include "mongealign/model_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "mongealign/error.hpp"

namespace mongealign {

namespace {

using json = nlohmann::ordered_json;

constexpr char kMagic[4] = {'M', 'A', 'S', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8;

template <typename T>
void put_le(std::string& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const std::uint8_t* p) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

bool is_csv(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv";
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string encode_csv(const Signal& sig) {
  std::string out;
  const auto& x = sig.data();
  for (Eigen::Index c = 0; c < x.rows(); ++c) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
      if (k > 0) out += ',';
      out += format_double(x(c, k));
    }
    out += '\n';
  }
  return out;
}

Signal decode_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (true) {
      while (p < end && *p == ' ') ++p;
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) throw Error(ErrorCode::kSchemaError, "bad CSV number");
      row.push_back(v);
      p = res.ptr;
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      if (*p != ',') throw Error(ErrorCode::kSchemaError, "bad CSV separator");
      ++p;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::kSchemaError, "CSV rows differ in length");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kTruncatedFile, "empty CSV signal");
  SignalData data(rows.size(), rows.front().size());
  for (std::size_t c = 0; c < rows.size(); ++c) {
    for (std::size_t k = 0; k < rows[c].size(); ++k) data(c, k) = rows[c][k];
  }
  return Signal(std::move(data));
}

const char* window_kind_name(WindowKind k) { return k == WindowKind::kHann ? "hann" : "rect"; }

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd json_matrix(const json& j, std::size_t rows, std::size_t cols, const char* what) {
  if (!j.is_array() || j.size() != rows) {
    throw Error(ErrorCode::kSchemaError, std::string(what) + " has the wrong number of rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols) {
      throw Error(ErrorCode::kSchemaError, std::string(what) + " has the wrong number of columns");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw Error(ErrorCode::kSchemaError, std::string(what) + " entry is not a number");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

json barycenter_json(const DomainStats& stats) {
  json out;
  if (const auto* cs = std::get_if<CrossSpectrum>(&stats)) {
    out["kind"] = "cross_spectrum";
    json re = json::array();
    json im = json::array();
    for (const auto& bin : cs->bins) {
      re.push_back(matrix_json(bin.real()));
      im.push_back(matrix_json(bin.imag()));
    }
    out["real"] = std::move(re);
    out["imag"] = std::move(im);
  } else if (const auto* psd = std::get_if<ChannelPsd>(&stats)) {
    out["kind"] = "channel_psd";
    out["values"] = matrix_json(psd->values);
  } else {
    out["kind"] = "spatial_cov";
    out["entries"] = matrix_json(std::get<SpatialCov>(stats).entries);
  }
  return out;
}

DomainStats json_barycenter(const json& j, std::size_t f, std::size_t n_c) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "cross_spectrum") {
    const auto& re = j.at("real");
    const auto& im = j.at("imag");
    if (!re.is_array() || !im.is_array() || re.size() != f || im.size() != f) {
      throw Error(ErrorCode::kSchemaError, "cross_spectrum needs f bins");
    }
    CrossSpectrum cs;
    cs.bins.reserve(f);
    for (std::size_t b = 0; b < f; ++b) {
      ComplexMatrix bin(n_c, n_c);
      bin.real() = json_matrix(re[b], n_c, n_c, "cross_spectrum.real");
      bin.imag() = json_matrix(im[b], n_c, n_c, "cross_spectrum.imag");
      cs.bins.push_back(std::move(bin));
    }
    return cs;
  }
  if (kind == "channel_psd") return ChannelPsd{json_matrix(j.at("values"), n_c, f, "channel_psd")};
  if (kind == "spatial_cov") {
    return SpatialCov{json_matrix(j.at("entries"), n_c, n_c, "spatial_cov")};
  }
  throw Error(ErrorCode::kSchemaError, "unknown barycenter kind '" + kind + "'");
}

}  // namespace

std::string encode_signal(const Signal& sig) {
  if (!sig.data().allFinite()) throw Error(ErrorCode::kNonFinite, "signal contains NaN or Inf");
  std::string out;
  out.reserve(kHeaderBytes + 8 * sig.data().size());
  out.append(kMagic, 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sig.n_channels()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(sig.n_samples()));
  put_le<double>(out, sig.sample_rate_hz().value_or(std::numeric_limits<double>::quiet_NaN()));
  const auto& x = sig.data();
  for (Eigen::Index c = 0; c < x.rows(); ++c) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) put_le<double>(out, x(c, k));
  }
  return out;
}

Signal decode_signal(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::kTruncatedFile, "file shorter than the magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "missing MAS1 magic");
  }
  if (bytes.size() < kHeaderBytes) throw Error(ErrorCode::kTruncatedFile, "incomplete header");
  const auto n_c = get_le<std::uint32_t>(bytes.data() + 4);
  const auto n = get_le<std::uint64_t>(bytes.data() + 8);
  const auto rate = get_le<double>(bytes.data() + 16);
  const std::size_t payload = bytes.size() - kHeaderBytes;
  if (n_c == 0 || n == 0 || n > payload / 8 / n_c) {
    if (n_c == 0 || n == 0) throw Error(ErrorCode::kSchemaError, "empty signal");
    throw Error(ErrorCode::kTruncatedFile, "payload shorter than header announces");
  }
  if (payload != 8 * n_c * n) throw Error(ErrorCode::kSchemaError, "trailing bytes after payload");
  SignalData data(n_c, n);
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  for (std::uint32_t c = 0; c < n_c; ++c) {
    for (std::uint64_t k = 0; k < n; ++k, p += 8) data(c, k) = get_le<double>(p);
  }
  std::optional<double> fs;
  if (!std::isnan(rate)) fs = rate;
  return Signal(std::move(data), fs);
}

void write_signal(const std::filesystem::path& path, const Signal& sig) {
  if (is_csv(path)) {
    write_file(path, encode_csv(sig));
  } else {
    write_file(path, encode_signal(sig));
  }
}

Signal read_signal(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (is_csv(path)) return decode_csv(bytes);
  return decode_signal(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

std::string model_to_json(const AlignmentModel& model) {
  model.validate();
  json j;
  j["format_version"] = model.format_version;
  j["method"] = std::string(method_name(model.method));
  j["f"] = model.f;
  j["n_channels"] = model.n_channels;
  j["window"] = json{{"kind", window_kind_name(model.window.kind)},
                     {"length", model.window.length},
                     {"hop", model.window.hop}};
  j["eps"] = model.eps;
  j["barycenter"] = barycenter_json(model.barycenter);
  return j.dump(1) + "\n";
}

AlignmentModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("format_version")) {
      throw Error(ErrorCode::kSchemaError, "missing format_version");
    }
    const int version = j.at("format_version").get<int>();
    if (version != AlignmentModel::kFormatVersion) {
      throw Error(ErrorCode::kVersionUnsupported,
                  "format_version " + std::to_string(version) + " is not supported");
    }
    AlignmentModel model;
    model.format_version = version;
    try {
      model.method = parse_method(j.at("method").get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorCode::kSchemaError, e.what());
    }
    model.f = j.at("f").get<std::size_t>();
    model.n_channels = j.at("n_channels").get<std::size_t>();
    const auto& w = j.at("window");
    const std::string kind = w.at("kind").get<std::string>();
    if (kind == "hann") {
      model.window.kind = WindowKind::kHann;
    } else if (kind == "rect") {
      model.window.kind = WindowKind::kRectangular;
    } else {
      throw Error(ErrorCode::kSchemaError, "unknown window kind '" + kind + "'");
    }
    model.window.length = w.at("length").get<std::size_t>();
    model.window.hop = w.at("hop").get<std::size_t>();
    model.eps = j.at("eps").get<double>();
    model.barycenter = json_barycenter(j.at("barycenter"), model.f, model.n_channels);
    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, e.what());
  }
}

void save_model(const std::filesystem::path& path, const AlignmentModel& model) {
  write_file(path, model_to_json(model));
}

AlignmentModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_file(path));
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  return fnv1a64(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

}  // namespace mongealign
