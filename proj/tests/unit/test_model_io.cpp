#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include <gtest/gtest.h>

#include "mongealign/error.hpp"
#include "mongealign/model_io.hpp"
#include "mongealign/oracle.hpp"
#include "mongealign/synth.hpp"

namespace ma = mongealign;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("mongealign_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

ma::Signal random_signal(std::size_t n_c, std::size_t n, std::uint64_t seed,
                         std::optional<double> fs_hz = std::nullopt) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ma::SignalData d(n_c, n);
  for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = nd(rng) * std::exp(nd(rng) * 5);
  return ma::Signal(d, fs_hz);
}

std::vector<std::uint8_t> as_bytes(const std::string& s) { return {s.begin(), s.end()}; }

ma::ErrorCode decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    ma::decode_signal(bytes);
  } catch (const ma::Error& e) {
    return e.code();
  }
  return ma::ErrorCode::kInvalidArgument;
}

std::vector<ma::Signal> tma_domains() {
  std::vector<ma::Signal> out;
  for (int k = 0; k < 3; ++k) {
    out.push_back(ma::gen_stationary(ma::expcorr_spec(1.0 + k, 0.2 * k, 2, 512), 30 + k));
  }
  return out;
}

}  // namespace

TEST(SignalFile, BinaryRoundTripIsBitwise) {
  TempDir dir;
  for (auto fs_hz : {std::optional<double>{}, std::optional<double>{256.0}}) {
    const auto sig = random_signal(3, 101, 1, fs_hz);
    ma::write_signal(dir / "a.mas", sig);
    const auto back = ma::read_signal(dir / "a.mas");
    EXPECT_TRUE(back.data() == sig.data());
    EXPECT_EQ(back.sample_rate_hz(), fs_hz);
  }
}

TEST(SignalFile, CsvRoundTripIsBitwise) {
  TempDir dir;
  const auto sig = random_signal(2, 37, 2);
  ma::write_signal(dir / "a.csv", sig);
  EXPECT_TRUE(ma::read_signal(dir / "a.csv").data() == sig.data());
}

TEST(SignalFile, SingleSampleLayout) {
  ma::SignalData d(1, 1);
  d(0, 0) = 0.5;
  const auto bytes = as_bytes(ma::encode_signal(ma::Signal(d)));
  ASSERT_EQ(bytes.size(), 32u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "MAS1");
  const std::uint64_t half_bits = std::bit_cast<std::uint64_t>(0.5);
  for (int b = 0; b < 8; ++b) {
    EXPECT_EQ(bytes[24 + b], static_cast<std::uint8_t>(half_bits >> (8 * b)));
  }
  // n_channels = 1 and n_samples = 1, little-endian.
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 1);
}

TEST(SignalFile, CorruptInputs) {
  EXPECT_EQ(decode_error({}), ma::ErrorCode::kTruncatedFile);
  auto good = as_bytes(ma::encode_signal(random_signal(2, 4, 3)));
  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(decode_error(bad_magic), ma::ErrorCode::kBadMagic);
  auto short_payload = good;
  short_payload.pop_back();
  EXPECT_EQ(decode_error(short_payload), ma::ErrorCode::kTruncatedFile);
  auto long_payload = good;
  long_payload.push_back(0);
  EXPECT_EQ(decode_error(long_payload), ma::ErrorCode::kSchemaError);
  auto header_only = std::vector<std::uint8_t>(good.begin(), good.begin() + 10);
  EXPECT_EQ(decode_error(header_only), ma::ErrorCode::kTruncatedFile);
  auto nan_value = good;
  const std::uint64_t nan_bits = std::bit_cast<std::uint64_t>(std::nan(""));
  std::memcpy(nan_value.data() + 24, &nan_bits, 8);
  EXPECT_EQ(decode_error(nan_value), ma::ErrorCode::kNonFinite);
  EXPECT_THROW(ma::read_signal("/nonexistent/dir/file.mas"), ma::Error);
}

TEST(ModelFile, RoundTripReproducesTransforms) {
  TempDir dir;
  const auto domains = tma_domains();
  const auto win = ma::WindowSpec::with_default_hop(ma::WindowKind::kHann, 32);
  for (auto method : {ma::Method::kStma, ma::Method::kTma, ma::Method::kSma}) {
    const auto model = ma::fit(method, domains, win, 1e-10);
    ma::save_model(dir / "m.json", model);
    const auto back = ma::load_model(dir / "m.json");
    EXPECT_EQ(ma::model_to_json(back), ma::model_to_json(model));
    const auto test_sig = ma::gen_stationary(ma::expcorr_spec(2.0, 0.5, 2, 512), 77);
    EXPECT_TRUE(ma::transform(model, test_sig).data() == ma::transform(back, test_sig).data())
        << ma::method_name(method);
  }
}

TEST(ModelFile, KeyOrderIsFixed) {
  const auto model = ma::fit(ma::Method::kTma, tma_domains(),
                             ma::WindowSpec::with_default_hop(ma::WindowKind::kRectangular, 8), 0.0);
  const std::string text = ma::model_to_json(model);
  std::size_t last = 0;
  for (const char* key : {"\"format_version\"", "\"method\"", "\"f\"", "\"n_channels\"",
                          "\"window\"", "\"eps\"", "\"barycenter\""}) {
    const auto pos = text.find(key);
    ASSERT_NE(pos, std::string::npos) << key;
    EXPECT_GT(pos, last == 0 ? 0 : last) << key;
    last = pos;
  }
  EXPECT_NE(text.find("\"rect\""), std::string::npos);
}

TEST(ModelFile, VersionAndSchemaErrors) {
  const auto model = ma::fit(ma::Method::kTma, tma_domains(),
                             ma::WindowSpec::with_default_hop(ma::WindowKind::kHann, 8), 0.0);
  std::string text = ma::model_to_json(model);
  const auto code_of = [](const std::string& t) {
    try {
      ma::model_from_json(t);
    } catch (const ma::Error& e) {
      return e.code();
    }
    return ma::ErrorCode::kInvalidArgument;
  };
  std::string v2 = text;
  v2.replace(v2.find("\"format_version\": 1"), 19, "\"format_version\": 2");
  EXPECT_EQ(code_of(v2), ma::ErrorCode::kVersionUnsupported);
  EXPECT_EQ(code_of("{"), ma::ErrorCode::kSchemaError);
  EXPECT_EQ(code_of("{\"format_version\": 1}"), ma::ErrorCode::kSchemaError);
  std::string wrong_method = text;
  wrong_method.replace(wrong_method.find("\"tma\""), 5, "\"sma\"");
  EXPECT_EQ(code_of(wrong_method), ma::ErrorCode::kSchemaError);
}

TEST(ModelFile, HandWrittenSpatialModel) {
  const std::string text = R"({
 "format_version": 1,
 "method": "sma",
 "f": 1,
 "n_channels": 1,
 "window": {"kind": "rect", "length": 1, "hop": 1},
 "eps": 0.0,
 "barycenter": {"kind": "spatial_cov", "entries": [[2.0]]}
})";
  const auto model = ma::model_from_json(text);
  const auto sig = random_signal(1, 200, 5);
  const ma::Signal centered = ma::center_channels(sig);
  const double var = centered.data().squaredNorm() / 200.0;
  const auto out = ma::transform(model, sig);
  EXPECT_LE((out.data() - std::sqrt(2.0 / var) * centered.data()).cwiseAbs().maxCoeff(),
            1e-9 * centered.data().cwiseAbs().maxCoeff());

  std::string asym = R"({"format_version": 1, "method": "sma", "f": 1, "n_channels": 2,
 "window": {"kind": "rect", "length": 1, "hop": 1}, "eps": 0.0,
 "barycenter": {"kind": "spatial_cov", "entries": [[2.0, 0.5], [0.1, 1.0]]}})";
  try {
    ma::model_from_json(asym);
    FAIL();
  } catch (const ma::Error& e) {
    EXPECT_EQ(e.code(), ma::ErrorCode::kSchemaError);
  }
}

TEST(Checksum, Fnv1aReferenceValues) {
  EXPECT_EQ(ma::fnv1a64({}), 0xcbf29ce484222325ULL);
  const std::string a = "a";
  EXPECT_EQ(ma::fnv1a64(as_bytes(a)), 0xaf63dc4c8601ec8cULL);
  const std::string foobar = "foobar";
  EXPECT_EQ(ma::fnv1a64(as_bytes(foobar)), 0x85944171f73967e8ULL);
}
