#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "mongealign/align.hpp"
#include "mongealign/error.hpp"
#include "mongealign/image2d.hpp"
#include "mongealign/model_io.hpp"
#include "mongealign/synth.hpp"

namespace mongealign::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

Signal zscore(const Signal& sig) {
  SignalData x = center_channels(sig).data();
  for (Eigen::Index c = 0; c < x.rows(); ++c) {
    const double sd = std::sqrt(x.row(c).squaredNorm() / static_cast<double>(x.cols()));
    if (sd > 0.0) x.row(c) /= sd;
  }
  return Signal(std::move(x), sig.sample_rate_hz());
}

Signal load_input(const std::string& path, bool standardize) {
  Signal sig = read_signal(path);
  return standardize ? zscore(sig) : sig;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

WindowKind parse_window(const std::string& name) {
  return name == "rect" ? WindowKind::kRectangular : WindowKind::kHann;
}

// Distance of a signal's own statistics to the model barycenter.
double distance_to_barycenter(const AlignmentModel& model, const Signal& sig) {
  return stats_distance(estimate_stats(model.method, sig, model.window, model.eps),
                        model.barycenter);
}

struct FitArgs {
  std::string method;
  std::size_t filter_size = 256;
  std::size_t hop = 0;
  std::string window = "hann";
  double eps = 1e-10;
  std::size_t bary_iters = 1;
  std::vector<std::string> inputs;
  std::string out_path;
  bool bench = false;
  bool zscore = false;
};

double cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
  std::vector<Signal> signals;
  for (const auto& p : a.inputs) signals.push_back(load_input(p, a.zscore));
  const Method method = parse_method(a.method);
  const WindowSpec win{parse_window(a.window), a.filter_size,
                       a.hop == 0 ? std::max<std::size_t>(1, a.filter_size / 2) : a.hop};
  BarycenterConfig cfg;
  cfg.n_iterations = a.bary_iters;

  const auto t0 = std::chrono::steady_clock::now();
  const double cpu0 = cpu_seconds();
  const AlignmentModel model = fit(method, signals, win, a.eps, cfg);
  const double cpu = cpu_seconds() - cpu0;
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save_model(a.out_path, model);

  json report;
  report["model"] = a.out_path;
  report["method"] = std::string(method_name(model.method));
  report["f"] = model.f;
  report["n_channels"] = model.n_channels;
  report["n_domains"] = signals.size();
  json dists = json::array();
  for (std::size_t k = 0; k < signals.size(); ++k) {
    dists.push_back({{"input", a.inputs[k]},
                     {"distance_to_barycenter", distance_to_barycenter(model, signals[k])}});
  }
  report["domains"] = std::move(dists);
  if (a.bench) {
    report["fit_seconds"] = seconds;
    report["fit_cpu_seconds"] = cpu;
    report["n_samples"] = signals.front().n_samples();
  }
  out << report.dump(2) << '\n';
  return 0;
}

struct TransformArgs {
  std::string model_path;
  std::string input;
  std::string output;
  std::string boundary = "circular";
  bool zscore = false;
};

int cmd_transform(const TransformArgs& a, std::ostream& out) {
  const AlignmentModel model = load_model(a.model_path);
  const Signal sig = load_input(a.input, a.zscore);
  ApplyOptions opts;
  opts.boundary = a.boundary == "reflect" ? Boundary::kReflect : Boundary::kCircular;
  const Signal aligned = transform(model, sig, {}, opts);
  write_signal(a.output, aligned);
  out << json{{"output", a.output},
              {"n_channels", aligned.n_channels()},
              {"n_samples", aligned.n_samples()}}
             .dump(2)
      << '\n';
  return 0;
}

struct EvalArgs {
  std::string model_path;
  std::vector<std::string> inputs;
  bool zscore = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const AlignmentModel model = load_model(a.model_path);
  json results = json::array();
  bool all_ok = true;
  for (const auto& path : a.inputs) {
    const Signal sig = load_input(path, a.zscore);
    const double before = distance_to_barycenter(model, sig);
    const double after = distance_to_barycenter(model, transform(model, sig));
    // Allow for round-off when both distances are essentially zero.
    const bool ok = after <= before + 1e-9 * std::max(1.0, before);
    all_ok = all_ok && ok;
    results.push_back({{"input", path}, {"before", before}, {"after", after},
                       {"after_le_before", ok}});
  }
  json report;
  report["method"] = std::string(method_name(model.method));
  report["f"] = model.f;
  report["results"] = std::move(results);
  report["all_after_le_before"] = all_ok;
  out << report.dump(2) << '\n';
  return 0;
}

struct BiasVarArgs {
  double rho = 0.9;
  double gamma = 1.0;
  std::size_t n_ell = 3000;
  std::vector<std::size_t> filters;
  std::size_t runs = 200;
  std::uint64_t seed = 0;
  std::string window = "hann";
};

int cmd_biasvar(const BiasVarArgs& a, std::ostream& out) {
  if (a.runs < 2) throw Error(ErrorCode::kInvalidArgument, "--runs must be at least 2");
  const Eigen::VectorXd truth_full = expcorr_psd(a.gamma, a.rho, a.n_ell);
  const CrossSpectrum spec = expcorr_spec(a.gamma, a.rho, 1, a.n_ell);
  for (const auto f : a.filters) {
    if (f == 0 || f > a.n_ell || a.n_ell % f != 0) {
      throw Error(ErrorCode::kNotDivisible,
                  "filter size " + std::to_string(f) + " must divide n-ell " +
                      std::to_string(a.n_ell));
    }
  }

  std::vector<Eigen::ArrayXd> sum(a.filters.size()), sum_sq(a.filters.size()),
      sq_err(a.filters.size());
  std::vector<Eigen::ArrayXd> truth(a.filters.size());
  for (std::size_t i = 0; i < a.filters.size(); ++i) {
    const std::size_t f = a.filters[i];
    sum[i] = sum_sq[i] = sq_err[i] = Eigen::ArrayXd::Zero(f);
    truth[i].resize(f);
    for (std::size_t j = 0; j < f; ++j) truth[i][j] = truth_full[j * (a.n_ell / f)];
  }
  for (std::size_t r = 0; r < a.runs; ++r) {
    const Signal x = gen_stationary(spec, a.seed + r);
    for (std::size_t i = 0; i < a.filters.size(); ++i) {
      const std::size_t f = a.filters[i];
      const WindowSpec win{parse_window(a.window), f, std::max<std::size_t>(1, f / 2)};
      const Eigen::ArrayXd est = welch_psd(x, win).values.row(0).transpose().array();
      sum[i] += est;
      sum_sq[i] += est.square();
      sq_err[i] += (est - truth[i]).square();
    }
  }

  const double runs = static_cast<double>(a.runs);
  out << "f,sup_bin_bias,sup_bin_std,sup_bin_rmse,mean_bin_std\n";
  for (std::size_t i = 0; i < a.filters.size(); ++i) {
    const Eigen::ArrayXd mean = sum[i] / runs;
    const Eigen::ArrayXd var = ((sum_sq[i] - runs * mean.square()) / (runs - 1.0)).max(0.0);
    const Eigen::ArrayXd sd = var.sqrt();
    const Eigen::ArrayXd rmse = (sq_err[i] / runs).sqrt();
    char line[160];
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g\n", a.filters[i],
                  (mean - truth[i]).abs().maxCoeff(), sd.maxCoeff(), rmse.maxCoeff(), sd.mean());
    out << line;
  }
  return 0;
}

struct Blur2dArgs {
  std::vector<double> angles;
  std::vector<double> angles_target;
  int kernel_len = 5;
  std::size_t n_images = 20;
  std::size_t size = 32;
  std::uint64_t seed = 0;
  std::string out_dir;
};

void write_image_csv(const fs::path& path, const Image& img) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  char buf[32];
  for (Eigen::Index i = 0; i < img.rows(); ++i) {
    for (Eigen::Index j = 0; j < img.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", img(i, j));
      f << (j ? "," : "") << buf;
    }
    f << '\n';
  }
}

int cmd_blur2d(const Blur2dArgs& a, std::ostream& out) {
  if (a.angles.empty()) throw Error(ErrorCode::kEmptyDomain, "no source angles");
  struct Domain {
    double angle;
    bool source;
    std::vector<Image> images;
  };
  std::vector<Domain> domains;
  std::uint64_t stream = 0;
  auto add = [&](double angle, bool source) {
    const auto base = gen_texture_images(a.n_images, a.size, a.size, a.seed + 1000003 * stream++);
    domains.push_back({angle, source, gen_blur_domain(base, angle, a.kernel_len)});
  };
  for (const double angle : a.angles) add(angle, true);
  for (const double angle : a.angles_target) add(angle, false);

  std::vector<std::vector<Image>> sources;
  for (const auto& d : domains) {
    if (d.source) sources.push_back(d.images);
  }
  const Tma2dModel model = tma2d_fit(sources);
  const Image bary_corr = correlation_2d(model.barycenter_psd);
  const double bary_norm = bary_corr.norm();

  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    write_image_csv(fs::path(a.out_dir) / "barycenter_corr.csv", bary_corr);
  }

  json rows = json::array();
  double worst_ratio = 0.0;
  for (const auto& d : domains) {
    const Image before = correlation_2d(image_domain_psd(d.images));
    const auto aligned = tma2d_transform(model, d.images);
    const Image after = correlation_2d(image_domain_psd(aligned));
    const double gap_before = (before - bary_corr).norm() / bary_norm;
    const double gap_after = (after - bary_corr).norm() / bary_norm;
    const double ratio = gap_before > 0.0 ? gap_after / gap_before : 0.0;
    if (!d.source) worst_ratio = std::max(worst_ratio, ratio);
    if (!a.out_dir.empty()) {
      char stem[64];
      std::snprintf(stem, sizeof stem, "%s_%g", d.source ? "source" : "target", d.angle);
      write_image_csv(fs::path(a.out_dir) / (std::string(stem) + "_before.csv"), before);
      write_image_csv(fs::path(a.out_dir) / (std::string(stem) + "_after.csv"), after);
    }
    rows.push_back({{"angle", d.angle},
                    {"role", d.source ? "source" : "target"},
                    {"gap_before", gap_before},
                    {"gap_after", gap_after},
                    {"ratio", ratio}});
  }
  json report;
  report["kernel_len"] = a.kernel_len;
  report["n_images"] = a.n_images;
  report["size"] = a.size;
  report["domains"] = std::move(rows);
  report["worst_target_ratio"] = worst_ratio;
  out << report.dump(2) << '\n';
  return 0;
}

struct SynthArgs {
  std::string recipe = "white";
  std::size_t n_channels = 2;
  std::size_t n_samples = 1024;
  double rho = 0.9;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  std::string out_path;
};

CrossSpectrum recipe_spectrum(const SynthArgs& a) {
  const std::size_t n_c = a.n_channels;
  const std::size_t n = a.n_samples;
  if (n_c == 0 || n == 0) throw Error(ErrorCode::kInvalidArgument, "empty signal requested");
  if (a.recipe == "white") {
    return CrossSpectrum{std::vector<ComplexMatrix>(n, ComplexMatrix::Identity(n_c, n_c))};
  }
  if (a.recipe == "zero") {
    return CrossSpectrum{std::vector<ComplexMatrix>(n, ComplexMatrix::Zero(n_c, n_c))};
  }
  if (a.recipe == "expcorr") return expcorr_spec(a.gamma, a.rho, n_c, n);
  if (a.recipe == "mixture") return mixture_spec(a.gamma, a.rho, n_c, n);
  throw Error(ErrorCode::kInvalidArgument, "unknown recipe '" + a.recipe + "'");
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const Signal sig = gen_stationary(recipe_spectrum(a), a.seed);
  write_signal(a.out_path, sig);
  out << json{{"output", a.out_path},
              {"recipe", a.recipe},
              {"n_channels", sig.n_channels()},
              {"n_samples", sig.n_samples()},
              {"seed", a.seed},
              {"checksum", hex64(file_checksum(a.out_path))}}
             .dump(2)
      << '\n';
  return 0;
}

void report_error(std::ostream& err, std::string_view name, const std::string& message) {
  err << json{{"error", name}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monge alignment of multichannel signals"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate a barycenter model from source domains");
  fit_cmd->add_option("--method", fit_args.method, "stma, tma or sma")
      ->required()
      ->check(CLI::IsMember({"stma", "tma", "sma"}));
  fit_cmd->add_option("--filter-size", fit_args.filter_size, "Filter length F")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--hop", fit_args.hop, "Welch hop (default F/2)");
  fit_cmd->add_option("--window", fit_args.window)->check(CLI::IsMember({"hann", "rect"}));
  fit_cmd->add_option("--eps", fit_args.eps, "Shrinkage toward the scaled identity");
  fit_cmd->add_option("--bary-iters", fit_args.bary_iters, "Fixed-point iterations");
  fit_cmd->add_option("--inputs", fit_args.inputs, "One signal file per domain")->required();
  fit_cmd->add_option("--out", fit_args.out_path, "Model path")->required();
  fit_cmd->add_flag("--bench", fit_args.bench, "Report fit wall and CPU time");
  fit_cmd->add_flag("--zscore", fit_args.zscore, "Standardize each channel first");

  TransformArgs tr_args;
  auto* tr_cmd = app.add_subcommand("transform", "Align one signal to a stored model");
  tr_cmd->add_option("--model", tr_args.model_path)->required();
  tr_cmd->add_option("--input", tr_args.input)->required();
  tr_cmd->add_option("--output", tr_args.output)->required();
  tr_cmd->add_option("--boundary", tr_args.boundary)
      ->check(CLI::IsMember({"circular", "reflect"}));
  tr_cmd->add_flag("--zscore", tr_args.zscore);

  EvalArgs ev_args;
  auto* ev_cmd = app.add_subcommand("eval", "Distances to the barycenter before and after");
  ev_cmd->add_option("--model", ev_args.model_path)->required();
  ev_cmd->add_option("--inputs", ev_args.inputs)->required();
  ev_cmd->add_flag("--zscore", ev_args.zscore);

  BiasVarArgs bv_args;
  auto* bv_cmd = app.add_subcommand("experiment-biasvar", "Welch bias/variance versus filter size");
  bv_cmd->add_option("--rho", bv_args.rho)->check(CLI::Range(0.0, 0.999999999));
  bv_cmd->add_option("--gamma", bv_args.gamma)->check(CLI::PositiveNumber);
  bv_cmd->add_option("--n-ell", bv_args.n_ell)->check(CLI::PositiveNumber);
  bv_cmd->add_option("--filters", bv_args.filters)->required();
  bv_cmd->add_option("--runs", bv_args.runs);
  bv_cmd->add_option("--seed", bv_args.seed);
  bv_cmd->add_option("--window", bv_args.window)->check(CLI::IsMember({"hann", "rect"}));

  Blur2dArgs bl_args;
  auto* bl_cmd = app.add_subcommand("experiment-blur2d", "Directional blur alignment demo");
  bl_cmd->add_option("--angles", bl_args.angles, "Source blur angles in degrees")->required();
  bl_cmd->add_option("--angles-target", bl_args.angles_target, "Target blur angles");
  bl_cmd->add_option("--kernel-len", bl_args.kernel_len);
  bl_cmd->add_option("--n-images", bl_args.n_images)->check(CLI::PositiveNumber);
  bl_cmd->add_option("--size", bl_args.size)->check(CLI::PositiveNumber);
  bl_cmd->add_option("--seed", bl_args.seed);
  bl_cmd->add_option("--out-dir", bl_args.out_dir, "Where to write correlation images");

  SynthArgs sy_args;
  auto* sy_cmd = app.add_subcommand("synth", "Write a synthetic stationary signal");
  sy_cmd->add_option("--recipe", sy_args.recipe)
      ->check(CLI::IsMember({"white", "expcorr", "mixture", "zero"}));
  sy_cmd->add_option("--n-channels", sy_args.n_channels);
  sy_cmd->add_option("--n-samples", sy_args.n_samples);
  sy_cmd->add_option("--rho", sy_args.rho);
  sy_cmd->add_option("--gamma", sy_args.gamma);
  sy_cmd->add_option("--seed", sy_args.seed);
  sy_cmd->add_option("--out", sy_args.out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "UsageError", e.what());
    return 2;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_args, out);
    if (*tr_cmd) return cmd_transform(tr_args, out);
    if (*ev_cmd) return cmd_eval(ev_args, out);
    if (*bv_cmd) return cmd_biasvar(bv_args, out);
    if (*bl_cmd) return cmd_blur2d(bl_args, out);
    if (*sy_cmd) return cmd_synth(sy_args, out);
  } catch (const Error& e) {
    report_error(err, error_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error(err, "RuntimeError", e.what());
    return 1;
  }
  return 2;
}

}  // namespace mongealign::cli
