#include "mongealign/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "mongealign/error.hpp"

namespace mongealign::fft {

namespace {

enum class Kind { kR2C, kC2R, kForward, kBackward, kForward2d, kBackward2d };

// FFTW's planner is not reentrant; execution with the new-array interface is.
// Plans are created once per (kind, shape) and kept for the process lifetime.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Kind kind, std::size_t rows, std::size_t cols) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(kind, rows, cols);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    fftw_plan plan = make(kind, static_cast<int>(rows), static_cast<int>(cols));
    if (plan == nullptr) throw Error(ErrorCode::kInvalidArgument, "FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  PlanCache() = default;

  static fftw_plan make(Kind kind, int rows, int cols) {
    constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const int n = rows * cols;
    std::vector<double> real(static_cast<std::size_t>(n));
    std::vector<cdouble> cplx(static_cast<std::size_t>(n));
    std::vector<cdouble> cplx2(static_cast<std::size_t>(n));
    auto* c1 = reinterpret_cast<fftw_complex*>(cplx.data());
    auto* c2 = reinterpret_cast<fftw_complex*>(cplx2.data());
    switch (kind) {
      case Kind::kR2C: return fftw_plan_dft_r2c_1d(n, real.data(), c1, kFlags);
      case Kind::kC2R: return fftw_plan_dft_c2r_1d(n, c1, real.data(), kFlags);
      case Kind::kForward: return fftw_plan_dft_1d(n, c1, c2, FFTW_FORWARD, kFlags);
      case Kind::kBackward: return fftw_plan_dft_1d(n, c1, c2, FFTW_BACKWARD, kFlags);
      case Kind::kForward2d:
        return fftw_plan_dft_2d(rows, cols, c1, c2, FFTW_FORWARD, kFlags);
      case Kind::kBackward2d:
        return fftw_plan_dft_2d(rows, cols, c1, c2, FFTW_BACKWARD, kFlags);
    }
    return nullptr;
  }

  std::mutex mutex_;
  std::map<std::tuple<Kind, std::size_t, std::size_t>, fftw_plan> plans_;
};

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cdouble* p) {
  // FFTW's signature is not const-correct; out-of-place complex transforms
  // do not write to their input.
  return reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(p));
}

void check_sizes(std::size_t in, std::size_t out) {
  if (in == 0 || in != out) {
    throw Error(ErrorCode::kDimensionMismatch, "fft buffer sizes differ or are empty");
  }
}

}  // namespace

void forward_real(std::span<const double> in, std::span<cdouble> half_out) {
  if (in.empty() || half_out.size() != in.size() / 2 + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "r2c output must hold n/2 + 1 bins");
  }
  fftw_plan plan = PlanCache::instance().get(Kind::kR2C, 1, in.size());
  fftw_execute_dft_r2c(plan, const_cast<double*>(in.data()), as_fftw(half_out.data()));
}

void backward_real(std::span<const cdouble> half_in, std::span<double> out) {
  if (out.empty() || half_in.size() != out.size() / 2 + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "c2r input must hold n/2 + 1 bins");
  }
  // c2r overwrites its input.
  std::vector<cdouble> scratch(half_in.begin(), half_in.end());
  fftw_plan plan = PlanCache::instance().get(Kind::kC2R, 1, out.size());
  fftw_execute_dft_c2r(plan, as_fftw(scratch.data()), out.data());
}

void forward(std::span<const cdouble> in, std::span<cdouble> out) {
  check_sizes(in.size(), out.size());
  fftw_plan plan = PlanCache::instance().get(Kind::kForward, 1, in.size());
  fftw_execute_dft(plan, as_fftw(in.data()), as_fftw(out.data()));
}

void backward(std::span<const cdouble> in, std::span<cdouble> out) {
  check_sizes(in.size(), out.size());
  fftw_plan plan = PlanCache::instance().get(Kind::kBackward, 1, in.size());
  fftw_execute_dft(plan, as_fftw(in.data()), as_fftw(out.data()));
}

void forward_2d(std::size_t rows, std::size_t cols, std::span<const cdouble> in,
                std::span<cdouble> out) {
  check_sizes(in.size(), out.size());
  if (rows * cols != in.size()) throw Error(ErrorCode::kDimensionMismatch, "2-D shape");
  fftw_plan plan = PlanCache::instance().get(Kind::kForward2d, rows, cols);
  fftw_execute_dft(plan, as_fftw(in.data()), as_fftw(out.data()));
}

void backward_2d(std::size_t rows, std::size_t cols, std::span<const cdouble> in,
                 std::span<cdouble> out) {
  check_sizes(in.size(), out.size());
  if (rows * cols != in.size()) throw Error(ErrorCode::kDimensionMismatch, "2-D shape");
  fftw_plan plan = PlanCache::instance().get(Kind::kBackward2d, rows, cols);
  fftw_execute_dft(plan, as_fftw(in.data()), as_fftw(out.data()));
}

}  // namespace mongealign::fft
