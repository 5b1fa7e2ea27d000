#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace whitham::detail {

namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~PlanPair() {
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(planner_mutex());
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<PlanPair>();
    const int len = static_cast<int>(n);
    std::vector<double> r(n);
    std::vector<std::complex<double>> c(n / 2 + 1);
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    slot->r2c = fftw_plan_dft_r2c_1d(len, r.data(), cp, flags);
    slot->c2r = fftw_plan_dft_c2r_1d(len, cp, r.data(), flags);
  }
  return *slot;
}

}  // namespace

void fft_r2c(std::span<const double> in, std::span<std::complex<double>> out) {
  const auto& p = plans_for(in.size());
  // r2c preserves its input by default.
  fftw_execute_dft_r2c(p.r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void fft_c2r(std::span<const std::complex<double>> in, std::span<double> out) {
  const auto& p = plans_for(out.size());
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
}

}  // namespace whitham::detail
