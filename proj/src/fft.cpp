#include "fft.hpp"

namespace zkb::fft {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void Plan::reset() {
  if (plan_) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    plan_ = nullptr;
  }
}

Plan make_r2c_rows(std::size_t n, std::size_t count, double* in, std::complex<double>* out) {
  const int len = static_cast<int>(n);
  const int nc = len / 2 + 1;
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_many_dft_r2c(1, &len, static_cast<int>(count), in, nullptr, 1, len, as_fftw(out), nullptr,
                                     1, nc, FFTW_ESTIMATE));
}

Plan make_c2r_rows(std::size_t n, std::size_t count, std::complex<double>* in, double* out) {
  const int len = static_cast<int>(n);
  const int nc = len / 2 + 1;
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_many_dft_c2r(1, &len, static_cast<int>(count), as_fftw(in), nullptr, 1, nc, out, nullptr, 1,
                                     len, FFTW_ESTIMATE));
}

Plan make_dst_columns(std::size_t n, std::size_t count, double* data) {
  const int len = static_cast<int>(n);
  const fftw_r2r_kind kind = FFTW_RODFT00;
  const int stride = static_cast<int>(count);
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_many_r2r(1, &len, static_cast<int>(count), data, nullptr, stride, 1, data, nullptr, stride, 1,
                                 &kind, FFTW_ESTIMATE));
}

}  // namespace zkb::fft
