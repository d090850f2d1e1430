#pragma once

// Thin RAII layer over FFTW. Planning is serialized through a process-wide
// mutex (the FFTW planner is not thread safe); execution on distinct arrays
// is. All plans use FFTW_ESTIMATE so that the chosen algorithm, and with it
// every rounding, is reproducible run to run.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>

namespace zkb::fft {

std::mutex& planner_mutex();

template <typename T>
class AlignedBuffer {
 public:
  AlignedBuffer() = default;
  explicit AlignedBuffer(std::size_t n) : size_(n), data_(static_cast<T*>(fftw_malloc(sizeof(T) * (n ? n : 1)))) {
    if (!data_) throw std::bad_alloc();
    for (std::size_t i = 0; i < n; ++i) data_[i] = T{};
  }
  ~AlignedBuffer() { fftw_free(data_); }
  AlignedBuffer(AlignedBuffer&& o) noexcept : size_(o.size_), data_(o.data_) {
    o.size_ = 0;
    o.data_ = nullptr;
  }
  AlignedBuffer& operator=(AlignedBuffer&& o) noexcept {
    std::swap(size_, o.size_);
    std::swap(data_, o.data_);
    return *this;
  }
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;

  T* data() { return data_; }
  const T* data() const { return data_; }
  std::size_t size() const { return size_; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  std::span<T> span() { return {data_, size_}; }
  std::span<const T> span() const { return {data_, size_}; }

 private:
  std::size_t size_ = 0;
  T* data_ = nullptr;
};

using RealBuffer = AlignedBuffer<double>;
using ComplexBuffer = AlignedBuffer<std::complex<double>>;

class Plan {
 public:
  Plan() = default;
  explicit Plan(fftw_plan p) : plan_(p) {}
  ~Plan() { reset(); }
  Plan(Plan&& o) noexcept : plan_(o.plan_) { o.plan_ = nullptr; }
  Plan& operator=(Plan&& o) noexcept {
    std::swap(plan_, o.plan_);
    return *this;
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void execute() const { fftw_execute(plan_); }
  fftw_plan get() const { return plan_; }

 private:
  void reset();
  fftw_plan plan_ = nullptr;
};

inline fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

/// `count` contiguous real rows of length n -> `count` rows of n/2+1 complex.
Plan make_r2c_rows(std::size_t n, std::size_t count, double* in, std::complex<double>* out);
/// Inverse of make_r2c_rows (unnormalized; destroys its input).
Plan make_c2r_rows(std::size_t n, std::size_t count, std::complex<double>* in, double* out);
/// In-place type-I DST (RODFT00) of length n along the slow axis of an
/// n x `count` row-major array (stride `count`).
Plan make_dst_columns(std::size_t n, std::size_t count, double* data);

}  // namespace zkb::fft
