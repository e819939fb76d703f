#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace alphaloop::dsp {

using cplx = std::complex<double>;

/// Cached FFTW plan for one transform size and kind. Plans are created
/// under a global lock and executed on caller-supplied arrays, so a single
/// plan may be shared by concurrent callers.
class FftPlan {
 public:
  enum class Kind { Forward, Inverse, RealForward, RealInverse };

  static std::shared_ptr<const FftPlan> get(std::size_t n, Kind kind);

  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return n_; }

  // Unnormalized transforms. Inverse results are scaled by n.
  void execute(const cplx* in, cplx* out) const;             // Forward / Inverse
  void execute_r2c(const double* in, cplx* out) const;       // RealForward, n/2+1 outputs
  void execute_c2r(const cplx* in, double* out) const;       // RealInverse, may clobber in

 private:
  FftPlan(std::size_t n, Kind kind);
  std::size_t n_;
  Kind kind_;
  void* plan_ = nullptr;
};

std::vector<cplx> fft(std::span<const cplx> x);
/// Inverse DFT normalized by 1/n.
std::vector<cplx> ifft(std::span<const cplx> x);
/// One-sided spectrum of a real sequence: n/2 + 1 bins.
std::vector<cplx> rfft(std::span<const double> x);
/// Inverse of rfft for a length-n real sequence, normalized by 1/n.
std::vector<double> irfft(std::span<const cplx> half_spectrum, std::size_t n);

std::size_t next_pow2(std::size_t n);

}  // namespace alphaloop::dsp
