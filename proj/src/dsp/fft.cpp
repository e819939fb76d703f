#include "alphaloop/dsp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace alphaloop::dsp {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cplx* p) { return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p)); }

}  // namespace

FftPlan::FftPlan(std::size_t n, Kind kind) : n_(n), kind_(kind) {
  constexpr unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int ni = static_cast<int>(n);
  // FFTW_ESTIMATE never touches the arrays during planning. Plans are
  // out-of-place, matching how they are executed.
  std::vector<cplx> cbuf(n), cout(n);
  std::vector<double> rbuf(n);
  switch (kind) {
    case Kind::Forward:
      plan_ = fftw_plan_dft_1d(ni, as_fftw(cbuf.data()), as_fftw(cout.data()), FFTW_FORWARD, flags);
      break;
    case Kind::Inverse:
      plan_ = fftw_plan_dft_1d(ni, as_fftw(cbuf.data()), as_fftw(cout.data()), FFTW_BACKWARD, flags);
      break;
    case Kind::RealForward:
      plan_ = fftw_plan_dft_r2c_1d(ni, rbuf.data(), as_fftw(cbuf.data()), flags);
      break;
    case Kind::RealInverse:
      plan_ = fftw_plan_dft_c2r_1d(ni, as_fftw(cbuf.data()), rbuf.data(), flags);
      break;
  }
  if (plan_ == nullptr) throw std::runtime_error("FFTW planning failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

std::shared_ptr<const FftPlan> FftPlan::get(std::size_t n, Kind kind) {
  if (n == 0) throw std::invalid_argument("FFT size must be positive");
  // The mutex must outlive the cache, so it is constructed first.
  std::lock_guard lock(planner_mutex());
  static std::map<std::pair<std::size_t, Kind>, std::shared_ptr<const FftPlan>> cache;
  auto& slot = cache[{n, kind}];
  if (!slot) slot = std::shared_ptr<const FftPlan>(new FftPlan(n, kind));
  return slot;
}

void FftPlan::execute(const cplx* in, cplx* out) const {
  if (kind_ != Kind::Forward && kind_ != Kind::Inverse) throw std::logic_error("not a complex plan");
  if (in == out) throw std::logic_error("complex plans are out-of-place");
  fftw_execute_dft(static_cast<fftw_plan>(plan_), as_fftw(in), as_fftw(out));
}

void FftPlan::execute_r2c(const double* in, cplx* out) const {
  if (kind_ != Kind::RealForward) throw std::logic_error("not an r2c plan");
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_), const_cast<double*>(in), as_fftw(out));
}

void FftPlan::execute_c2r(const cplx* in, double* out) const {
  if (kind_ != Kind::RealInverse) throw std::logic_error("not a c2r plan");
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_), as_fftw(in), out);
}

std::vector<cplx> fft(std::span<const cplx> x) {
  std::vector<cplx> out(x.size());
  FftPlan::get(x.size(), FftPlan::Kind::Forward)->execute(x.data(), out.data());
  return out;
}

std::vector<cplx> ifft(std::span<const cplx> x) {
  std::vector<cplx> out(x.size());
  FftPlan::get(x.size(), FftPlan::Kind::Inverse)->execute(x.data(), out.data());
  const double scale = 1.0 / static_cast<double>(x.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<cplx> rfft(std::span<const double> x) {
  std::vector<cplx> out(x.size() / 2 + 1);
  FftPlan::get(x.size(), FftPlan::Kind::RealForward)->execute_r2c(x.data(), out.data());
  return out;
}

std::vector<double> irfft(std::span<const cplx> half_spectrum, std::size_t n) {
  if (half_spectrum.size() != n / 2 + 1) throw std::invalid_argument("irfft: spectrum size mismatch");
  std::vector<cplx> in(half_spectrum.begin(), half_spectrum.end());
  std::vector<double> out(n);
  FftPlan::get(n, FftPlan::Kind::RealInverse)->execute_c2r(in.data(), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= scale;
  return out;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace alphaloop::dsp
