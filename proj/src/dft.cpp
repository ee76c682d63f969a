#include "uwofdm/dft.hpp"

#include <fftw3.h>

#include <mutex>
#include <numbers>
#include <unordered_map>

namespace uwofdm {

namespace {

// FFTW's unnormalized transforms match the kernel convention exactly:
// FFTW_FORWARD is e^{-j 2 pi k l / N}, FFTW_BACKWARD the conjugate without
// the 1/N factor. Plan creation is not thread safe, execution via the
// new-array interface is; plans are cached per (N, direction) and created
// with FFTW_UNALIGNED so they accept any caller buffer.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  void execute(int n, int sign, const Complex* in, Complex* out) {
    fftw_plan plan;
    {
      std::scoped_lock lock(mutex_);
      auto& slot = plans_[key(n, sign)];
      if (!slot) {
        std::vector<Complex> a(n), b(n);
        slot = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                reinterpret_cast<fftw_complex*>(b.data()), sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
      }
      plan = slot;
    }
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [k, p] : plans_)
      if (p) fftw_destroy_plan(p);
  }
  static long key(int n, int sign) { return static_cast<long>(n) * 4 + (sign == FFTW_FORWARD ? 0 : 1); }

  std::mutex mutex_;
  std::unordered_map<long, fftw_plan> plans_;
};

void check_length(const CVec& x) {
  if (x.size() == 0) throw std::invalid_argument("dft: empty input");
}

}  // namespace

CVec dft(const CVec& x) {
  check_length(x);
  CVec out(x.size());
  PlanCache::instance().execute(static_cast<int>(x.size()), FFTW_FORWARD, x.data(), out.data());
  return out;
}

CVec idft(const CVec& x_tilde) {
  check_length(x_tilde);
  CVec out(x_tilde.size());
  PlanCache::instance().execute(static_cast<int>(x_tilde.size()), FFTW_BACKWARD, x_tilde.data(),
                                out.data());
  out /= static_cast<double>(x_tilde.size());
  return out;
}

CMat dft_matrix(int n) {
  CMat f(n, n);
  const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      f(k, l) = std::polar(1.0, -w * static_cast<double>(k) * static_cast<double>(l));
  return f;
}

CMat idft_matrix(int n) {
  return dft_matrix(n).adjoint() / static_cast<double>(n);
}

}  // namespace uwofdm
