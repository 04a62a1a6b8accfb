#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace ptsol::detail {
namespace {

// FFTW planning is not thread-safe, executing a plan on new arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    ComplexVector scratch_in(n), scratch_out(n);
    fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                      reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

ComplexVector execute(const ComplexVector& x, int sign) {
  const int n = static_cast<int>(x.size());
  fftw_plan plan = cache().get(n, sign);
  ComplexVector in = x;
  ComplexVector out(n);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

ComplexVector fft_forward(const ComplexVector& x) { return execute(x, FFTW_FORWARD); }

ComplexVector fft_inverse(const ComplexVector& X) {
  ComplexVector out = execute(X, FFTW_BACKWARD);
  out /= static_cast<double>(X.size());
  return out;
}

}  // namespace ptsol::detail
